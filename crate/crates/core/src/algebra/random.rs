use num_complex::Complex64;

use super::{AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::rng::SampleRng;

/// Element with i.i.d. standard complex Gaussian entries, times `scale`.
pub fn random_element(algebra: AlgebraDescriptor, scale: f64, seed: u64) -> Result<Element> {
    let mut rng = SampleRng::new(seed);
    gaussian_element(algebra, scale, &mut rng)
}

pub(crate) fn gaussian_element(
    algebra: AlgebraDescriptor,
    scale: f64,
    rng: &mut SampleRng,
) -> Result<Element> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Validation(format!("scale must be positive, got {scale}")));
    }
    let data = (0..algebra.len()).map(|_| rng.complex_normal() * scale).collect();
    Element::new(algebra, data)
}

/// Point of the closed ball `‖x‖ ≤ radius` in the algebra's own norm.
///
/// The direction is a normalized Gaussian; the radius follows the law of a
/// uniform ball of real dimension `k = 2·len`, i.e. `radius · U^{1/k}`.
pub fn random_in_ball(algebra: AlgebraDescriptor, radius: f64, rng: &mut SampleRng) -> Result<Element> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Validation(format!("radius must be positive, got {radius}")));
    }
    let direction = gaussian_element(algebra, 1.0, rng)?;
    let norm = direction.norm()?;
    let k = 2.0 * algebra.len() as f64;
    let r = radius * rng.uniform().powf(1.0 / k);
    direction.scale_real(r / norm)
}

/// Haar-like random unitary: Gram–Schmidt on the columns of a Gaussian
/// matrix. The implied triangular factor has a positive real diagonal, which
/// fixes the column phases.
pub fn random_unitary(n: usize, seed: u64) -> Result<Element> {
    let algebra = AlgebraDescriptor::matrix(n)?;
    let g = random_element(algebra, 1.0, seed)?;
    let mut cols: Vec<Vec<Complex64>> =
        (0..n).map(|j| (0..n).map(|i| g.data()[i * n + j]).collect()).collect();
    for j in 0..n {
        // Two passes of modified Gram–Schmidt keep orthogonality at rounding level.
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Domain("Gaussian sample was numerically singular".into()));
        }
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * n + j] = *z;
        }
    }
    Element::new(algebra, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unit;

    #[test]
    fn deterministic_in_seed() {
        let alg = AlgebraDescriptor::matrix(3).unwrap();
        assert_eq!(random_element(alg, 1.0, 5).unwrap(), random_element(alg, 1.0, 5).unwrap());
        assert_ne!(random_element(alg, 1.0, 5).unwrap(), random_element(alg, 1.0, 6).unwrap());
    }

    #[test]
    fn unitary_is_orthonormal() {
        for seed in 0..20 {
            let u = random_unitary(3, seed).unwrap();
            let gram = u.adjoint().unwrap().matmul(&u).unwrap();
            let e = unit(u.algebra()).unwrap();
            assert!(gram.distance(&e).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn norm_is_homogeneous_in_scale() {
        let alg = AlgebraDescriptor::matrix(4).unwrap();
        let a = random_element(alg, 1.0, 8).unwrap().norm().unwrap();
        let b = random_element(alg, 2.5, 8).unwrap().norm().unwrap();
        assert!((b / a - 2.5).abs() < 1e-12);
    }

    #[test]
    fn ball_samples_respect_radius() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let mut rng = SampleRng::new(1);
        for _ in 0..200 {
            let x = random_in_ball(alg, 3.0, &mut rng).unwrap();
            assert!(x.norm().unwrap() <= 3.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_bad_scale() {
        let alg = AlgebraDescriptor::diagonal(2).unwrap();
        assert!(random_element(alg, 0.0, 1).is_err());
        assert!(random_element(alg, f64::NAN, 1).is_err());
    }
}
