use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{random_in_ball, ComplexScalar, Element};
use crate::error::{Error, Result};
use crate::law::{mixed_violation, CheckReport, LawCheck, MaxTracker};
use crate::mappings::{MappingHandle, TORUS_PROBES};
use crate::rng::SampleRng;

use super::Sampling;

const LINEARITY_STREAM: u64 = 0x11AE;

/// `λ = M · cos(t) · μ` with `M` the smallest integer above `2|λ|`,
/// `t ∈ (π/3, π/2)` and `|μ| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarDecomposition {
    pub m: u64,
    pub t: f64,
    pub mu: ComplexScalar,
}

impl ScalarDecomposition {
    /// `(M/2)(e^{it}μ + e^{−it}μ)`.
    pub fn reconstruct(&self) -> ComplexScalar {
        let e = Complex64::from_polar(1.0, self.t);
        self.m as f64 / 2.0 * (e * self.mu + e.conj() * self.mu)
    }
}

pub fn decompose_scalar(lambda: ComplexScalar) -> Result<ScalarDecomposition> {
    let modulus = lambda.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return Err(Error::Domain(format!("cannot decompose λ = {lambda}")));
    }
    let m = (2.0 * modulus).floor() + 1.0;
    if m > u64::MAX as f64 {
        return Err(Error::Domain(format!("|λ| = {modulus} is too large")));
    }
    let t = (modulus / m).acos();
    debug_assert!(t > PI / 3.0 && t < PI / 2.0);
    Ok(ScalarDecomposition { m: m as u64, t, mu: lambda / modulus })
}

/// `‖f(μx) − μf(x)‖ / (1 + ‖μf(x)‖)`.
pub fn torus_violation(f: &MappingHandle, mu: ComplexScalar, x: &Element) -> Result<f64> {
    let rhs = f.eval(x)?.scale(mu)?;
    Ok(mixed_violation(f.eval(&x.scale(mu)?)?.distance(&rhs)?, rhs.norm()?))
}

fn rel(lhs: &Element, rhs: &Element) -> Result<f64> {
    Ok(mixed_violation(lhs.distance(rhs)?, rhs.norm()?))
}

fn sample_row(f: &MappingHandle, sampling: &Sampling, index: u64) -> Result<[f64; 4]> {
    let mut rng = SampleRng::derive(sampling.seed, LINEARITY_STREAM, index);
    let x = random_in_ball(f.domain(), sampling.radius, &mut rng)?;
    let y = random_in_ball(f.domain(), sampling.radius, &mut rng)?;
    let fx = f.eval(&x)?;

    let halving = rel(&fx, &f.eval(&x.scale_real(0.5)?)?.scale_real(2.0)?)?;
    let additivity = rel(&f.eval(&x.add(&y)?)?, &fx.add(&f.eval(&y)?)?)?;

    let mut torus = MaxTracker::default();
    for mu in TORUS_PROBES.into_iter().chain([rng.unit_phase()]) {
        torus.push(torus_violation(f, mu, &x)?);
    }

    let lambda = rng.complex_normal() * 4.0;
    let homogeneity = if lambda == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        let d = decompose_scalar(lambda)?;
        let e = Complex64::from_polar(1.0, d.t);
        let half_m = d.m as f64 / 2.0;
        let rhs = fx.scale(e * d.mu)?.add(&fx.scale(e.conj() * d.mu)?)?.scale_real(half_m)?;
        rel(&f.eval(&x.scale(lambda)?)?, &rhs)?
    };
    Ok([halving, additivity, torus.0, homogeneity])
}

/// Five laws that together force ℂ-linearity of a map:
/// `f(0) = 0`, `f(y) = 2f(y/2)`, additivity, `f(μx) = μf(x)` on the circle,
/// and `f(λx) = λf(x)` checked through [`decompose_scalar`].
pub fn linearity_certificate(f: &MappingHandle, sampling: &Sampling, tol: f64) -> Result<CheckReport> {
    sampling.validate()?;
    let zero = f.eval(&Element::zeros(f.domain()))?.norm()?;
    let rows = (0..sampling.samples as u64)
        .into_par_iter()
        .map(|i| sample_row(f, sampling, i))
        .collect::<Result<Vec<_>>>()?;
    let mut maxima = [MaxTracker::default(); 4];
    for row in rows {
        for (m, v) in maxima.iter_mut().zip(row) {
            m.push(v);
        }
    }
    let names = ["halving", "additivity", "torus_homogeneity", "complex_homogeneity"];
    let mut laws = vec![LawCheck::at_most("zero_at_origin", zero, tol)];
    laws.extend(names.iter().zip(maxima).map(|(n, m)| LawCheck::at_most(*n, m.0, tol)));
    Ok(CheckReport::new("linearity", laws))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_unitary, unit, AlgebraDescriptor};
    use crate::mappings::{conjugation_map, make_exact_homomorphism, zero_map};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_scalar(c(1.0, 0.0)).unwrap();
        assert_eq!(d.m, 3);
        assert!((d.t.cos() - 1.0 / 3.0).abs() < 1e-15 && d.mu == c(1.0, 0.0));
        let d = decompose_scalar(c(-2.0, 0.0)).unwrap();
        assert_eq!(d.m, 5);
        assert!((d.t.cos() - 0.4).abs() < 1e-15 && d.mu == c(-1.0, 0.0));
        let d = decompose_scalar(c(0.0, 0.5)).unwrap();
        assert_eq!(d.m, 2);
        assert!((d.t.cos() - 0.25).abs() < 1e-15 && d.mu == c(0.0, 1.0));
        assert!(matches!(decompose_scalar(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn decomposition_reconstructs() {
        let mut rng = SampleRng::new(77);
        for _ in 0..1000 {
            let lambda = rng.complex_normal() * 10.0;
            let d = decompose_scalar(lambda).unwrap();
            assert!(d.t > PI / 3.0 && d.t < PI / 2.0);
            assert!(d.m as f64 <= 2.0 * lambda.norm() + 1.0);
            assert!((d.m as f64 * d.t.cos() * d.mu - lambda).norm() <= 1e-13);
            assert!((d.reconstruct() - lambda).norm() <= 1e-13);
        }
    }

    #[test]
    fn exact_linear_map_passes() {
        let h =
            make_exact_homomorphism(&random_unitary(3, 5).unwrap(), &random_unitary(3, 6).unwrap()).unwrap();
        let report = linearity_certificate(&h, &Sampling::new(300, 1), 1e-11).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.laws.len(), 5);
    }

    #[test]
    fn zero_map_passes() {
        let alg = AlgebraDescriptor::module(3).unwrap();
        let report = linearity_certificate(&zero_map(alg, alg), &Sampling::new(50, 1), 1e-15).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn conjugation_fails_torus_law() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let f = conjugation_map(alg);
        let report = linearity_certificate(&f, &Sampling::new(50, 1), 1e-11).unwrap();
        assert!(!report.law("torus_homogeneity").unwrap().pass);
        assert!(report.law("halving").unwrap().pass && report.law("additivity").unwrap().pass);
        let e11 = Element::basis(alg, 0).unwrap();
        assert!(torus_violation(&f, c(0.0, 1.0), &e11).unwrap() >= 1.0);
        assert!(torus_violation(&f, c(0.0, 1.0), &unit(alg).unwrap()).unwrap() >= 1.0);
    }
}
