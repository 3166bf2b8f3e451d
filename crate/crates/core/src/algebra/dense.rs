//! Small dense kernels on row-major square complex matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const POWER_REL_TOL: f64 = 1e-13;
pub(crate) const POWER_MAX_ITER: usize = 10_000;

/// `a · b`
pub(crate) fn matmul(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            for (o, &bkj) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// `a · b*`
pub(crate) fn matmul_adj(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[i * n + k] * b[j * n + k].conj();
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// `a*` (conjugate transpose)
pub(crate) fn adjoint(n: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
    out
}

fn is_diagonal(n: usize, a: &[Complex64]) -> bool {
    (0..n).all(|i| (0..n).all(|j| i == j || a[i * n + j] == Complex64::new(0.0, 0.0)))
}

/// Fixed start vector for the power iteration. Generic (no structured zeros),
/// so it is not orthogonal to the dominant singular vector of structured
/// inputs such as `[[1, -1], [1, -1]]`.
fn start_vector(n: usize) -> Vec<Complex64> {
    let mut rng = crate::rng::SampleRng::new(0x005E_ED0F_9A7E);
    let mut v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(1.0, 0.0) + rng.complex_normal() * 0.5).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Largest singular value, by power iteration on `a* a`.
///
/// Diagonal inputs short-circuit to the largest entry modulus. The input is
/// rescaled by its largest entry before forming `a* a` so that tiny or huge
/// matrices neither underflow nor overflow.
pub(crate) fn operator_norm(n: usize, a: &[Complex64]) -> Result<f64> {
    let peak = a.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    if is_diagonal(n, a) {
        return Ok((0..n).map(|i| a[i * n + i].norm()).fold(0.0, f64::max));
    }
    let scaled: Vec<Complex64> = a.iter().map(|z| z / peak).collect();
    let gram = matmul(n, &adjoint(n, &scaled), &scaled);

    let mut v = start_vector(n);
    let mut lambda_prev = f64::NAN;
    let mut change = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            w[i] = (0..n).map(|j| gram[i * n + j] * v[j]).sum();
        }
        let lambda: f64 = v.iter().zip(&w).map(|(vi, wi)| (vi.conj() * wi).re).sum();
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            return Ok(0.0);
        }
        change = (lambda - lambda_prev).abs() / lambda.abs().max(f64::MIN_POSITIVE);
        if change <= POWER_REL_TOL {
            return Ok(lambda.max(0.0).sqrt() * peak);
        }
        lambda_prev = lambda;
        v = w.into_iter().map(|z| z / wn).collect();
    }
    Err(Error::NoConvergence { iterations: POWER_MAX_ITER, last_change: change })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norm_of_rank_one_orthogonal_to_ones() {
        // a* a has its top eigenvector (1, -1)/√2, orthogonal to all-ones.
        let a = [c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        assert!((operator_norm(2, &a).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn norm_of_diagonal_is_exact() {
        let a = [c(0.0, 3.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(operator_norm(2, &a).unwrap(), 3.0);
    }

    #[test]
    fn norm_survives_tiny_scale() {
        let a = [c(1e-200, 0.0), c(2e-200, 0.0), c(0.0, 0.0), c(1e-200, 1e-200)];
        let big = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)];
        let ratio = operator_norm(2, &a).unwrap() / operator_norm(2, &big).unwrap();
        assert!((ratio / 1e-200 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matmul_adj_matches_composition() {
        let a = [c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(0.0, 1.0)];
        let b = [c(-1.0, 0.5), c(2.0, 2.0), c(0.0, -3.0), c(1.0, 0.0)];
        let direct = matmul_adj(2, &a, &b);
        let composed = matmul(2, &a, &adjoint(2, &b));
        for (x, y) in direct.iter().zip(&composed) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
