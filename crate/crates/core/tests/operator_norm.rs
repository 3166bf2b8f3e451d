mod support;

use num_complex::Complex64;
use support::jacobi::singular_values;
use ternary_stability::algebra::{random_element, random_unitary, AlgebraDescriptor, Element};

fn rel_gap(n: usize, data: Vec<Complex64>) -> f64 {
    let x = Element::new(AlgebraDescriptor::matrix(n).unwrap(), data.clone()).unwrap();
    let oracle = singular_values(n, &data)[0];
    (x.norm().unwrap() - oracle).abs() / oracle.max(f64::MIN_POSITIVE)
}

#[test]
fn jacobi_recovers_known_spectrum() {
    let c = |re: f64| Complex64::new(re, 0.0);
    let sv = singular_values(2, &[c(3.0), c(0.0), c(0.0), c(-5.0)]);
    assert_eq!(sv, vec![5.0, 3.0]);
    // Rank one: [1 1; 1 1] has singular values 2 and 0.
    let sv = singular_values(2, &[c(1.0); 4]);
    assert!((sv[0] - 2.0).abs() < 1e-14 && sv[1].abs() < 1e-14);
}

#[test]
fn operator_norm_matches_svd_on_gaussian_matrices() {
    for n in 1..=8 {
        for seed in 0..40u64 {
            let x =
                random_element(AlgebraDescriptor::matrix(n).unwrap(), 1.0, 1000 * n as u64 + seed).unwrap();
            let gap = rel_gap(n, x.data().to_vec());
            assert!(gap <= 1e-10, "n={n} seed={seed}: relative gap {gap:e}");
        }
    }
}

#[test]
fn operator_norm_matches_svd_on_hard_spectra() {
    for n in 2..=8 {
        // Nilpotent shift: norm 1, spectral radius 0.
        let mut shift = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n - 1 {
            shift[i * n + i + 1] = Complex64::new(1.0, 0.0);
        }
        assert!(rel_gap(n, shift) <= 1e-10);

        // All singular values equal.
        let u = random_unitary(n, 7 + n as u64).unwrap();
        let scaled: Vec<Complex64> = u.data().iter().map(|z| z * 3.0).collect();
        assert!(rel_gap(n, scaled) <= 1e-10);

        // Separated and nearly tied top pairs, rotated by unitaries. Power
        // iteration resolves the first to 1e-10; on a tie of relative width δ
        // its Rayleigh quotient can stall anywhere in [σ₂, σ₁], so the error
        // is one-sided and at most δ.
        let v = random_unitary(n, 99 + n as u64).unwrap();
        for (second, allowed) in [(0.9, 1e-10), (1.0 - 1e-9, 1e-9)] {
            let mut d = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                let s = match i {
                    0 => 1.0,
                    1 => second,
                    _ => 0.5,
                };
                d[i * n + i] = Complex64::new(s, 0.0);
            }
            let m = Element::new(AlgebraDescriptor::matrix(n).unwrap(), d).unwrap();
            let rotated = u.matmul(&m).unwrap().matmul(&v).unwrap();
            let data = rotated.data().to_vec();
            let oracle = singular_values(n, &data)[0];
            assert!(rotated.norm().unwrap() <= oracle * (1.0 + 1e-12));
            let gap = rel_gap(n, data);
            assert!(gap <= allowed, "n={n} second={second}: relative gap {gap:e}");
        }
    }
}
