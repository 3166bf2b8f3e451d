//! Executable axiom suites for the ternary structure and for the binary
//! C*-algebra induced by a unit.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::random::gaussian_element;
use super::{ternary_product, unit, AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::law::{mixed_violation, LawCheck, MaxTracker};
use crate::rng::SampleRng;

const AXIOM_STREAM: u64 = 0xA710;
const INDUCED_STREAM: u64 = 0xA711;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomLaw {
    /// `[x, y, [z, w, v]] = [x, [w, z, y], v]`
    AssociativityMiddle,
    /// `[x, y, [z, w, v]] = [[x, y, z], w, v]`
    AssociativityOuter,
    LinearFirst,
    ConjugateLinearMiddle,
    LinearThird,
    /// `‖[x, y, z]‖ ≤ ‖x‖‖y‖‖z‖`
    Submultiplicative,
    /// `‖[x, x, x]‖ = ‖x‖³`
    CStarIdentity,
}

impl AxiomLaw {
    pub const ALL: [AxiomLaw; 7] = [
        AxiomLaw::AssociativityMiddle,
        AxiomLaw::AssociativityOuter,
        AxiomLaw::LinearFirst,
        AxiomLaw::ConjugateLinearMiddle,
        AxiomLaw::LinearThird,
        AxiomLaw::Submultiplicative,
        AxiomLaw::CStarIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomLaw::AssociativityMiddle => "associativity_middle",
            AxiomLaw::AssociativityOuter => "associativity_outer",
            AxiomLaw::LinearFirst => "linear_first_slot",
            AxiomLaw::ConjugateLinearMiddle => "conjugate_linear_middle_slot",
            AxiomLaw::LinearThird => "linear_third_slot",
            AxiomLaw::Submultiplicative => "submultiplicative",
            AxiomLaw::CStarIdentity => "cstar_identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub algebra: AlgebraDescriptor,
    pub samples: usize,
    pub laws: Vec<LawCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.pass)
    }

    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == name)
    }
}

fn rel(lhs: &Element, rhs: &Element) -> Result<f64> {
    Ok(mixed_violation(lhs.distance(rhs)?, rhs.norm()?))
}

/// Violations of every [`AxiomLaw`] on one 5-tuple, in `AxiomLaw::ALL` order.
/// `lambda` is the scalar used by the three slot-linearity laws.
pub fn axiom_violations(
    x: &Element,
    y: &Element,
    z: &Element,
    w: &Element,
    v: &Element,
    lambda: Complex64,
) -> Result<[f64; 7]> {
    let xyz = ternary_product(x, y, z)?;
    let zwv = ternary_product(z, w, v)?;
    let left = ternary_product(x, y, &zwv)?;
    let middle = ternary_product(x, &ternary_product(w, z, y)?, v)?;
    let outer = ternary_product(&xyz, w, v)?;

    let first = rel(
        &ternary_product(&x.scale(lambda)?.add(w)?, y, z)?,
        &xyz.scale(lambda)?.add(&ternary_product(w, y, z)?)?,
    )?;
    let mid = rel(
        &ternary_product(x, &y.scale(lambda)?.add(w)?, z)?,
        &xyz.scale(lambda.conj())?.add(&ternary_product(x, w, z)?)?,
    )?;
    let third = rel(
        &ternary_product(x, y, &z.scale(lambda)?.add(w)?)?,
        &xyz.scale(lambda)?.add(&ternary_product(x, y, w)?)?,
    )?;

    let bound = x.norm()? * y.norm()? * z.norm()?;
    let submult = (xyz.norm()? - bound).max(0.0) / (1.0 + bound);

    let cube = x.norm()?.powi(3);
    let cstar = (ternary_product(x, x, x)?.norm()? - cube).abs() / (1.0 + cube);

    Ok([rel(&left, &middle)?, rel(&left, &outer)?, first, mid, third, submult, cstar])
}

fn reduce<const N: usize>(rows: Vec<[f64; N]>) -> [f64; N] {
    let mut maxima = [MaxTracker::default(); N];
    for row in rows {
        for (m, v) in maxima.iter_mut().zip(row) {
            m.push(v);
        }
    }
    maxima.map(|m| m.0)
}

/// Checks every ternary axiom on `samples` seeded random 5-tuples.
pub fn check_axioms(algebra: AlgebraDescriptor, samples: usize, tol: f64, seed: u64) -> Result<AxiomReport> {
    let algebra = algebra.validated()?;
    if samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::derive(seed, AXIOM_STREAM, i);
            let mut draw = || gaussian_element(algebra, 1.0, &mut rng);
            let (x, y, z, w, v) = (draw()?, draw()?, draw()?, draw()?, draw()?);
            let lambda = rng.complex_normal();
            axiom_violations(&x, &y, &z, &w, &v, lambda)
        })
        .collect::<Result<Vec<_>>>()?;
    let maxima = reduce(rows);
    Ok(AxiomReport {
        algebra,
        samples,
        laws: AxiomLaw::ALL
            .iter()
            .zip(maxima)
            .map(|(law, m)| LawCheck::at_most(law.name(), m, tol))
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedLaw {
    /// `(x∘y)∘z = x∘(y∘z)` with `x∘y = [x, e, y]`
    Associativity,
    /// `‖x*‖ = ‖x‖` with `x* = [e, x, e]`
    IsometricInvolution,
    /// `(x∘y)* = y*∘x*`
    AntiMultiplicative,
    /// `‖x*∘x‖ = ‖x‖²`
    CStarIdentity,
}

impl InducedLaw {
    pub const ALL: [InducedLaw; 4] = [
        InducedLaw::Associativity,
        InducedLaw::IsometricInvolution,
        InducedLaw::AntiMultiplicative,
        InducedLaw::CStarIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InducedLaw::Associativity => "induced_associativity",
            InducedLaw::IsometricInvolution => "induced_isometric_involution",
            InducedLaw::AntiMultiplicative => "induced_anti_multiplicative",
            InducedLaw::CStarIdentity => "induced_cstar_identity",
        }
    }
}

fn unit_or_err(algebra: AlgebraDescriptor) -> Result<Element> {
    unit(algebra)
        .ok_or(Error::Unsupported { descriptor: algebra, reason: "the induced C*-algebra needs a unit" })
}

/// Violations of the induced C*-algebra laws on `(x, y, z)`, in `InducedLaw::ALL` order.
pub fn induced_cstar_violations(x: &Element, y: &Element, z: &Element) -> Result<[f64; 4]> {
    let e = unit_or_err(x.algebra())?;
    let circ = |a: &Element, b: &Element| ternary_product(a, &e, b);
    let star = |a: &Element| ternary_product(&e, a, &e);

    let xy = circ(x, y)?;
    let assoc = rel(&circ(&xy, z)?, &circ(x, &circ(y, z)?)?)?;

    let nx = x.norm()?;
    let xs = star(x)?;
    let involution = (xs.norm()? - nx).abs() / (1.0 + nx);

    let anti = rel(&star(&xy)?, &circ(&star(y)?, &xs)?)?;

    let sq = nx * nx;
    let cstar = (circ(&xs, x)?.norm()? - sq).abs() / (1.0 + sq);
    Ok([assoc, involution, anti, cstar])
}

/// Checks the unital C*-algebra obtained from `x∘y = [x, e, y]`, `x* = [e, x, e]`.
pub fn induced_cstar_check(
    algebra: AlgebraDescriptor,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<AxiomReport> {
    let algebra = algebra.validated()?;
    unit_or_err(algebra)?;
    if samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::derive(seed, INDUCED_STREAM, i);
            let x = gaussian_element(algebra, 1.0, &mut rng)?;
            let y = gaussian_element(algebra, 1.0, &mut rng)?;
            let z = gaussian_element(algebra, 1.0, &mut rng)?;
            induced_cstar_violations(&x, &y, &z)
        })
        .collect::<Result<Vec<_>>>()?;
    let maxima = reduce(rows);
    Ok(AxiomReport {
        algebra,
        samples,
        laws: InducedLaw::ALL
            .iter()
            .zip(maxima)
            .map(|(law, m)| LawCheck::at_most(law.name(), m, tol))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tuple_has_zero_violations() {
        for alg in [
            AlgebraDescriptor::matrix(3).unwrap(),
            AlgebraDescriptor::diagonal(4).unwrap(),
            AlgebraDescriptor::module(5).unwrap(),
        ] {
            let o = Element::zeros(alg);
            let v = axiom_violations(&o, &o, &o, &o, &o, Complex64::new(0.3, 0.4)).unwrap();
            assert_eq!(v, [0.0; 7]);
        }
    }

    #[test]
    fn matrix_axioms_hold() {
        let report = check_axioms(AlgebraDescriptor::matrix(3).unwrap(), 1000, 1e-9, 42).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn module_axioms_hold() {
        let report = check_axioms(AlgebraDescriptor::module(5).unwrap(), 1000, 1e-9, 42).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn induced_laws_matrix_and_diagonal() {
        let m = induced_cstar_check(AlgebraDescriptor::matrix(2).unwrap(), 500, 1e-10, 1).unwrap();
        assert!(m.passed(), "{m:?}");
        let d = induced_cstar_check(AlgebraDescriptor::diagonal(4).unwrap(), 500, 1e-12, 1).unwrap();
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn induced_laws_exact_on_unit() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let e = unit(alg).unwrap();
        assert_eq!(induced_cstar_violations(&e, &e, &e).unwrap(), [0.0; 4]);
    }

    #[test]
    fn induced_check_rejects_non_unital() {
        let err = induced_cstar_check(AlgebraDescriptor::module(3).unwrap(), 10, 1e-9, 0);
        assert!(matches!(err, Err(Error::Unsupported { .. })));
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(check_axioms(AlgebraDescriptor::matrix(2).unwrap(), 0, 1e-9, 0).is_err());
    }
}
