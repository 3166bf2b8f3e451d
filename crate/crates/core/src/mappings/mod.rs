//! Mappings between algebras: exact homomorphisms and derivations, their
//! controlled perturbations, and the defect functionals that measure how far
//! a mapping is from solving the Cauchy-Jensen equation.

mod defect;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{ternary_product, unit, AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::law::mixed_violation;
use crate::rng::SampleRng;

pub use defect::{
    cauchy_jensen_defect, control_value, derivation_defect, estimate_theta, homomorphism_defect,
    theta_witness, ControlForm, DefectSample, TORUS_PROBES,
};

type EvalFn = dyn Fn(&Element) -> Result<Element> + Send + Sync;

/// Number of seeded probes used to confirm exact constructions.
const CONSTRUCTION_PROBES: u64 = 8;
const CONSTRUCTION_TOL: f64 = 1e-10;
const CONSTRUCTION_SEED: u64 = 0xC0_4E57;

/// A pure, deterministic map between two algebras.
///
/// Cloning is cheap; the evaluation closure is shared. Handles are `Send` and
/// `Sync` and may be evaluated concurrently.
#[derive(Clone)]
pub struct MappingHandle {
    domain: AlgebraDescriptor,
    codomain: AlgebraDescriptor,
    label: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for MappingHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MappingHandle")
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl MappingHandle {
    /// Wraps a black-box map. Fails unless `f(0) = 0` exactly.
    pub fn from_fn<F>(
        domain: AlgebraDescriptor,
        codomain: AlgebraDescriptor,
        label: impl Into<String>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&Element) -> Result<Element> + Send + Sync + 'static,
    {
        let handle = Self::from_fn_unchecked(domain, codomain, label, f);
        let at_zero = handle.eval(&Element::zeros(domain))?;
        if !at_zero.is_zero() {
            return Err(Error::Validation(format!("mapping `{}` does not vanish at 0", handle.label)));
        }
        Ok(handle)
    }

    /// Wraps a map without checking `f(0) = 0`. Intended for synthetic test
    /// inputs such as constant maps.
    pub fn from_fn_unchecked<F>(
        domain: AlgebraDescriptor,
        codomain: AlgebraDescriptor,
        label: impl Into<String>,
        f: F,
    ) -> Self
    where
        F: Fn(&Element) -> Result<Element> + Send + Sync + 'static,
    {
        MappingHandle { domain, codomain, label: label.into(), eval: Arc::new(f) }
    }

    pub fn domain(&self) -> AlgebraDescriptor {
        self.domain
    }

    pub fn codomain(&self) -> AlgebraDescriptor {
        self.codomain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &Element) -> Result<Element> {
        if x.algebra() != self.domain {
            return Err(Error::shape(self.domain, x.algebra()));
        }
        let y = (self.eval)(x)?;
        if y.algebra() != self.codomain {
            return Err(Error::shape(self.codomain, y.algebra()));
        }
        Ok(y)
    }

    /// Relabels the handle.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

pub fn identity(algebra: AlgebraDescriptor) -> MappingHandle {
    MappingHandle::from_fn_unchecked(algebra, algebra, "identity", |x| Ok(x.clone()))
}

pub fn zero_map(domain: AlgebraDescriptor, codomain: AlgebraDescriptor) -> MappingHandle {
    MappingHandle::from_fn_unchecked(domain, codomain, "zero", move |_| Ok(Element::zeros(codomain)))
}

/// Entrywise conjugation: additive and real-homogeneous but conjugate-linear.
pub fn conjugation_map(algebra: AlgebraDescriptor) -> MappingHandle {
    MappingHandle::from_fn_unchecked(algebra, algebra, "entrywise_conjugation", |x| Ok(x.conj()))
}

fn unitary_defect(u: &Element) -> Result<f64> {
    let e = unit(u.algebra())
        .ok_or(Error::Unsupported { descriptor: u.algebra(), reason: "unitarity needs a unit" })?;
    u.adjoint()?.matmul(u)?.distance(&e)
}

fn confirm_on_probes(
    handle: &MappingHandle,
    what: &str,
    defect: impl Fn(&MappingHandle, &Element, &Element, &Element) -> Result<Element>,
) -> Result<()> {
    let mut rng = SampleRng::new(CONSTRUCTION_SEED);
    for _ in 0..CONSTRUCTION_PROBES {
        let x = crate::algebra::random_in_ball(handle.domain, 1.0, &mut rng)?;
        let y = crate::algebra::random_in_ball(handle.domain, 1.0, &mut rng)?;
        let z = crate::algebra::random_in_ball(handle.domain, 1.0, &mut rng)?;
        let d = defect(handle, &x, &y, &z)?.norm()?;
        let scale = handle.eval(&ternary_product(&x, &y, &z)?)?.norm()?;
        if mixed_violation(d, scale) > CONSTRUCTION_TOL {
            return Err(Error::Validation(format!(
                "{what} identity fails on a construction probe (defect {d:e})"
            )));
        }
    }
    Ok(())
}

/// `H(x) = u·x·v` for unitaries `u`, `v`: a ternary homomorphism of
/// MatrixConjugation(n), since `(u x v)(u y v)* (u z v) = u x y* z v`.
pub fn make_exact_homomorphism(u: &Element, v: &Element) -> Result<MappingHandle> {
    let algebra = u.algebra();
    if !matches!(algebra, AlgebraDescriptor::MatrixConjugation(_)) {
        return Err(Error::Unsupported {
            descriptor: algebra,
            reason: "u·x·v homomorphisms need a matrix algebra",
        });
    }
    if v.algebra() != algebra {
        return Err(Error::shape(algebra, v.algebra()));
    }
    for (name, m) in [("u", u), ("v", v)] {
        let d = unitary_defect(m)?;
        if d > 1e-12 {
            return Err(Error::Validation(format!("{name} is not unitary (‖{name}*{name} − I‖ = {d:e})")));
        }
    }
    let (u, v) = (u.clone(), v.clone());
    let handle =
        MappingHandle::from_fn_unchecked(algebra, algebra, "u·x·v", move |x| u.matmul(x)?.matmul(&v));
    confirm_on_probes(&handle, "homomorphism", homomorphism_defect)?;
    Ok(handle)
}

/// `H(x)ᵢ = αᵢ · x_{σ(i)}` on PointwiseDiagonal(d), with `σ` a permutation
/// and `|αᵢ| = 1`.
pub fn make_pointwise_homomorphism(
    d: usize,
    permutation: &[usize],
    phases: &[Complex64],
) -> Result<MappingHandle> {
    let algebra = AlgebraDescriptor::diagonal(d)?;
    if permutation.len() != d || phases.len() != d {
        return Err(Error::shape(format!("{d} permutation entries and phases"), permutation.len()));
    }
    let mut seen = vec![false; d];
    for &p in permutation {
        if p >= d || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Validation(format!("{permutation:?} is not a permutation")));
        }
    }
    if let Some(a) = phases.iter().find(|a| (a.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::Validation(format!("phase {a} is not unimodular")));
    }
    let (perm, alpha) = (permutation.to_vec(), phases.to_vec());
    let handle = MappingHandle::from_fn_unchecked(algebra, algebra, "α·x∘σ", move |x| {
        let data = perm.iter().zip(&alpha).map(|(&s, a)| a * x.data()[s]).collect();
        Element::new(algebra, data)
    });
    confirm_on_probes(&handle, "homomorphism", homomorphism_defect)?;
    Ok(handle)
}

/// `H(x) = U·x` on InnerProductModule(d) for a unitary `U` of order `d`:
/// `⟨Ux, Uy⟩Uz = U⟨x, y⟩z`.
pub fn make_module_homomorphism(u: &Element) -> Result<MappingHandle> {
    let AlgebraDescriptor::MatrixConjugation(d) = u.algebra() else {
        return Err(Error::Unsupported {
            descriptor: u.algebra(),
            reason: "the module action needs a unitary matrix",
        });
    };
    let d_u = unitary_defect(u)?;
    if d_u > 1e-12 {
        return Err(Error::Validation(format!("u is not unitary (‖u*u − I‖ = {d_u:e})")));
    }
    let algebra = AlgebraDescriptor::module(d)?;
    let u = u.clone();
    let handle = MappingHandle::from_fn_unchecked(algebra, algebra, "U·x", move |x| {
        let a = u.data();
        let v = x.data();
        let data = (0..d).map(|i| (0..d).map(|j| a[i * d + j] * v[j]).sum()).collect();
        Element::new(algebra, data)
    });
    confirm_on_probes(&handle, "homomorphism", homomorphism_defect)?;
    Ok(handle)
}

/// `δ(x) = a·x − x·a` for skew-Hermitian `a`: a ternary derivation of
/// MatrixConjugation(n).
pub fn make_exact_derivation(a: &Element) -> Result<MappingHandle> {
    let algebra = a.algebra();
    if !matches!(algebra, AlgebraDescriptor::MatrixConjugation(_)) {
        return Err(Error::Unsupported {
            descriptor: algebra,
            reason: "inner derivations need a matrix algebra",
        });
    }
    let skew = a.add(&a.adjoint()?)?.norm()?;
    if skew > 1e-12 * a.norm()?.max(1.0) {
        return Err(Error::Validation(format!("a is not skew-Hermitian (‖a + a*‖ = {skew:e})")));
    }
    let a = a.clone();
    let handle = MappingHandle::from_fn_unchecked(algebra, algebra, "a·x − x·a", move |x| {
        a.matmul(x)?.sub(&x.matmul(&a)?)
    });
    confirm_on_probes(&handle, "derivation", derivation_defect)?;
    Ok(handle)
}

/// A controlled perturbation added to an exact map.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbationSpec {
    None,
    /// `ε(x) = c · ‖x‖^r · w` with `‖w‖ = 1`, so `‖ε(x)‖ = c‖x‖^r` and `ε(0) = 0`.
    NormPowerBump {
        r: f64,
        c: f64,
        w: Element,
    },
}

/// `f = h + ε`.
pub fn perturb(h: &MappingHandle, spec: PerturbationSpec) -> Result<MappingHandle> {
    match spec {
        PerturbationSpec::None => Ok(h.clone()),
        PerturbationSpec::NormPowerBump { r, c, w } => {
            if w.algebra() != h.codomain {
                return Err(Error::shape(h.codomain, w.algebra()));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Validation(format!("bump exponent must be positive, got {r}")));
            }
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::Validation(format!("bump size must be ≥ 0, got {c}")));
            }
            let wn = w.norm()?;
            if (wn - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!("bump direction has norm {wn}, not 1")));
            }
            let inner = h.clone();
            let label = format!("{} + {c}·‖x‖^{r}·w", h.label);
            Ok(MappingHandle::from_fn_unchecked(h.domain, h.codomain, label, move |x| {
                let bump = c * x.norm()?.powf(r);
                inner.eval(x)?.add(&w.scale_real(bump)?)
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_element, random_unitary};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_unitaries_give_identity_map() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let e = unit(alg).unwrap();
        let h = make_exact_homomorphism(&e, &e).unwrap();
        let x = random_element(alg, 1.0, 3).unwrap();
        assert_eq!(h.eval(&x).unwrap(), x);
    }

    #[test]
    fn random_unitary_homomorphism_defect_small() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let h =
            make_exact_homomorphism(&random_unitary(2, 1).unwrap(), &random_unitary(2, 2).unwrap()).unwrap();
        let mut rng = SampleRng::new(5);
        for _ in 0..100 {
            let x = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let y = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let z = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            assert!(homomorphism_defect(&h, &x, &y, &z).unwrap().norm().unwrap() <= 1e-12);
        }
    }

    #[test]
    fn pointwise_three_cycle() {
        let h =
            make_pointwise_homomorphism(3, &[1, 2, 0], &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        let alg = h.domain();
        let mut rng = SampleRng::new(2);
        for _ in 0..50 {
            let x = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let y = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let z = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            assert!(homomorphism_defect(&h, &x, &y, &z).unwrap().norm().unwrap() <= 1e-14);
        }
        assert!(make_pointwise_homomorphism(3, &[0, 0, 1], &[c(1.0, 0.0); 3]).is_err());
        assert!(make_pointwise_homomorphism(3, &[0, 1, 2], &[c(2.0, 0.0); 3]).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let two = unit(alg).unwrap().scale_real(2.0).unwrap();
        assert!(matches!(make_exact_homomorphism(&two, &unit(alg).unwrap()), Err(Error::Validation(_))));
    }

    #[test]
    fn derivation_from_diag_i_minus_i() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let a = Element::new(alg, vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        let d = make_exact_derivation(&a).unwrap();
        let mut rng = SampleRng::new(8);
        for _ in 0..100 {
            let x = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let y = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            let z = crate::algebra::random_in_ball(alg, 1.0, &mut rng).unwrap();
            assert!(derivation_defect(&d, &x, &y, &z).unwrap().norm().unwrap() <= 1e-13);
        }
    }

    #[test]
    fn zero_derivation_and_hermitian_rejection() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let zero = make_exact_derivation(&Element::zeros(alg)).unwrap();
        let x = random_element(alg, 1.0, 1).unwrap();
        assert!(zero.eval(&x).unwrap().is_zero());
        let herm = Element::from_real(alg, &[1.0, 2.0, 2.0, -1.0]).unwrap();
        assert!(matches!(make_exact_derivation(&herm), Err(Error::Validation(_))));
    }

    #[test]
    fn bump_has_exact_size() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let h = identity(alg);
        let w = Element::basis(alg, 1).unwrap();
        let f = perturb(&h, PerturbationSpec::NormPowerBump { r: 4.0, c: 0.01, w }).unwrap();
        for seed in 0..10 {
            let x = random_element(alg, 1.0, seed).unwrap();
            let gap = f.eval(&x).unwrap().distance(&h.eval(&x).unwrap()).unwrap();
            let expected = 0.01 * x.norm().unwrap().powi(4);
            assert!((gap - expected).abs() <= 1e-15 * (1.0 + expected));
        }
        assert!(f.eval(&Element::zeros(alg)).unwrap().is_zero());
    }

    #[test]
    fn perturb_none_is_same_map() {
        let alg = AlgebraDescriptor::diagonal(3).unwrap();
        let h = conjugation_map(alg);
        let f = perturb(&h, PerturbationSpec::None).unwrap();
        let x = random_element(alg, 1.0, 4).unwrap();
        assert_eq!(f.eval(&x).unwrap(), h.eval(&x).unwrap());
    }

    #[test]
    fn perturb_validates() {
        let alg = AlgebraDescriptor::matrix(2).unwrap();
        let h = identity(alg);
        let bad_w = unit(alg).unwrap().scale_real(2.0).unwrap();
        assert!(perturb(&h, PerturbationSpec::NormPowerBump { r: 4.0, c: 0.1, w: bad_w }).is_err());
        let other = Element::basis(AlgebraDescriptor::matrix(3).unwrap(), 0).unwrap();
        assert!(matches!(
            perturb(&h, PerturbationSpec::NormPowerBump { r: 4.0, c: 0.1, w: other }),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn from_fn_requires_vanishing_at_zero() {
        let alg = AlgebraDescriptor::diagonal(1).unwrap();
        let shift = MappingHandle::from_fn(alg, alg, "shift", move |x| x.add(&unit(alg).unwrap()));
        assert!(shift.is_err());
    }

    #[test]
    fn handles_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<MappingHandle>();
        assert_send_sync::<Element>();
    }

    #[test]
    fn module_homomorphism() {
        let u = random_unitary(4, 9).unwrap();
        let h = make_module_homomorphism(&u).unwrap();
        assert_eq!(h.domain(), AlgebraDescriptor::module(4).unwrap());
        let x = random_element(h.domain(), 1.0, 1).unwrap();
        // Unitaries preserve the Euclidean norm.
        assert!((h.eval(&x).unwrap().norm().unwrap() - x.norm().unwrap()).abs() < 1e-12);
        let not_unitary = random_element(u.algebra(), 1.0, 2).unwrap();
        assert!(make_module_homomorphism(&not_unitary).is_err());
    }
}
