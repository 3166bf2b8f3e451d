//! Numerical stability checks for the Cauchy-Jensen equation on
//! finite-dimensional C*-ternary algebras.
//!
//! The modules build on each other:
//!
//! - [`algebra`]: matrix, diagonal and Hilbert-module ternary algebras, their
//!   norms and an axiom checker.
//! - [`mappings`]: map handles, exact homomorphisms and derivations,
//!   perturbations, defects and the empirical control level θ.
//! - [`stabilizer`]: regimes, a-priori bounds, the rescaled iteration and the
//!   verification of its limit.
//! - [`counterexample`]: a scalar function on which the iteration diverges at
//!   the critical exponent.
//! - [`harness`]: JSON configs in, deterministic reports out.
//!
//! ```
//! use ternary_stability::algebra::{random_unitary, Element, AlgebraDescriptor};
//! use ternary_stability::mappings::{estimate_theta, make_exact_homomorphism, perturb, ControlForm, PerturbationSpec};
//! use ternary_stability::stabilizer::{stabilize, Direction, Regime};
//!
//! let alg = AlgebraDescriptor::matrix(2)?;
//! let h = make_exact_homomorphism(&random_unitary(2, 1)?, &random_unitary(2, 2)?)?;
//! let f = perturb(&h, PerturbationSpec::NormPowerBump { r: 4.0, c: 0.01, w: Element::basis(alg, 0)? })?;
//! let theta = estimate_theta(&f, ControlForm::Sum, 4.0, 1000, 1.0, 0)?;
//! let regime = Regime::new(ControlForm::Sum, Direction::Contract, 4.0, theta)?;
//!
//! let x = Element::basis(alg, 3)?;
//! let (limit, _) = stabilize(&f, &regime, &x, 1e-10)?;
//! assert!(limit.distance(&h.eval(&x)?)? <= 1e-10);
//! # Ok::<(), ternary_stability::error::Error>(())
//! ```
//!
//! The guide under `book/` walks through each module; its snippets run as
//! doc-tests of this crate.

pub mod algebra;
pub mod counterexample;
pub mod error;
pub mod harness;
pub mod law;
pub mod mappings;
pub mod rng;
pub mod stabilizer;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/algebras.md")]
    struct Algebras;
    #[doc = include_str!("../../../book/src/defect.md")]
    struct Defect;
    #[doc = include_str!("../../../book/src/stabilization.md")]
    struct Stabilization;
    #[doc = include_str!("../../../book/src/isomorphisms-derivations.md")]
    struct IsomorphismsDerivations;
    #[doc = include_str!("../../../book/src/counterexample.md")]
    struct Counterexample;
    #[doc = include_str!("../../../book/src/harness.md")]
    struct Harness;
}
