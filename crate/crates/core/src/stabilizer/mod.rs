//! The direct method: recovers an exact homomorphism or derivation from an
//! approximate one by the rescaled iteration
//!
//! ```text
//! contract: sₙ = 3ⁿ · f(x / 3ⁿ)        expand: sₙ = 3⁻ⁿ · f(3ⁿ · x)
//! ```
//!
//! together with the closed-form proximity bounds, a step planner, and the
//! certificates built on top of it.

mod linearity;
mod verify;

use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::mappings::{ControlForm, MappingHandle};

pub use linearity::{decompose_scalar, linearity_certificate, torus_violation, ScalarDecomposition};
pub use verify::{
    check_isomorphism, linear_rank, uniqueness_check, verify_additivity, verify_derivation,
    verify_homomorphism, verify_near, verify_unit_limit, Sampling,
};

/// Hard cap on the number of iteration steps.
pub const ITERATION_CAP: usize = 200;

/// Added to every stabilization tolerance when comparing against limits.
pub const SLACK: f64 = 1e-10;

/// A step "fails to decrease" when its increment exceeds this fraction of
/// the smallest increment seen so far.
const DECAY_FACTOR: f64 = 0.95;
/// Consecutive non-decreasing steps that abort the iteration.
const DIVERGENCE_RUN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `sₙ = 3ⁿ f(x/3ⁿ)`
    Contract,
    /// `sₙ = 3⁻ⁿ f(3ⁿx)`
    Expand,
}

/// Control form, iteration direction, exponent `r` and level `θ`.
///
/// | form    | direction | valid `r`  |
/// |---------|-----------|------------|
/// | Sum     | Contract  | `r > 3`    |
/// | Sum     | Expand    | `r < 1`    |
/// | Product | Contract  | `r > 1/3`  |
/// | Product | Expand    | `r < 1/3`  |
///
/// [`Regime::with_override`] additionally admits Sum+Contract with
/// `0 ≤ r ≤ 3`. For `r ∈ (1, 3]` the iteration still converges and the bounds
/// hold, but no multiplicativity claim is made. For `r ≤ 1` there is no bound
/// and [`stabilize`] runs to [`ITERATION_CAP`] under the divergence guard.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Regime {
    form: ControlForm,
    direction: Direction,
    r: f64,
    theta: f64,
    overridden: bool,
}

impl Regime {
    pub fn new(form: ControlForm, direction: Direction, r: f64, theta: f64) -> Result<Self> {
        Self::build(form, direction, r, theta, false)
    }

    /// Like [`Regime::new`] but lets Sum+Contract through for `0 ≤ r ≤ 3`.
    pub fn with_override(form: ControlForm, direction: Direction, r: f64, theta: f64) -> Result<Self> {
        Self::build(form, direction, r, theta, true)
    }

    fn build(form: ControlForm, direction: Direction, r: f64, theta: f64, overridden: bool) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Regime(format!("exponent must be finite and ≥ 0, got {r}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Regime(format!("θ must be finite and ≥ 0, got {theta}")));
        }
        let ok = match (form, direction) {
            (ControlForm::Sum, Direction::Contract) => r > 3.0 || overridden,
            (ControlForm::Sum, Direction::Expand) => r < 1.0,
            (ControlForm::Product, Direction::Contract) => r > 1.0 / 3.0,
            (ControlForm::Product, Direction::Expand) => r < 1.0 / 3.0,
        };
        if !ok {
            return Err(Error::Regime(format!("r = {r} is outside the {form:?}+{direction:?} range")));
        }
        Ok(Regime {
            form,
            direction,
            r,
            theta,
            overridden: overridden
                && form == ControlForm::Sum
                && direction == Direction::Contract
                && r <= 3.0,
        })
    }

    pub fn form(&self) -> ControlForm {
        self.form
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same regime at another level `θ`.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Regime(format!("θ must be finite and ≥ 0, got {theta}")));
        }
        self.theta = theta;
        Ok(self)
    }

    /// True when the regime only exists through the override.
    pub fn is_overridden(&self) -> bool {
        self.overridden
    }

    /// Whether the rescaled iteration is known to converge (`γ > 0`).
    pub fn converges(&self) -> bool {
        self.decay_exponent() > 0.0
    }

    /// Whether the limit is guaranteed to respect the triple product.
    pub fn supports_homomorphism(&self) -> bool {
        !self.overridden
    }

    /// `γ` such that the Cauchy tail after `n` steps is `bound · 3^{−nγ}`.
    pub fn decay_exponent(&self) -> f64 {
        let r = self.r;
        match (self.form, self.direction) {
            (ControlForm::Sum, Direction::Contract) => r - 1.0,
            (ControlForm::Sum, Direction::Expand) => 1.0 - r,
            (ControlForm::Product, Direction::Contract) => 3.0 * r - 1.0,
            (ControlForm::Product, Direction::Expand) => 1.0 - 3.0 * r,
        }
    }
}

/// A-priori bound on `‖f(x) − H(x)‖` for `‖x‖ = s`.
pub fn bound(regime: &Regime, s: f64) -> Result<f64> {
    if !regime.converges() {
        return Err(Error::Regime(format!(
            "no proximity bound for {:?}+{:?} at r = {}",
            regime.form, regime.direction, regime.r
        )));
    }
    let Regime { r, theta, .. } = *regime;
    let p = 3f64.powf(r);
    Ok(match (regime.form, regime.direction) {
        (ControlForm::Sum, Direction::Contract) => theta * (p + 2.0) / (p - 3.0) * s.powf(r),
        (ControlForm::Sum, Direction::Expand) => theta * (2.0 + p) / (3.0 - p) * s.powf(r),
        (ControlForm::Product, Direction::Contract) => p * theta / (27f64.powf(r) - 3.0) * s.powf(3.0 * r),
        (ControlForm::Product, Direction::Expand) => p * theta / (3.0 - 27f64.powf(r)) * s.powf(3.0 * r),
    })
}

/// Bound on `‖3f(x) − f(3x)‖` for `‖x‖ = s`.
pub fn one_step_bound(regime: &Regime, s: f64) -> f64 {
    let Regime { r, theta, .. } = *regime;
    match regime.form {
        ControlForm::Sum => theta * (2.0 + 3f64.powf(r)) * s.powf(r),
        ControlForm::Product => 3f64.powf(r) * theta * s.powf(3.0 * r),
    }
}

/// Smallest `n` with `bound(regime, s) · 3^{−nγ} ≤ tol`.
pub fn steps_needed(regime: &Regime, s: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let b = bound(regime, s)?;
    if !b.is_finite() {
        return Err(Error::NonFinite("the proximity bound"));
    }
    if b <= tol {
        return Ok(0);
    }
    let gamma = regime.decay_exponent();
    let tail = |n: f64| b * 3f64.powf(-n * gamma);
    let estimate = ((b / tol).ln() / 3f64.ln() / gamma).ceil();
    if estimate > ITERATION_CAP as f64 + 1.0 {
        return Err(Error::ToleranceUnreachable { tol, cap: ITERATION_CAP, needed: estimate });
    }
    // The logarithm can land one step off either way; settle by evaluation.
    let mut n = estimate.max(0.0);
    while n > 0.0 && tail(n - 1.0) <= tol {
        n -= 1.0;
    }
    while tail(n) > tol {
        n += 1.0;
    }
    if n > ITERATION_CAP as f64 {
        return Err(Error::ToleranceUnreachable { tol, cap: ITERATION_CAP, needed: n });
    }
    Ok(n as usize)
}

/// Per-point record of one stabilization run.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizationReport {
    pub regime: Regime,
    pub tol: f64,
    pub n_used: usize,
    pub value: Element,
    /// `bound(regime, ‖x‖)`, absent when the regime has no bound.
    pub bound: Option<f64>,
    /// `‖sⱼ₊₁ − sⱼ‖` for `j < n_used`.
    pub increments: Vec<f64>,
}

impl StabilizationReport {
    pub fn last_increment(&self) -> Option<f64> {
        self.increments.last().copied()
    }
}

fn iterate(f: &MappingHandle, direction: Direction, x: &Element, j: usize) -> Result<Element> {
    let scale = 3f64.powi(j as i32);
    match direction {
        Direction::Contract => f.eval(&x.scale_real(1.0 / scale)?)?.scale_real(scale),
        Direction::Expand => f.eval(&x.scale_real(scale)?)?.scale_real(1.0 / scale),
    }
}

/// Runs the rescaled iteration at `x` for the planned number of steps.
///
/// Aborts with [`Error::Divergence`] once five consecutive increments each
/// exceed both `tol` and 0.95 times the smallest earlier increment. Comparing
/// against the running minimum rather than the previous step keeps an
/// oscillating, non-decaying sequence from resetting the count.
pub fn stabilize(
    f: &MappingHandle,
    regime: &Regime,
    x: &Element,
    tol: f64,
) -> Result<(Element, StabilizationReport)> {
    if !f.eval(&Element::zeros(f.domain()))?.is_zero() {
        return Err(Error::Validation(format!("mapping `{}` does not vanish at 0", f.label())));
    }
    let s = x.norm()?;
    let (n, b) = if regime.converges() {
        (steps_needed(regime, s, tol)?, Some(bound(regime, s)?))
    } else {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
        }
        (ITERATION_CAP, None)
    };

    let mut current = iterate(f, regime.direction, x, 0)?;
    let mut increments = Vec::with_capacity(n);
    let mut stalled = 0;
    let mut smallest = f64::INFINITY;
    for j in 0..n {
        let next = iterate(f, regime.direction, x, j + 1)?;
        let inc = next.distance(&current)?;
        if j > 0 && inc > tol && inc > DECAY_FACTOR * smallest {
            stalled += 1;
        } else {
            stalled = 0;
        }
        smallest = smallest.min(inc);
        increments.push(inc);
        current = next;
        if stalled >= DIVERGENCE_RUN {
            return Err(Error::Divergence { step: j + 1, increments });
        }
    }
    let report =
        StabilizationReport { regime: *regime, tol, n_used: n, value: current.clone(), bound: b, increments };
    Ok((current, report))
}

/// The limit map `x ↦ stabilize(f, regime, x, tol)` as a handle.
pub fn stabilized_map(f: &MappingHandle, regime: &Regime, tol: f64) -> MappingHandle {
    let (inner, regime) = (f.clone(), *regime);
    let label = format!("lim[{}]", f.label());
    MappingHandle::from_fn_unchecked(f.domain(), f.codomain(), label, move |x| {
        Ok(stabilize(&inner, &regime, x, tol)?.0)
    })
}
