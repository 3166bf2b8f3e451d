//! A scalar function that satisfies the Cauchy-Jensen inequality with the
//! Sum control at the critical exponent `r = 1`, yet stays away from every
//! additive map: the rescaled iterates `3ᵐ f(3⁻ᵐ)` grow without bound.
//!
//! ```text
//! φ(x) = μ·clamp(x, −1, 1),    f(x) = Σ_{n ≥ 0} φ(2ⁿx) / 2ⁿ,    μ = θ/6
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::law::LawCheck;
use crate::mappings::MappingHandle;
use crate::rng::SampleRng;

const ENVELOPE_STREAM: u64 = 0xE4E1;
/// Envelope comparisons allow this absolute slack for rounding.
pub const ENVELOPE_SLACK: f64 = 1e-12;
/// Largest `m` accepted by [`divergence_profile`].
pub const MAX_PROFILE_M: usize = 600;
pub const DEFAULT_TRUNCATION: u32 = 64;
const MAX_TRUNCATION: u32 = 1100;

const LOG2_3: f64 = 1.584_962_500_721_156_2;

/// `φ(x) = μ` for `x ≥ 1`, `μx` on `(−1, 1)`, `−μ` for `x ≤ −1`.
pub fn phi(x: f64, mu: f64) -> f64 {
    if x >= 1.0 {
        mu
    } else if x <= -1.0 {
        -mu
    } else {
        mu * x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GajdaFunction {
    theta: f64,
    mu: f64,
    truncation: u32,
}

impl GajdaFunction {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Validation(format!("θ must be positive, got {theta}")));
        }
        Ok(GajdaFunction { theta, mu: theta / 6.0, truncation: DEFAULT_TRUNCATION })
    }

    /// Number of series terms used by [`eval_series`].
    pub fn with_truncation(mut self, n: u32) -> Result<Self> {
        if n == 0 || n > MAX_TRUNCATION {
            return Err(Error::Validation(format!("truncation must be in 1..={MAX_TRUNCATION}, got {n}")));
        }
        self.truncation = n;
        Ok(self)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// `f` as a real map on PointwiseDiagonal(1), applied to the real part.
    pub fn as_mapping(&self) -> MappingHandle {
        let g = *self;
        let alg = AlgebraDescriptor::PointwiseDiagonal(1);
        MappingHandle::from_fn_unchecked(alg, alg, format!("gajda(θ={})", self.theta), move |x| {
            Element::from_real(alg, &[eval_closed_form(&g, x.data()[0].re)])
        })
    }
}

/// Partial sum over `n < N` with compensated summation, and the bound
/// `μ·2^{1−N}` on the omitted tail.
///
/// `μ` is factored out of the sum so the unsaturated terms are all exactly
/// `x`; the result then carries a single rounding from the final product.
pub fn eval_series(g: &GajdaFunction, x: f64) -> (f64, f64) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 0..g.truncation {
        let p = 2f64.powi(n as i32);
        let term = phi(p * x, 1.0) / p;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    (g.mu.mul_add(sum, g.mu * comp), g.mu * 2f64.powi(1 - g.truncation as i32))
}

/// Smallest `n ≥ 0` with `2ⁿ|x| ≥ 1`, read off the binary exponent.
/// `x` must be finite and non-zero.
fn saturation_index(x: f64) -> u32 {
    let a = x.abs();
    if a >= 1.0 {
        return 0;
    }
    // a = m·2^e with m ∈ [1, 2); then 2ⁿa ≥ 1 first holds at n = −e.
    let (bits, shift) =
        if a < f64::MIN_POSITIVE { ((a * 2f64.powi(64)).to_bits(), 64) } else { (a.to_bits(), 0) };
    let e = ((bits >> 52) & 0x7ff) as i32 - 1023 - shift;
    (-e) as u32
}

/// Exact sum of the series: the first `n₀` terms are linear, the rest
/// saturate, giving `μ·x·n₀ + sign(x)·μ·2^{1−n₀}`.
pub fn eval_closed_form(g: &GajdaFunction, x: f64) -> f64 {
    if x == 0.0 || x.is_nan() {
        return x;
    }
    if x.is_infinite() {
        return x.signum() * 2.0 * g.mu;
    }
    let n0 = saturation_index(x);
    let tail = x.signum() * g.mu * 2f64.powi(1 - n0 as i32);
    if n0 == 0 {
        return tail;
    }
    // μ·x·n₀ + tail in error-free pieces, so only the last addition rounds.
    let n = n0 as f64;
    let p = g.mu * x;
    let p_err = g.mu.mul_add(x, -p);
    let a = n * p;
    let a_err = n.mul_add(p, -a);
    let (s, s_err) = two_sum(a, tail);
    s + (s_err + a_err + n * p_err)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeLevel {
    /// `|f(x+y) − f(x) − f(y)| ≤ θ(|x| + |y|)`
    Base,
    /// `|f(x+y+z) − f(x) − f(y) − f(z)| ≤ (5/3)θ(|x| + |y| + |z|)`
    Triple,
    /// `|2f((x+y)/2) − f(x) − f(y)| ≤ 2θ(|x| + |y|)`
    Jensen2,
    /// `|3f((x+y+z)/3) − f(x) − f(y) − f(z)| ≤ (10/3)θ(|x| + |y| + |z|)`
    Jensen3,
    /// `|3f((x+y+z)/3) − 2f((x+y)/2) − f(z)| ≤ (2/3)θ(8|x| + 8|y| + 5|z|)`
    FinalWeighted,
    /// Same left side, `≤ (16/3)θ(|x| + |y| + |z|)`
    FinalUniform,
}

impl EnvelopeLevel {
    pub const ALL: [EnvelopeLevel; 6] = [
        EnvelopeLevel::Base,
        EnvelopeLevel::Triple,
        EnvelopeLevel::Jensen2,
        EnvelopeLevel::Jensen3,
        EnvelopeLevel::FinalWeighted,
        EnvelopeLevel::FinalUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvelopeLevel::Base => "envelope_base",
            EnvelopeLevel::Triple => "envelope_triple",
            EnvelopeLevel::Jensen2 => "envelope_jensen2",
            EnvelopeLevel::Jensen3 => "envelope_jensen3",
            EnvelopeLevel::FinalWeighted => "envelope_final_weighted",
            EnvelopeLevel::FinalUniform => "envelope_final_uniform",
        }
    }
}

/// `(lhs, rhs)` of one envelope inequality. `z` is ignored by
/// [`EnvelopeLevel::Base`] and [`EnvelopeLevel::Jensen2`].
pub fn check_envelope(g: &GajdaFunction, level: EnvelopeLevel, x: f64, y: f64, z: f64) -> (f64, f64) {
    let f = |t: f64| eval_closed_form(g, t);
    let th = g.theta;
    let (ax, ay, az) = (x.abs(), y.abs(), z.abs());
    let final_lhs = || (3.0 * f((x + y + z) / 3.0) - 2.0 * f((x + y) / 2.0) - f(z)).abs();
    match level {
        EnvelopeLevel::Base => ((f(x + y) - f(x) - f(y)).abs(), th * (ax + ay)),
        EnvelopeLevel::Triple => ((f(x + y + z) - f(x) - f(y) - f(z)).abs(), 5.0 / 3.0 * th * (ax + ay + az)),
        EnvelopeLevel::Jensen2 => ((2.0 * f((x + y) / 2.0) - f(x) - f(y)).abs(), 2.0 * th * (ax + ay)),
        EnvelopeLevel::Jensen3 => {
            ((3.0 * f((x + y + z) / 3.0) - f(x) - f(y) - f(z)).abs(), 10.0 / 3.0 * th * (ax + ay + az))
        }
        EnvelopeLevel::FinalWeighted => (final_lhs(), 2.0 / 3.0 * th * (8.0 * ax + 8.0 * ay + 5.0 * az)),
        EnvelopeLevel::FinalUniform => (final_lhs(), 16.0 / 3.0 * th * (ax + ay + az)),
    }
}

/// Outcome of one envelope level over a batch of triples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeSummary {
    pub level: EnvelopeLevel,
    pub triples: usize,
    /// Count of `lhs > rhs + 1e-12`.
    pub violations: usize,
    /// Largest `lhs / rhs` over triples with `rhs > 0`.
    pub worst_ratio: f64,
}

impl EnvelopeSummary {
    pub fn law(&self) -> LawCheck {
        LawCheck::at_most(self.level.name(), self.violations as f64, 0.0)
    }
}

/// Checks every level on `triples` seeded points of `[−half_width, half_width]³`.
pub fn envelope_sweep(
    g: &GajdaFunction,
    triples: usize,
    half_width: f64,
    seed: u64,
) -> Result<Vec<EnvelopeSummary>> {
    if triples == 0 {
        return Err(Error::Validation("triples must be at least 1".into()));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Validation(format!("half-width must be positive, got {half_width}")));
    }
    let rows = (0..triples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::derive(seed, ENVELOPE_STREAM, i);
            let mut draw = || rng.uniform_in(-half_width, half_width);
            let (x, y, z) = (draw(), draw(), draw());
            EnvelopeLevel::ALL.map(|level| check_envelope(g, level, x, y, z))
        })
        .collect::<Vec<_>>();
    Ok(EnvelopeLevel::ALL
        .iter()
        .enumerate()
        .map(|(k, &level)| {
            let mut violations = 0;
            let mut worst_ratio = 0.0f64;
            for row in &rows {
                let (lhs, rhs) = row[k];
                if lhs.is_nan() || rhs.is_nan() || lhs > rhs + ENVELOPE_SLACK {
                    violations += 1;
                }
                if rhs > 0.0 {
                    worst_ratio = worst_ratio.max(lhs / rhs);
                }
            }
            EnvelopeSummary { level, triples, violations, worst_ratio }
        })
        .collect())
}

/// One point `(m, s_m, s_m/(μm))` of the rescaled iterates at `x = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergencePoint {
    pub m: usize,
    pub s_m: f64,
    pub ratio: f64,
}

/// `s_m = 3ᵐ f(3⁻ᵐ)` for `m = 1..=m_max`.
///
/// With `n₀ = ⌈m·log₂3⌉` this is `μn₀ + μ·2^{1 + m·log₂3 − n₀}`, which is
/// evaluated in that form so that no power of 3 is materialized.
pub fn divergence_profile(g: &GajdaFunction, m_max: usize) -> Result<Vec<DivergencePoint>> {
    if !(1..=MAX_PROFILE_M).contains(&m_max) {
        return Err(Error::Validation(format!("m_max must be in 1..={MAX_PROFILE_M}, got {m_max}")));
    }
    Ok((1..=m_max)
        .map(|m| {
            let n0 = saturation_index(3f64.powi(-(m as i32)));
            let s_m = g.mu * n0 as f64 + g.mu * (1.0 + m as f64 * LOG2_3 - n0 as f64).exp2();
            DivergencePoint { m, s_m, ratio: s_m / (g.mu * m as f64) }
        })
        .collect())
}
