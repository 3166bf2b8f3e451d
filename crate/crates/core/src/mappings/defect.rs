use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MappingHandle;
use crate::algebra::{random_in_ball, ternary_product, ComplexScalar, Element};
use crate::error::{Error, Result};
use crate::rng::SampleRng;

const THETA_STREAM: u64 = 0x7E7A;

/// Defects smaller than this multiple of the combined term magnitudes are
/// indistinguishable from rounding and are reported as zero.
const ROUNDOFF_FLOOR: f64 = 256.0 * f64::EPSILON;

/// Deterministic points of the unit circle always included when sampling
/// `D_μ`: `1, −1, i, e^{2πi/3}`.
pub const TORUS_PROBES: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-0.5, 0.866_025_403_784_438_6),
];

fn check_unimodular(mu: ComplexScalar) -> Result<()> {
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(format!("μ = {mu} is not on the unit circle")));
    }
    Ok(())
}

/// `D_μ f(x, y, z) = 3 f((μx + μy + μz)/3) − 2μ f((x + y)/2) − μ f(z)`.
pub fn cauchy_jensen_defect(
    f: &MappingHandle,
    mu: ComplexScalar,
    x: &Element,
    y: &Element,
    z: &Element,
) -> Result<Element> {
    check_unimodular(mu)?;
    let mean3 = x.scale(mu)?.add(&y.scale(mu)?)?.add(&z.scale(mu)?)?.scale_real(1.0 / 3.0)?;
    let mean2 = x.add(y)?.scale_real(0.5)?;
    f.eval(&mean3)?.scale_real(3.0)?.sub(&f.eval(&mean2)?.scale(2.0 * mu)?)?.sub(&f.eval(z)?.scale(mu)?)
}

/// `f([x, y, z]) − [f(x), f(y), f(z)]`.
pub fn homomorphism_defect(f: &MappingHandle, x: &Element, y: &Element, z: &Element) -> Result<Element> {
    let (fx, fy, fz) = (f.eval(x)?, f.eval(y)?, f.eval(z)?);
    f.eval(&ternary_product(x, y, z)?)?.sub(&ternary_product(&fx, &fy, &fz)?)
}

/// `f([x, y, z]) − [f(x), y, z] − [x, f(y), z] − [x, y, f(z)]`.
pub fn derivation_defect(f: &MappingHandle, x: &Element, y: &Element, z: &Element) -> Result<Element> {
    if f.domain() != f.codomain() {
        return Err(Error::shape(
            "a self-map for the derivation defect",
            format!("{} → {}", f.domain(), f.codomain()),
        ));
    }
    let (fx, fy, fz) = (f.eval(x)?, f.eval(y)?, f.eval(z)?);
    f.eval(&ternary_product(x, y, z)?)?
        .sub(&ternary_product(&fx, y, z)?)?
        .sub(&ternary_product(x, &fy, z)?)?
        .sub(&ternary_product(x, y, &fz)?)
}

/// Shape of the control function bounding the defects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlForm {
    /// `θ (‖x‖^r + ‖y‖^r + ‖z‖^r)`
    Sum,
    /// `θ ‖x‖^r ‖y‖^r ‖z‖^r`
    Product,
}

/// The control function at unit level `θ = 1`.
pub fn control_value(form: ControlForm, r: f64, nx: f64, ny: f64, nz: f64) -> f64 {
    match form {
        ControlForm::Sum => nx.powf(r) + ny.powf(r) + nz.powf(r),
        ControlForm::Product => nx.powf(r) * ny.powf(r) * nz.powf(r),
    }
}

/// One evaluation of `‖D_μ f(x, y, z)‖` against its control.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectSample {
    pub x: Element,
    pub y: Element,
    pub z: Element,
    pub mu: ComplexScalar,
    pub defect_norm: f64,
    pub control_value: f64,
}

impl DefectSample {
    pub fn ratio(&self) -> f64 {
        self.defect_norm / self.control_value
    }
}

/// Evaluates the defect for every `μ` in `mus` on one triple, sharing the
/// `μ`-independent evaluations. Returns the worst sample with positive control.
fn worst_on_triple(
    f: &MappingHandle,
    form: ControlForm,
    r: f64,
    x: &Element,
    y: &Element,
    z: &Element,
    mus: &[Complex64],
) -> Result<Option<DefectSample>> {
    let control = control_value(form, r, x.norm()?, y.norm()?, z.norm()?);
    if control.is_nan() || control <= 0.0 || control.is_infinite() {
        return Ok(None);
    }
    let sum = x.add(y)?.add(z)?;
    let half = f.eval(&x.add(y)?.scale_real(0.5)?)?.scale_real(2.0)?;
    let fz = f.eval(z)?;
    let tail = half.add(&fz)?;
    let tail_size = half.euclidean_norm() + fz.euclidean_norm();

    let mut worst: Option<DefectSample> = None;
    for &mu in mus {
        let lead = f.eval(&sum.scale(mu)?.scale_real(1.0 / 3.0)?)?.scale_real(3.0)?;
        let d = lead.sub(&tail.scale(mu)?)?;
        let mut norm = d.norm()?;
        if norm <= ROUNDOFF_FLOOR * (lead.euclidean_norm() + tail_size) {
            norm = 0.0;
        }
        if worst.as_ref().is_none_or(|w| norm > w.defect_norm) {
            worst = Some(DefectSample {
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                mu,
                defect_norm: norm,
                control_value: control,
            });
        }
    }
    Ok(worst)
}

fn sample_worst(
    f: &MappingHandle,
    form: ControlForm,
    r: f64,
    radius: f64,
    seed: u64,
    index: u64,
) -> Result<Option<DefectSample>> {
    let alg = f.domain();
    let mut rng = SampleRng::derive(seed, THETA_STREAM, index);
    let x = random_in_ball(alg, radius, &mut rng)?;
    let y = random_in_ball(alg, radius, &mut rng)?;
    let z = random_in_ball(alg, radius, &mut rng)?;
    let mut mus = TORUS_PROBES.to_vec();
    mus.push(rng.unit_phase());
    let random = worst_on_triple(f, form, r, &x, &y, &z, &mus)?;

    // The substitution (x, −x, 3x) with μ = 1 isolates 3f(x) − f(3x), the
    // one-step quantity the direct method is built on.
    let structured = worst_on_triple(
        f,
        form,
        r,
        &x,
        &x.scale_real(-1.0)?,
        &x.scale_real(3.0)?,
        &[Complex64::new(1.0, 0.0)],
    )?;
    Ok(match (random, structured) {
        (Some(a), Some(b)) => Some(if b.ratio() > a.ratio() { b } else { a }),
        (a, b) => a.or(b),
    })
}

/// Empirical control level: the largest `‖D_μ f(x, y, z)‖ / control(x, y, z)`
/// over seeded triples in the ball of the given radius, with `μ` ranging over
/// [`TORUS_PROBES`] plus one uniform phase per triple. Each triple also
/// contributes the substitution `(x, −x, 3x)` at `μ = 1`.
///
/// Sample `i` depends only on `(seed, i)`, so increasing `samples` never
/// decreases the estimate.
pub fn estimate_theta(
    f: &MappingHandle,
    form: ControlForm,
    r: f64,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    Ok(theta_witness(f, form, r, samples, radius, seed)?.ratio())
}

/// The sample attaining [`estimate_theta`].
pub fn theta_witness(
    f: &MappingHandle,
    form: ControlForm,
    r: f64,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<DefectSample> {
    if samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Validation(format!("radius must be positive, got {radius}")));
    }
    if !r.is_finite() {
        return Err(Error::Validation(format!("exponent must be finite, got {r}")));
    }
    let per_sample = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample_worst(f, form, r, radius, seed, i))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<DefectSample> = None;
    for s in per_sample.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| s.ratio() > b.ratio()) {
            best = Some(s);
        }
    }
    best.ok_or(Error::DegenerateSampling { samples })
}
