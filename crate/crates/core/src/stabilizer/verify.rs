use rayon::prelude::*;

use crate::algebra::{random_in_ball, unit, AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::law::{CheckReport, LawCheck, MaxTracker};
use crate::mappings::{derivation_defect, homomorphism_defect, MappingHandle};
use crate::rng::SampleRng;

use super::{bound, stabilize, Regime, SLACK};

const NEAR_STREAM: u64 = 0x4EA2;
const MORPHISM_STREAM: u64 = 0x40E5;
const UNIQUENESS_STREAM: u64 = 0x0417;
const ISO_STREAM: u64 = 0x150;

/// Minimum `‖f(x) − f(y)‖ / ‖x − y‖` accepted as "distinct images".
const INJECTIVITY_FLOOR: f64 = 1e-9;
/// Injectivity is probed on at most this many points (pairwise).
const INJECTIVITY_PROBES: usize = 64;
const RANK_REL_TOL: f64 = 1e-10;

/// How seeded verification points are drawn: `samples` points from the ball
/// of the given radius, point `i` depending only on `(seed, i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Sampling {
    /// Unit-ball sampling.
    pub fn new(samples: usize, seed: u64) -> Self {
        Sampling { samples, radius: 1.0, seed }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Validation("samples must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Validation(format!("radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    fn points<const K: usize>(
        &self,
        algebra: AlgebraDescriptor,
        stream: u64,
        index: u64,
    ) -> Result<[Element; K]> {
        let mut rng = SampleRng::derive(self.seed, stream, index);
        let mut out = Vec::with_capacity(K);
        for _ in 0..K {
            out.push(random_in_ball(algebra, self.radius, &mut rng)?);
        }
        Ok(out.try_into().expect("exactly K points"))
    }

    /// Parallel map over sample indices, maximum reduced in index order.
    fn max_over<F>(&self, per_sample: F) -> Result<f64>
    where
        F: Fn(u64) -> Result<f64> + Sync + Send,
    {
        self.validate()?;
        let values = (0..self.samples as u64).into_par_iter().map(per_sample).collect::<Result<Vec<_>>>()?;
        let mut max = MaxTracker::default();
        values.into_iter().for_each(|v| max.push(v));
        Ok(max.0)
    }
}

fn check_maps(a: &MappingHandle, b: &MappingHandle) -> Result<()> {
    if a.domain() != b.domain() || a.codomain() != b.codomain() {
        return Err(Error::shape(
            format!("{} → {}", a.domain(), a.codomain()),
            format!("{} → {}", b.domain(), b.codomain()),
        ));
    }
    Ok(())
}

/// Worst `‖f(x) − H(x)‖ / (bound(regime, ‖x‖) + tol + 1e-10)`; passes iff ≤ 1.
pub fn verify_near(
    f: &MappingHandle,
    h: &MappingHandle,
    regime: &Regime,
    sampling: &Sampling,
    tol: f64,
) -> Result<LawCheck> {
    check_maps(f, h)?;
    let worst = sampling.max_over(|i| {
        let [x] = sampling.points(f.domain(), NEAR_STREAM, i)?;
        let lhs = f.eval(&x)?.distance(&h.eval(&x)?)?;
        Ok(lhs / (bound(regime, x.norm()?)? + tol + SLACK))
    })?;
    Ok(LawCheck::at_most("near_bound", worst, 1.0))
}

/// Largest `‖H([x, y, z]) − [H(x), H(y), H(z)]‖`; passes iff ≤ `tol`.
pub fn verify_homomorphism(h: &MappingHandle, sampling: &Sampling, tol: f64) -> Result<LawCheck> {
    let worst = sampling.max_over(|i| {
        let [x, y, z] = sampling.points(h.domain(), MORPHISM_STREAM, i)?;
        homomorphism_defect(h, &x, &y, &z)?.norm()
    })?;
    Ok(LawCheck::at_most("homomorphism", worst, tol))
}

/// Largest derivation defect norm; passes iff ≤ `tol`.
pub fn verify_derivation(d: &MappingHandle, sampling: &Sampling, tol: f64) -> Result<LawCheck> {
    let worst = sampling.max_over(|i| {
        let [x, y, z] = sampling.points(d.domain(), MORPHISM_STREAM, i)?;
        derivation_defect(d, &x, &y, &z)?.norm()
    })?;
    Ok(LawCheck::at_most("derivation", worst, tol))
}

/// Largest `‖H(x + y) − H(x) − H(y)‖`; passes iff ≤ `tol`.
pub fn verify_additivity(h: &MappingHandle, sampling: &Sampling, tol: f64) -> Result<LawCheck> {
    let worst = sampling.max_over(|i| {
        let [x, y] = sampling.points(h.domain(), MORPHISM_STREAM, i)?;
        h.eval(&x.add(&y)?)?.sub(&h.eval(&x)?)?.sub(&h.eval(&y)?)?.norm()
    })?;
    Ok(LawCheck::at_most("additivity", worst, tol))
}

/// Distance from the stabilized image of the domain unit to the codomain unit.
pub fn verify_unit_limit(f: &MappingHandle, regime: &Regime, tol: f64) -> Result<LawCheck> {
    let units = (unit(f.domain()), unit(f.codomain()));
    let (Some(e), Some(e2)) = units else {
        let descriptor = if units.0.is_none() { f.domain() } else { f.codomain() };
        return Err(Error::Unsupported { descriptor, reason: "the unit-limit condition needs units" });
    };
    let (limit, _) = stabilize(f, regime, &e, tol)?;
    Ok(LawCheck::at_most("unit_limit", limit.distance(&e2)?, tol + SLACK))
}

/// Largest `‖stabilize(f₁)(x) − stabilize(f₂)(x)‖`; passes iff ≤ `2·tol + 1e-10`.
pub fn uniqueness_check(
    f1: &MappingHandle,
    f2: &MappingHandle,
    regime: &Regime,
    sampling: &Sampling,
    tol: f64,
) -> Result<LawCheck> {
    check_maps(f1, f2)?;
    let worst = sampling.max_over(|i| {
        let [x] = sampling.points(f1.domain(), UNIQUENESS_STREAM, i)?;
        stabilize(f1, regime, &x, tol)?.0.distance(&stabilize(f2, regime, &x, tol)?.0)
    })?;
    Ok(LawCheck::at_most("uniqueness", worst, 2.0 * tol + SLACK))
}

/// Numerical rank of `f` viewed as a real-linear map `ℝ^{2k} → ℝ^{2m}`,
/// built from the images of `e_j` and `i·e_j`.
pub fn linear_rank(f: &MappingHandle) -> Result<usize> {
    let (k, m) = (f.domain().len(), f.codomain().len());
    let mut cols = Vec::with_capacity(2 * k);
    for j in 0..k {
        let e = Element::basis(f.domain(), j)?;
        for probe in [e.clone(), e.scale(num_complex::Complex64::new(0.0, 1.0))?] {
            let img = f.eval(&probe)?;
            cols.push(img.data().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>());
        }
    }
    Ok(real_rank(cols, 2 * m))
}

/// Gaussian elimination with full column scan and partial pivoting.
fn real_rank(mut cols: Vec<Vec<f64>>, rows: usize) -> usize {
    let peak = cols.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let threshold = RANK_REL_TOL * peak;
    let mut rank = 0;
    for row in 0..rows {
        let Some((pivot, _)) = cols
            .iter()
            .enumerate()
            .skip(rank)
            .map(|(c, col)| (c, col[row].abs()))
            .filter(|&(_, v)| v > threshold)
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        cols.swap(rank, pivot);
        let (done, rest) = cols.split_at_mut(rank + 1);
        let p = &done[rank];
        for col in rest.iter_mut() {
            let factor = col[row] / p[row];
            if factor != 0.0 {
                for (v, pv) in col.iter_mut().zip(p) {
                    *v -= factor * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Numerical evidence that `f` is a C*-ternary isomorphism: injectivity on
/// probes and full real rank (consistent with bijective), exact
/// multiplicativity, the unit limit, and `stabilize(f) = f` pointwise.
pub fn check_isomorphism(
    f: &MappingHandle,
    regime: &Regime,
    sampling: &Sampling,
    tol: f64,
) -> Result<CheckReport> {
    sampling.validate()?;
    let probes = (0..sampling.samples.min(INJECTIVITY_PROBES) as u64)
        .map(|i| {
            let [x] = sampling.points(f.domain(), ISO_STREAM, i)?;
            let fx = f.eval(&x)?;
            Ok((x, fx))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut separation = f64::INFINITY;
    for (i, (x, fx)) in probes.iter().enumerate() {
        for (y, fy) in &probes[i + 1..] {
            separation = separation.min(fx.distance(fy)? / x.distance(y)?);
        }
    }
    if probes.len() < 2 {
        separation = if probes[0].1.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let square = f.domain().len() == f.codomain().len();
    let full_rank = square && linear_rank(f)? == 2 * f.domain().len();

    let multiplicative = verify_homomorphism(f, sampling, tol)?.max_violation;
    let unit_limit = verify_unit_limit(f, regime, tol)?;
    let collapse = sampling.max_over(|i| {
        let [x] = sampling.points(f.domain(), ISO_STREAM, i)?;
        stabilize(f, regime, &x, tol)?.0.distance(&f.eval(&x)?)
    })?;

    Ok(CheckReport::new(
        "isomorphism",
        vec![
            LawCheck::at_least("distinct_images", separation, INJECTIVITY_FLOOR),
            LawCheck::flag("full_real_rank", full_rank),
            LawCheck::at_most("multiplicativity", multiplicative, tol),
            unit_limit,
            LawCheck::at_most("limit_equals_map", collapse, tol),
        ],
    ))
}
