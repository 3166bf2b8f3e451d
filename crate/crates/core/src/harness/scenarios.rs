use std::time::Instant;

use num_complex::Complex64;

use super::config::{ExperimentConfig, Scenario, ThetaMode};
use super::report::{ExperimentReport, ThetaSource, REPORT_SCHEMA};
use crate::algebra::{
    check_axioms, induced_cstar_check, random_element, random_unitary, AlgebraDescriptor, Element,
};
use crate::counterexample::{
    divergence_profile, envelope_sweep, eval_closed_form, eval_series, GajdaFunction,
};
use crate::error::{Error, Result};
use crate::law::{LawCheck, MaxTracker};
use crate::mappings::{
    conjugation_map, estimate_theta, make_exact_derivation, make_exact_homomorphism,
    make_module_homomorphism, make_pointwise_homomorphism, perturb, ControlForm, MappingHandle,
    PerturbationSpec,
};
use crate::rng::{derive_seed, SampleRng};
use crate::stabilizer::{
    check_isomorphism, decompose_scalar, linearity_certificate, stabilize, stabilized_map, torus_violation,
    uniqueness_check, verify_additivity, verify_derivation, verify_homomorphism, verify_near,
    verify_unit_limit, Direction, Regime, Sampling,
};

const BUILD: u64 = 0xB01D;
const THETA: u64 = 0x7E7A;
const VERIFY: u64 = 0x5E1F;

/// Stabilized maps are held to this multiple of the stabilization tolerance.
const LIMIT_LAW_FACTOR: f64 = 100.0;
/// A raw perturbed map must show at least this defect (negative control).
const RAW_DEFECT_FLOOR: f64 = 1e-4;
/// Envelope half-width for the counterexample triples.
const ENVELOPE_HALF_WIDTH: f64 = 10.0;
/// Last `m` of the reported divergence profile.
const PROFILE_M: usize = 200;
const LOG2_3: f64 = 1.584_962_500_721_156_2;
const DECOMPOSITION_SAMPLES: u64 = 1000;
const DECOMPOSITION_TOL: f64 = 1e-13;

fn build_seed(config: &ExperimentConfig, index: u64) -> u64 {
    derive_seed(config.seed, BUILD, index)
}

fn unit_direction(algebra: AlgebraDescriptor, seed: u64) -> Result<Element> {
    let w = random_element(algebra, 1.0, seed)?;
    w.scale_real(1.0 / w.norm()?)
}

/// A unit-norm direction Euclidean-orthogonal to `w`.
fn orthogonal_direction(w: &Element, seed: u64) -> Result<Element> {
    let g = random_element(w.algebra(), 1.0, seed)?;
    let (wd, gd) = (w.data(), g.data());
    let overlap: Complex64 = wd.iter().zip(gd).map(|(a, b)| a.conj() * b).sum();
    let wsq: f64 = wd.iter().map(|a| a.norm_sqr()).sum();
    let data = gd.iter().zip(wd).map(|(b, a)| b - a * (overlap / wsq)).collect();
    let v = Element::new(w.algebra(), data)?;
    v.scale_real(1.0 / v.norm()?)
}

/// An exact ternary homomorphism of `algebra`, drawn from `seed`.
fn exact_homomorphism(algebra: AlgebraDescriptor, seed: u64) -> Result<MappingHandle> {
    match algebra {
        AlgebraDescriptor::MatrixConjugation(n) => make_exact_homomorphism(
            &random_unitary(n, derive_seed(seed, 1, 0))?,
            &random_unitary(n, derive_seed(seed, 2, 0))?,
        ),
        AlgebraDescriptor::PointwiseDiagonal(d) => {
            let mut rng = SampleRng::new(seed);
            let mut perm: Vec<usize> = (0..d).collect();
            rng.shuffle(&mut perm);
            let phases: Vec<Complex64> = (0..d).map(|_| rng.unit_phase()).collect();
            make_pointwise_homomorphism(d, &perm, &phases)
        }
        AlgebraDescriptor::InnerProductModule(d) => make_module_homomorphism(&random_unitary(d, seed)?),
    }
}

/// An exact homomorphism mapping the unit to the unit, and one that does not.
fn unital_pair(algebra: AlgebraDescriptor, seed: u64) -> Result<(MappingHandle, MappingHandle)> {
    let i = Complex64::new(0.0, 1.0);
    match algebra {
        AlgebraDescriptor::MatrixConjugation(n) => {
            let u = random_unitary(n, seed)?;
            let u_star = u.adjoint()?;
            Ok((make_exact_homomorphism(&u, &u_star)?, make_exact_homomorphism(&u, &u_star.scale(i)?)?))
        }
        AlgebraDescriptor::PointwiseDiagonal(d) => {
            let mut perm: Vec<usize> = (0..d).collect();
            SampleRng::new(seed).shuffle(&mut perm);
            let one = vec![Complex64::new(1.0, 0.0); d];
            Ok((
                make_pointwise_homomorphism(d, &perm, &one)?,
                make_pointwise_homomorphism(d, &perm, &vec![i; d])?,
            ))
        }
        AlgebraDescriptor::InnerProductModule(1) => {
            let e = Element::new(AlgebraDescriptor::MatrixConjugation(1), vec![Complex64::new(1.0, 0.0)])?;
            Ok((make_module_homomorphism(&e)?, make_module_homomorphism(&e.scale(i)?)?))
        }
        other => Err(Error::Unsupported { descriptor: other, reason: "no unit" }),
    }
}

struct Outcome {
    theta_eff: Option<f64>,
    theta_source: ThetaSource,
    laws: Vec<LawCheck>,
    series: Option<Vec<crate::counterexample::DivergencePoint>>,
}

impl Outcome {
    fn laws(laws: Vec<LawCheck>) -> Self {
        Outcome { theta_eff: None, theta_source: ThetaSource::Unused, laws, series: None }
    }
}

/// θ from the config: the analytic value, or a measurement on `f`.
fn resolve_theta(
    config: &ExperimentConfig,
    f: &MappingHandle,
    form: ControlForm,
) -> Result<(f64, ThetaSource, f64)> {
    Ok(match config.theta {
        ThetaMode::Analytic(t) => (t, ThetaSource::Analytic, 1.0),
        ThetaMode::Empirical { samples, radius } => (
            estimate_theta(f, form, config.r, samples, radius, derive_seed(config.seed, THETA, 0))?,
            ThetaSource::Empirical,
            radius,
        ),
    })
}

fn bump_exponent(form: ControlForm, r: f64) -> f64 {
    match form {
        ControlForm::Sum => r,
        ControlForm::Product => 3.0 * r,
    }
}

/// Perturb an exact map, stabilize, and check the limit against the
/// near-bound, the algebraic law `limit_law`, additivity and uniqueness.
fn perturbed_pipeline(
    config: &ExperimentConfig,
    exact: MappingHandle,
    limit_law: fn(&MappingHandle, &Sampling, f64) -> Result<LawCheck>,
) -> Result<Outcome> {
    let form = config.control_form();
    let p = bump_exponent(form, config.r);
    let w1 = unit_direction(exact.codomain(), build_seed(config, 10))?;
    let w2 = orthogonal_direction(&w1, build_seed(config, 11))?;
    let f1 = perturb(&exact, PerturbationSpec::NormPowerBump { r: p, c: config.c, w: w1 })?;
    let f2 = perturb(&exact, PerturbationSpec::NormPowerBump { r: p, c: config.c, w: w2 })?;

    let (theta, source, radius) = resolve_theta(config, &f1, form)?;
    let regime = config.regime(theta)?;
    let tol = config.tol;
    let sampling = Sampling { samples: config.samples, radius, seed: derive_seed(config.seed, VERIFY, 0) };
    let limit = stabilized_map(&f1, &regime, tol);

    let mut laws = vec![
        verify_near(&f1, &limit, &regime, &sampling, tol)?,
        limit_law(&limit, &sampling, LIMIT_LAW_FACTOR * tol)?,
        verify_additivity(&limit, &sampling, LIMIT_LAW_FACTOR * tol)?,
        uniqueness_check(&f1, &f2, &regime, &sampling, tol)?,
    ];
    if config.c > 0.0 {
        let raw = limit_law(&f1, &sampling, RAW_DEFECT_FLOOR)?;
        laws.push(LawCheck::at_least(format!("raw_{}", raw.law), raw.max_violation, RAW_DEFECT_FLOOR));
    }
    Ok(Outcome { theta_eff: Some(theta), theta_source: source, laws, series: None })
}

fn run_axioms(config: &ExperimentConfig) -> Result<Outcome> {
    let mut laws = check_axioms(config.algebra, config.samples, config.tol, config.seed)?.laws;
    if config.algebra.is_unital() {
        laws.extend(induced_cstar_check(config.algebra, config.samples, config.tol, config.seed)?.laws);
    }
    Ok(Outcome::laws(laws))
}

fn run_derivation(config: &ExperimentConfig) -> Result<Outcome> {
    let AlgebraDescriptor::MatrixConjugation(n) = config.algebra else {
        return Err(Error::Config("derivations need a matrix algebra".into()));
    };
    let b = random_element(AlgebraDescriptor::matrix(n)?, 1.0, build_seed(config, 20))?;
    let a = b.sub(&b.adjoint()?)?.scale_real(0.5)?;
    perturbed_pipeline(config, make_exact_derivation(&a)?, verify_derivation)
}

fn run_isomorphism(config: &ExperimentConfig) -> Result<Outcome> {
    let (f, mismatched) = unital_pair(config.algebra, build_seed(config, 30))?;
    let (theta, source, radius) = resolve_theta(config, &f, ControlForm::Sum)?;
    let regime = config.regime(theta)?;
    let sampling = Sampling { samples: config.samples, radius, seed: derive_seed(config.seed, VERIFY, 0) };
    let mut laws = check_isomorphism(&f, &regime, &sampling, config.tol)?.laws;
    let gap = verify_unit_limit(&mismatched, &regime, config.tol)?;
    laws.push(LawCheck::at_least("mismatched_unit_gap", gap.max_violation, 0.5));
    Ok(Outcome { theta_eff: Some(theta), theta_source: source, laws, series: None })
}

fn run_linearity(config: &ExperimentConfig) -> Result<Outcome> {
    let h = exact_homomorphism(config.algebra, build_seed(config, 40))?;
    let sampling = Sampling::new(config.samples, derive_seed(config.seed, VERIFY, 0));
    let mut laws = linearity_certificate(&h, &sampling, config.tol)?.laws;

    let probe = Element::basis(config.algebra, 0)?;
    let v = torus_violation(&conjugation_map(config.algebra), Complex64::new(0.0, 1.0), &probe)?;
    laws.push(LawCheck::at_least("conjugation_torus_violation", v, 1.0));

    let mut err = MaxTracker::default();
    let mut in_range = true;
    for i in 0..DECOMPOSITION_SAMPLES {
        let lambda = SampleRng::derive(config.seed, 0xDEC0, i).complex_normal() * 10.0;
        let d = decompose_scalar(lambda)?;
        err.push((d.m as f64 * d.t.cos() * d.mu - lambda).norm());
        in_range &= d.t > std::f64::consts::FRAC_PI_3 && d.t < std::f64::consts::FRAC_PI_2;
    }
    laws.push(LawCheck::at_most("scalar_reconstruction", err.0, DECOMPOSITION_TOL));
    laws.push(LawCheck::flag("scalar_angle_in_range", in_range));
    Ok(Outcome::laws(laws))
}

fn run_counterexample(config: &ExperimentConfig) -> Result<Outcome> {
    let ThetaMode::Analytic(theta) = config.theta else {
        return Err(Error::Config("the counterexample needs an analytic θ".into()));
    };
    let g = GajdaFunction::new(theta)?;
    let mut laws: Vec<LawCheck> = envelope_sweep(&g, config.samples, ENVELOPE_HALF_WIDTH, config.seed)?
        .iter()
        .map(|s| s.law())
        .collect();

    let (series, tail) = eval_series(&g, 1.0);
    laws.push(LawCheck::at_most("series_agreement_at_one", (series - eval_closed_form(&g, 1.0)).abs(), tail));

    let profile = divergence_profile(&g, PROFILE_M)?;
    let mut offset = MaxTracker::default();
    for pt in &profile {
        offset.push((pt.ratio - LOG2_3).abs() * pt.m as f64);
    }
    // s_m/μ − m·log₂3 = δ + 2^{1−δ} with δ ∈ (0, 1), which never exceeds 2.
    laws.push(LawCheck::at_most("profile_offset", offset.0, 2.0 + 1e-9));
    laws.push(LawCheck::flag("profile_strictly_increasing", profile.windows(2).all(|w| w[1].s_m > w[0].s_m)));

    let regime = Regime::with_override(ControlForm::Sum, Direction::Contract, 1.0, theta)?;
    let one = Element::from_real(AlgebraDescriptor::PointwiseDiagonal(1), &[1.0])?;
    let diverged =
        matches!(stabilize(&g.as_mapping(), &regime, &one, config.tol), Err(Error::Divergence { .. }));
    laws.push(LawCheck::flag("divergence_detected", diverged));

    Ok(Outcome { theta_eff: Some(theta), theta_source: ThetaSource::Analytic, laws, series: Some(profile) })
}

/// Validates the config and runs its scenario.
pub fn run_scenario(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let outcome = match config.scenario {
        Scenario::Axioms => run_axioms(config),
        Scenario::StabilitySumContract
        | Scenario::StabilitySumExpand
        | Scenario::StabilityProdContract
        | Scenario::StabilityProdExpand => exact_homomorphism(config.algebra, build_seed(config, 0))
            .and_then(|h| perturbed_pipeline(config, h, verify_homomorphism)),
        Scenario::Derivation => run_derivation(config),
        Scenario::Isomorphism => run_isomorphism(config),
        Scenario::Counterexample => run_counterexample(config),
        Scenario::Linearity => run_linearity(config),
    }
    .map_err(|e| e.context(format!("scenario {}", config.scenario.name())))?;
    let passed = outcome.laws.iter().all(|l| l.pass);
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        config: config.clone(),
        theta_eff: outcome.theta_eff,
        theta_source: outcome.theta_source,
        laws: outcome.laws,
        series: outcome.series,
        passed,
        wall_clock: start.elapsed(),
    })
}
