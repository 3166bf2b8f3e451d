use std::path::{Path, PathBuf};

use ternary_stability::harness::{render_report, run_scenario, ExperimentConfig, ReportFormat, Scenario};

fn fixtures() -> Vec<(String, PathBuf)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), p))
        .collect();
    out.sort();
    out
}

#[test]
fn twelve_fixtures_cover_every_scenario() {
    let all = fixtures();
    assert_eq!(all.len(), 12);
    let configs: Vec<ExperimentConfig> =
        all.iter().map(|(_, p)| ExperimentConfig::load(p).unwrap()).collect();
    for scenario in [
        Scenario::Axioms,
        Scenario::StabilitySumContract,
        Scenario::StabilitySumExpand,
        Scenario::StabilityProdContract,
        Scenario::StabilityProdExpand,
        Scenario::Derivation,
        Scenario::Isomorphism,
        Scenario::Counterexample,
        Scenario::Linearity,
    ] {
        assert!(configs.iter().any(|c| c.scenario == scenario), "{scenario:?}");
    }
    for ((name, _), c) in all.iter().zip(&configs) {
        assert!(name.starts_with(c.scenario.name()), "{name} holds {}", c.scenario.name());
        assert_eq!(ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap(), *c);
    }
}

#[test]
fn every_fixture_passes() {
    for (name, path) in fixtures() {
        let report = run_scenario(&ExperimentConfig::load(&path).unwrap()).unwrap();
        let failed: Vec<_> = report.failures().map(|l| l.law.clone()).collect();
        assert!(report.passed, "{name}: {failed:?}");
        assert!(report.wall_clock.as_secs_f64() < 60.0, "{name} took {:?}", report.wall_clock);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    for name in ["stability_prod_expand", "derivation_sum_contract", "axioms", "counterexample"] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
        let config = ExperimentConfig::load(path).unwrap();
        let render = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| render_report(&run_scenario(&config).unwrap(), ReportFormat::Json).unwrap())
        };
        let single = render(1);
        assert_eq!(single, render(3), "{name}");
        assert_eq!(single, render(8), "{name}");
    }
}
