use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ternary_stability::algebra::AlgebraDescriptor;
use ternary_stability::error::Error;
use ternary_stability::harness::{
    emit_report, run_scenario, write_report, ExperimentConfig, ExperimentReport, ReportFormat, Scenario,
    ThetaMode, SCHEMA_VERSION,
};
use ternary_stability::mappings::ControlForm;

/// Numerical checks for C*-ternary algebras and the stability of their
/// homomorphisms and derivations.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// configuration or runtime error.
#[derive(Parser)]
#[command(name = "ternstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the ternary axioms (and the induced C*-algebra when unital).
    VerifyAxioms(Common),
    /// Perturb an exact homomorphism, stabilize it and check the limit.
    Stabilize {
        #[arg(long, value_enum, default_value_t = Form::Sum)]
        form: Form,
        #[command(flatten)]
        common: Common,
    },
    /// Same pipeline for an inner derivation of a matrix algebra.
    Derivation {
        #[arg(long, value_enum, default_value_t = Form::Sum)]
        form: Form,
        #[command(flatten)]
        common: Common,
    },
    /// Check the isomorphism conditions on an exact unital homomorphism.
    Isomorphism(Common),
    /// Envelopes and divergence of the critical-exponent counterexample.
    Counterexample(Common),
    /// The five-law linearity certificate.
    Linearity(Common),
    /// Run a scenario from a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Sum,
    Product,
}

impl From<Form> for ControlForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Sum => ControlForm::Sum,
            Form::Product => ControlForm::Product,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct Common {
    /// matrix:N, diag:D or module:D
    #[arg(long)]
    algebra: Option<AlgebraDescriptor>,
    /// Control exponent.
    #[arg(long)]
    r: Option<f64>,
    /// Analytic control level.
    #[arg(long, conflicts_with = "theta_empirical")]
    theta: Option<f64>,
    /// Measure the control level over this many samples in the unit ball.
    #[arg(long)]
    theta_empirical: Option<usize>,
    /// Bump size of the perturbation.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// Per-command defaults, overridden by any flag given.
struct Defaults {
    algebra: AlgebraDescriptor,
    r: f64,
    theta: ThetaMode,
    c: f64,
    tol: f64,
    samples: usize,
}

const EMPIRICAL_SAMPLES: usize = 10_000;

impl Common {
    fn config(&self, scenario: Scenario, form: Option<ControlForm>, d: Defaults) -> ExperimentConfig {
        let theta = match (self.theta, self.theta_empirical) {
            (Some(t), _) => ThetaMode::Analytic(t),
            (None, Some(samples)) => ThetaMode::Empirical { samples, radius: 1.0 },
            (None, None) => d.theta,
        };
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            scenario,
            algebra: self.algebra.unwrap_or(d.algebra),
            r: self.r.unwrap_or(d.r),
            theta,
            c: self.c.unwrap_or(d.c),
            tol: self.tol.unwrap_or(d.tol),
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed,
            form,
        }
    }
}

fn defaults(algebra: &str, r: f64, theta: ThetaMode, tol: f64, samples: usize) -> Defaults {
    Defaults { algebra: algebra.parse().expect("valid default algebra"), r, theta, c: 0.01, tol, samples }
}

fn build(command: &Command) -> Result<(ExperimentConfig, &Output), Error> {
    let empirical = ThetaMode::Empirical { samples: EMPIRICAL_SAMPLES, radius: 1.0 };
    let none = ThetaMode::Analytic(0.0);
    Ok(match command {
        Command::VerifyAxioms(c) => {
            (c.config(Scenario::Axioms, None, defaults("matrix:3", 0.0, none, 1e-9, 1000)), &c.output)
        }
        Command::Stabilize { form, common } => {
            let r = common.r.unwrap_or(4.0);
            let scenario = Scenario::stability_for((*form).into(), r)?;
            (common.config(scenario, None, defaults("matrix:2", r, empirical, 1e-10, 50)), &common.output)
        }
        Command::Derivation { form, common } => (
            common.config(
                Scenario::Derivation,
                Some((*form).into()),
                defaults("matrix:2", 4.0, empirical, 1e-10, 50),
            ),
            &common.output,
        ),
        Command::Isomorphism(c) => (
            c.config(
                Scenario::Isomorphism,
                None,
                defaults("matrix:2", 2.0, ThetaMode::Analytic(1e-3), 1e-10, 50),
            ),
            &c.output,
        ),
        Command::Counterexample(c) => (
            c.config(
                Scenario::Counterexample,
                None,
                defaults("diag:1", 1.0, ThetaMode::Analytic(1.0), 1e-10, 100_000),
            ),
            &c.output,
        ),
        Command::Linearity(c) => {
            (c.config(Scenario::Linearity, None, defaults("matrix:3", 0.0, none, 1e-11, 200)), &c.output)
        }
        Command::Run { config, output } => (ExperimentConfig::load(config)?, output),
    })
}

fn emit(report: &ExperimentReport, output: &Output) -> Result<(), Error> {
    let format = match output.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    match &output.out {
        Some(path) => emit_report(report, format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_report(report, format, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli.command).and_then(|(config, output)| {
        let report = run_scenario(&config)?;
        emit(&report, output)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            let failed: Vec<&str> = report.failures().map(|l| l.law.as_str()).collect();
            eprintln!(
                "{}: {} ({}/{} laws) in {:.2?}",
                report.config.scenario.name(),
                if report.passed { "PASS" } else { "FAIL" },
                report.laws.len() - failed.len(),
                report.laws.len(),
                report.wall_clock,
            );
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join(", "));
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
