use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::counterexample::DivergencePoint;
use crate::error::Result;
use crate::law::LawCheck;

pub const REPORT_SCHEMA: &str = "ternary-stability/report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    Analytic,
    Empirical,
    /// The scenario does not use a control level.
    Unused,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ExperimentConfig,
    pub theta_eff: Option<f64>,
    pub theta_source: ThetaSource,
    pub laws: Vec<LawCheck>,
    /// Rescaled iterates of the counterexample, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<DivergencePoint>>,
    pub passed: bool,
    /// Not serialized: reports must be byte-identical across runs.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ExperimentReport {
    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.laws.iter().filter(|l| !l.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(crate::error::Error::Config(format!("unknown format `{other}` (json|csv)"))),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    law: &'a str,
    max_violation: f64,
    threshold: f64,
    pass: bool,
}

/// Writes the report in the given format.
pub fn write_report(report: &ExperimentReport, format: ReportFormat, mut out: impl Write) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for law in &report.laws {
                w.serialize(CsvRow {
                    scenario: report.config.scenario.name(),
                    law: &law.law,
                    max_violation: law.max_violation,
                    threshold: law.threshold,
                    pass: law.pass,
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_report(report, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serializers emit UTF-8"))
}

/// Writes the report to `path`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path)
        .map_err(|e| crate::error::Error::from(e).context(format!("creating {}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    write_report(report, format, &mut out)?;
    out.flush()?;
    Ok(())
}
