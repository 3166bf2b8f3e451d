use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraDescriptor;
use crate::error::{Error, Result};
use crate::mappings::ControlForm;
use crate::stabilizer::{Direction, Regime};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Axioms,
    StabilitySumContract,
    StabilitySumExpand,
    StabilityProdContract,
    StabilityProdExpand,
    Derivation,
    Isomorphism,
    Counterexample,
    Linearity,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Axioms => "axioms",
            Scenario::StabilitySumContract => "stability_sum_contract",
            Scenario::StabilitySumExpand => "stability_sum_expand",
            Scenario::StabilityProdContract => "stability_prod_contract",
            Scenario::StabilityProdExpand => "stability_prod_expand",
            Scenario::Derivation => "derivation",
            Scenario::Isomorphism => "isomorphism",
            Scenario::Counterexample => "counterexample",
            Scenario::Linearity => "linearity",
        }
    }

    /// The stability scenario matching a control form and the side of its
    /// critical exponent that `r` lies on.
    pub fn stability_for(form: ControlForm, r: f64) -> Result<Scenario> {
        Ok(match (form, direction_for(form, r)?) {
            (ControlForm::Sum, Direction::Contract) => Scenario::StabilitySumContract,
            (ControlForm::Sum, Direction::Expand) => Scenario::StabilitySumExpand,
            (ControlForm::Product, Direction::Contract) => Scenario::StabilityProdContract,
            (ControlForm::Product, Direction::Expand) => Scenario::StabilityProdExpand,
        })
    }
}

/// Contract above the critical exponent, expand below it.
fn direction_for(form: ControlForm, r: f64) -> Result<Direction> {
    let (lo, hi) = match form {
        ControlForm::Sum => (1.0, 3.0),
        ControlForm::Product => (1.0 / 3.0, 1.0 / 3.0),
    };
    if r > hi {
        Ok(Direction::Contract)
    } else if r < lo {
        Ok(Direction::Expand)
    } else {
        Err(Error::Config(format!("r = {r} lies in no {form:?}-form regime")))
    }
}

/// How the control level `θ` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    Analytic(f64),
    /// Measured with `estimate_theta` over `samples` triples in the ball of `radius`.
    Empirical {
        samples: usize,
        radius: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub algebra: AlgebraDescriptor,
    pub r: f64,
    pub theta: ThetaMode,
    pub c: f64,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Control form for the derivation scenario; the stability scenarios
    /// carry it in their name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<ControlForm>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(format!("loading {}", path.display())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.algebra.validated().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return bad(format!("c must be finite and ≥ 0, got {}", self.c));
        }
        match self.theta {
            ThetaMode::Analytic(t) if !(t >= 0.0 && t.is_finite()) => {
                return bad(format!("analytic θ must be finite and ≥ 0, got {t}"));
            }
            ThetaMode::Empirical { samples, radius }
                if samples == 0 || !(radius > 0.0 && radius.is_finite()) =>
            {
                return bad(format!(
                    "empirical θ needs samples ≥ 1 and radius > 0, got {samples} and {radius}"
                ));
            }
            _ => {}
        }
        if self.form.is_some() && self.scenario != Scenario::Derivation {
            return bad(format!(
                "`form` only applies to the derivation scenario, not {}",
                self.scenario.name()
            ));
        }
        if self.scenario_uses_regime() {
            self.regime(0.0).map_err(|e| Error::Config(e.to_string()))?;
        }
        match self.scenario {
            Scenario::Derivation if !matches!(self.algebra, AlgebraDescriptor::MatrixConjugation(_)) => {
                bad(format!("the derivation scenario needs a matrix algebra, got {}", self.algebra))
            }
            Scenario::Isomorphism if !self.algebra.is_unital() => {
                bad(format!("the isomorphism scenario needs a unital algebra, got {}", self.algebra))
            }
            Scenario::Counterexample => {
                if self.algebra != AlgebraDescriptor::PointwiseDiagonal(1) {
                    return bad(format!("the counterexample lives on diag:1, got {}", self.algebra));
                }
                match self.theta {
                    ThetaMode::Analytic(t) if t > 0.0 => Ok(()),
                    _ => bad("the counterexample needs an analytic θ > 0".into()),
                }
            }
            _ => Ok(()),
        }
    }

    fn scenario_uses_regime(&self) -> bool {
        !matches!(self.scenario, Scenario::Axioms | Scenario::Counterexample | Scenario::Linearity)
    }

    /// Control form the scenario is stated in.
    pub fn control_form(&self) -> ControlForm {
        match self.scenario {
            Scenario::StabilityProdContract | Scenario::StabilityProdExpand => ControlForm::Product,
            Scenario::Derivation => self.form.unwrap_or(ControlForm::Sum),
            _ => ControlForm::Sum,
        }
    }

    /// The regime the scenario runs in, at level `theta`.
    pub fn regime(&self, theta: f64) -> Result<Regime> {
        let form = self.control_form();
        let fixed = |direction: Direction| Regime::new(form, direction, self.r, theta);
        match self.scenario {
            Scenario::StabilitySumContract | Scenario::StabilityProdContract => fixed(Direction::Contract),
            Scenario::StabilitySumExpand | Scenario::StabilityProdExpand => fixed(Direction::Expand),
            Scenario::Derivation => fixed(direction_for(form, self.r)?),
            Scenario::Isomorphism => {
                if self.r <= 1.0 {
                    return Err(Error::Regime(format!(
                        "the isomorphism scenario needs r > 1, got {}",
                        self.r
                    )));
                }
                Regime::with_override(ControlForm::Sum, Direction::Contract, self.r, theta)
            }
            _ => Err(Error::Config(format!("{} has no regime", self.scenario.name()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            scenario: Scenario::StabilitySumContract,
            algebra: AlgebraDescriptor::MatrixConjugation(2),
            r: 4.0,
            theta: ThetaMode::Empirical { samples: 100, radius: 1.0 },
            c: 0.01,
            tol: 1e-10,
            samples: 10,
            seed: 1,
            form: None,
        }
    }

    #[test]
    fn round_trip() {
        let c = base();
        let text = c.to_json().unwrap();
        assert!(text.contains("\"algebra\": \"matrix:2\""));
        assert!(text.contains("\"empirical\""));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn rejects_incompatible_regime() {
        let mut c = base();
        c.r = 2.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.scenario = Scenario::StabilitySumExpand;
        assert!(c.validate().is_err());
        c.r = 0.5;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_bad_fields() {
        let mut c = base();
        c.tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.samples = 0;
        assert!(c.validate().is_err());
        let mut c = base();
        c.form = Some(ControlForm::Product);
        assert!(c.validate().is_err());
        let mut c = base();
        c.schema_version = 2;
        assert!(c.validate().is_err());
        let text = base().to_json().unwrap().replace("\"seed\"", "\"sede\"");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn derivation_direction_follows_r() {
        let mut c = base();
        c.scenario = Scenario::Derivation;
        c.form = Some(ControlForm::Product);
        c.r = 0.25;
        assert_eq!(c.regime(1.0).unwrap().direction(), Direction::Expand);
        c.r = 1.0;
        assert_eq!(c.regime(1.0).unwrap().direction(), Direction::Contract);
        c.r = 1.0 / 3.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn counterexample_needs_analytic_theta_on_scalars() {
        let mut c = base();
        c.scenario = Scenario::Counterexample;
        assert!(c.validate().is_err());
        c.algebra = AlgebraDescriptor::PointwiseDiagonal(1);
        assert!(c.validate().is_err());
        c.theta = ThetaMode::Analytic(1.0);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn stability_for_r() {
        assert_eq!(Scenario::stability_for(ControlForm::Sum, 4.0).unwrap(), Scenario::StabilitySumContract);
        assert_eq!(
            Scenario::stability_for(ControlForm::Product, 0.25).unwrap(),
            Scenario::StabilityProdExpand
        );
        assert!(Scenario::stability_for(ControlForm::Sum, 2.0).is_err());
    }
}
