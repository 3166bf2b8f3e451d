use serde::{Deserialize, Serialize};

/// Mixed absolute/relative violation: `|lhs - rhs| / (1 + |rhs|)`.
///
/// Callers pass norms: `diff = ‖lhs − rhs‖`, `reference = ‖rhs‖`.
pub fn mixed_violation(diff: f64, reference: f64) -> f64 {
    diff / (1.0 + reference)
}

/// Which side of the threshold counts as passing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    /// Passes iff the measured value is `<= threshold`.
    AtMost,
    /// Passes iff the measured value is `>= threshold` (negative controls).
    AtLeast,
}

/// Outcome of checking one law over a batch of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub max_violation: f64,
    pub threshold: f64,
    pub expect: Expect,
    pub pass: bool,
}

impl LawCheck {
    pub fn at_most(law: impl Into<String>, max_violation: f64, threshold: f64) -> Self {
        LawCheck {
            law: law.into(),
            max_violation,
            threshold,
            expect: Expect::AtMost,
            pass: max_violation <= threshold,
        }
    }

    pub fn at_least(law: impl Into<String>, value: f64, threshold: f64) -> Self {
        LawCheck {
            law: law.into(),
            max_violation: value,
            threshold,
            expect: Expect::AtLeast,
            pass: value >= threshold,
        }
    }

    /// Records a boolean outcome as a 0/1 violation against threshold 0.
    pub fn flag(law: impl Into<String>, holds: bool) -> Self {
        Self::at_most(law, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

/// Running maximum over per-sample violations.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct MaxTracker(pub f64);

impl MaxTracker {
    pub fn push(&mut self, value: f64) {
        if value > self.0 || value.is_nan() {
            self.0 = value;
        }
    }
}

/// A named batch of law checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub laws: Vec<LawCheck>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, laws: Vec<LawCheck>) -> Self {
        CheckReport { name: name.into(), laws }
    }

    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.pass)
    }

    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == name)
    }
}
