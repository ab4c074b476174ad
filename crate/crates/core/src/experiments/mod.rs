//! Monte Carlo studies that turn the qualitative theory into measurable
//! checks: sticky occupation, boundary regularity diagnostics, the
//! generator/martingale test, and the deterministic validation suites.
//!
//! Every study emits an [`ExperimentReport`]: named statistics (Monte Carlo
//! quantities carry a matching `<name>_se` entry), a pass/fail/inconclusive
//! verdict, and provenance (seed + configuration echo). Statistical verdicts
//! use three-standard-error bands and degrade to inconclusive when the
//! standard error exceeds the effect floor of `1e-3`.

mod generator;
mod martingale;
mod occupation;
mod suites;
mod testfn;

pub use generator::GeneratorEval;
pub use martingale::{martingale_test, MartingaleOutcome};
pub use occupation::{gamma_sweep_study, occupation_study};
pub use suites::{monotonicity_suite, no_solution_demo, reflection_axioms_suite};
pub use testfn::TestFunction;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Effect floor for statistical verdicts: standard errors above this make a
/// test inconclusive rather than a pass.
pub const EFFECT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Provenance of a study: everything needed to reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config: serde_json::Value,
}

/// Outcome of one study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub statistics: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: u64, config: serde_json::Value) -> Self {
        ExperimentReport {
            name: name.to_string(),
            statistics: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
            provenance: Provenance { seed, config },
        }
    }

    pub fn stat(&mut self, key: &str, value: f64) -> &mut Self {
        assert!(value.is_finite(), "statistic {key} is not finite: {value}");
        self.statistics.insert(key.to_string(), value);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Mean, standard error and extrema of a sample, merged associatively.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Summary {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let mut s = Summary { count: 0, sum: 0.0, sum_sq: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY };
        for v in values {
            s.count += 1;
            s.sum += v;
            s.sum_sq += v * v;
            s.min = s.min.min(v);
            s.max = s.max.max(v);
        }
        s
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Standard normal upper-tail probability, for one-sided z-tests.
pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}
