//! `summary.json` and `verify.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ConfigEcho;
use crate::CliError;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One named check: `value` against `tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol, bound: Bound::AtMost, passed: value <= tol }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol, bound: Bound::AtLeast, passed: value >= tol }
    }

    /// A boolean recorded as `1` (holds) or `0`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn line(&self) -> String {
        let rel = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {}: {:.3e} {rel} {:.3e}", self.name, self.value, self.tol)
    }
}

/// Per-level aggregates over the sampled times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub grid: usize,
    pub samples: usize,
    pub residual_max: f64,
    pub budget_max: f64,
    pub div_stress_max: f64,
    /// `sup_t budget / sup_t ‖P div R̊‖`.
    pub budget_relative: f64,
    pub within_budget: bool,
    /// `max_t ‖O̊‖/(λρ_max)` over times without saturation.
    pub o1_relative_max: f64,
    /// Samples that entered `o1_relative_max`.
    pub o1_samples: usize,
    pub saturated_max: usize,
    pub ledger_max: f64,
    pub gap_min: f64,
    /// Band positions `gap/(λ_{l+1}δ_{l+1})` where every active `ρ_j ≠ 0`.
    pub band_min: Option<f64>,
    pub band_max: Option<f64>,
    pub stress_c0_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub q: usize,
    /// Sup over the sampled times of stage `q + 1`.
    pub values: [f64; 5],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub names: Vec<String>,
    pub rows: Vec<RatioRow>,
    /// Largest step-to-step factor per column.
    pub growth: [f64; 5],
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateSummary {
    pub levels: Vec<LevelSummary>,
    pub ratios: RatioTable,
    /// `(relaxed, exact)` band verdicts over every sampled gap.
    pub band_relaxed: bool,
    pub band_exact: bool,
    pub gap_nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub steps: usize,
    pub records: usize,
    pub hamiltonian_drift: f64,
    pub l2_drift: f64,
    pub l4_drift: f64,
    pub hamiltonian_strictly_decreasing: bool,
    pub l2_nonincreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Body {
    Iterate(IterateSummary),
    Verify { seed: u64 },
    Oracle(OracleSummary),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub body: Body,
    pub checks: Vec<Check>,
    /// Artifacts written next to the summary, relative to the run directory.
    pub files: Vec<String>,
    pub passed: bool,
}

impl Summary {
    pub fn new(config: ConfigEcho, body: Body, checks: Vec<Check>, files: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { schema_version: SCHEMA_VERSION, config, body, checks, files, passed }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Artifacts(format!("summary: {e}")))?;
        match v.get("schema_version").and_then(|x| x.as_u64()) {
            Some(x) if x == SCHEMA_VERSION as u64 => {}
            other => return Err(CliError::Artifacts(format!("schema_version {other:?}, expected {SCHEMA_VERSION}"))),
        }
        serde_json::from_value(v).map_err(|e| CliError::Artifacts(format!("summary: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Artifacts(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}
