//! `report`: checks a run directory against its summary and renders the ratio table.

use std::fmt::Write;
use std::path::Path;

use crate::summary::{Body, Summary};
use crate::CliError;

/// Files every `iterate` run directory holds besides the dumps.
pub const ITERATE_FILES: [&str; 4] = ["summary.json", "diagnostics.csv", "energy.csv", "ratios.csv"];

/// Loads `summary.json` and confirms every artifact it lists exists.
pub fn validate_run(dir: &Path) -> Result<Summary, CliError> {
    if !dir.join("summary.json").is_file() {
        let missing: Vec<&str> = ITERATE_FILES.iter().copied().filter(|f| !dir.join(f).is_file()).collect();
        return Err(CliError::Artifacts(format!("{}: missing {}", dir.display(), missing.join(", "))));
    }
    let s = Summary::load(&dir.join("summary.json"))?;
    let missing: Vec<&str> = s.files.iter().map(String::as_str).filter(|f| !dir.join(f).is_file()).collect();
    if !missing.is_empty() {
        return Err(CliError::Artifacts(format!("{}: missing {}", dir.display(), missing.join(", "))));
    }
    Ok(s)
}

/// Plain-text rendering: the per-stage ratio table and every check.
pub fn render(s: &Summary) -> String {
    let mut out = String::new();
    if let Body::Iterate(it) = &s.body {
        let _ = write!(out, "{:>3}", "q");
        for n in &it.ratios.names {
            let _ = write!(out, " {n:>11}");
        }
        out.push('\n');
        for r in &it.ratios.rows {
            let _ = write!(out, "{:>3}", r.q);
            for v in r.values {
                let _ = write!(out, " {v:>11.4e}");
            }
            out.push('\n');
        }
        let _ = write!(out, "{:>3}", "max");
        for g in it.ratios.growth {
            // zero: no step with a nonzero previous value
            if g > 0.0 {
                let _ = write!(out, " {g:>10.3}x");
            } else {
                let _ = write!(out, " {:>11}", "-");
            }
        }
        out.push('\n');
        for l in &it.levels {
            let band = match (l.band_min, l.band_max) {
                (Some(a), Some(b)) => format!("[{a:.3}, {b:.3}]"),
                _ => "none".into(),
            };
            let _ = writeln!(
                out,
                "level {}: residual {:.2e} budget {:.2e} |P div R| {:.2e} gap band {band}",
                l.level, l.residual_max, l.budget_max, l.div_stress_max
            );
        }
    }
    for c in &s.checks {
        out.push_str(&c.line());
        out.push('\n');
    }
    let _ = writeln!(out, "{}", if s.passed { "all checks passed" } else { "some checks failed" });
    out
}
