//! `iterate`: builds the levels, samples every diagnostic and writes the artifacts.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sqgci_engine::diagnostics::{outside_fraction, ratio_growth, RATIO_NAMES};
use sqgci_engine::Scheme;
use sqgci_spectral::dump::Dump;

use crate::config::RunConfig;
use crate::summary::{Body, Check, IterateSummary, LevelSummary, RatioRow, RatioTable, Summary};
use crate::{write_dump, write_rows, CliError};

/// One row of `diagnostics.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagRow {
    pub level: usize,
    pub t: f64,
    pub h: f64,
    pub energy: f64,
    pub gap: f64,
    pub scale: f64,
    pub position: f64,
    pub all_rho_nonzero: bool,
    pub stress_c0: f64,
    pub residual: f64,
    pub div_stress: f64,
    pub budget_fd: f64,
    pub budget_quadrature: f64,
    pub budget_interpolation: f64,
    pub budget_roundoff: f64,
    pub budget_inherited: f64,
    pub budget_total: f64,
    pub o1_max: f64,
    pub rho_max: f64,
    pub nash_route_gap: f64,
    pub remainder_ratio: f64,
    pub saturation_ratio: f64,
    pub saturated: usize,
    pub one_sided: bool,
    pub ledger: f64,
    pub w_outside: f64,
    pub v_outside: f64,
    pub stress_outside: f64,
}

/// One row of `energy.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub level: usize,
    pub t: f64,
    pub h: f64,
    pub energy: f64,
    pub gap: f64,
    pub scale: f64,
    pub position: f64,
    pub all_rho_nonzero: bool,
}

/// One row of `ratios.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub q: usize,
    pub t: f64,
    pub w_c0: f64,
    pub v_c1: f64,
    pub stress_c0: f64,
    pub dt_v: f64,
    pub dt_stress: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
struct Timing {
    levels: Vec<f64>,
    ratios: f64,
    energy: f64,
    dumps: f64,
    total: f64,
}

pub struct IterateRun {
    pub summary: Summary,
    pub diagnostics: Vec<DiagRow>,
    pub energy: Vec<EnergyRow>,
    pub ratios: Vec<RatioSample>,
}

/// Sample times of level `l`: `count` points spread over one cutoff period.
pub fn sample_times(s: &Scheme, start: f64, l: usize, count: usize) -> Vec<f64> {
    let tau = s.tau(l);
    (0..count).map(|i| start + tau * (i as f64 + 0.37) / count as f64).collect()
}

fn diag_row(s: &Scheme, l: usize, t: f64) -> Result<DiagRow, CliError> {
    let lam = s.lambda(l);
    let e = s.energy_sample(l, t)?;
    let r = s.residual(l, t)?;
    let b = s.stress(l, t)?;
    let d = &b.diagnostics;
    let w = s.waves(l, t, 0)?;
    let mut stress_outside = 0.0f64;
    for (name, f) in b.pieces() {
        // the pulled-back stress is a composition with a flow map
        if name != "osc_approx" || l == 1 {
            stress_outside = stress_outside.max(outside_fraction(f, 0.0, 4.0 * lam));
        }
    }
    Ok(DiagRow {
        level: l,
        t,
        h: e.h,
        energy: e.energy,
        gap: e.gap,
        scale: e.scale,
        position: e.position(),
        all_rho_nonzero: e.all_rho_nonzero,
        stress_c0: e.stress,
        residual: r.residual,
        div_stress: r.div_stress,
        budget_fd: r.budget.fd,
        budget_quadrature: r.budget.quadrature,
        budget_interpolation: r.budget.interpolation,
        budget_roundoff: r.budget.roundoff,
        budget_inherited: r.budget.inherited,
        budget_total: r.budget.total(),
        o1_max: d.o1_max,
        rho_max: d.rho_max,
        nash_route_gap: d.nash_route_gap,
        remainder_ratio: d.remainder_ratio,
        saturation_ratio: d.saturation.max_ratio,
        saturated: d.saturation.saturated,
        one_sided: d.one_sided,
        ledger: s.hamiltonian_ledger(l, t)?,
        w_outside: outside_fraction(&w.w, lam / 2.0, 2.0 * lam),
        v_outside: outside_fraction(&s.v(l, t)?, 0.0, 2.0 * lam),
        stress_outside,
    })
}

fn level_summary(s: &Scheme, l: usize, rows: &[&DiagRow]) -> LevelSummary {
    let max = |f: &dyn Fn(&DiagRow) -> f64| rows.iter().map(|r| f(r)).fold(0.0, f64::max);
    let lam = s.lambda(l);
    let unsaturated: Vec<f64> = rows.iter().filter(|r| r.saturated == 0 && r.rho_max > 0.0).map(|r| r.o1_max / (lam * r.rho_max)).collect();
    let band: Vec<f64> = rows.iter().filter(|r| r.all_rho_nonzero).map(|r| r.position).collect();
    let budget_max = max(&|r| r.budget_total);
    let div_max = max(&|r| r.div_stress);
    LevelSummary {
        level: l,
        grid: s.grid(l).n(),
        samples: rows.len(),
        residual_max: max(&|r| r.residual),
        budget_max,
        div_stress_max: div_max,
        budget_relative: if div_max > 0.0 { budget_max / div_max } else { 0.0 },
        within_budget: rows.iter().all(|r| r.residual <= r.budget_total),
        o1_relative_max: unsaturated.iter().copied().fold(0.0, f64::max),
        o1_samples: unsaturated.len(),
        saturated_max: rows.iter().map(|r| r.saturated).max().unwrap_or(0),
        ledger_max: max(&|r| r.ledger),
        gap_min: rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
        band_min: band.iter().copied().reduce(f64::min),
        band_max: band.iter().copied().reduce(f64::max),
        stress_c0_max: max(&|r| r.stress_c0),
    }
}

fn energy_rows(s: &Scheme, cfg: &RunConfig) -> Result<Vec<EnergyRow>, CliError> {
    let (t0, t1) = (cfg.profile.t0, cfg.profile.t1);
    let n = cfg.sampling.energy_samples;
    let deepest = s.top().min(cfg.sampling.energy_max_level);
    let mut out = Vec::new();
    for i in 0..n {
        let t = t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64;
        for l in 1..=deepest {
            let h = s.profile_value(t);
            let energy = s.energy(l, t)?;
            let scale = cfg.params()?.stress_scale(l + 1);
            let mut all = true;
            for j in s.active(l, t) {
                all &= s.rho(l, j)? != 0.0;
            }
            out.push(EnergyRow { level: l, t, h, energy, gap: h - energy, scale, position: (h - energy) / scale, all_rho_nonzero: all });
        }
    }
    Ok(out)
}

fn checks(cfg: &RunConfig, levels: &[LevelSummary]) -> Vec<Check> {
    let mut out = Vec::new();
    for lv in levels {
        let p = format!("level{}", lv.level);
        out.push(Check::holds(format!("{p}.residual_within_budget"), lv.within_budget));
        if lv.level == 1 {
            out.push(Check::at_most(format!("{p}.budget_relative"), lv.budget_relative, cfg.tol("residual.relative", 1e-4)));
        }
        // saturated samples are not expected to cancel
        if lv.level == 1 || lv.o1_samples > 0 {
            out.push(Check::at_most(format!("{p}.o1_cancellation"), lv.o1_relative_max, cfg.tol("o1.relative", 1e-9)));
        }
        out.push(Check::at_most(format!("{p}.ledger"), lv.ledger_max, cfg.tol("ledger", 1e-12)));
    }
    out
}

fn support_checks(cfg: &RunConfig, rows: &[DiagRow], levels: usize) -> Vec<Check> {
    let tol = cfg.tol("support", 1e-12);
    let mut out = Vec::new();
    for l in 1..=levels {
        let rs: Vec<&DiagRow> = rows.iter().filter(|r| r.level == l).collect();
        let m = |f: &dyn Fn(&DiagRow) -> f64| rs.iter().map(|r| f(r)).fold(0.0, f64::max);
        out.push(Check::at_most(format!("level{l}.nash_routes"), m(&|r| r.nash_route_gap), cfg.tol("nash.routes", 1e-12)));
        out.push(Check::at_most(format!("level{l}.support_w"), m(&|r| r.w_outside), tol));
        out.push(Check::at_most(format!("level{l}.support_v"), m(&|r| r.v_outside), tol));
        out.push(Check::at_most(format!("level{l}.support_stress"), m(&|r| r.stress_outside), tol));
    }
    out
}

/// Runs the construction and writes every artifact into `out`.
pub fn run_iterate(cfg: &RunConfig, out: &Path) -> Result<IterateRun, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let clock = Instant::now();
    let s = Scheme::new(cfg.engine()?)?;
    let top = s.top();
    let start = cfg.sampling.start;
    let mut timing = Timing::default();

    let mut diagnostics = Vec::new();
    for l in 1..=top {
        let c = Instant::now();
        for t in sample_times(&s, start, l, cfg.samples(l)) {
            diagnostics.push(diag_row(&s, l, t)?);
        }
        timing.levels.push(c.elapsed().as_secs_f64());
    }

    let c = Instant::now();
    let mut ratios = Vec::new();
    let mut rows = Vec::new();
    for q in 0..top {
        let mut sup = [0.0f64; 5];
        for t in sample_times(&s, start, q + 1, cfg.samples(q + 1)) {
            let r = s.inductive_ratios(q, t)?;
            for i in 0..5 {
                sup[i] = sup[i].max(r[i]);
            }
            ratios.push(RatioSample { q, t, w_c0: r[0], v_c1: r[1], stress_c0: r[2], dt_v: r[3], dt_stress: r[4] });
        }
        rows.push(RatioRow { q, values: sup });
    }
    timing.ratios = c.elapsed().as_secs_f64();
    let series: Vec<[f64; 5]> = rows.iter().map(|r| r.values).collect();
    let growth = ratio_growth(&series);
    let table = RatioTable {
        names: RATIO_NAMES.iter().map(|s| s.to_string()).collect(),
        rows,
        bounded: growth.iter().all(|&g| g <= 2.0),
        growth,
    };

    let c = Instant::now();
    let energy = energy_rows(&s, cfg)?;
    timing.energy = c.elapsed().as_secs_f64();

    let mut files = vec![
        write_rows(out, "diagnostics.csv", &diagnostics)?,
        write_rows(out, "energy.csv", &energy)?,
        write_rows(out, "ratios.csv", &ratios)?,
    ];
    let c = Instant::now();
    if cfg.run.dumps {
        let t = sample_times(&s, start, top, cfg.samples(top))[0];
        for l in 1..=top {
            files.push(write_dump(out, &format!("v_q{l}"), &Dump::vector(&s.v(l, t)?, t))?);
            files.push(write_dump(out, &format!("w_q{l}"), &Dump::vector(&s.waves(l, t, 0)?.w, t))?);
            files.push(write_dump(out, &format!("stress_q{l}"), &Dump::matrix(&s.stress_total(l, t)?, t))?);
        }
    }
    timing.dumps = c.elapsed().as_secs_f64();

    let levels: Vec<LevelSummary> = (1..=top)
        .map(|l| level_summary(&s, l, &diagnostics.iter().filter(|r| r.level == l).collect::<Vec<_>>()))
        .collect();
    let gaps = diagnostics.iter().map(|r| (r.gap, r.all_rho_nonzero, r.position)).chain(energy.iter().map(|r| (r.gap, r.all_rho_nonzero, r.position)));
    let gaps: Vec<_> = gaps.collect();
    let body = IterateSummary {
        gap_nonnegative: gaps.iter().all(|g| g.0 >= 0.0),
        band_relaxed: gaps.iter().filter(|g| g.1).all(|g| (0.1..=0.9).contains(&g.2)),
        band_exact: gaps.iter().filter(|g| g.1).all(|g| (0.25..=0.75).contains(&g.2)),
        ratios: table,
        levels,
    };
    let mut all = checks(cfg, &body.levels);
    all.extend(support_checks(cfg, &diagnostics, top));
    files.push("summary.json".into());
    files.sort();
    let summary = Summary::new(cfg.echo()?, Body::Iterate(body), all, files);
    summary.save(&out.join("summary.json"))?;

    timing.total = clock.elapsed().as_secs_f64();
    let t = serde_json::to_string_pretty(&timing).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(out.join("timing.json"), t + "\n")?;
    Ok(IterateRun { summary, diagnostics, energy, ratios })
}
