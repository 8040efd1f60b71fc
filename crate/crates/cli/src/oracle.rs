//! `oracle`: a reference solver run with its conserved quantities.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgci_solver::{conservation_report, write_csv, Solver};
use sqgci_spectral::dump::Dump;
use sqgci_spectral::random::random_scalar;

use crate::config::RunConfig;
use crate::summary::{Body, Check, OracleSummary, Summary};
use crate::{write_dump, CliError};

pub fn run_oracle(cfg: &RunConfig, out: &Path) -> Result<Summary, CliError> {
    let sc = cfg.solver_config()?;
    let solver = Solver::new(sc.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::create_dir_all(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let th = random_scalar(sc.grid, cfg.solver.radius, &mut rng).remove_mean();
    let sup = th.to_physical().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let th = if sup > 0.0 { th.scale(cfg.solver.amplitude / sup) } else { th };

    let mut files = Vec::new();
    let mut count = 0usize;
    let (_, records) = solver
        .run(&th, cfg.solver.record_every, |t, f| {
            if cfg.run.dumps && count % cfg.solver.dump_every == 0 {
                let name = format!("theta_{count:05}");
                files.push(write_dump(out, &name, &Dump::scalar(f, t)).map_err(|e| sqgci_solver::SolverError::Config(e.to_string()))?);
            }
            count += 1;
            Ok(())
        })
        .map_err(|e| match e {
            sqgci_solver::SolverError::Cfl { .. } => CliError::Assertion(e.to_string()),
            other => CliError::Io(other.to_string()),
        })?;
    let f = std::fs::File::create(out.join("conserved.csv"))?;
    write_csv(&records, f).map_err(|e| CliError::Io(e.to_string()))?;
    files.push("conserved.csv".into());
    files.push("summary.json".into());
    files.sort();

    let rep = conservation_report(&records);
    let mut checks = Vec::new();
    if sc.gamma == 0.0 {
        checks.push(Check::at_most("oracle.hamiltonian_drift", rep.hamiltonian_drift, cfg.tol("oracle.hamiltonian_drift", 1e-8)));
        checks.push(Check::at_most("oracle.l2_drift", rep.l2_drift, cfg.tol("oracle.l2_drift", 1e-8)));
    } else {
        checks.push(Check::holds("oracle.hamiltonian_strictly_decreasing", rep.hamiltonian_strictly_decreasing));
        checks.push(Check::holds("oracle.l2_nonincreasing", rep.l2_nonincreasing));
    }
    let body = OracleSummary {
        steps: sc.steps(),
        records: records.len(),
        hamiltonian_drift: rep.hamiltonian_drift,
        l2_drift: rep.l2_drift,
        l4_drift: rep.l4_drift,
        hamiltonian_strictly_decreasing: rep.hamiltonian_strictly_decreasing,
        l2_nonincreasing: rep.l2_nonincreasing,
    };
    let s = Summary::new(cfg.echo()?, Body::Oracle(body), checks, files);
    s.save(&out.join("summary.json"))?;
    Ok(s)
}
