use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqgci_cli::{iterate, oracle, report, verdict, verify, CliError, RunConfig, Summary};

#[derive(Parser)]
#[command(name = "sqgci", version, about = "Convex-integration scheme for SQG: runs, property suites and reports")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// INI configuration file; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory.
    #[arg(long, global = true, default_value = "run")]
    out: PathBuf,
    /// Serial deterministic evaluation (the only mode).
    #[arg(long, global = true)]
    serial: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override `KEY=VAL`, repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the levels and write diagnostics, dumps and summary.json.
    Iterate,
    /// Run every property suite.
    Verify,
    /// Reference solver run with conserved quantities.
    Oracle,
    /// Validate a run directory and print its tables.
    Report,
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        c.run.seed = s;
    }
    c.run.serial = true;
    for t in &cli.tol {
        c.override_tolerance(t)?;
    }
    Ok(c)
}

fn finish(s: &Summary) -> Result<(), CliError> {
    print!("{}", report::render(s));
    verdict(s)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config(cli)?;
    match cli.cmd {
        Cmd::Iterate => finish(&iterate::run_iterate(&cfg, &cli.out)?.summary),
        Cmd::Verify => finish(&verify::run_verify(&cfg, &cli.out)?),
        Cmd::Oracle => finish(&oracle::run_oracle(&cfg, &cli.out)?),
        Cmd::Report => {
            let s = report::validate_run(&cli.out)?;
            finish(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sqgci: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
