//! Run configuration: an INI file with sections, then flag overrides.

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;
use serde::{Deserialize, Serialize};
use sqgci_engine::{EngineConfig, GuardPolicy, Profile, ProfileKind};
use sqgci_solver::SolverConfig;
use sqgci_spectral::{friendly_size, Grid};
use sqgci_transport::SchemeParams;
use sqgci_waves::estimate_epsilon_gamma;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSection {
    pub lambda0: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q_max: usize,
    /// Points per side of the finest level; 0 picks the smallest size with
    /// `n ≥ 4λ_{q_max+1}`.
    pub grid_n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSection {
    pub name: String,
    pub t0: f64,
    pub t1: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSection {
    /// Start of the sampled window.
    pub start: f64,
    /// Sample times per level, finest last; the last entry repeats.
    pub per_level: Vec<usize>,
    /// Velocity history samples per cutoff period.
    pub time_samples_per_tau: usize,
    /// Uniform times over the profile support for `energy.csv`.
    pub energy_samples: usize,
    /// Deepest level written to `energy.csv`.
    pub energy_max_level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericsSection {
    pub nodes: usize,
    pub fd_fraction: f64,
    pub guard: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub n: usize,
    pub dt: f64,
    pub gamma: f64,
    pub t_end: f64,
    pub record_every: usize,
    /// Dump every this many records.
    pub dump_every: usize,
    /// Initial data: random band-limited field of this radius, scaled to this sup.
    pub radius: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub seed: u64,
    pub serial: bool,
    pub dumps: bool,
    /// Random fields per suite in `verify`.
    pub verify_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheme: SchemeSection,
    pub profile: ProfileSection,
    pub sampling: SamplingSection,
    pub numerics: NumericsSection,
    pub solver: SolverSection,
    pub run: RunSection,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeSection { lambda0: 5.0, beta: 0.6, gamma: 0.0, q_max: 2, grid_n: 0 },
            profile: ProfileSection { name: "cos2".into(), t0: 0.0, t1: 2.0, amplitude: 12.0 },
            sampling: SamplingSection {
                start: 0.9,
                per_level: vec![12, 6, 3],
                time_samples_per_tau: 16,
                energy_samples: 24,
                energy_max_level: 2,
            },
            numerics: NumericsSection { nodes: 32, fd_fraction: 2.5e-4, guard: "saturate".into() },
            solver: SolverSection {
                n: 32,
                dt: 0.002,
                gamma: 0.0,
                t_end: 2.0,
                record_every: 10,
                dump_every: 25,
                radius: 4.0,
                amplitude: 1.0,
            },
            run: RunSection { seed: 0, serial: true, dumps: true, verify_count: 100 },
            tolerances: BTreeMap::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(sec: &str, key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| CliError::Config(format!("[{sec}] {key} = {v:?} does not parse")))
}

fn parse_list(sec: &str, key: &str, v: &str) -> Result<Vec<usize>, CliError> {
    let out = v.split(',').map(|s| parse(sec, key, s)).collect::<Result<Vec<usize>, _>>()?;
    if out.is_empty() || out.contains(&0) {
        return Err(CliError::Config(format!("[{sec}] {key} needs positive entries")));
    }
    Ok(out)
}

fn parse_bool(sec: &str, key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("[{sec}] {key} = {v:?} is not a boolean"))),
    }
}

impl RunConfig {
    pub fn from_ini_str(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut c = Self::default();
        for (sec, props) in &ini {
            let sec = sec.unwrap_or("");
            for (key, v) in props.iter() {
                c.set(sec, key, v)?;
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_ini_str(&text)
    }

    fn set(&mut self, sec: &str, key: &str, v: &str) -> Result<(), CliError> {
        let s = sec;
        match (sec, key) {
            ("scheme", "lambda0") => self.scheme.lambda0 = parse(s, key, v)?,
            ("scheme", "beta") => self.scheme.beta = parse(s, key, v)?,
            ("scheme", "gamma") => self.scheme.gamma = parse(s, key, v)?,
            ("scheme", "q_max") => self.scheme.q_max = parse(s, key, v)?,
            ("scheme", "grid_n") => self.scheme.grid_n = parse(s, key, v)?,
            ("profile", "name") => self.profile.name = v.trim().to_string(),
            ("profile", "t0") => self.profile.t0 = parse(s, key, v)?,
            ("profile", "t1") => self.profile.t1 = parse(s, key, v)?,
            ("profile", "amplitude") => self.profile.amplitude = parse(s, key, v)?,
            ("sampling", "start") => self.sampling.start = parse(s, key, v)?,
            ("sampling", "per_level") => self.sampling.per_level = parse_list(s, key, v)?,
            ("sampling", "time_samples_per_tau") => self.sampling.time_samples_per_tau = parse(s, key, v)?,
            ("sampling", "energy_samples") => self.sampling.energy_samples = parse(s, key, v)?,
            ("sampling", "energy_max_level") => self.sampling.energy_max_level = parse(s, key, v)?,
            ("numerics", "nodes") => self.numerics.nodes = parse(s, key, v)?,
            ("numerics", "fd_fraction") => self.numerics.fd_fraction = parse(s, key, v)?,
            ("numerics", "guard") => self.numerics.guard = v.trim().to_string(),
            ("solver", "n") => self.solver.n = parse(s, key, v)?,
            ("solver", "dt") => self.solver.dt = parse(s, key, v)?,
            ("solver", "gamma") => self.solver.gamma = parse(s, key, v)?,
            ("solver", "t_end") => self.solver.t_end = parse(s, key, v)?,
            ("solver", "record_every") => self.solver.record_every = parse(s, key, v)?,
            ("solver", "dump_every") => self.solver.dump_every = parse(s, key, v)?,
            ("solver", "radius") => self.solver.radius = parse(s, key, v)?,
            ("solver", "amplitude") => self.solver.amplitude = parse(s, key, v)?,
            ("run", "seed") => self.run.seed = parse(s, key, v)?,
            ("run", "serial") => self.run.serial = parse_bool(s, key, v)?,
            ("run", "dumps") => self.run.dumps = parse_bool(s, key, v)?,
            ("run", "verify_count") => self.run.verify_count = parse(s, key, v)?,
            ("tolerances", _) => {
                self.tolerances.insert(key.to_string(), parse(s, key, v)?);
            }
            _ => return Err(CliError::Config(format!("unknown key [{sec}] {key}"))),
        }
        Ok(())
    }

    /// Applies a `KEY=VAL` tolerance override.
    pub fn override_tolerance(&mut self, spec: &str) -> Result<(), CliError> {
        let (k, v) = spec.split_once('=').ok_or_else(|| CliError::Config(format!("--tol expects KEY=VAL, got {spec:?}")))?;
        let v: f64 = parse("tolerances", k, v)?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Config(format!("tolerance {k} = {v} must be finite and nonnegative")));
        }
        self.tolerances.insert(k.trim().to_string(), v);
        Ok(())
    }

    /// Tolerance for `key`, or `default`.
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn params(&self) -> Result<SchemeParams, CliError> {
        SchemeParams::new(self.scheme.lambda0, self.scheme.beta, self.scheme.gamma).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `grid_n`, resolved.
    pub fn grid_n(&self) -> Result<usize, CliError> {
        let need = 4.0 * self.params()?.lambda(self.scheme.q_max + 1);
        if self.scheme.grid_n == 0 {
            return Ok(friendly_size(need.ceil() as usize));
        }
        Ok(self.scheme.grid_n)
    }

    pub fn profile(&self) -> Result<Profile, CliError> {
        let kind = match self.profile.name.as_str() {
            "cos2" => ProfileKind::Cos2,
            "bump" => ProfileKind::Bump,
            other => return Err(CliError::Config(format!("unknown profile {other:?} (cos2 or bump)"))),
        };
        let p = &self.profile;
        if !(p.t1 > p.t0) || !(p.amplitude >= 0.0) || !p.amplitude.is_finite() {
            return Err(CliError::Config("profile needs t1 > t0 and amplitude >= 0".into()));
        }
        Ok(Profile::new(kind, p.t0, p.t1, p.amplitude))
    }

    /// Checks everything the run modes rely on. Resolution shortfalls are
    /// refusals, everything else is a configuration error.
    pub fn validate(&self) -> Result<(), CliError> {
        let params = self.params()?;
        self.profile()?;
        if self.sampling.per_level.is_empty() || self.sampling.per_level.contains(&0) {
            return Err(CliError::Config("[sampling] per_level needs positive entries".into()));
        }
        if !matches!(self.numerics.guard.as_str(), "saturate" | "abort") {
            return Err(CliError::Config(format!("guard = {:?} (saturate or abort)", self.numerics.guard)));
        }
        let n = self.grid_n()?;
        let top = params.lambda(self.scheme.q_max + 1);
        if (n as f64) < 4.0 * top {
            return Err(CliError::Refused(format!("grid_n = {n} is below 4·λ_{} = {}", self.scheme.q_max + 1, 4.0 * top)));
        }
        self.engine()?.validate().map_err(CliError::from)?;
        self.solver_config()?.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn engine(&self) -> Result<EngineConfig, CliError> {
        let mut e = EngineConfig::new(self.params()?, self.scheme.q_max, self.grid_n()?, self.profile()?);
        e.guard = if self.numerics.guard == "abort" { GuardPolicy::Abort } else { GuardPolicy::Saturate };
        e.nodes = self.numerics.nodes;
        e.fd_fraction = self.numerics.fd_fraction;
        e.history_per_tau = self.sampling.time_samples_per_tau;
        Ok(e)
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let s = &self.solver;
        let grid = Grid::new(s.n).map_err(|e| CliError::Config(format!("[solver] n: {e}")))?;
        if s.record_every == 0 || s.dump_every == 0 {
            return Err(CliError::Config("[solver] record_every and dump_every must be positive".into()));
        }
        Ok(SolverConfig::new(grid, s.dt, s.gamma, s.t_end))
    }

    /// Sample count of level `l ≥ 1`.
    pub fn samples(&self, l: usize) -> usize {
        let p = &self.sampling.per_level;
        p[(l - 1).min(p.len() - 1)]
    }

    /// Resolved configuration with the derived scheme sequences.
    pub fn echo(&self) -> Result<ConfigEcho, CliError> {
        let p = self.params()?;
        let eps = estimate_epsilon_gamma();
        let levels = (0..=self.scheme.q_max + 2)
            .map(|q| DerivedLevel {
                q,
                lambda: p.lambda(q),
                delta: p.delta(q),
                tau_next: p.tau(q),
                stress_scale: p.stress_scale(q),
            })
            .collect();
        Ok(ConfigEcho {
            resolved: self.clone(),
            grid_n: self.grid_n()?,
            levels,
            epsilon_gamma: eps,
            epsilon_r: SchemeParams::epsilon_r(eps),
        })
    }
}

/// `λ_q, δ_q, τ_{q+1}` and `λ_qδ_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedLevel {
    pub q: usize,
    pub lambda: f64,
    pub delta: f64,
    pub tau_next: f64,
    pub stress_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub resolved: RunConfig,
    pub grid_n: usize,
    pub levels: Vec<DerivedLevel>,
    pub epsilon_gamma: f64,
    pub epsilon_r: f64,
}
