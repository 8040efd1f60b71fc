//! Pseudo-spectral integrator for SQG, `∂_tθ + u·∇θ + Λ^γθ = 0`, `u = ∇⊥Λ^{-1}θ`.
//!
//! Classical RK4 on the advection term with an exact integrating factor for
//! `Λ^γ`. Products are alias-free (see `sqgci_spectral::ops::product`), so the
//! semi-discrete system is a Galerkin truncation and conserves the Hamiltonian
//! and `L²` up to the time-stepping error. `γ = 0` means no dissipation.

use std::f64::consts::PI;
use std::io::Write;

use sqgci_operators::riesz_perp;
use sqgci_spectral::ops::{dot, grad};
use sqgci_spectral::{Grid, ScalarField};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("θ has nonzero mean {0:e}")]
    NonzeroMean(f64),
    #[error("CFL number {cfl:.3} exceeds {limit}")]
    Cfl { cfl: f64, limit: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub dt: f64,
    pub gamma: f64,
    pub t_end: f64,
    /// Treat `Λ^γ` exactly through `e^{-|k|^γ t}`; otherwise inside the RK4 stages.
    pub integrating_factor: bool,
    pub cfl_limit: f64,
}

impl SolverConfig {
    pub fn new(grid: Grid, dt: f64, gamma: f64, t_end: f64) -> Self {
        Self { grid, dt, gamma, t_end, integrating_factor: true, cfl_limit: 0.5 }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.gamma >= 0.0 && self.gamma <= 2.0) {
            return Err(SolverError::Config(format!("gamma = {} outside [0, 2]", self.gamma)));
        }
        if !(self.t_end >= 0.0) {
            return Err(SolverError::Config(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

fn check_mean(theta: &ScalarField) -> Result<(), SolverError> {
    let m = theta.coeffs()[0].norm();
    if m > 1e-13 * theta.max_coeff().max(1e-300) {
        return Err(SolverError::NonzeroMean(m));
    }
    Ok(())
}

/// `u·∇θ` with `u = R⊥θ`, mean set to exactly zero.
pub fn advection(theta: &ScalarField) -> ScalarField {
    let u = riesz_perp(theta);
    let a = dot(&u, &grad(theta));
    let mut c = a.into_coeffs();
    c[0] = 0.0.into();
    ScalarField::from_coeffs(theta.grid(), c)
}

/// `-u·∇θ`; the dissipation is left to the integrating factor.
pub fn sqg_rhs(theta: &ScalarField) -> Result<ScalarField, SolverError> {
    check_mean(theta)?;
    Ok(-&advection(theta))
}

/// `dt·max(|u¹| + |u²|)/Δx`.
pub fn cfl_number(theta: &ScalarField, dt: f64) -> f64 {
    let u = riesz_perp(theta);
    let (a, b) = (u.c[0].to_physical(), u.c[1].to_physical());
    let m = a.iter().zip(&b).map(|(x, y)| x.abs() + y.abs()).fold(0.0, f64::max);
    dt * m / theta.grid().spacing()
}

fn decay(theta: &ScalarField, gamma: f64, t: f64) -> ScalarField {
    if gamma == 0.0 || t == 0.0 {
        return theta.clone();
    }
    theta.apply_real_symbol(|k1, k2| (-((k1 * k1 + k2 * k2) as f64).powf(0.5 * gamma) * t).exp())
}

fn lambda_gamma(theta: &ScalarField, gamma: f64) -> ScalarField {
    theta.apply_real_symbol(|k1, k2| ((k1 * k1 + k2 * k2) as f64).powf(0.5 * gamma))
}

fn lin(a: &ScalarField, b: &ScalarField, s: f64) -> ScalarField {
    let mut r = a.clone();
    r.axpy(s, b);
    r
}

pub struct Solver {
    pub cfg: SolverConfig,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self, SolverError> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    fn rhs(&self, theta: &ScalarField) -> Result<ScalarField, SolverError> {
        let mut r = sqg_rhs(theta)?;
        if !self.cfg.integrating_factor && self.cfg.gamma > 0.0 {
            r.axpy(-1.0, &lambda_gamma(theta, self.cfg.gamma));
        }
        Ok(r)
    }

    /// One RK4 step of length `dt` (negative `dt` runs backward, `γ = 0` only).
    pub fn step(&self, theta: &ScalarField, dt: f64) -> Result<ScalarField, SolverError> {
        let cfl = cfl_number(theta, dt.abs());
        if cfl > self.cfg.cfl_limit {
            return Err(SolverError::Cfl { cfl, limit: self.cfg.cfl_limit });
        }
        let g = if self.cfg.integrating_factor { self.cfg.gamma } else { 0.0 };
        if g > 0.0 && dt < 0.0 {
            return Err(SolverError::Config("backward steps need gamma = 0".into()));
        }
        let half = |f: &ScalarField| decay(f, g, 0.5 * dt);
        let full = |f: &ScalarField| decay(f, g, dt);
        let k1 = self.rhs(theta)?;
        let k2 = self.rhs(&half(&lin(theta, &k1, 0.5 * dt)))?;
        let k3 = self.rhs(&lin(&half(theta), &k2, 0.5 * dt))?;
        let k4 = self.rhs(&lin(&full(theta), &half(&k3), dt))?;
        let mut out = full(theta);
        out.axpy(dt / 6.0, &full(&k1));
        out.axpy(dt / 3.0, &half(&k2));
        out.axpy(dt / 3.0, &half(&k3));
        out.axpy(dt / 6.0, &k4);
        let mut c = out.into_coeffs();
        c[0] = theta.coeffs()[0];
        Ok(ScalarField::from_coeffs(theta.grid(), c))
    }

    /// Integrates to `t_end`, recording conserved quantities every `every` steps
    /// (and at the end). `on_record` sees each recorded state.
    pub fn run(
        &self,
        theta0: &ScalarField,
        every: usize,
        mut on_record: impl FnMut(f64, &ScalarField) -> Result<(), SolverError>,
    ) -> Result<(ScalarField, Vec<Conserved>), SolverError> {
        check_mean(theta0)?;
        let steps = self.cfg.steps();
        let every = every.max(1);
        let mut theta = theta0.clone();
        let mut records = vec![conserved(&theta, 0.0)];
        on_record(0.0, &theta)?;
        for i in 1..=steps {
            theta = self.step(&theta, self.cfg.dt)?;
            if i % every == 0 || i == steps {
                let t = i as f64 * self.cfg.dt;
                records.push(conserved(&theta, t));
                on_record(t, &theta)?;
            }
        }
        Ok((theta, records))
    }
}

/// Conserved (or, with dissipation, decaying) quantities at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conserved {
    pub t: f64,
    /// `‖θ‖²_{Ḣ^{-1/2}} = (2π)² Σ |θ̂(k)|²/|k|`.
    pub hamiltonian: f64,
    pub l2: f64,
    /// Collocation quadrature of `(∫θ⁴)^{1/4}`.
    pub l4: f64,
    /// Maximum over the collocation points.
    pub linf: f64,
}

pub fn hamiltonian(theta: &ScalarField) -> f64 {
    let g = theta.grid();
    let mut s = 0.0;
    for (i, z) in theta.coeffs().iter().enumerate() {
        let (k1, k2) = g.wavevector(i);
        if k1 == 0 && k2 == 0 {
            continue;
        }
        s += z.norm_sqr() / ((k1 * k1 + k2 * k2) as f64).sqrt();
    }
    4.0 * PI * PI * s
}

pub fn conserved(theta: &ScalarField, t: f64) -> Conserved {
    let x = theta.to_physical();
    let cell = theta.grid().spacing().powi(2);
    let l4 = (x.iter().map(|v| v.powi(4)).sum::<f64>() * cell).powf(0.25);
    let linf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Conserved { t, hamiltonian: hamiltonian(theta), l2: theta.l2_norm(), l4, linf }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    /// `max_t |H(t) - H(0)|/H(0)`.
    pub hamiltonian_drift: f64,
    pub l2_drift: f64,
    pub l4_drift: f64,
    pub hamiltonian_nonincreasing: bool,
    pub hamiltonian_strictly_decreasing: bool,
    pub l2_nonincreasing: bool,
}

fn drift(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let first = values.clone().next().unwrap_or(0.0);
    let d = values.map(|v| (v - first).abs()).fold(0.0, f64::max);
    if first == 0.0 {
        d
    } else {
        d / first.abs()
    }
}

pub fn conservation_report(records: &[Conserved]) -> ConservationReport {
    let pairs = || records.windows(2);
    ConservationReport {
        hamiltonian_drift: drift(records.iter().map(|r| r.hamiltonian)),
        l2_drift: drift(records.iter().map(|r| r.l2)),
        l4_drift: drift(records.iter().map(|r| r.l4)),
        hamiltonian_nonincreasing: pairs().all(|w| w[1].hamiltonian <= w[0].hamiltonian * (1.0 + 1e-14)),
        hamiltonian_strictly_decreasing: records.len() > 1 && pairs().all(|w| w[1].hamiltonian < w[0].hamiltonian),
        l2_nonincreasing: pairs().all(|w| w[1].l2 <= w[0].l2 * (1.0 + 1e-14)),
    }
}

/// CSV with columns `t, hamiltonian, l2, l4, linf`.
pub fn write_csv(records: &[Conserved], w: impl Write) -> Result<(), SolverError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "hamiltonian", "l2", "l4", "linf"])?;
    for r in records {
        out.write_record([r.t, r.hamiltonian, r.l2, r.l4, r.linf].map(|x| format!("{x:.17e}")))?;
    }
    out.flush()?;
    Ok(())
}

/// `(⟨u·∇θ, Λ^{-1}θ⟩, ⟨u·∇θ, θ⟩)`, each relative to `‖u·∇θ‖‖·‖`.
pub fn antisymmetry(theta: &ScalarField) -> (f64, f64) {
    let a = advection(theta);
    let li = sqgci_operators::lambda(theta, -1.0);
    let rel = |g: &ScalarField| {
        let d = a.l2_norm() * g.l2_norm();
        if d == 0.0 {
            0.0
        } else {
            a.inner(g).re.abs() / d
        }
    };
    (rel(&li), rel(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqgci_spectral::C64;

    fn plane(grid: Grid, k: (i64, i64)) -> ScalarField {
        let m = ScalarField::mode(grid, k, C64::new(0.5, 0.0));
        &m + &m.conj()
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = Grid::new(16).unwrap();
        let z = ScalarField::zeros(g);
        assert_eq!(sqg_rhs(&z).unwrap().max_coeff(), 0.0);
        let s = Solver::new(SolverConfig::new(g, 0.01, 1.0, 0.1)).unwrap();
        assert_eq!(s.step(&z, 0.01).unwrap().max_coeff(), 0.0);
        let c = conserved(&z, 0.0);
        assert_eq!((c.hamiltonian, c.l2, c.l4, c.linf), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn single_mode_is_steady() {
        let g = Grid::new(32).unwrap();
        let th = plane(g, (3, 4));
        assert!(sqg_rhs(&th).unwrap().max_coeff() < 1e-13);
    }

    #[test]
    fn mean_is_rejected() {
        let g = Grid::new(16).unwrap();
        let th = &plane(g, (1, 0)) + &ScalarField::constant(g, 0.3);
        assert!(matches!(sqg_rhs(&th), Err(SolverError::NonzeroMean(_))));
    }

    #[test]
    fn linear_decay_is_exact() {
        let g = Grid::new(32).unwrap();
        let th = plane(g, (3, 4)).scale(1e-3);
        let s = Solver::new(SolverConfig::new(g, 0.05, 1.0, 1.0)).unwrap();
        let out = s.step(&th, 0.05).unwrap();
        let want = th.scale((-5.0f64 * 0.05).exp());
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn cfl_is_enforced() {
        let g = Grid::new(32).unwrap();
        let th = plane(g, (1, 2)).scale(100.0);
        let s = Solver::new(SolverConfig::new(g, 0.1, 0.0, 1.0)).unwrap();
        assert!(matches!(s.step(&th, 0.1), Err(SolverError::Cfl { .. })));
        assert!(Solver::new(SolverConfig::new(g, -0.1, 0.0, 1.0)).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let g = Grid::new(16).unwrap();
        let recs = vec![conserved(&plane(g, (1, 0)), 0.0), conserved(&plane(g, (1, 0)), 0.5)];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,hamiltonian,l2,l4,linf");
        assert_eq!(lines.len(), 3);
    }
}
