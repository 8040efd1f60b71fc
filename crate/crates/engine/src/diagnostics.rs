//! Norm ratios, the energy ledger and frequency-support bookkeeping.

use std::f64::consts::PI;

use sqgci_operators::lambda_vec;
use sqgci_spectral::norms::{c0, c_norm, Components};
use sqgci_spectral::ops::{advect, dot, grad};
use sqgci_spectral::{ScalarField, SymMatrixField};

use crate::energy::hamiltonian;
use crate::fd::{choose_side, stencil};
use crate::level::Scheme;
use crate::EngineError;

pub const RATIO_NAMES: [&str; 5] = ["w_c0", "v_c1", "stress_c0", "dt_v", "dt_stress"];

/// Energy bookkeeping of `v_l` at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub level: usize,
    pub t: f64,
    pub h: f64,
    pub energy: f64,
    /// `H - ∫|Λ^{1/2}v_l|²`.
    pub gap: f64,
    /// `λ_{l+1}δ_{l+1}`, the unit of the target band.
    pub scale: f64,
    /// Every cutoff of level `l` active at `t` has `ρ_j ≠ 0`.
    pub all_rho_nonzero: bool,
    /// `‖R̊_l(t)‖_{C⁰}`.
    pub stress: f64,
}

impl EnergySample {
    pub fn in_band(&self, lo: f64, hi: f64) -> bool {
        self.gap >= lo * self.scale && self.gap <= hi * self.scale
    }

    /// Band position `gap/scale`.
    pub fn position(&self) -> f64 {
        self.gap / self.scale
    }

    /// `gap ≤ scale/8` should force `R̊_l = 0`; `None` if the gap is larger.
    pub fn zero_rule_holds(&self, tol: f64) -> Option<bool> {
        (self.gap <= self.scale / 8.0).then(|| self.stress <= tol)
    }
}

/// Largest coefficient with `|k|` outside `[rmin, rmax]` over the largest coefficient.
pub fn outside_fraction<F: Components>(f: &F, rmin: f64, rmax: f64) -> f64 {
    let mut inside = 0.0f64;
    let mut outside = 0.0f64;
    for (c, _) in f.components() {
        let g = c.grid();
        for (i, z) in c.coeffs().iter().enumerate() {
            let (k1, k2) = g.wavevector(i);
            let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let a = z.norm();
            if r < rmin || r > rmax {
                outside = outside.max(a);
            } else {
                inside = inside.max(a);
            }
        }
    }
    let m = inside.max(outside);
    if m == 0.0 {
        0.0
    } else {
        outside / m
    }
}

/// Largest factor by which a ratio grows from one step to the next. Steps with
/// a vanishing previous value are skipped.
pub fn ratio_growth(series: &[[f64; 5]]) -> [f64; 5] {
    let mut g = [0.0; 5];
    for w in series.windows(2) {
        for i in 0..5 {
            if w[0][i] > 0.0 {
                g[i] = f64::max(g[i], w[1][i] / w[0][i]);
            }
        }
    }
    g
}

fn advect_matrix(u: &sqgci_spectral::VectorField, r: &SymMatrixField) -> SymMatrixField {
    let a = |f: &ScalarField| dot(u, &grad(f));
    SymMatrixField::new(a(&r.m11), a(&r.m12))
}

impl Scheme {
    /// The five inductive ratios of stage `q` at time `t`, in the order of
    /// [`RATIO_NAMES`]. Requires `q + 1 ≤ top()`.
    pub fn inductive_ratios(&self, q: usize, t: f64) -> Result<[f64; 5], EngineError> {
        let p = self.config().params;
        let mut out = [0.0; 5];
        out[0] = c0(&self.waves(q + 1, t, 0)?.w) / p.delta(q + 1).sqrt();
        out[2] = c0(&self.stress_total(q + 1, t)?) / p.stress_scale(q + 2);
        if q == 0 {
            return Ok(out);
        }
        let v = self.v(q, t)?;
        let u = lambda_vec(&v, 1.0);
        let lq = p.lambda(q);
        out[1] = (c_norm(&v, 1) + c0(&u)) / (p.delta(q).sqrt() * lq);
        let mut dv = self.dv_dt(q, t, 4)?;
        dv.axpy(1.0, &advect(&u, &v));
        out[3] = c0(&dv) / (lq * lq * p.delta(q));
        let s = 2.0 * self.fd_step(q);
        let side = choose_side(t, s, self.kink_spacing(q));
        let mut dr = SymMatrixField::zeros(self.grid(q));
        for (m, c) in stencil(2, side, 1) {
            dr.axpy(c / s, &self.stress_total(q, t + m as f64 * s)?);
        }
        let dr = &dr + &advect_matrix(&u, &self.stress_total(q, t)?);
        out[4] = c0(&dr) / (lq * lq * p.delta(q).sqrt() * p.stress_scale(q + 1));
        Ok(out)
    }

    pub fn energy_sample(&self, l: usize, t: f64) -> Result<EnergySample, EngineError> {
        let h = self.profile_value(t);
        let energy = self.energy(l, t)?;
        let mut all = l >= 1;
        if l >= 1 {
            for j in self.active(l, t) {
                all &= self.rho(l, j)? != 0.0;
            }
        }
        Ok(EnergySample {
            level: l,
            t,
            h,
            energy,
            gap: h - energy,
            scale: self.config().params.stress_scale(l + 1),
            all_rho_nonzero: all,
            stress: c0(&self.stress_total(l, t)?),
        })
    }

    /// `|E(v_l) - E(v_{l-1}) - E(w_l)|` relative to `E(w_l)`.
    pub fn hamiltonian_ledger(&self, l: usize, t: f64) -> Result<f64, EngineError> {
        let ew = hamiltonian(&self.waves(l, t, 0)?.w);
        let d = self.energy(l, t)? - self.energy(l - 1, t)? - ew;
        Ok(if ew > 0.0 { d.abs() / ew } else { d.abs() })
    }

    /// `4(2π)²λ_l Σ_j χ_j²ρ_j`, the wave energy for constant amplitudes.
    pub fn predicted_wave_energy(&self, l: usize, t: f64) -> Result<f64, EngineError> {
        let part = self.partition(l);
        let mut s = 0.0;
        for j in part.active(t) {
            s += part.chi_sq(j, t) * self.rho(l, j)?;
        }
        Ok(4.0 * 4.0 * PI * PI * self.lambda(l) * s)
    }

    /// If every cutoff active at `t` has `ρ_j = 0`, returns
    /// `max(‖w_l‖, ‖R̊_l - R̊_{l-1}‖)`; otherwise `None`.
    pub fn zero_stress_defect(&self, l: usize, t: f64) -> Result<Option<f64>, EngineError> {
        for j in self.active(l, t) {
            if self.rho(l, j)? != 0.0 {
                return Ok(None);
            }
        }
        let w = c0(&self.waves(l, t, 0)?.w);
        let r = self.stress_total(l, t)?;
        let rp = self.stress_total(l - 1, t)?.resample(self.grid(l));
        Ok(Some(w.max(c0(&(&r - &rp)))))
    }
}
