//! Residual of the relaxed momentum equation and its error budget.

use sqgci_operators::{lambda_vec, leray};
use sqgci_spectral::norms::c0;
use sqgci_spectral::ops::matrix_div;
use sqgci_spectral::{ScalarField, VectorField};

use crate::energy::nonlinearity;
use crate::fd::{choose_side, stencil, weight_sum};
use crate::level::Scheme;
use crate::EngineError;

/// Measured error sources, all in the `C⁰` norm of a Leray-projected field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Budget {
    /// Truncation of the 4th-order time differences, `(2/15)‖P(D₄^ε - D₄^{2ε})w‖`
    /// summed over levels.
    pub fd: f64,
    /// `‖P div(M_n - M_{n/2})‖` for the `s^m` quadrature with `n` nodes.
    pub quadrature: f64,
    /// Advanced against re-traced flow maps, through a central difference.
    pub interpolation: f64,
    /// Rounding in the time differences and products.
    pub roundoff: f64,
    /// Residual of the parent level.
    pub inherited: f64,
}

impl Budget {
    pub fn total(&self) -> f64 {
        self.fd + self.quadrature + self.interpolation + self.roundoff + self.inherited
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    pub level: usize,
    pub t: f64,
    /// `‖P(∂_t v + N(v) + Λ^γ v - div R̊)‖_{C⁰}`.
    pub residual: f64,
    /// `‖P div R̊‖_{C⁰}`.
    pub div_stress: f64,
    pub budget: Budget,
}

impl ResidualReport {
    pub fn within_budget(&self) -> bool {
        self.residual <= self.budget.total()
    }

    /// Budget relative to `‖P div R̊‖`.
    pub fn relative_budget(&self) -> f64 {
        if self.div_stress > 0.0 {
            self.budget.total() / self.div_stress
        } else {
            0.0
        }
    }
}

fn l1(v: &VectorField) -> f64 {
    v.c.iter().map(|f| f.coeffs().iter().map(|z| z.norm()).sum::<f64>()).sum()
}

fn l1s(f: &ScalarField) -> f64 {
    f.coeffs().iter().map(|z| z.norm()).sum()
}

impl Scheme {
    /// Residual of `v_l` against `R̊_l` at `t`, with its budget.
    pub fn residual(&self, l: usize, t: f64) -> Result<ResidualReport, EngineError> {
        if l == 0 {
            return Ok(ResidualReport { level: 0, t, residual: 0.0, div_stress: 0.0, budget: Budget::default() });
        }
        let grid = self.grid(l);
        let unit = f64::EPSILON / 2.0;
        let v = self.v(l, t)?;
        let gamma = self.config().params.gamma;
        let mut budget = Budget::default();

        let mut lhs = VectorField::zeros(grid);
        for i in 1..=l {
            let g = self.grid(i);
            let eps = self.fd_step(i);
            let d6 = self.dw_dt(i, t, 6, 1)?;
            lhs.axpy(1.0, &d6.resample(grid));
            let d4 = self.dw_dt(i, t, 4, 1)?;
            let d4w = self.dw_dt(i, t, 4, 2)?;
            budget.fd += (2.0 / 15.0) * c0(&leray(&(&d4 - &d4w)));
            let side = choose_side(t, eps, self.kink_spacing(i));
            let c = weight_sum(&stencil(6, side, 1)).max(weight_sum(&stencil(4, side, 1)));
            let wl1 = l1(&self.waves(i, t, 0)?.w);
            budget.roundoff += 16.0 * unit * c * wl1 / eps * (g.n() as f64).log2();
        }
        let u = lambda_vec(&v, 1.0);
        lhs.axpy(1.0, &nonlinearity(&v));
        if gamma > 0.0 {
            lhs.axpy(1.0, &lambda_vec(&v, gamma));
        }
        let stress = self.stress(l, t)?;
        let div_r = matrix_div(&stress.total.to_full());
        let grad_l1 = v.c.iter().map(|f| l1s(f) * grid.kmax() as f64).sum::<f64>();
        budget.roundoff += 16.0 * unit * (l1(&u) * grad_l1 + l1(&div_r)) * (grid.n() as f64).log2();

        let r = leray(&(&lhs - &div_r));
        let residual = c0(&r);
        let div_stress = c0(&leray(&div_r));

        let waves = self.waves(l, t, 0)?;
        let nodes = self.config().nodes;
        if !waves.packets.is_empty() {
            let fine = self.oscillation_sum(l, &waves, nodes)?;
            let coarse = self.oscillation_sum(l, &waves, (nodes / 2).max(2))?;
            budget.quadrature = c0(&leray(&matrix_div(&(&fine.q - &coarse.q))));
        }
        budget.interpolation = self.interpolation_error(l, t)?;
        budget.inherited = self.residual(l - 1, t)?.residual;
        Ok(ResidualReport { level: l, t, residual, div_stress, budget })
    }

    /// `‖P(δ(t+ε) - δ(t-ε))‖/(2ε)` with `δ = w_adv - w_retraced`.
    fn interpolation_error(&self, l: usize, t: f64) -> Result<f64, EngineError> {
        if l == 1 {
            return Ok(0.0);
        }
        let eps = self.fd_step(l);
        let mut diff = VectorField::zeros(self.grid(l));
        for (m, s) in [(1, 1.0), (-1, -1.0)] {
            let retr = self.build_waves(l, t, m, Some(&|j| self.retraced_flow(l, j, t, m)))?;
            let adv = self.waves(l, t, m)?;
            diff.axpy(s, &(&adv.w - &retr.w));
        }
        Ok(c0(&leray(&diff)) / (2.0 * eps))
    }
}
