//! Assembly of `R̊_l = R_T + R_N + R_D + R_O` at one time.

use std::sync::Arc;

use sqgci_operators::{inverse_divergence, lambda_vec, riesz};
use sqgci_pseudo::{oscillation_q, PrincipalInputs, PseudoProductPlan};
use sqgci_spectral::norms::c0;
use sqgci_spectral::ops::{advect, grad_transpose_apply, perp_div, perp_grad, product, scale_by};
use sqgci_spectral::{MatrixField, ScalarField, SymMatrixField, VectorField};
use sqgci_waves::{perp, DirectionSet};

use crate::amplitude::Saturation;
use crate::fd::{choose_side, Side};
use crate::level::{Scheme, Waves};
use crate::EngineError;

#[derive(Clone, Debug, Default)]
pub struct StressDiagnostics {
    /// `max_x |O̊₁(x)|` (Frobenius).
    pub o1_max: f64,
    /// `max_j ρ_j` over the cutoffs in use.
    pub rho_max: f64,
    /// Largest remainder coefficient over the largest principal coefficient.
    pub remainder_ratio: f64,
    /// `‖R_N - R_N'‖_{C⁰}/‖R_N‖_{C⁰}` between the two assembly routes.
    pub nash_route_gap: f64,
    pub saturation: Saturation,
    /// True if `∂_t w` used a one-sided stencil (a kink of the history was near).
    pub one_sided: bool,
}

#[derive(Clone, Debug)]
pub struct StressBundle {
    pub t: f64,
    pub transport: SymMatrixField,
    pub nash: SymMatrixField,
    pub dissipation: SymMatrixField,
    pub approx: SymMatrixField,
    pub low: SymMatrixField,
    pub high: SymMatrixField,
    pub total: SymMatrixField,
    pub diagnostics: StressDiagnostics,
}

impl StressBundle {
    /// `R_O = R_{O,approx} + R_{O,low} + R_{O,high}`.
    pub fn oscillation(&self) -> SymMatrixField {
        &(&self.approx + &self.low) + &self.high
    }

    /// The pieces with their names, in a fixed order.
    pub fn pieces(&self) -> [(&'static str, &SymMatrixField); 6] {
        [
            ("transport", &self.transport),
            ("nash", &self.nash),
            ("dissipation", &self.dissipation),
            ("osc_approx", &self.approx),
            ("osc_low", &self.low),
            ("osc_high", &self.high),
        ]
    }
}

fn real_part(m: &MatrixField) -> MatrixField {
    m.map(|f| f.real_part())
}

fn frob(m11: f64, m12: f64) -> f64 {
    (2.0 * (m11 * m11 + m12 * m12)).sqrt()
}

/// `ϑ = -∇⊥·W`.
fn theta(w: &VectorField) -> ScalarField {
    -&perp_div(w)
}

pub(crate) struct Oscillation {
    /// `Σ_j χ_j² Σ_k 2Re Q_{j,k}`.
    pub q: MatrixField,
    pub principal: MatrixField,
}

impl Scheme {
    /// `Σ_j χ_j² Σ_k 2Re ½S(Λ^{-1}ϑ_{j,k}, Rϑ_{j,-k})` with `nodes` quadrature nodes.
    pub(crate) fn oscillation_sum(&self, l: usize, waves: &Waves, nodes: usize) -> Result<Oscillation, EngineError> {
        let grid = self.grid(l);
        let lam = self.lambda(l);
        let plan = PseudoProductPlan::with_nodes(nodes);
        let mut q = MatrixField::zeros(grid);
        let mut principal = MatrixField::zeros(grid);
        for p in &waves.packets {
            let set = DirectionSet::get(p.set);
            for (ki, k) in set.plus.iter().enumerate() {
                let th = theta(&p.modes[ki]);
                let thm = th.conj();
                let a = ScalarField::from_physical(grid, &p.amps[ki]).map_err(|e| EngineError::Resolution(e.to_string()))?;
                let inputs = PrincipalInputs { k: *k, lambda: lam, chi_sq: 1.0, amplitude: &a };
                let split = oscillation_q(&plan, &th, &thm, &inputs)?;
                let s = 2.0 * p.chi_sq;
                q = q.zip(&real_part(&split.full), |x, y| {
                    let mut x = x.clone();
                    x.axpy(s, y);
                    x
                });
                principal = principal.zip(&split.principal, |x, y| {
                    let mut x = x.clone();
                    x.axpy(s, y);
                    x
                });
            }
        }
        Ok(Oscillation { q, principal })
    }

    /// `R̊_l(t)` and its pieces.
    pub fn stress(&self, l: usize, t: f64) -> Result<Arc<StressBundle>, EngineError> {
        assert!(l >= 1, "level 0 carries no stress bundle");
        if let Some(s) = self.levels[l].stress.get(&t.to_bits()) {
            return Ok(s);
        }
        let s = Arc::new(self.assemble(l, t)?);
        self.levels[l].stress.put(t.to_bits(), s.clone());
        Ok(s)
    }

    fn assemble(&self, l: usize, t: f64) -> Result<StressBundle, EngineError> {
        let grid = self.grid(l);
        let lam = self.lambda(l);
        let waves = self.waves(l, t, 0)?;
        let w = &waves.w;
        let v_p = self.v(l - 1, t)?.resample(grid);
        let u_p = lambda_vec(&v_p, 1.0);
        let r_p = self.stress_total(l - 1, t)?.resample(grid);
        let mut diag = StressDiagnostics { saturation: waves.saturation, ..Default::default() };

        // transport
        let side = choose_side(t, self.fd_step(l), self.kink_spacing(l));
        diag.one_sided = side != Side::Central;
        let mut dt = self.dw_dt(l, t, 4, 1)?;
        dt.axpy(1.0, &advect(&u_p, w));
        let transport = inverse_divergence(&dt);

        // Nash
        let lw = lambda_vec(w, 1.0);
        let n1 = &advect(&lw, &v_p) - &grad_transpose_apply(&v_p, &lw);
        let n2 = grad_transpose_apply(&u_p, w);
        let nash = inverse_divergence(&(&n1 + &n2));
        let magic = inverse_divergence(&(&scale_by(&perp_div(&v_p), &lw.perp()) + &n2));
        let nn = c0(&nash);
        diag.nash_route_gap = if nn > 0.0 { c0(&(&nash - &magic)) / nn } else { c0(&magic) };

        // dissipation
        let gamma = self.config().params.gamma;
        let dissipation = if gamma > 0.0 { inverse_divergence(&lambda_vec(w, gamma)) } else { SymMatrixField::zeros(grid) };

        // oscillation
        let mut approx = SymMatrixField::zeros(grid);
        let mut pulled_sum = SymMatrixField::zeros(grid);
        let mut o1 = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for p in &waves.packets {
            approx.axpy(p.chi_sq, &(&r_p - &p.pulled));
            pulled_sum.axpy(p.chi_sq, &p.pulled);
            diag.rho_max = diag.rho_max.max(p.rho);
            let pm = [p.pulled.m11.to_physical(), p.pulled.m12.to_physical()];
            let set = DirectionSet::get(p.set);
            for i in 0..grid.len() {
                let (mut e11, mut e12) = (pm[0][i], pm[1][i]);
                for (ki, k) in set.plus.iter().enumerate() {
                    let kp = perp(*k);
                    let a2 = p.amps[ki][i] * p.amps[ki][i];
                    e11 += lam * a2 * 0.5 * (kp[0] * kp[0] - kp[1] * kp[1]);
                    e12 += lam * a2 * kp[0] * kp[1];
                }
                o1[0][i] += p.chi_sq * e11;
                o1[1][i] += p.chi_sq * e12;
            }
        }
        diag.o1_max = (0..grid.len()).map(|i| frob(o1[0][i], o1[1][i])).fold(0.0, f64::max);
        for &(_, chi_sq) in &waves.idle {
            approx.axpy(chi_sq, &r_p);
        }

        let osc = self.oscillation_sum(l, &waves, self.config().nodes)?;
        let pr = osc.principal.c.iter().flatten().map(|f| f.max_coeff()).fold(0.0, f64::max);
        let rem = (&osc.q - &osc.principal).c.iter().flatten().map(|f| f.max_coeff()).fold(0.0, f64::max);
        diag.remainder_ratio = if pr > 0.0 { rem / pr } else { 0.0 };
        let mfull = &osc.q + &pulled_sum.to_full();
        let low = &mfull.sym_traceless() + &inverse_divergence(&perp_grad(&mfull.antisymmetric_part()));

        let big = theta(w);
        let rt = riesz(&big);
        let mut hf = VectorField::new(product(&rt.c[0], &big), product(&rt.c[1], &big));
        for p in &waves.packets {
            let set = DirectionSet::get(p.set);
            for ki in 0..set.plus.len() {
                let th = theta(&p.modes[ki]);
                let thm = th.conj();
                let r = riesz(&th);
                for c in 0..2 {
                    hf.c[c].axpy(-2.0 * p.chi_sq, &product(&r.c[c], &thm).real_part());
                }
            }
        }
        let high = inverse_divergence(&hf);

        let mut total = &(&transport + &nash) + &dissipation;
        total = &(&(&total + &approx) + &low) + &high;
        Ok(StressBundle { t, transport, nash, dissipation, approx, low, high, total, diagnostics: diag })
    }
}
