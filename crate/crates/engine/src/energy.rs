//! Hamiltonian, energy gap, pressure and the weak form of the momentum equation.

use std::f64::consts::PI;

use sqgci_operators::{calderon_commutator, lambda, lambda_vec};
use sqgci_spectral::ops::{advect, derivative, div, grad_transpose_apply, product};
use sqgci_spectral::{ScalarField, VectorField, C64};
use sqgci_transport::SchemeParams;

use crate::profile::{Profile, ProfileKind};
use crate::EngineError;

const TORUS_AREA: f64 = 4.0 * PI * PI;

/// `∫|Λ^{1/2}v|² = (2π)² Σ_k |k| (|v̂¹(k)|² + |v̂²(k)|²)`.
pub fn hamiltonian(v: &VectorField) -> f64 {
    let g = v.grid();
    let mut s = 0.0;
    for c in &v.c {
        for (i, z) in c.coeffs().iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            let (k1, k2) = g.wavevector(i);
            s += ((k1 * k1 + k2 * k2) as f64).sqrt() * z.norm_sqr();
        }
    }
    TORUS_AREA * s
}

/// `N(v) = u·∇v - (∇v)ᵀu` with `u = Λv`.
pub fn nonlinearity(v: &VectorField) -> VectorField {
    let u = lambda_vec(v, 1.0);
    &advect(&u, v) - &grad_transpose_apply(v, &u)
}

/// Energy amplitude of the level-`q+1` perturbation,
/// `ρ = max(H - E - λ_{q+2}δ_{q+2}/2, 0) / (4(2π)²λ_{q+1})`, for level `l = q+1`.
pub fn rho(params: &SchemeParams, l: usize, h: f64, energy: f64) -> f64 {
    let target = h - energy - 0.5 * params.stress_scale(l + 1);
    target.max(0.0) / (4.0 * TORUS_AREA * params.lambda(l))
}

/// Mean-zero pressure with `-Δp = div N(v)`, so that `N(v) + ∇p` is divergence free.
pub fn pressure_recover(v: &VectorField) -> ScalarField {
    let d = div(&nonlinearity(v));
    d.apply_real_symbol(|k1, k2| if k1 == 0 && k2 == 0 { 0.0 } else { 1.0 / (k1 * k1 + k2 * k2) as f64 })
}

/// `Tr(∇v∇u - ∇vᵀ∇u) - Δv·u`, the right side of the pressure equation written out.
pub fn pressure_source(v: &VectorField) -> ScalarField {
    let u = lambda_vec(v, 1.0);
    let d = |f: &ScalarField, a: usize| derivative(f, a);
    let mut s = ScalarField::zeros(v.grid());
    for i in 0..2 {
        for j in 0..2 {
            s = &s + &product(&d(&u.c[j], i), &d(&v.c[i], j));
            s = &s - &product(&d(&v.c[j], i), &d(&u.c[j], i));
        }
        let lap = &d(&d(&v.c[i], 0), 0) + &d(&d(&v.c[i], 1), 1);
        s = &s - &product(&lap, &u.c[i]);
    }
    s
}

fn pair(a: &ScalarField, b: &ScalarField) -> f64 {
    a.inner(b).re
}

/// `⟨Λv^j, v^i∂_jφ^i⟩ - ½⟨∂_iv^j, [Λ, φ^i]v^j⟩`, which equals `-⟨N(v), φ⟩` for
/// divergence-free `v` and `φ`.
pub fn bracket(v: &VectorField, phi: &VectorField) -> Result<f64, EngineError> {
    let mut s = 0.0;
    for j in 0..2 {
        let lv = lambda(&v.c[j], 1.0);
        for i in 0..2 {
            s += pair(&lv, &product(&v.c[i], &derivative(&phi.c[i], j)));
            let comm = calderon_commutator(&phi.c[i], &v.c[j])?;
            s -= 0.5 * pair(&derivative(&v.c[j], i), &comm);
        }
    }
    Ok(s)
}

/// Test field `φ(x, t) = χ(t)φ₀(x)` with `χ` a unit bump on `window`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub phi0: VectorField,
    pub window: (f64, f64),
}

impl TestFunction {
    /// `(χ, χ')` at `t`.
    pub fn cutoff(&self, t: f64) -> (f64, f64) {
        let b = Profile::new(ProfileKind::Bump, self.window.0, self.window.1, 1.0);
        let [v, d, _] = b.eval(t);
        (v, d)
    }
}

fn check_div_free(phi: &VectorField) -> Result<(), EngineError> {
    let g = phi.grid();
    let max = phi.max_coeff();
    for i in 0..g.len() {
        let (k1, k2) = g.wavevector(i);
        let kd: C64 = phi.c[0].coeffs()[i] * k1 as f64 + phi.c[1].coeffs()[i] * k2 as f64;
        if kd.norm() > 1e-12 * max * (1.0 + ((k1 * k1 + k2 * k2) as f64).sqrt()) {
            return Err(EngineError::Config("test field is not divergence free".into()));
        }
    }
    Ok(())
}

/// Time integral (trapezoid over the given samples) of
/// `-[⟨v, ∂_tφ⟩ + ⟨Λv^j, v^i∂_jφ^i⟩ - ½⟨∂_iv^j, [Λ, φ^i]v^j⟩] + ⟨v, Λ^γφ⟩`.
///
/// Vanishes for weak solutions of the dissipative momentum equation. Samples
/// must be sorted in time and cover the window of the test function.
pub fn weak_form_residual(samples: &[(f64, VectorField)], phi: &TestFunction, gamma: f64) -> Result<f64, EngineError> {
    check_div_free(&phi.phi0)?;
    let lg = if gamma > 0.0 { Some(lambda_vec(&phi.phi0, gamma)) } else { None };
    let mut vals = Vec::with_capacity(samples.len());
    for (t, v) in samples {
        let (c, dc) = phi.cutoff(*t);
        if c == 0.0 && dc == 0.0 {
            vals.push(0.0);
            continue;
        }
        let phi0 = if v.grid() == phi.phi0.grid() { phi.phi0.clone() } else { phi.phi0.resample(v.grid()) };
        let mut r = -(dc * v.inner(&phi0).re + c * bracket(v, &phi0)?);
        if let Some(l) = &lg {
            r += c * v.inner(&l.resample(v.grid())).re;
        }
        vals.push(r);
    }
    let mut s = 0.0;
    for i in 1..samples.len() {
        s += 0.5 * (samples[i].0 - samples[i - 1].0) * (vals[i] + vals[i - 1]);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use sqgci_operators::leray;
    use sqgci_spectral::random::random_div_free;
    use sqgci_spectral::Grid;

    #[test]
    fn single_mode_hamiltonian() {
        let g = Grid::new(32).unwrap();
        let lam = 5.0;
        // v = cos(λk·x)k⊥, k = (0.6, 0.8)
        let v = VectorField::new(
            ScalarField::from_fn(g, |x, y| -0.8 * (3.0 * x + 4.0 * y).cos()),
            ScalarField::from_fn(g, |x, y| 0.6 * (3.0 * x + 4.0 * y).cos()),
        );
        assert!((hamiltonian(&v) - lam * TORUS_AREA / 2.0).abs() < 1e-12);
        assert_eq!(hamiltonian(&VectorField::zeros(g)), 0.0);
    }

    #[test]
    fn bracket_is_minus_pairing_with_nonlinearity() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let v = random_div_free(g, 6.0, &mut rng);
            let phi = random_div_free(g, 5.0, &mut rng);
            let lhs = -nonlinearity(&v).inner(&phi).re;
            let rhs = bracket(&v, &phi).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{lhs} {rhs}");
        }
    }

    #[test]
    fn pressure_removes_gradient_part() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_div_free(g, 6.0, &mut rng);
        let n = nonlinearity(&v);
        let p = pressure_recover(&v);
        let grad_p = sqgci_spectral::ops::grad(&p);
        let lhs = &n + &grad_p;
        assert!(lhs.max_abs_diff(&leray(&n)) < 1e-10 * n.max_coeff());
        let src = pressure_source(&v);
        let lap = sqgci_spectral::ops::laplacian(&p);
        assert!((&src + &lap).max_coeff() < 1e-12 * src.max_coeff());
    }

    #[test]
    fn rho_boundary_values() {
        let p = SchemeParams::new(5.0, 0.6, 0.0).unwrap();
        let c = 0.5 * p.stress_scale(2);
        assert_eq!(rho(&p, 1, 3.0 + c, 3.0), 0.0);
        let gap = p.stress_scale(1);
        let want = (gap - c) / (4.0 * TORUS_AREA * 5.0);
        assert!((rho(&p, 1, gap, 0.0) - want).abs() < 1e-15);
    }
}
