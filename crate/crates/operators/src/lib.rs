//! Fourier multipliers on the torus: Λ^s, Riesz transforms, Leray projection,
//! the inverse divergence `B`, frequency localizers and the Calderón commutator.

use sqgci_spectral::bump::{band, plateau};
use sqgci_spectral::ops::product;
use sqgci_spectral::{ScalarField, SymMatrixField, VectorField, C64};

#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    #[error("negative power needs a mean-zero field (mean {0:e})")]
    NonzeroMean(f64),
    #[error("direction ({0}, {1}) is not a unit vector")]
    NotUnit(f64, f64),
    #[error("product support {0} does not fit below Nyquist on n={1}")]
    Unresolved(usize, usize),
}

#[inline]
fn modulus(k1: i64, k2: i64) -> f64 {
    ((k1 * k1 + k2 * k2) as f64).sqrt()
}

/// `Λ^s f` with symbol `|k|^s`. The zero mode is dropped for `s ≠ 0`.
pub fn lambda(f: &ScalarField, s: f64) -> ScalarField {
    if s == 0.0 {
        return f.clone();
    }
    f.apply_real_symbol(|k1, k2| if k1 == 0 && k2 == 0 { 0.0 } else { modulus(k1, k2).powf(s) })
}

/// Checked `Λ^s`: refuses a nonzero mean when `s < 0`.
pub fn fractional_laplacian(f: &ScalarField, s: f64) -> Result<ScalarField, OperatorError> {
    let m = f.coeffs()[0].norm();
    if s < 0.0 && m > 1e-12 * f.max_coeff() {
        return Err(OperatorError::NonzeroMean(m));
    }
    Ok(lambda(f, s))
}

pub fn lambda_vec(v: &VectorField, s: f64) -> VectorField {
    v.map(|c| lambda(c, s))
}

/// `R f = ∇Λ^{-1} f`, symbol `ik/|k|`.
pub fn riesz(f: &ScalarField) -> VectorField {
    let part = |axis: usize| {
        f.apply_symbol(|k1, k2| {
            if k1 == 0 && k2 == 0 {
                return C64::new(0.0, 0.0);
            }
            let k = if axis == 0 { k1 } else { k2 };
            C64::new(0.0, k as f64 / modulus(k1, k2))
        })
    };
    VectorField::new(part(0), part(1))
}

/// `R⊥θ = ∇⊥Λ^{-1}θ`, symbol `ik⊥/|k|`.
pub fn riesz_perp(theta: &ScalarField) -> VectorField {
    riesz(theta).perp()
}

/// Leray projection, symbol `δ - kk/|k|²`; the zero mode is kept.
pub fn leray(v: &VectorField) -> VectorField {
    let g = v.grid();
    let mut a = v.c[0].coeffs().to_vec();
    let mut b = v.c[1].coeffs().to_vec();
    for i in 0..g.len() {
        if g.flat_has_nyquist(i) {
            a[i] = C64::new(0.0, 0.0);
            b[i] = a[i];
            continue;
        }
        let (k1, k2) = g.wavevector(i);
        if k1 == 0 && k2 == 0 {
            continue;
        }
        let (x, y) = (k1 as f64, k2 as f64);
        let kk = x * x + y * y;
        let dotk = (a[i] * x + b[i] * y) / kk;
        a[i] -= dotk * x;
        b[i] -= dotk * y;
    }
    VectorField::new(ScalarField::from_coeffs(g, a), ScalarField::from_coeffs(g, b))
}

/// Inverse divergence `(Bf)^{ij} = -∂_jΛ^{-2}(Pf)^i - ∂_iΛ^{-2}(Pf)^j`, mean removed first.
///
/// Satisfies `div Bf = P(f - mean f)`.
pub fn inverse_divergence(f: &VectorField) -> SymMatrixField {
    let g = f.grid();
    let p = leray(f);
    let (a, b) = (p.c[0].coeffs(), p.c[1].coeffs());
    let mut m11 = vec![C64::new(0.0, 0.0); g.len()];
    let mut m12 = m11.clone();
    for i in 0..g.len() {
        let (k1, k2) = g.wavevector(i);
        if k1 == 0 && k2 == 0 || g.flat_has_nyquist(i) {
            continue;
        }
        let (x, y) = (k1 as f64, k2 as f64);
        let kk = x * x + y * y;
        let mi = C64::new(0.0, -1.0 / kk);
        m11[i] = mi * (2.0 * x) * a[i];
        m12[i] = mi * (y * a[i] + x * b[i]);
    }
    SymMatrixField::new(ScalarField::from_coeffs(g, m11), ScalarField::from_coeffs(g, m12))
}

/// Trace of `B f` computed from its symbol without the trace-free representation.
pub fn inverse_divergence_trace(f: &VectorField) -> ScalarField {
    let p = leray(f);
    let t = |axis: usize, c: &ScalarField| {
        c.apply_symbol(|k1, k2| {
            let kk = (k1 * k1 + k2 * k2) as f64;
            if kk == 0.0 {
                return C64::new(0.0, 0.0);
            }
            C64::new(0.0, -2.0 * if axis == 0 { k1 } else { k2 } as f64 / kk)
        })
    };
    &t(0, &p.c[0]) + &t(1, &p.c[1])
}

/// Radial bump `K̂`: 1 for `|ξ| ≤ 1/16`, 0 for `|ξ| ≥ 1/8`.
pub fn localizer_symbol(r: f64) -> f64 {
    plateau(r, 1.0 / 16.0, 1.0 / 8.0)
}

fn check_unit(k: [f64; 2]) -> Result<(), OperatorError> {
    if ((k[0] * k[0] + k[1] * k[1]).sqrt() - 1.0).abs() > 1e-12 {
        return Err(OperatorError::NotUnit(k[0], k[1]));
    }
    Ok(())
}

/// `P_{≈kλ}`: symbol `K̂(ξ/λ - k)`, supported in the ball of radius `λ/8` about `λk`.
pub fn localize(f: &ScalarField, k: [f64; 2], lam: f64) -> Result<ScalarField, OperatorError> {
    check_unit(k)?;
    Ok(f.apply_real_symbol(|k1, k2| {
        let d1 = k1 as f64 / lam - k[0];
        let d2 = k2 as f64 / lam - k[1];
        localizer_symbol((d1 * d1 + d2 * d2).sqrt())
    }))
}

/// `P_{q+1,k} = P ∘ P_{≈kλ}` on vector fields.
pub fn freq_localizer(v: &VectorField, k: [f64; 2], lam: f64) -> Result<VectorField, OperatorError> {
    let c1 = localize(&v.c[0], k, lam)?;
    let c2 = localize(&v.c[1], k, lam)?;
    Ok(leray(&VectorField::new(c1, c2)))
}

/// Radial annulus symbol: 1 on `[3λ/8, 3λ]`, supported in `[λ/4, 4λ]`.
pub fn annulus_symbol(r: f64, lam: f64) -> f64 {
    band(r, lam / 4.0, 3.0 * lam / 8.0, 3.0 * lam, 4.0 * lam)
}

pub fn annular_projector(f: &ScalarField, lam: f64) -> ScalarField {
    f.apply_real_symbol(|k1, k2| annulus_symbol(modulus(k1, k2), lam))
}

/// `[Λ, φ] v = Λ(φv) - φΛv`.
pub fn calderon_commutator(phi: &ScalarField, v: &ScalarField) -> Result<ScalarField, OperatorError> {
    let r = phi.box_radius() + v.box_radius();
    let n = phi.n();
    if r >= n / 2 {
        return Err(OperatorError::Unresolved(r, n));
    }
    Ok(&lambda(&product(phi, v), 1.0) - &product(phi, &lambda(v, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqgci_spectral::ops::{div, grad, perp_div};
    use sqgci_spectral::random::{random_div_free, random_scalar, random_vector};
    use sqgci_spectral::Grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    #[test]
    fn lambda_single_modes() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, _| x.cos());
        assert!(lambda(&f, 1.0).max_abs_diff(&f) < 1e-15);
        let h = ScalarField::from_fn(g, |x, y| (3.0 * x + 4.0 * y).cos());
        assert!(lambda(&h, 0.5).max_abs_diff(&h.scale(5f64.sqrt())) < 1e-14);
        assert!(fractional_laplacian(&ScalarField::constant(g, 1.0), -1.0).is_err());
    }

    #[test]
    fn riesz_perp_single_mode() {
        let g = grid();
        let th = ScalarField::from_fn(g, |x, _| x.cos());
        let u = riesz_perp(&th);
        assert!(u.c[0].max_coeff() < 1e-15);
        let e = ScalarField::from_fn(g, |x, _| -x.sin());
        assert!(u.c[1].max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn vorticity_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_div_free(grid(), 9.0, &mut rng);
        let theta = -&perp_div(&v);
        let u = lambda_vec(&v, 1.0);
        assert!(u.max_abs_diff(&riesz_perp(&theta)) < 1e-12);
    }

    #[test]
    fn leray_kills_gradients_and_fixes_div_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = grid();
        let phi = random_scalar(g, 10.0, &mut rng);
        assert!(leray(&grad(&phi)).max_coeff() < 1e-13);
        let u = random_div_free(g, 10.0, &mut rng);
        assert!(leray(&u).max_abs_diff(&u) < 1e-13);
        assert!(inverse_divergence(&grad(&phi)).m11.max_coeff() < 1e-13);
    }

    #[test]
    fn div_of_b_is_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = grid();
        let f = random_vector(g, 12.0, &mut rng);
        let b = inverse_divergence(&f).to_full();
        let d = sqgci_spectral::ops::matrix_div(&b);
        let p = leray(&f);
        let p0 = VectorField::new(p.c[0].remove_mean(), p.c[1].remove_mean());
        assert!(d.max_abs_diff(&p0) < 1e-13);
        assert!(inverse_divergence_trace(&f).max_coeff() < 1e-14);
        assert!(div(&p).max_coeff() < 1e-13);
    }

    #[test]
    fn b_on_beltrami_wave() {
        let g = Grid::new(64).unwrap();
        let lam = 10.0;
        let k = [0.6, 0.8];
        let kp = [-k[1], k[0]];
        let idx = (6i64, 8i64);
        let w = VectorField::new(
            ScalarField::mode(g, idx, C64::new(0.0, kp[0])),
            ScalarField::mode(g, idx, C64::new(0.0, kp[1])),
        );
        let b = inverse_divergence(&w);
        let e11 = 2.0 * k[0] * kp[0] / lam;
        let e12 = (k[1] * kp[0] + k[0] * kp[1]) / lam;
        assert!((b.m11.coeff(6, 8) - C64::new(e11, 0.0)).norm() < 1e-15);
        assert!((b.m12.coeff(6, 8) - C64::new(e12, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn calderon_two_modes() {
        let g = grid();
        let phi = ScalarField::mode(g, (2, -1), C64::new(1.0, 0.0));
        let v = ScalarField::mode(g, (3, 4), C64::new(1.0, 0.0));
        let c = calderon_commutator(&phi, &v).unwrap();
        let expect = (34f64).sqrt() - 5.0;
        assert!((c.coeff(5, 3) - C64::new(expect, 0.0)).norm() < 1e-14);
        let one = ScalarField::constant(g, 3.0);
        assert!(calderon_commutator(&one, &v).unwrap().max_coeff() < 1e-15);
    }

    #[test]
    fn localizer_passes_carrier_and_rejects_far_modes() {
        let g = Grid::new(64).unwrap();
        let lam = 20.0;
        let f = ScalarField::mode(g, (12, 16), C64::new(1.0, 0.0));
        assert!(localize(&f, [0.6, 0.8], lam).unwrap().max_abs_diff(&f) < 1e-15);
        let far = ScalarField::mode(g, (16, 12), C64::new(1.0, 0.0));
        assert_eq!(localize(&far, [0.6, 0.8], lam).unwrap().max_coeff(), 0.0);
        assert!(localize(&f, [1.0, 1.0], lam).is_err());
    }

    #[test]
    fn annulus_limits() {
        let g = Grid::new(64).unwrap();
        let f = ScalarField::mode(g, (8, 0), C64::new(1.0, 0.0));
        assert_eq!(annular_projector(&f, 8.0).max_abs_diff(&f), 0.0);
        let low = ScalarField::mode(g, (1, 0), C64::new(1.0, 0.0));
        assert_eq!(annular_projector(&low, 100.0).max_coeff(), 0.0);
    }
}
