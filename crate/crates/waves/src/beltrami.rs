use sqgci_spectral::norms::c0;
use sqgci_spectral::ops::{grad, matrix_div, product};
use sqgci_spectral::{Grid, MatrixField, ScalarField, VectorField, C64};

use crate::{perp, WaveError};

fn lattice_point(k: [f64; 2], lam: f64) -> Result<(i64, i64), WaveError> {
    let (a, b) = (lam * k[0], lam * k[1]);
    if (a - a.round()).abs() > 1e-9 || (b - b.round()).abs() > 1e-9 {
        return Err(WaveError::OffLattice(a, b));
    }
    Ok((a.round() as i64, b.round() as i64))
}

/// `b_k(λx) = ik⊥e^{iλk·x}` and `c_k(λx) = e^{iλk·x}` as complex fields.
pub fn beltrami_pair(k: [f64; 2], lam: f64, grid: Grid) -> Result<(VectorField, ScalarField), WaveError> {
    let idx = lattice_point(k, lam)?;
    grid.flat(idx.0, idx.1).ok_or(WaveError::Unresolved)?;
    let p = perp(k);
    let b = VectorField::new(
        ScalarField::mode(grid, idx, C64::new(0.0, p[0])),
        ScalarField::mode(grid, idx, C64::new(0.0, p[1])),
    );
    Ok((b, ScalarField::mode(grid, idx, C64::new(1.0, 0.0))))
}

#[derive(Clone, Copy, Debug)]
pub struct BeltramiResiduals {
    /// `‖div(W⊗W) - ½∇(|W|² + |V|²)‖_{C⁰}`.
    pub divergence: f64,
    /// `‖Σ_k W_k⊗W_{-k} - Σ_k |a_k|² k⊥⊗k⊥‖_{C⁰}`.
    pub zero_mode: f64,
    /// Scale `Σ|a_k|²` for relative comparisons.
    pub scale: f64,
}

/// Checks the Beltrami identities for `W = Σ a_k b_k(λx)`, `V = Σ a_k c_k(λx)`.
///
/// The gradient term carries `+|V|²`: with `∇⊥·W = -λV` and `W⊥ = -∇V/λ`,
/// `(∇⊥·W)W⊥ = V∇V`.
pub fn beltrami_identity_check(amps: &[([f64; 2], C64)], lam: f64, grid: Grid) -> Result<BeltramiResiduals, WaveError> {
    for (k, a) in amps {
        let pair = amps.iter().find(|(m, _)| (m[0] + k[0]).abs() < 1e-12 && (m[1] + k[1]).abs() < 1e-12);
        match pair {
            Some((_, b)) if (b - a.conj()).norm() <= 1e-14 * (1.0 + a.norm()) => {}
            _ => return Err(WaveError::NotConjugate),
        }
    }
    let mut w = VectorField::zeros(grid);
    let mut v = ScalarField::zeros(grid);
    let mut pieces = Vec::new();
    for (k, a) in amps {
        let (b, c) = beltrami_pair(*k, lam, grid)?;
        let wk = b.map(|f| f.scale_complex(*a));
        w = &w + &wk;
        v = &v + &c.scale_complex(*a);
        pieces.push((*k, *a, wk));
    }
    let ww = MatrixField {
        c: [
            [product(&w.c[0], &w.c[0]), product(&w.c[0], &w.c[1])],
            [product(&w.c[1], &w.c[0]), product(&w.c[1], &w.c[1])],
        ],
    };
    let lhs = matrix_div(&ww);
    let energy = &(&product(&w.c[0], &w.c[0]) + &product(&w.c[1], &w.c[1])) + &product(&v, &v);
    let rhs = grad(&energy.scale(0.5));
    let divergence = c0(&(&lhs - &rhs));

    let mut zero = MatrixField::zeros(grid);
    let mut expect = [[0.0; 2]; 2];
    let mut scale = 0.0;
    for (k, a, wk) in &pieces {
        let partner = &pieces.iter().find(|(m, _, _)| (m[0] + k[0]).abs() < 1e-12 && (m[1] + k[1]).abs() < 1e-12).unwrap().2;
        for i in 0..2 {
            for j in 0..2 {
                zero.c[i][j] = &zero.c[i][j] + &product(&wk.c[i], &partner.c[j]);
            }
        }
        let p = perp(*k);
        for i in 0..2 {
            for j in 0..2 {
                expect[i][j] += a.norm_sqr() * p[i] * p[j];
            }
        }
        scale += a.norm_sqr();
    }
    for i in 0..2 {
        for j in 0..2 {
            zero.c[i][j] = &zero.c[i][j] - &ScalarField::constant(grid, expect[i][j]);
        }
    }
    Ok(BeltramiResiduals { divergence, zero_mode: c0(&zero), scale })
}
