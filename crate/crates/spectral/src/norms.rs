//! Grid-sampled C^N seminorms and a Littlewood–Paley Hölder surrogate.
//!
//! Pointwise magnitude is the Euclidean norm for vectors and the Frobenius
//! norm for matrices.

use crate::bump::plateau;
use crate::ops::derivative;
use crate::{MatrixField, ScalarField, SymMatrixField, VectorField};

/// A field viewed as weighted scalar components: `|F|² = Σ w_i |F_i|²`.
pub trait Components {
    fn components(&self) -> Vec<(&ScalarField, f64)>;
}

impl Components for ScalarField {
    fn components(&self) -> Vec<(&ScalarField, f64)> {
        vec![(self, 1.0)]
    }
}

impl Components for VectorField {
    fn components(&self) -> Vec<(&ScalarField, f64)> {
        vec![(&self.c[0], 1.0), (&self.c[1], 1.0)]
    }
}

impl Components for SymMatrixField {
    fn components(&self) -> Vec<(&ScalarField, f64)> {
        vec![(&self.m11, 2.0), (&self.m12, 2.0)]
    }
}

impl Components for MatrixField {
    fn components(&self) -> Vec<(&ScalarField, f64)> {
        self.c.iter().flat_map(|r| r.iter().map(|c| (c, 1.0))).collect()
    }
}

fn pointwise_max(parts: &[(ScalarField, f64)]) -> f64 {
    let mut acc: Vec<f64> = Vec::new();
    for (f, w) in parts {
        let s = f.to_complex_physical();
        if acc.is_empty() {
            acc = vec![0.0; s.len()];
        }
        for (a, v) in acc.iter_mut().zip(&s) {
            *a += w * v.norm_sqr();
        }
    }
    acc.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
}

pub fn c0<F: Components>(f: &F) -> f64 {
    let parts: Vec<(ScalarField, f64)> = f.components().into_iter().map(|(c, w)| (c.clone(), w)).collect();
    pointwise_max(&parts)
}

/// `max_α max_x |∂^α f(x)|` over multi-indices with `|α| = order`.
pub fn c_norm<F: Components>(f: &F, order: usize) -> f64 {
    assert!(order <= 3, "order must be at most 3");
    let mut best: f64 = 0.0;
    for a in 0..=order {
        let parts: Vec<(ScalarField, f64)> = f
            .components()
            .into_iter()
            .map(|(c, w)| {
                let mut d = c.clone();
                for _ in 0..a {
                    d = derivative(&d, 0);
                }
                for _ in a..order {
                    d = derivative(&d, 1);
                }
                (d, w)
            })
            .collect();
        best = best.max(pointwise_max(&parts));
    }
    best
}

/// Dyadic block `Δ_j`: `φ(|k|/2^j) - φ(|k|/2^{j-1})` with `φ = 1` on `[0,1]`, `0` past 2.
pub fn dyadic_block(f: &ScalarField, j: u32) -> ScalarField {
    let phi = |r: f64| plateau(r, 1.0, 2.0);
    f.apply_real_symbol(|k1, k2| {
        let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
        let hi = phi(r / 2f64.powi(j as i32));
        if j == 0 {
            hi
        } else {
            hi - phi(r / 2f64.powi(j as i32 - 1))
        }
    })
}

/// `sup_j 2^{jβ} ‖Δ_j f‖_{C⁰}`, equivalent to the C^β norm for non-integer β.
pub fn besov_surrogate<F: Components>(f: &F, beta: f64) -> f64 {
    let comps = f.components();
    let n = comps[0].0.n() as f64;
    let jmax = (n * std::f64::consts::SQRT_2 / 2.0).log2().ceil() as u32 + 1;
    let mut best: f64 = 0.0;
    for j in 0..=jmax {
        let parts: Vec<(ScalarField, f64)> = comps.iter().map(|(c, w)| (dyadic_block(c, j), *w)).collect();
        best = best.max(2f64.powf(j as f64 * beta) * pointwise_max(&parts));
    }
    best
}
