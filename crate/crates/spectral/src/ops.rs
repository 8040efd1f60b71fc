//! Differentiation and alias-free products.

use crate::{fft, friendly_size, Grid, MatrixField, ScalarField, VectorField, C64};

/// `∂f/∂x_{axis+1}`; `axis` is 0 or 1.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    assert!(axis < 2, "axis must be 0 or 1");
    f.apply_symbol(|k1, k2| C64::new(0.0, if axis == 0 { k1 } else { k2 } as f64))
}

pub fn grad(f: &ScalarField) -> VectorField {
    VectorField::new(derivative(f, 0), derivative(f, 1))
}

/// `∇⊥f = (-∂₂f, ∂₁f)`.
pub fn perp_grad(f: &ScalarField) -> VectorField {
    VectorField::new(-&derivative(f, 1), derivative(f, 0))
}

pub fn div(v: &VectorField) -> ScalarField {
    &derivative(&v.c[0], 0) + &derivative(&v.c[1], 1)
}

/// `∇⊥·v = -∂₂v¹ + ∂₁v²`.
pub fn perp_div(v: &VectorField) -> ScalarField {
    &derivative(&v.c[1], 0) - &derivative(&v.c[0], 1)
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.apply_real_symbol(|k1, k2| -((k1 * k1 + k2 * k2) as f64))
}

/// Row divergence `(div M)^l = ∂_m M^{ml}`.
pub fn matrix_div(m: &MatrixField) -> VectorField {
    VectorField::new(
        &derivative(&m.c[0][0], 0) + &derivative(&m.c[1][0], 1),
        &derivative(&m.c[0][1], 0) + &derivative(&m.c[1][1], 1),
    )
}

/// Gradient matrix `G[i][j] = ∂_i v^j`.
pub fn grad_vector(v: &VectorField) -> MatrixField {
    MatrixField {
        c: [
            [derivative(&v.c[0], 0), derivative(&v.c[1], 0)],
            [derivative(&v.c[0], 1), derivative(&v.c[1], 1)],
        ],
    }
}

fn padded_samples(f: &ScalarField, m: usize) -> Vec<C64> {
    let g = f.grid();
    let mut data = vec![C64::new(0.0, 0.0); m * m];
    let big = Grid::new(m).expect("padded grid");
    for (i, &c) in f.coeffs().iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 || g.flat_has_nyquist(i) {
            continue;
        }
        let (k1, k2) = g.wavevector(i);
        if let Some(j) = big.flat(k1, k2) {
            data[j] = c;
        }
    }
    fft::inverse(&mut data, m);
    data
}

/// Pointwise product, exact on every retained mode.
///
/// When the box supports of `f` and `g` fit below the Nyquist frequency the
/// product is formed on the native grid, otherwise on a grid padded by 3/2,
/// which is alias-free for all modes below Nyquist. Modes outside the sum of
/// the two supports are set to exactly zero.
pub fn product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    assert_eq!(f.grid(), g.grid(), "grid mismatch");
    let grid = f.grid();
    let n = grid.n();
    let rf = f.box_radius();
    let rg = g.box_radius();
    if rf == 0 && f.coeffs()[0].norm() == 0.0 || rg == 0 && g.coeffs()[0].norm() == 0.0 {
        return ScalarField::zeros(grid);
    }
    let r = rf + rg;
    let m = if r < n / 2 { n } else { friendly_size(3 * n / 2) };
    let a = padded_samples(f, m);
    let b = padded_samples(g, m);
    let mut p: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    fft::forward(&mut p, m);
    let big = Grid::new(m).unwrap();
    let rmax = r.min(n / 2 - 1) as i64;
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let (k1, k2) = grid.wavevector(i);
        if k1.abs() > rmax || k2.abs() > rmax {
            continue;
        }
        *o = p[big.flat(k1, k2).unwrap()];
    }
    ScalarField::from_coeffs(grid, out)
}

pub fn dot(a: &VectorField, b: &VectorField) -> ScalarField {
    &product(&a.c[0], &b.c[0]) + &product(&a.c[1], &b.c[1])
}

/// Scalar times vector.
pub fn scale_by(f: &ScalarField, v: &VectorField) -> VectorField {
    VectorField::new(product(f, &v.c[0]), product(f, &v.c[1]))
}

/// `(a·∇)v`.
pub fn advect(a: &VectorField, v: &VectorField) -> VectorField {
    v.map(|c| dot(a, &grad(c)))
}

/// `(∇v)ᵀa` with components `∂_i v^j a^j`.
pub fn grad_transpose_apply(v: &VectorField, a: &VectorField) -> VectorField {
    VectorField::new(
        &product(&derivative(&v.c[0], 0), &a.c[0]) + &product(&derivative(&v.c[1], 0), &a.c[1]),
        &product(&derivative(&v.c[0], 1), &a.c[0]) + &product(&derivative(&v.c[1], 1), &a.c[1]),
    )
}
