//! Random band-limited fields for tests and property suites.

use rand::Rng;

use crate::{ops, Grid, ScalarField, VectorField, C64};

/// Real mean-zero field with random coefficients on `rmin ≤ |k| ≤ rmax`.
pub fn random_scalar_annulus(grid: Grid, rmin: f64, rmax: f64, rng: &mut impl Rng) -> ScalarField {
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.len()];
    let r = rmax.floor() as i64;
    assert!(r <= grid.kmax(), "band exceeds grid");
    for k1 in 0..=r {
        for k2 in -r..=r {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let m = ((k1 * k1 + k2 * k2) as f64).sqrt();
            if m < rmin || m > rmax {
                continue;
            }
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[grid.flat(k1, k2).unwrap()] = c;
            coeffs[grid.flat(-k1, -k2).unwrap()] = c.conj();
        }
    }
    ScalarField::from_coeffs(grid, coeffs)
}

/// Real mean-zero field with random coefficients on `0 < |k| ≤ radius`.
pub fn random_scalar(grid: Grid, radius: f64, rng: &mut impl Rng) -> ScalarField {
    random_scalar_annulus(grid, 0.5, radius, rng)
}

pub fn random_vector(grid: Grid, radius: f64, rng: &mut impl Rng) -> VectorField {
    VectorField::new(random_scalar(grid, radius, rng), random_scalar(grid, radius, rng))
}

/// Divergence-free field `∇⊥ψ` with `ψ` random of band `radius`.
pub fn random_div_free(grid: Grid, radius: f64, rng: &mut impl Rng) -> VectorField {
    ops::perp_grad(&random_scalar(grid, radius, rng))
}
