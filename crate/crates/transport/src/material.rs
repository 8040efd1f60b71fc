//! `D_t f = ∂_t f + u·∇f` with a finite-difference time derivative.

use sqgci_spectral::ops::{dot, grad};
use sqgci_spectral::{ScalarField, VectorField};

/// Time samples of a field around the evaluation time `t`.
pub struct Stencil<'a, F> {
    pub minus: Option<&'a F>,
    pub center: &'a F,
    pub plus: Option<&'a F>,
    pub eps: f64,
}

/// Fields that can be differentiated along a transport velocity.
pub trait Transportable: Clone {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self;
    fn advect(&self, u: &VectorField) -> Self;
}

impl Transportable for ScalarField {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        let mut out = self.scale(a);
        out.axpy(b, other);
        out
    }
    fn advect(&self, u: &VectorField) -> Self {
        dot(u, &grad(self))
    }
}

impl Transportable for VectorField {
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        VectorField::new(self.c[0].lincomb(a, &other.c[0], b), self.c[1].lincomb(a, &other.c[1], b))
    }
    fn advect(&self, u: &VectorField) -> Self {
        self.map(|c| c.advect(u))
    }
}

/// Returns `D_t f` and whether a one-sided difference had to be used.
pub fn material_derivative<F: Transportable>(s: &Stencil<'_, F>, u: &VectorField) -> (F, bool) {
    let (dt, one_sided) = match (s.minus, s.plus) {
        (Some(m), Some(p)) => (p.lincomb(0.5 / s.eps, m, -0.5 / s.eps), false),
        (None, Some(p)) => (p.lincomb(1.0 / s.eps, s.center, -1.0 / s.eps), true),
        (Some(m), None) => (s.center.lincomb(1.0 / s.eps, m, -1.0 / s.eps), true),
        (None, None) => panic!("material derivative needs at least two time samples"),
    };
    (dt.lincomb(1.0, &s.center.advect(u), 1.0), one_sided)
}
