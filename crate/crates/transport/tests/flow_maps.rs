use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgci_spectral::norms::c_norm;
use sqgci_spectral::ops::perp_grad;
use sqgci_spectral::random::random_scalar;
use sqgci_spectral::{Grid, ScalarField, VectorField};
use sqgci_transport::material::{material_derivative, Stencil};
use sqgci_transport::*;

struct Pulsing {
    base: VectorField,
    h: f64,
}

impl Pulsing {
    fn new(seed: u64, amp: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_scalar(Grid::new(32).unwrap(), 3.0, &mut rng);
        let v = perp_grad(&psi);
        let s = amp / c_norm(&v, 0).max(1e-300);
        Self { base: v.scale(s), h: 0.01 }
    }
    fn factor(t: f64) -> f64 {
        1.0 + 0.5 * (3.0 * t).sin()
    }
    fn at(&self, t: f64) -> VectorField {
        self.base.scale(Self::factor(t))
    }
}

impl VelocityHistory for Pulsing {
    fn spacing(&self) -> f64 {
        self.h
    }
    fn sample(&self, i: i64) -> Arc<FieldEvaluator> {
        let v = self.at(i as f64 * self.h);
        Arc::new(FieldEvaluator::new(&[&v.c[0], &v.c[1]]))
    }
    fn gradient_bound(&self) -> f64 {
        1.5 * c_norm(&self.base, 1)
    }
}

struct Shear;

impl VelocityHistory for Shear {
    fn spacing(&self) -> f64 {
        1.0 / 64.0
    }
    fn sample(&self, _: i64) -> Arc<FieldEvaluator> {
        let g = Grid::new(16).unwrap();
        let u = ScalarField::from_fn(g, |_, y| y.sin());
        Arc::new(FieldEvaluator::new(&[&u, &ScalarField::zeros(g)]))
    }
    fn gradient_bound(&self) -> f64 {
        1.0
    }
}

#[test]
fn shear_closed_form() {
    let g = Grid::new(32).unwrap();
    let f = solve_flow_map(&Shear, 0.0, 1.0, g, 1).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..g.len() {
        let p = g.point(i);
        err = err.max((f.displacement[0][i] + p[1].sin()).abs()).max(f.displacement[1][i].abs());
    }
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn area_preserved_and_gradient_bounded() {
    let u = Pulsing::new(1, 1.0);
    let g = Grid::new(64).unwrap();
    let tau = 0.1;
    let f = solve_flow_map(&u, 0.0, 4.0 * tau, g, 4).unwrap();
    assert!(f.det_defect() <= 1e-6, "{}", f.det_defect());
    let bound = (4.0 * tau * u.gradient_bound()).exp() - 1.0;
    assert!(f.gradient_defect() <= 1.5 * bound);
}

#[test]
fn transported_field_returns_along_forward_characteristics() {
    let u = Pulsing::new(2, 0.8);
    let g = Grid::new(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = random_scalar(g, 4.0, &mut rng);
    let eval = FieldEvaluator::new(&[&base]);
    let t = 0.3;
    let back = solve_flow_map(&u, 0.0, t, g, 4).unwrap();
    let transported = eval.eval(&back.foot_points(g)).remove(0);
    let tf = ScalarField::from_physical(g, &transported).unwrap();
    // forward characteristics: X(t) from X(0) = x, via the inverse map anchored at t
    let fwd = solve_flow_map(&u, t, 0.0, g, 4).unwrap();
    let again = FieldEvaluator::new(&[&tf]).eval(&fwd.foot_points(g)).remove(0);
    let expect = base.to_physical();
    let err = again.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn advance_matches_retracing_and_transport_is_material() {
    let u = Pulsing::new(3, 1.0);
    let g = Grid::new(64).unwrap();
    let t = 0.237;
    let eps = 1e-4;
    let f = solve_flow_map(&u, 0.0, t, g, 4).unwrap();
    let direct = solve_flow_map(&u, 0.0, t + eps, g, 4).unwrap();
    let adv = f.advance(&u, eps);
    let err = (0..2)
        .flat_map(|c| adv.displacement[c].iter().zip(&direct.displacement[c]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err}");

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let label = random_scalar(g, 3.0, &mut rng);
    let ev = FieldEvaluator::new(&[&label]);
    let at = |m: &FlowMap| ScalarField::from_physical(g, &ev.eval(&m.foot_points(g))[0]).unwrap();
    let (minus, center, plus) = (at(&f.advance(&u, -eps)), at(&f), at(&adv));
    // the tracer sees the velocity linearly interpolated between samples
    let i = (t / u.h).floor();
    let theta = t / u.h - i;
    let ut = &u.at(i * u.h).scale(1.0 - theta) + &u.at((i + 1.0) * u.h).scale(theta);
    let (d, _) = material_derivative(&Stencil { minus: Some(&minus), center: &center, plus: Some(&plus), eps }, &ut.resample(g));
    let scale = c_norm(&center, 1) * c_norm(&u.at(t), 0);
    assert!(c_norm(&d, 0) <= 1e-6 * scale, "{}", c_norm(&d, 0) / scale);
}

#[test]
fn phases_are_unimodular_and_paired() {
    let u = Pulsing::new(5, 1.0);
    let g = Grid::new(32).unwrap();
    let f = solve_flow_map(&u, 0.0, 0.2, g, 2).unwrap();
    let k = [0.6, 0.8];
    let p = f.phase(g, k, 25.0);
    let m = f.phase(g, [-k[0], -k[1]], 25.0);
    for (a, b) in p.iter().zip(&m) {
        assert!((a.norm() - 1.0).abs() < 1e-14);
        assert!((a * b - 1.0).norm() < 1e-14);
    }
    let id = FlowMap::identity(g, 0.0, 0.0).phase(g, k, 25.0);
    assert!(id.iter().all(|z| *z == sqgci_spectral::C64::new(1.0, 0.0)));
}
