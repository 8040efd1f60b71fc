//! Back-to-labels maps `Φ_j`: `(∂_t + u·∇)Φ = 0`, `Φ(x, t₀) = x`, computed by
//! tracing characteristics backward from `t` to `t₀` with RK4.

use std::collections::HashMap;
use std::sync::Arc;

use sqgci_spectral::ops::derivative;
use sqgci_spectral::{Grid, ScalarField, VectorField};

use crate::{FieldEvaluator, TransportError};

/// Velocity sampled at times `i·h`, linearly interpolated in between.
pub trait VelocityHistory: Sync {
    fn spacing(&self) -> f64;
    /// Two-component evaluator of the velocity at time `i·h`.
    fn sample(&self, i: i64) -> Arc<FieldEvaluator>;
    /// Bound on `|∇u|` over the times in use.
    fn gradient_bound(&self) -> f64;
}

/// Displacement `Φ(x, t) - x` stored as physical samples on a tracing grid.
#[derive(Clone, Debug)]
pub struct FlowMap {
    pub t0: f64,
    pub t: f64,
    pub grid: Grid,
    pub displacement: [Vec<f64>; 2],
}

struct Clock<'a> {
    hist: &'a dyn VelocityHistory,
    cache: HashMap<u64, Arc<FieldEvaluator>>,
}

impl<'a> Clock<'a> {
    fn velocity(&mut self, s: f64) -> Arc<FieldEvaluator> {
        if let Some(e) = self.cache.get(&s.to_bits()) {
            return e.clone();
        }
        let h = self.hist.spacing();
        let u = s / h;
        let mut i = u.floor();
        let mut theta = u - i;
        if theta > 1.0 - 1e-12 {
            i += 1.0;
            theta = 0.0;
        }
        let e = if theta < 1e-12 {
            self.hist.sample(i as i64)
        } else {
            let a = self.hist.sample(i as i64);
            let b = self.hist.sample(i as i64 + 1);
            Arc::new(FieldEvaluator::blend(&a, &b, theta))
        };
        self.cache.insert(s.to_bits(), e.clone());
        e
    }

    /// One backward RK4 step of length `dt` from time `s`.
    fn step_back(&mut self, x: &mut [[f64; 2]], s: f64, dt: f64) {
        let shifted = |x: &[[f64; 2]], k: &[Vec<f64>], a: f64| -> Vec<[f64; 2]> {
            x.iter().enumerate().map(|(p, v)| [v[0] - a * k[0][p], v[1] - a * k[1][p]]).collect()
        };
        let k1 = self.velocity(s).eval(x);
        let k2 = self.velocity(s - 0.5 * dt).eval(&shifted(x, &k1, 0.5 * dt));
        let k3 = self.velocity(s - 0.5 * dt).eval(&shifted(x, &k2, 0.5 * dt));
        let k4 = self.velocity(s - dt).eval(&shifted(x, &k3, dt));
        for (p, v) in x.iter_mut().enumerate() {
            for c in 0..2 {
                v[c] -= dt / 6.0 * (k1[c][p] + 2.0 * k2[c][p] + 2.0 * k3[c][p] + k4[c][p]);
            }
        }
    }
}

fn grid_points(grid: Grid) -> Vec<[f64; 2]> {
    (0..grid.len()).map(|i| grid.point(i)).collect()
}

/// Traces `Φ(·, t)` anchored at `t₀` on an `n × n` grid.
///
/// Steps are aligned to the grid `t₀ + m·h/substeps`; a leading partial step
/// carries `t` onto that grid, so `Φ` varies smoothly with `t`.
pub fn solve_flow_map(hist: &dyn VelocityHistory, t0: f64, t: f64, grid: Grid, substeps: usize) -> Result<FlowMap, TransportError> {
    let dt = hist.spacing() / substeps as f64;
    let grad = hist.gradient_bound();
    if dt * grad > 0.5 {
        let required = (hist.spacing() * grad / 0.5).ceil() as usize;
        return Err(TransportError::Cfl { dt, grad, required });
    }
    let mut x = grid_points(grid);
    let start = x.clone();
    let mut clock = Clock { hist, cache: HashMap::new() };
    let sign = if t >= t0 { 1.0 } else { -1.0 };
    let m = ((t - t0).abs() / dt).floor() as i64;
    let aligned = t0 + sign * m as f64 * dt;
    let lead = t - aligned;
    if lead.abs() > 1e-14 * dt {
        clock.step_back(&mut x, t, lead);
    }
    for i in (1..=m).rev() {
        let s = t0 + sign * i as f64 * dt;
        clock.step_back(&mut x, s, sign * dt);
    }
    let d0 = x.iter().zip(&start).map(|(a, b)| a[0] - b[0]).collect();
    let d1 = x.iter().zip(&start).map(|(a, b)| a[1] - b[1]).collect();
    Ok(FlowMap { t0, t, grid, displacement: [d0, d1] })
}

impl FlowMap {
    pub fn identity(grid: Grid, t0: f64, t: f64) -> Self {
        Self { t0, t, grid, displacement: [vec![0.0; grid.len()], vec![0.0; grid.len()]] }
    }

    pub fn displacement_field(&self) -> VectorField {
        VectorField::new(
            ScalarField::from_physical(self.grid, &self.displacement[0]).expect("finite displacement"),
            ScalarField::from_physical(self.grid, &self.displacement[1]).expect("finite displacement"),
        )
    }

    /// Displacement sampled on another grid by spectral interpolation.
    pub fn displacement_on(&self, grid: Grid) -> [Vec<f64>; 2] {
        if grid == self.grid {
            return self.displacement.clone();
        }
        let d = self.displacement_field().resample(grid);
        [d.c[0].to_physical(), d.c[1].to_physical()]
    }

    /// Foot points `Φ(x, t)` at the nodes of `grid`.
    pub fn foot_points(&self, grid: Grid) -> Vec<[f64; 2]> {
        let d = self.displacement_on(grid);
        (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                [p[0] + d[0][i], p[1] + d[1][i]]
            })
            .collect()
    }

    /// `Φ(·, t + dt)` from `Φ(·, t)`: a single RK4 step back to `t`, then `Φ(·, t)`
    /// at the displaced points by a second-order spectral Taylor expansion.
    pub fn advance(&self, hist: &dyn VelocityHistory, dt: f64) -> FlowMap {
        let grid = self.grid;
        let mut y = grid_points(grid);
        let x = y.clone();
        let mut clock = Clock { hist, cache: HashMap::new() };
        clock.step_back(&mut y, self.t + dt, dt);
        let d = self.displacement_field();
        let first = [0, 1].map(|c| [0, 1].map(|a| derivative(&d.c[c], a).to_physical()));
        let second = [0, 1].map(|c| {
            let dx = derivative(&d.c[c], 0);
            let dy = derivative(&d.c[c], 1);
            [derivative(&dx, 0).to_physical(), derivative(&dx, 1).to_physical(), derivative(&dy, 1).to_physical()]
        });
        let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for i in 0..grid.len() {
            let e = [y[i][0] - x[i][0], y[i][1] - x[i][1]];
            for c in 0..2 {
                let lin = first[c][0][i] * e[0] + first[c][1][i] * e[1];
                let quad = 0.5 * (second[c][0][i] * e[0] * e[0] + 2.0 * second[c][1][i] * e[0] * e[1] + second[c][2][i] * e[1] * e[1]);
                out[c][i] = self.displacement[c][i] + lin + quad + e[c];
            }
        }
        FlowMap { t0: self.t0, t: self.t + dt, grid, displacement: out }
    }

    fn jacobian(&self) -> [[Vec<f64>; 2]; 2] {
        let d = self.displacement_field();
        [0, 1].map(|c| [0, 1].map(|a| derivative(&d.c[c], a).to_physical()))
    }

    /// `max |det ∇Φ - 1|`.
    pub fn det_defect(&self) -> f64 {
        let j = self.jacobian();
        (0..self.grid.len())
            .map(|i| ((1.0 + j[0][0][i]) * (1.0 + j[1][1][i]) - j[0][1][i] * j[1][0][i] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `‖∇Φ - Id‖_{C⁰}` (Frobenius).
    pub fn gradient_defect(&self) -> f64 {
        let j = self.jacobian();
        (0..self.grid.len())
            .map(|i| (j[0][0][i].powi(2) + j[0][1][i].powi(2) + j[1][0][i].powi(2) + j[1][1][i].powi(2)).sqrt())
            .fold(0.0, f64::max)
    }

    /// `ψ = e^{iλk·(Φ - x)}` on `grid`, with its conjugate for `-k`.
    pub fn phase(&self, grid: Grid, k: [f64; 2], lam: f64) -> Vec<sqgci_spectral::C64> {
        let d = self.displacement_on(grid);
        (0..grid.len()).map(|i| sqgci_spectral::C64::from_polar(1.0, lam * (k[0] * d[0][i] + k[1] * d[1][i]))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Steady(Arc<FieldEvaluator>, f64);

    impl VelocityHistory for Steady {
        fn spacing(&self) -> f64 {
            0.1
        }
        fn sample(&self, _: i64) -> Arc<FieldEvaluator> {
            self.0.clone()
        }
        fn gradient_bound(&self) -> f64 {
            self.1
        }
    }

    fn steady(u1: ScalarField, u2: ScalarField, grad: f64) -> Steady {
        Steady(Arc::new(FieldEvaluator::new(&[&u1, &u2])), grad)
    }

    #[test]
    fn zero_velocity_is_identity() {
        let g = Grid::new(16).unwrap();
        let h = steady(ScalarField::zeros(g), ScalarField::zeros(g), 0.0);
        let f = solve_flow_map(&h, 0.0, 0.37, g, 4).unwrap();
        assert!(f.displacement[0].iter().chain(&f.displacement[1]).all(|&v| v == 0.0));
    }

    #[test]
    fn constant_velocity_translates() {
        let g = Grid::new(16).unwrap();
        let h = steady(ScalarField::constant(g, 0.7), ScalarField::zeros(g), 0.0);
        let f = solve_flow_map(&h, 0.2, 0.55, g, 2).unwrap();
        assert!(f.displacement[0].iter().all(|&v| (v + 0.7 * 0.35).abs() < 1e-14));
    }

    #[test]
    fn refuses_large_steps() {
        let g = Grid::new(16).unwrap();
        let h = steady(ScalarField::zeros(g), ScalarField::zeros(g), 20.0);
        match solve_flow_map(&h, 0.0, 1.0, g, 1) {
            Err(TransportError::Cfl { required, .. }) => assert_eq!(required, 4),
            other => panic!("{other:?}"),
        }
    }
}
