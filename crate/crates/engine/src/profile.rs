//! Prescribed Hamiltonian profiles `H(t)`.

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileKind {
    /// `amp·exp(1 - 1/(1 - s²))`, `s ∈ (-1, 1)` the rescaled time.
    Bump,
    /// `amp·cos²(πs/2)`.
    Cos2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub kind: ProfileKind,
    pub t0: f64,
    pub t1: f64,
    pub amplitude: f64,
}

impl Profile {
    pub fn new(kind: ProfileKind, t0: f64, t1: f64, amplitude: f64) -> Self {
        assert!(t1 > t0 && amplitude >= 0.0);
        Self { kind, t0, t1, amplitude }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ProfileKind::Bump => "bump",
            ProfileKind::Cos2 => "cos2",
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    fn rescale(&self, t: f64) -> (f64, f64) {
        let half = 0.5 * (self.t1 - self.t0);
        ((t - 0.5 * (self.t0 + self.t1)) / half, 1.0 / half)
    }

    /// `H`, `H'`, `H''` at `t`.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        let (s, ds) = self.rescale(t);
        if s.abs() >= 1.0 {
            return [0.0; 3];
        }
        let a = self.amplitude;
        match self.kind {
            ProfileKind::Bump => {
                let d = 1.0 - s * s;
                let h = (1.0 - 1.0 / d).exp();
                // g = 1 - 1/d, g' = -2s/d², g'' = -2/d² - 8s²/d³
                let g1 = -2.0 * s / (d * d);
                let g2 = -2.0 / (d * d) - 8.0 * s * s / (d * d * d);
                [a * h, a * h * g1 * ds, a * h * (g1 * g1 + g2) * ds * ds]
            }
            ProfileKind::Cos2 => {
                let c = (0.5 * PI * s).cos();
                [
                    a * c * c,
                    -a * 0.5 * PI * (PI * s).sin() * ds,
                    -a * 0.5 * PI * PI * (PI * s).cos() * ds * ds,
                ]
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }
}
