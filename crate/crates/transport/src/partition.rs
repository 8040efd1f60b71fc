use sqgci_spectral::bump::smooth_step;

/// `χ²(s) = S(2s - 1) - S(2s - 3)`: support `[1/2, 2]`, equal to 1 on `[1, 3/2]`.
///
/// Integer shifts telescope, so `Σ_j χ²(s - j) = 1` identically, and cutoffs two
/// indices apart never overlap.
///
/// Evaluated piecewise (`S(2s-1)`, `1`, `S(4-2s)`) so that the tails keep full
/// relative precision; the difference form cancels to roundoff there.
pub fn master_chi_sq(s: f64) -> f64 {
    if s < 1.0 {
        smooth_step(2.0 * s - 1.0)
    } else if s <= 1.5 {
        1.0
    } else {
        smooth_step(4.0 - 2.0 * s)
    }
}

fn step_dot(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / ((a + b) * (a + b))
}

/// `d/ds χ²(s)`.
pub fn master_chi_sq_dot(s: f64) -> f64 {
    2.0 * (step_dot(2.0 * s - 1.0) - step_dot(2.0 * s - 3.0))
}

/// Cutoffs `χ_j(t) = χ(t/τ - j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimePartition {
    pub tau: f64,
}

impl TimePartition {
    pub const SUPPORT: (f64, f64) = (0.5, 2.0);

    pub fn new(tau: f64) -> Self {
        Self { tau }
    }

    pub fn chi_sq(&self, j: i64, t: f64) -> f64 {
        master_chi_sq(t / self.tau - j as f64)
    }

    pub fn chi(&self, j: i64, t: f64) -> f64 {
        self.chi_sq(j, t).sqrt()
    }

    /// `∂_t χ_j`.
    pub fn chi_dot(&self, j: i64, t: f64) -> f64 {
        let c = self.chi(j, t);
        if c == 0.0 {
            return 0.0;
        }
        master_chi_sq_dot(t / self.tau - j as f64) / (2.0 * c * self.tau)
    }

    /// Indices with `χ_j(t) > 0`, ascending.
    pub fn active(&self, t: f64) -> Vec<i64> {
        let s = t / self.tau;
        let lo = (s - Self::SUPPORT.1).floor() as i64;
        let hi = (s - Self::SUPPORT.0).ceil() as i64;
        (lo..=hi).filter(|&j| self.chi_sq(j, t) > 0.0).collect()
    }

    /// Time interval carrying `χ_j`.
    pub fn support(&self, j: i64) -> (f64, f64) {
        ((j as f64 + Self::SUPPORT.0) * self.tau, (j as f64 + Self::SUPPORT.1) * self.tau)
    }

    /// Anchor time `jτ` of the back-to-labels map.
    pub fn anchor(&self, j: i64) -> f64 {
        j as f64 * self.tau
    }
}
