//! Pointwise amplitudes `a_k = ρ^{1/2} γ_k(Id - R̊/(λρ))`.

use sqgci_waves::{DirectionSet, IDENTITY};

/// Guard statistics of one amplitude evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Saturation {
    /// `max_x |R̊(x)|/(λρ)` (Frobenius) before any clamping.
    pub max_ratio: f64,
    /// Points where the ratio exceeded the inner radius and was shrunk.
    pub saturated: usize,
    pub points: usize,
}

impl Saturation {
    pub fn merge(&mut self, o: &Saturation) {
        self.max_ratio = self.max_ratio.max(o.max_ratio);
        self.saturated += o.saturated;
        self.points += o.points;
    }

    pub fn fraction(&self) -> f64 {
        if self.points == 0 {
            0.0
        } else {
            self.saturated as f64 / self.points as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct Amplitudes {
    pub rho: f64,
    /// `a_k` samples for the three directions of the set, in `plus` order.
    pub a: [Vec<f64>; 3],
    pub saturation: Saturation,
}

/// Radial shrink: identity up to `r0`, then `r0 + (r1-r0)tanh((r-r0)/(r1-r0))`.
/// Twice continuously differentiable and bounded by `r1`.
pub fn shrink(r: f64, r0: f64, r1: f64) -> f64 {
    if r <= r0 {
        r
    } else {
        let w = r1 - r0;
        r0 + w * ((r - r0) / w).tanh()
    }
}

/// Amplitudes from samples `(m11, m12)` of the trace-free stress.
///
/// With `cap = Some((r0, r1))` the normalized stress `E = R̊/(λρ)` is shrunk
/// radially beyond `r0`; otherwise it is used as is and negative `γ²` are cut to 0.
pub fn amplitudes(set: &DirectionSet, m11: &[f64], m12: &[f64], lambda: f64, rho: f64, cap: Option<(f64, f64)>) -> Amplitudes {
    let n = m11.len();
    let mut out = Amplitudes { rho, a: [vec![0.0; n], vec![0.0; n], vec![0.0; n]], saturation: Saturation { points: n, ..Default::default() } };
    if rho == 0.0 {
        return out;
    }
    let scale = 1.0 / (lambda * rho);
    let g0 = set.gamma_squared_unchecked(&IDENTITY);
    for i in 0..n {
        let (mut e11, mut e12) = (m11[i] * scale, m12[i] * scale);
        let r = (2.0 * (e11 * e11 + e12 * e12)).sqrt();
        out.saturation.max_ratio = out.saturation.max_ratio.max(r);
        let g2 = if r == 0.0 {
            g0
        } else {
            if let Some((r0, r1)) = cap {
                if r > r0 {
                    let s = shrink(r, r0, r1) / r;
                    e11 *= s;
                    e12 *= s;
                    out.saturation.saturated += 1;
                }
            }
            set.gamma_squared_unchecked(&[[1.0 - e11, -e12], [-e12, 1.0 + e11]])
        };
        for k in 0..3 {
            out.a[k][i] = (rho * g2[k].max(0.0)).sqrt();
        }
    }
    out
}
