use gauss_quad::legendre::GaussLegendre;
use sqgci_spectral::C64;
use std::num::NonZeroUsize;

use crate::PseudoError;

/// Gauss-Legendre rule on `[0, 1]` used for the `r`-integral of `s^m`.
#[derive(Clone, Debug)]
pub struct SymbolQuadrature {
    rule: Vec<(f64, f64)>,
}

impl SymbolQuadrature {
    pub const DEFAULT_NODES: usize = 32;

    pub fn new(nodes: usize) -> Self {
        let n = NonZeroUsize::new(nodes.max(1)).unwrap();
        let gl = GaussLegendre::new(n);
        let rule = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        SymbolQuadrature { rule }
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    /// `(s^1, s^2)` at `(ζ, η)`.
    ///
    /// The integrand `i v/|v|` with `v(r) = η - r(ζ+η)` is integrated piecewise.
    /// Breakpoints sit at the point of closest approach of the segment to the
    /// origin and, when the segment passes close to it, on a geometric ladder
    /// away from that point so that every piece sees the near-singularity at a
    /// distance comparable to its own length.
    pub fn eval(&self, zeta: [f64; 2], eta: [f64; 2]) -> Result<[C64; 2], PseudoError> {
        let xi = [zeta[0] + eta[0], zeta[1] + eta[1]];
        let s2 = xi[0] * xi[0] + xi[1] * xi[1];
        let eta_n = eta[0].hypot(eta[1]);
        if s2 == 0.0 {
            if eta_n == 0.0 {
                return Err(PseudoError::BothZero);
            }
            return Ok([C64::new(0.0, eta[0] / eta_n), C64::new(0.0, eta[1] / eta_n)]);
        }
        let rstar = (eta[0] * xi[0] + eta[1] * xi[1]) / s2;
        let w = (eta[0] * xi[1] - eta[1] * xi[0]).abs() / s2;

        let mut cuts = vec![0.0, 1.0];
        if rstar > 0.0 && rstar < 1.0 {
            cuts.push(rstar);
        }
        if w > 0.0 {
            let mut d = w;
            while d < 1.0 {
                for c in [rstar - d, rstar + d] {
                    if c > 0.0 && c < 1.0 {
                        cuts.push(c);
                    }
                }
                d *= 4.0;
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();

        let mut acc = [0.0f64; 2];
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let len = b - a;
            if len <= 0.0 {
                continue;
            }
            for &(x, wt) in &self.rule {
                let r = a + len * x;
                let v = [eta[0] - r * xi[0], eta[1] - r * xi[1]];
                let m = v[0].hypot(v[1]);
                if m > 0.0 {
                    acc[0] += len * wt * v[0] / m;
                    acc[1] += len * wt * v[1] / m;
                }
            }
        }
        Ok([C64::new(0.0, acc[0]), C64::new(0.0, acc[1])])
    }

    /// Single component `s^m`, `m ∈ {1, 2}`.
    pub fn eval_m(&self, m: usize, zeta: [f64; 2], eta: [f64; 2]) -> Result<C64, PseudoError> {
        assert!(m == 1 || m == 2, "component must be 1 or 2");
        Ok(self.eval(zeta, eta)?[m - 1])
    }
}

impl Default for SymbolQuadrature {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NODES)
    }
}

/// Distance from the origin to the segment `{(1-r)η - rζ : r ∈ [0,1]}`.
pub fn segment_clearance(zeta: [f64; 2], eta: [f64; 2]) -> f64 {
    let xi = [zeta[0] + eta[0], zeta[1] + eta[1]];
    let s2 = xi[0] * xi[0] + xi[1] * xi[1];
    let eta_n = eta[0].hypot(eta[1]);
    if s2 == 0.0 {
        return eta_n;
    }
    let rstar = (eta[0] * xi[0] + eta[1] * xi[1]) / s2;
    if rstar <= 0.0 {
        eta_n
    } else if rstar >= 1.0 {
        zeta[0].hypot(zeta[1])
    } else {
        (eta[0] * xi[1] - eta[1] * xi[0]).abs() / s2.sqrt()
    }
}
