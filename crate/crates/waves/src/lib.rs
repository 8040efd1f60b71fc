//! Beltrami plane waves and the decomposition of symmetric matrices near the
//! identity into positive combinations of `k⊥⊗k⊥` over two fixed direction sets.

pub mod beltrami;

pub use beltrami::{beltrami_identity_check, beltrami_pair, BeltramiResiduals};

use once_cell::sync::Lazy;

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Debug, thiserror::Error)]
pub enum WaveError {
    #[error("coefficient {index} is {value:e}: matrix outside the validity ball")]
    OutsideBall { index: usize, value: f64 },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("λk = ({0}, {1}) is not on the integer lattice")]
    OffLattice(f64, f64),
    #[error("amplitudes are not conjugate-paired")]
    NotConjugate,
    #[error("wave frequency outside the grid band")]
    Unresolved,
}

pub fn perp(k: [f64; 2]) -> [f64; 2] {
    [-k[1], k[0]]
}

/// Frobenius norm.
pub fn mat_norm(m: &Mat2) -> f64 {
    (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
}

/// One of the two direction sets. `plus` holds one representative of each `±k` pair.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    pub index: u8,
    pub plus: [[f64; 2]; 3],
    /// Solves `(R11, R12, R22) ↦ γ²` for this set.
    inverse: [[f64; 3]; 3],
    pub epsilon_gamma: f64,
}

const OMEGA1: [[f64; 2]; 3] = [[1.0, 0.0], [0.6, 0.8], [0.6, -0.8]];

fn invert3(a: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let cof = |r: usize, c: usize| {
        let (r0, r1, c0, c1) = ((r + 1) % 3, (r + 2) % 3, (c + 1) % 3, (c + 2) % 3);
        a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
    };
    let det: f64 = (0..3).map(|c| a[0][c] * cof(0, c)).sum();
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = cof(j, i) / det;
        }
    }
    inv
}

impl DirectionSet {
    fn build(index: u8) -> Self {
        let plus = if index == 1 { OMEGA1 } else { OMEGA1.map(perp) };
        let mut a = [[0.0; 3]; 3];
        for (i, k) in plus.iter().enumerate() {
            let p = perp(*k);
            a[0][i] = p[0] * p[0];
            a[1][i] = p[0] * p[1];
            a[2][i] = p[1] * p[1];
        }
        let mut s = Self { index, plus, inverse: invert3(a), epsilon_gamma: 0.0 };
        s.epsilon_gamma = s.radius_where(0.1, false);
        s
    }

    /// Cached direction set `Ω_j`, `j ∈ {1, 2}`.
    pub fn get(j: u8) -> &'static DirectionSet {
        static SETS: Lazy<[DirectionSet; 2]> = Lazy::new(|| [DirectionSet::build(1), DirectionSet::build(2)]);
        assert!(j == 1 || j == 2, "direction set index must be 1 or 2");
        &SETS[j as usize - 1]
    }

    /// All six directions, `plus` followed by their negatives.
    pub fn all(&self) -> Vec<[f64; 2]> {
        self.plus.iter().copied().chain(self.plus.iter().map(|k| [-k[0], -k[1]])).collect()
    }

    /// Linear solve for `γ²` with `Σ_{k∈plus} γ_k² k⊥⊗k⊥ = R`; no positivity check.
    pub fn gamma_squared_unchecked(&self, r: &Mat2) -> [f64; 3] {
        let v = [r[0][0], 0.5 * (r[0][1] + r[1][0]), r[1][1]];
        let m = &self.inverse;
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    /// `γ_k(R)²` for `k ∈ plus`; `γ_{-k} = γ_k`.
    pub fn gamma_squared(&self, r: &Mat2) -> Result<[f64; 3], WaveError> {
        if (r[0][1] - r[1][0]).abs() > 1e-14 * (1.0 + mat_norm(r)) {
            return Err(WaveError::NotSymmetric);
        }
        let g = self.gamma_squared_unchecked(r);
        for (index, &value) in g.iter().enumerate() {
            if value <= 0.0 {
                return Err(WaveError::OutsideBall { index, value });
            }
        }
        Ok(g)
    }

    pub fn gamma_coefficients(&self, r: &Mat2) -> Result<[f64; 3], WaveError> {
        Ok(self.gamma_squared(r)?.map(f64::sqrt))
    }

    /// `Σ_{k∈plus} g_k k⊥⊗k⊥`, equal to `½Σ_{k∈Ω} γ_k² k⊥⊗k⊥`.
    pub fn reconstruct(&self, g2: &[f64; 3]) -> Mat2 {
        let mut m = [[0.0; 2]; 2];
        for (k, g) in self.plus.iter().zip(g2) {
            let p = perp(*k);
            for a in 0..2 {
                for b in 0..2 {
                    m[a][b] += g * p[a] * p[b];
                }
            }
        }
        m
    }

    /// Gradient of `γ_i²` as a functional on `(E11, E12, E22)`.
    fn functional(&self, i: usize) -> [f64; 3] {
        self.inverse[i]
    }

    /// Largest `r` with `γ_i²(Id + rE) ≥ floor·γ_i²(Id)` for all unit `E`.
    ///
    /// The solve is linear, so the radius is `(1-floor)γ_i²(Id)` over the dual
    /// norm of each functional; `traceless` restricts `E` to trace-free matrices.
    pub fn radius_where(&self, floor: f64, traceless: bool) -> f64 {
        let g0 = self.gamma_squared_unchecked(&IDENTITY);
        (0..3)
            .map(|i| {
                let [a, b, c] = self.functional(i);
                let dual = if traceless {
                    ((a - c) * (a - c) / 2.0 + b * b / 2.0).sqrt()
                } else {
                    (a * a + b * b / 2.0 + c * c).sqrt()
                };
                (1.0 - floor) * g0[i] / dual
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Radius of trace-free perturbations of `Id` keeping every `γ²` positive.
    pub fn positivity_radius_traceless(&self) -> f64 {
        self.radius_where(0.0, true)
    }
}

/// `ε_γ`: the common radius for both sets (coefficients stay ≥ 10% of their value at `Id`).
pub fn estimate_epsilon_gamma() -> f64 {
    DirectionSet::get(1).epsilon_gamma.min(DirectionSet::get(2).epsilon_gamma)
}

/// Sampled sweep of the unit sphere of symmetric matrices: smallest radius found
/// by bisection along `samples` directions. Used as an independent check.
pub fn sweep_epsilon_gamma(set: &DirectionSet, samples: usize) -> f64 {
    let g0 = set.gamma_squared_unchecked(&IDENTITY);
    let ok = |e: &[f64; 3], r: f64| {
        let m = [[1.0 + r * e[0], r * e[1]], [r * e[1], 1.0 + r * e[2]]];
        let g = set.gamma_squared_unchecked(&m);
        (0..3).all(|i| g[i] >= 0.1 * g0[i])
    };
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut best = f64::INFINITY;
    for s in 0..samples {
        let z = 1.0 - 2.0 * (s as f64 + 0.5) / samples as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden * s as f64;
        // unit sphere in (E11, √2 E12, E22)
        let e = [rho * phi.cos(), rho * phi.sin() / std::f64::consts::SQRT_2, z];
        let (mut lo, mut hi) = (0.0, 10.0);
        if ok(&e, hi) {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(&e, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(lo);
    }
    best
}
