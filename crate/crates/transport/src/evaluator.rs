//! Off-grid evaluation of band-limited fields.
//!
//! Fields with few modes are summed exactly. Others are zero-padded onto a grid
//! at least 8× finer than their band and interpolated with 10-point periodic
//! Lagrange stencils (barycentric form).

use std::f64::consts::PI;

use sqgci_spectral::{friendly_size, Grid, ScalarField, C64};

/// Mode count up to which evaluation is an exact trigonometric sum.
pub const SPARSE_LIMIT: usize = 64;
const OVERSAMPLE: usize = 8;
const STENCIL: usize = 10;

#[derive(Clone, Debug)]
enum Repr {
    Sparse { k: Vec<[f64; 2]>, c: Vec<Vec<C64>> },
    Lagrange { n: usize, data: Vec<Vec<f64>> },
}

/// Evaluates the real parts of several components at arbitrary points.
#[derive(Clone, Debug)]
pub struct FieldEvaluator {
    repr: Repr,
    comps: usize,
}

fn bary_weights() -> [f64; STENCIL] {
    let mut w = [0.0; STENCIL];
    let mut binom = 1.0;
    for (m, wm) in w.iter_mut().enumerate() {
        if m > 0 {
            binom = binom * (STENCIL - m) as f64 / m as f64;
        }
        *wm = if m % 2 == 0 { binom } else { -binom };
    }
    w
}

/// Interpolation weights and first node of the stencil for coordinate `x`.
#[inline]
fn stencil(x: f64, h: f64, n: usize, bw: &[f64; STENCIL]) -> ([f64; STENCIL], usize) {
    let u = (x + PI) / h;
    let i0 = u.floor();
    let f = u - i0;
    let local = f + (STENCIL / 2 - 1) as f64;
    let start = (i0 as i64 - (STENCIL / 2 - 1) as i64).rem_euclid(n as i64) as usize;
    let mut w = [0.0; STENCIL];
    if f == 0.0 {
        w[STENCIL / 2 - 1] = 1.0;
        return (w, start);
    }
    let mut s = 0.0;
    for m in 0..STENCIL {
        w[m] = bw[m] / (local - m as f64);
        s += w[m];
    }
    for v in w.iter_mut() {
        *v /= s;
    }
    (w, start)
}

impl FieldEvaluator {
    pub fn new(components: &[&ScalarField]) -> Self {
        assert!(!components.is_empty());
        let grid = components[0].grid();
        let mut live: Vec<usize> = (0..grid.len())
            .filter(|&i| components.iter().any(|f| f.coeffs()[i] != C64::new(0.0, 0.0)) && !grid.flat_has_nyquist(i))
            .collect();
        live.sort_unstable();
        if live.len() <= SPARSE_LIMIT {
            let k = live
                .iter()
                .map(|&i| {
                    let (a, b) = grid.wavevector(i);
                    [a as f64, b as f64]
                })
                .collect();
            let c = components.iter().map(|f| live.iter().map(|&i| f.coeffs()[i]).collect()).collect();
            return Self { repr: Repr::Sparse { k, c }, comps: components.len() };
        }
        let r = components.iter().map(|f| f.box_radius()).max().unwrap().max(1);
        let n = friendly_size((2 * OVERSAMPLE * r).max(grid.n()));
        let big = Grid::new(n).unwrap();
        let data = components.iter().map(|f| f.resample(big).to_physical()).collect();
        Self { repr: Repr::Lagrange { n, data }, comps: components.len() }
    }

    pub fn components(&self) -> usize {
        self.comps
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Sparse { .. })
    }

    /// `(1-θ)a + θb`; both must come from fields on the same grid and band.
    pub fn blend(a: &Self, b: &Self, theta: f64) -> Self {
        assert_eq!(a.comps, b.comps);
        match (&a.repr, &b.repr) {
            (Repr::Lagrange { n, data: da }, Repr::Lagrange { n: m, data: db }) if n == m => {
                let data = da
                    .iter()
                    .zip(db)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (1.0 - theta) * p + theta * q).collect())
                    .collect();
                Self { repr: Repr::Lagrange { n: *n, data }, comps: a.comps }
            }
            (Repr::Sparse { k: ka, c: ca }, Repr::Sparse { k: kb, c: cb }) => {
                let mut k = ka.clone();
                k.extend_from_slice(kb);
                let c = ca
                    .iter()
                    .zip(cb)
                    .map(|(x, y)| x.iter().map(|v| v * (1.0 - theta)).chain(y.iter().map(|v| v * theta)).collect())
                    .collect();
                Self { repr: Repr::Sparse { k, c }, comps: a.comps }
            }
            _ => panic!("cannot blend evaluators of different layouts"),
        }
    }

    /// Values at `points`, component-major.
    pub fn eval(&self, points: &[[f64; 2]]) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; points.len()]; self.comps];
        match &self.repr {
            Repr::Sparse { k, c } => {
                for (p, x) in points.iter().enumerate() {
                    for (m, kk) in k.iter().enumerate() {
                        let ph = kk[0] * x[0] + kk[1] * x[1];
                        let (s, co) = ph.sin_cos();
                        for (comp, o) in c.iter().zip(out.iter_mut()) {
                            let z = comp[m];
                            o[p] += z.re * co - z.im * s;
                        }
                    }
                }
            }
            Repr::Lagrange { n, data } => {
                let n = *n;
                let h = 2.0 * PI / n as f64;
                let bw = bary_weights();
                for (p, x) in points.iter().enumerate() {
                    let (wa, sa) = stencil(x[0], h, n, &bw);
                    let (wb, sb) = stencil(x[1], h, n, &bw);
                    let cols: [usize; STENCIL] = std::array::from_fn(|m| (sb + m) % n);
                    for (d, o) in data.iter().zip(out.iter_mut()) {
                        let mut acc = 0.0;
                        for (ia, wra) in wa.iter().enumerate() {
                            let row = &d[((sa + ia) % n) * n..];
                            let mut r = 0.0;
                            for (ib, wrb) in wb.iter().enumerate() {
                                r += wrb * row[cols[ib]];
                            }
                            acc += wra * r;
                        }
                        o[p] = acc;
                    }
                }
            }
        }
        out
    }
}
