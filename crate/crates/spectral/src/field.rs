use std::ops::{Add, Mul, Neg, Sub};

use once_cell::sync::OnceCell;

use crate::{fft, Grid, SpectralError, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Scalar field held by its Fourier coefficients on a [`Grid`].
///
/// Complex-valued fields are allowed; `to_physical` returns the real part.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    coeffs: Vec<C64>,
    radius: OnceCell<usize>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.coeffs == other.coeffs
    }
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::from_coeffs(grid, vec![ZERO; grid.len()])
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient count");
        Self { grid, coeffs, radius: OnceCell::new() }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = C64::new(c, 0.0);
        f
    }

    /// Single mode `amp · e^{ik·x}`.
    pub fn mode(grid: Grid, k: (i64, i64), amp: C64) -> Self {
        let mut f = Self::zeros(grid);
        let idx = grid.flat(k.0, k.1).expect("mode outside grid band");
        f.coeffs[idx] = amp;
        f
    }

    pub fn from_physical(grid: Grid, samples: &[f64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.len() {
            return Err(SpectralError::SampleCount { expected: grid.len(), got: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite(i));
        }
        let mut data: Vec<C64> = samples.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft::forward(&mut data, grid.n());
        Ok(Self::from_coeffs(grid, data))
    }

    pub fn from_complex_physical(grid: Grid, samples: Vec<C64>) -> Result<Self, SpectralError> {
        if samples.len() != grid.len() {
            return Err(SpectralError::SampleCount { expected: grid.len(), got: samples.len() });
        }
        if let Some(i) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(SpectralError::NonFinite(i));
        }
        let mut data = samples;
        fft::forward(&mut data, grid.n());
        Ok(Self::from_coeffs(grid, data))
    }

    /// Samples a closure `f(x1, x2)` on the grid.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let s: Vec<f64> = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                f(p[0], p[1])
            })
            .collect();
        Self::from_physical(grid, &s).expect("closure produced non-finite sample")
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> C64 {
        self.grid.flat(k1, k2).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn to_complex_physical(&self) -> Vec<C64> {
        let mut data = self.coeffs.clone();
        fft::inverse(&mut data, self.n());
        data
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.to_complex_physical().into_iter().map(|v| v.re).collect()
    }

    /// Largest `max(|k1|, |k2|)` over nonzero coefficients; Nyquist counts as `n/2`.
    pub fn box_radius(&self) -> usize {
        *self.radius.get_or_init(|| {
            let g = self.grid;
            let mut r = 0usize;
            for (i, c) in self.coeffs.iter().enumerate() {
                if c.re != 0.0 || c.im != 0.0 {
                    let (k1, k2) = g.wavevector(i);
                    r = r.max(k1.unsigned_abs() as usize).max(k2.unsigned_abs() as usize);
                }
            }
            r
        })
    }

    /// Largest `|k|` over coefficients above `rel · max|c|`.
    pub fn support_radius(&self, rel: f64) -> f64 {
        let cut = rel * self.max_coeff();
        let mut r: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > cut {
                let (k1, k2) = self.grid.wavevector(i);
                r = r.max(((k1 * k1 + k2 * k2) as f64).sqrt());
            }
        }
        r
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// Applies a Fourier symbol; Nyquist modes are always set to zero.
    pub fn apply_symbol(&self, symbol: impl Fn(i64, i64) -> C64) -> Self {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if g.flat_has_nyquist(i) || c == ZERO {
                    ZERO
                } else {
                    let (k1, k2) = g.wavevector(i);
                    c * symbol(k1, k2)
                }
            })
            .collect();
        Self::from_coeffs(g, coeffs)
    }

    /// Same as [`apply_symbol`](Self::apply_symbol) with a real symbol.
    pub fn apply_real_symbol(&self, symbol: impl Fn(i64, i64) -> f64) -> Self {
        self.apply_symbol(|a, b| C64::new(symbol(a, b), 0.0))
    }

    pub fn remove_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = ZERO;
        out.radius = OnceCell::new();
        out
    }

    pub fn conj(&self) -> Self {
        let g = self.grid;
        let n = g.n();
        let mut out = vec![ZERO; g.len()];
        for a in 0..n {
            for b in 0..n {
                let ra = (n - a) % n;
                let rb = (n - b) % n;
                out[ra * n + rb] = self.coeffs[a * n + b].conj();
            }
        }
        Self::from_coeffs(g, out)
    }

    /// Real part in physical space, `(f + conj f)/2`.
    pub fn real_part(&self) -> Self {
        (self + &self.conj()).scale(0.5)
    }

    /// Max deviation from Hermitian symmetry, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let c = self.conj();
        let m = self.max_coeff();
        if m == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().zip(&c.coeffs).fold(0.0f64, |d, (a, b)| d.max((a - b).norm())) / m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coeffs(self.grid, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self::from_coeffs(self.grid, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        assert_eq!(self.grid, x.grid, "grid mismatch");
        for (y, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += v * a;
        }
        self.radius = OnceCell::new();
    }

    /// Zero-pads or truncates to another grid. Modes that do not fit are dropped,
    /// as are the Nyquist modes of the source.
    pub fn resample(&self, to: Grid) -> Self {
        if to == self.grid {
            return self.clone();
        }
        let mut out = vec![ZERO; to.len()];
        let g = self.grid;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO || g.flat_has_nyquist(i) {
                continue;
            }
            let (k1, k2) = g.wavevector(i);
            if let Some(j) = to.flat(k1, k2) {
                out[j] = c;
            }
        }
        Self::from_coeffs(to, out)
    }

    /// Zeroes every mode with `max(|k1|,|k2|) > r`.
    pub fn truncate_box(&self, r: usize) -> Self {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (k1, k2) = g.wavevector(i);
                if k1.unsigned_abs() as usize > r || k2.unsigned_abs() as usize > r || g.flat_has_nyquist(i) {
                    ZERO
                } else {
                    c
                }
            })
            .collect();
        Self::from_coeffs(g, coeffs)
    }

    /// `∫ f conj(g)` over the torus, by Plancherel.
    pub fn inner(&self, other: &ScalarField) -> C64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let s: C64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        s * (4.0 * std::f64::consts::PI * std::f64::consts::PI)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_coeffs(self.grid, self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_coeffs(self.grid, self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, s: f64) -> ScalarField {
        self.scale(s)
    }
}

/// Two-component vector field on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub c: [ScalarField; 2],
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Self {
        assert_eq!(c1.grid(), c2.grid(), "grid mismatch");
        Self { c: [c1, c2] }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn grid(&self) -> Grid {
        self.c[0].grid()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.c[0]), f(&self.c[1]))
    }

    pub fn zip(&self, o: &VectorField, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.c[0], &o.c[0]), f(&self.c[1], &o.c[1]))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn resample(&self, to: Grid) -> Self {
        self.map(|c| c.resample(to))
    }

    pub fn real_part(&self) -> Self {
        self.map(ScalarField::real_part)
    }

    /// Rotation `a⊥ = (-a2, a1)`.
    pub fn perp(&self) -> Self {
        Self::new(-&self.c[1], self.c[0].clone())
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        self.c[0].axpy(a, &x.c[0]);
        self.c[1].axpy(a, &x.c[1]);
    }

    pub fn inner(&self, o: &VectorField) -> C64 {
        self.c[0].inner(&o.c[0]) + self.c[1].inner(&o.c[1])
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn max_coeff(&self) -> f64 {
        self.c[0].max_coeff().max(self.c[1].max_coeff())
    }

    pub fn max_abs_diff(&self, o: &VectorField) -> f64 {
        self.c[0].max_abs_diff(&o.c[0]).max(self.c[1].max_abs_diff(&o.c[1]))
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        self.zip(rhs, |a, b| a - b)
    }
}

/// Symmetric trace-free 2×2 field, stored as `(m11, m12)`; `m22 = -m11`, `m21 = m12`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrixField {
    pub m11: ScalarField,
    pub m12: ScalarField,
}

impl SymMatrixField {
    pub fn new(m11: ScalarField, m12: ScalarField) -> Self {
        assert_eq!(m11.grid(), m12.grid(), "grid mismatch");
        Self { m11, m12 }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn grid(&self) -> Grid {
        self.m11.grid()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.m11), f(&self.m12))
    }

    pub fn zip(&self, o: &SymMatrixField, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        Self::new(f(&self.m11, &o.m11), f(&self.m12, &o.m12))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn resample(&self, to: Grid) -> Self {
        self.map(|c| c.resample(to))
    }

    pub fn axpy(&mut self, a: f64, x: &SymMatrixField) {
        self.m11.axpy(a, &x.m11);
        self.m12.axpy(a, &x.m12);
    }

    pub fn to_full(&self) -> MatrixField {
        MatrixField { c: [[self.m11.clone(), self.m12.clone()], [self.m12.clone(), -&self.m11]] }
    }

    pub fn max_abs_diff(&self, o: &SymMatrixField) -> f64 {
        self.m11.max_abs_diff(&o.m11).max(self.m12.max_abs_diff(&o.m12))
    }
}

impl Add for &SymMatrixField {
    type Output = SymMatrixField;
    fn add(self, rhs: &SymMatrixField) -> SymMatrixField {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &SymMatrixField {
    type Output = SymMatrixField;
    fn sub(self, rhs: &SymMatrixField) -> SymMatrixField {
        self.zip(rhs, |a, b| a - b)
    }
}

/// General 2×2 matrix field, `c[i][j]` is entry `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    pub c: [[ScalarField; 2]; 2],
}

impl MatrixField {
    pub fn zeros(grid: Grid) -> Self {
        let z = ScalarField::zeros(grid);
        Self { c: [[z.clone(), z.clone()], [z.clone(), z]] }
    }

    pub fn grid(&self) -> Grid {
        self.c[0][0].grid()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self { c: [[f(&self.c[0][0]), f(&self.c[0][1])], [f(&self.c[1][0]), f(&self.c[1][1])]] }
    }

    pub fn zip(&self, o: &MatrixField, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        Self {
            c: [
                [f(&self.c[0][0], &o.c[0][0]), f(&self.c[0][1], &o.c[0][1])],
                [f(&self.c[1][0], &o.c[1][0]), f(&self.c[1][1], &o.c[1][1])],
            ],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn trace(&self) -> ScalarField {
        &self.c[0][0] + &self.c[1][1]
    }

    /// Symmetric trace-free part.
    pub fn sym_traceless(&self) -> SymMatrixField {
        SymMatrixField::new(
            (&self.c[0][0] - &self.c[1][1]).scale(0.5),
            (&self.c[0][1] + &self.c[1][0]).scale(0.5),
        )
    }

    /// Scalar `α` with antisymmetric part `[[0, α], [-α, 0]]`.
    pub fn antisymmetric_part(&self) -> ScalarField {
        (&self.c[0][1] - &self.c[1][0]).scale(0.5)
    }

    pub fn max_abs_diff(&self, o: &MatrixField) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max(self.c[i][j].max_abs_diff(&o.c[i][j]));
            }
        }
        m
    }
}

impl Add for &MatrixField {
    type Output = MatrixField;
    fn add(self, rhs: &MatrixField) -> MatrixField {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &MatrixField {
    type Output = MatrixField;
    fn sub(self, rhs: &MatrixField) -> MatrixField {
        self.zip(rhs, |a, b| a - b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_zero_mode() {
        let g = Grid::new(16).unwrap();
        let f = ScalarField::from_physical(g, &vec![1.0; g.len()]).unwrap();
        assert!((f.coeff(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_has_half_coefficients() {
        let g = Grid::new(32).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (3.0 * x).cos());
        for (i, c) in f.coeffs().iter().enumerate() {
            let (k1, k2) = g.wavevector(i);
            let expect = if k1.abs() == 3 && k2 == 0 { 0.5 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-15);
        }
        assert_eq!(f.truncate_box(3).box_radius(), 3);
    }

    #[test]
    fn rejects_bad_samples() {
        let g = Grid::new(16).unwrap();
        assert!(ScalarField::from_physical(g, &[0.0; 3]).is_err());
        let mut s = vec![0.0; g.len()];
        s[7] = f64::NAN;
        assert!(matches!(ScalarField::from_physical(g, &s), Err(SpectralError::NonFinite(7))));
    }

    #[test]
    fn conj_of_real_field_is_itself() {
        let g = Grid::new(16).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x + 2.0 * y).sin() + x.cos());
        assert!(f.hermitian_defect() < 1e-15);
    }

    #[test]
    fn resample_keeps_low_modes() {
        let g = Grid::new(16).unwrap();
        let h = Grid::new(40).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x - 3.0 * y).sin());
        let back = f.resample(h).resample(g);
        assert!(back.max_abs_diff(&f) < 1e-15);
    }
}
