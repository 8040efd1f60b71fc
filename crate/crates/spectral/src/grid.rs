use std::f64::consts::PI;

use crate::SpectralError;

/// Uniform `n × n` collocation grid on [-π, π)².
///
/// Sample `(a, b)` sits at `x = (-π + 2πa/n, -π + 2πb/n)` and is stored at
/// flat index `a * n + b`. Spectral index `i` maps to wavenumber `i` for
/// `i < n/2` and `i - n` otherwise, so `n/2` is the (negative) Nyquist mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 8 || n % 2 != 0 {
            return Err(SpectralError::BadGrid(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest wavenumber that is not a Nyquist mode.
    pub fn kmax(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Spectral index of wavenumber `k`, if representable without aliasing.
    #[inline]
    pub fn index(&self, k: i64) -> Option<usize> {
        let h = self.n as i64 / 2;
        if k > -h && k < h {
            Some(k.rem_euclid(self.n as i64) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn flat(&self, k1: i64, k2: i64) -> Option<usize> {
        Some(self.index(k1)? * self.n + self.index(k2)?)
    }

    /// Wavenumber pair of a flat spectral index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx / self.n), self.wavenumber(idx % self.n))
    }

    #[inline]
    pub fn flat_has_nyquist(&self, idx: usize) -> bool {
        self.is_nyquist(idx / self.n) || self.is_nyquist(idx % self.n)
    }

    pub fn coordinate(&self, a: usize) -> f64 {
        -PI + 2.0 * PI * a as f64 / self.n as f64
    }

    /// Physical point of flat sample index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        [self.coordinate(idx / self.n), self.coordinate(idx % self.n)]
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }
}

/// Smallest even 5-smooth integer `>= min`; these sizes keep the FFTs fast.
pub fn friendly_size(min: usize) -> usize {
    let mut m = min.max(8);
    loop {
        if m % 2 == 0 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}
