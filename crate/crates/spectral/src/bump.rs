//! Smooth cutoffs built from `e^{-1/t}`.

/// `e^{-1/t}` for `t > 0`, zero otherwise.
fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

/// Radial plateau: 1 on `[0, r_in]`, 0 on `[r_out, ∞)`.
pub fn plateau(r: f64, r_in: f64, r_out: f64) -> f64 {
    1.0 - smooth_step((r - r_in) / (r_out - r_in))
}

/// 1 on `[a1, b1]`, 0 outside `(a0, b0)`.
pub fn band(r: f64, a0: f64, a1: f64, b1: f64, b0: f64) -> f64 {
    smooth_step((r - a0) / (a1 - a0)) * (1.0 - smooth_step((r - b1) / (b0 - b1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_symmetric() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.3), 1.0);
    }

    #[test]
    fn plateau_and_band_limits() {
        assert_eq!(plateau(0.05, 1.0 / 16.0, 0.125), 1.0);
        assert_eq!(plateau(0.125, 1.0 / 16.0, 0.125), 0.0);
        assert_eq!(band(1.0, 0.25, 0.375, 3.0, 4.0), 1.0);
        assert_eq!(band(0.2, 0.25, 0.375, 3.0, 4.0), 0.0);
        assert_eq!(band(4.0, 0.25, 0.375, 3.0, 4.0), 0.0);
    }
}
