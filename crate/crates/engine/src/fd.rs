//! Finite-difference weights for first derivatives.

/// Weights `c_i` with `f'(0) ≈ Σ c_i f(x_i)` (unit spacing), by Fornberg's recursion.
pub fn first_derivative_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 2);
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0];
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Central,
    Forward,
    Backward,
}

/// Largest offset (in steps) any stencil may touch.
pub const REACH: i32 = 8;

/// Offsets and weights of an `order`-accurate stencil with step multiple `stride`.
/// The weights already include the `1/stride`, so divide by `ε` only.
pub fn stencil(order: usize, side: Side, stride: i32) -> Vec<(i32, f64)> {
    let offsets: Vec<i32> = match side {
        Side::Central => {
            let h = (order / 2) as i32;
            (-h..=h).filter(|&m| m != 0).collect()
        }
        Side::Forward => (0..=order as i32).collect(),
        Side::Backward => (0..=order as i32).map(|m| -m).collect(),
    };
    let x: Vec<f64> = offsets.iter().map(|&m| m as f64).collect();
    let w = first_derivative_weights(&x);
    offsets.into_iter().zip(w).map(|(m, c)| (m * stride, c / stride as f64)).filter(|(_, c)| *c != 0.0).collect()
}

/// Picks a stencil side keeping `[t - REACH·ε, t + REACH·ε]` clear of kinks at
/// multiples of `spacing`. `None` means the sampled function is smooth.
pub fn choose_side(t: f64, eps: f64, spacing: Option<f64>) -> Side {
    let Some(h) = spacing else { return Side::Central };
    debug_assert!(h > 2.0 * REACH as f64 * eps);
    let d = t - (t / h).round() * h;
    if d.abs() > REACH as f64 * eps * (1.0 + 1e-9) {
        Side::Central
    } else if d >= -1e-12 * h {
        // kink at or just behind `t`
        Side::Forward
    } else {
        Side::Backward
    }
}

/// `Σ|c_i|` of a stencil.
pub fn weight_sum(st: &[(i32, f64)]) -> f64 {
    st.iter().map(|(_, c)| c.abs()).sum()
}
