//! Cached 2-D complex FFTs with the [-π, π) phase convention folded in.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::C64;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(data: &mut [C64], n: usize) {
    for a in 0..n {
        for b in (a + 1)..n {
            data.swap(a * n + b, b * n + a);
        }
    }
}

fn run2d(data: &mut [C64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
}

/// Flip signs by `(-1)^(a+b)`: moving the grid origin from 0 to -π.
fn checkerboard(data: &mut [C64], n: usize) {
    for a in 0..n {
        let row = &mut data[a * n..(a + 1) * n];
        let start = a % 2;
        for v in row.iter_mut().skip(1 - start).step_by(2) {
            *v = -*v;
        }
    }
}

/// Samples to coefficients, normalized so that the zero mode is the mean.
pub fn forward(data: &mut [C64], n: usize) {
    assert_eq!(data.len(), n * n);
    let p = plans(n);
    run2d(data, n, &p.forward);
    checkerboard(data, n);
    let s = 1.0 / (n * n) as f64;
    for v in data.iter_mut() {
        *v *= s;
    }
}

/// Coefficients to samples.
pub fn inverse(data: &mut [C64], n: usize) {
    assert_eq!(data.len(), n * n);
    let p = plans(n);
    checkerboard(data, n);
    run2d(data, n, &p.inverse);
}
