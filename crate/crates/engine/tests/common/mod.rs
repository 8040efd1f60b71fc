#![allow(dead_code)]

use sqgci_engine::{EngineConfig, Profile, ProfileKind, Scheme};
use sqgci_transport::SchemeParams;

pub fn params(gamma: f64) -> SchemeParams {
    SchemeParams::new(5.0, 0.6, gamma).unwrap()
}

pub fn config(q_max: usize, n: usize, gamma: f64) -> EngineConfig {
    EngineConfig::new(params(gamma), q_max, n, Profile::new(ProfileKind::Cos2, 0.0, 2.0, 12.0))
}

pub fn scheme(q_max: usize, n: usize) -> Scheme {
    Scheme::new(config(q_max, n, 0.0)).unwrap()
}

/// Times sweeping one level-1 cutoff period near the peak of the profile.
pub fn sweep(s: &Scheme, count: usize) -> Vec<f64> {
    let tau = s.tau(1);
    (0..count).map(|i| 0.9 + tau * (i as f64 + 0.37) / count as f64).collect()
}
