use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgci_solver::*;
use sqgci_spectral::random::random_scalar;
use sqgci_spectral::{Grid, ScalarField, C64};

fn smooth(grid: Grid, seed: u64, radius: f64, amp: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let th = random_scalar(grid, radius, &mut rng).remove_mean();
    let s = amp / th.to_physical().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    th.scale(s)
}

#[test]
fn plane_wave_is_steady_per_step() {
    let g = Grid::new(32).unwrap();
    let m = ScalarField::mode(g, (3, 4), C64::new(0.5, 0.2));
    let th = &m + &m.conj();
    let s = Solver::new(SolverConfig::new(g, 0.01, 0.0, 1.0)).unwrap();
    let mut cur = th.clone();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let next = s.step(&cur, 0.01).unwrap();
        worst = worst.max(next.max_abs_diff(&cur));
        cur = next;
    }
    println!("plane wave drift per step {worst:.2e}");
    assert!(worst <= 1e-12);
}

#[test]
fn inviscid_run_conserves() {
    let g = Grid::new(32).unwrap();
    let th = smooth(g, 5, 4.0, 1.0);
    let s = Solver::new(SolverConfig::new(g, 0.002, 0.0, 2.0)).unwrap();
    let (_, recs) = s.run(&th, 10, |_, _| Ok(())).unwrap();
    assert_eq!(recs.len(), 101);
    let r = conservation_report(&recs);
    println!("{r:?}");
    assert!(r.hamiltonian_drift <= 1e-8);
    assert!(r.l2_drift <= 1e-8);
}

#[test]
fn dissipation_decreases_hamiltonian() {
    let g = Grid::new(32).unwrap();
    let th = smooth(g, 6, 4.0, 1.0);
    let s = Solver::new(SolverConfig::new(g, 0.005, 1.0, 1.0)).unwrap();
    let (_, recs) = s.run(&th, 1, |_, _| Ok(())).unwrap();
    let r = conservation_report(&recs);
    assert!(r.hamiltonian_strictly_decreasing);
    assert!(r.l2_nonincreasing);
}

#[test]
fn zero_initial_data_stays_zero() {
    let g = Grid::new(16).unwrap();
    let s = Solver::new(SolverConfig::new(g, 0.01, 0.5, 0.1)).unwrap();
    let (th, recs) = s.run(&ScalarField::zeros(g), 1, |_, _| Ok(())).unwrap();
    assert_eq!(th.max_coeff(), 0.0);
    assert!(recs.iter().all(|r| r.hamiltonian == 0.0 && r.l2 == 0.0 && r.l4 == 0.0 && r.linf == 0.0));
}

#[test]
fn fourth_order_reversibility() {
    let g = Grid::new(32).unwrap();
    let th = smooth(g, 7, 4.0, 1.0);
    let s = Solver::new(SolverConfig::new(g, 0.01, 0.0, 1.0)).unwrap();
    let err = |dt: f64| s.step(&s.step(&th, dt).unwrap(), -dt).unwrap().max_abs_diff(&th);
    let (a, b) = (err(0.04), err(0.02));
    println!("round trip {a:.2e} -> {b:.2e}");
    assert!(a / b >= 16.0);
}

#[test]
fn integrating_factor_matches_explicit() {
    let g = Grid::new(32).unwrap();
    let th = smooth(g, 8, 3.0, 0.5);
    let mut cfg = SolverConfig::new(g, 0.001, 0.5, 0.1);
    let a = Solver::new(cfg.clone()).unwrap().run(&th, 100, |_, _| Ok(())).unwrap().0;
    cfg.integrating_factor = false;
    let b = Solver::new(cfg).unwrap().run(&th, 100, |_, _| Ok(())).unwrap().0;
    assert!(a.max_abs_diff(&b) <= 1e-10);
}

#[test]
fn nonlinear_term_antisymmetry() {
    let g = Grid::new(64).unwrap();
    for seed in 0..10 {
        let (h, l2) = antisymmetry(&smooth(g, 100 + seed, 12.0, 1.0));
        assert!(h <= 1e-11 && l2 <= 1e-11, "{h:e} {l2:e}");
    }
}

proptest! {
    #[test]
    fn mean_is_preserved(seed in 0u64..1000, dt in 1e-3f64..2e-2, gamma in 0.0f64..1.5) {
        let g = Grid::new(16).unwrap();
        let th = smooth(g, seed, 3.0, 1.0);
        let s = Solver::new(SolverConfig::new(g, dt, gamma, 1.0)).unwrap();
        let out = s.step(&th, dt).unwrap();
        prop_assert_eq!(out.coeffs()[0], th.coeffs()[0]);
    }
}
