mod common;

use sqgci_engine::diagnostics::outside_fraction;
use sqgci_engine::*;
use sqgci_operators::inverse_divergence;
use sqgci_spectral::norms::c0;
use sqgci_spectral::VectorField;
use sqgci_waves::{DirectionSet, IDENTITY};

#[test]
fn amplitudes_are_identity_values_from_zero_base() {
    let s = common::scheme(0, 128);
    let t = 0.95084;
    let w = s.waves(1, t, 0).unwrap();
    assert!(!w.packets.is_empty());
    for p in &w.packets {
        let g0 = DirectionSet::get(p.set).gamma_squared_unchecked(&IDENTITY);
        for k in 0..3 {
            for &a in &p.amps[k] {
                assert!((a * a - p.rho * g0[k]).abs() < 1e-14);
            }
        }
        assert_eq!(p.set, if p.j.rem_euclid(2) == 1 { 1 } else { 2 });
    }
}

#[test]
fn transport_stress_matches_cutoff_derivative() {
    let s = common::scheme(0, 128);
    let part = s.partition(1);
    for t in [0.90222, 0.94598, 0.95084] {
        let b = s.stress(1, t).unwrap();
        let w = s.waves(1, t, 0).unwrap();
        let mut dw = VectorField::zeros(s.grid(1));
        for p in &w.packets {
            let cd = part.chi_dot(p.j, t);
            for m in &p.modes {
                dw.axpy(cd, m);
                dw.axpy(cd, &m.map(|f| f.conj()));
            }
        }
        let exact = inverse_divergence(&dw);
        let err = c0(&(&b.transport - &exact)) / c0(&exact);
        println!("t = {t}: R_T against closed-form cutoff derivative {err:.2e}");
        assert!(err <= 1e-8);
    }
}

#[test]
fn principal_part_cancels() {
    let s = common::scheme(0, 128);
    for t in common::sweep(&s, 8) {
        let b = s.stress(1, t).unwrap();
        let d = &b.diagnostics;
        if d.rho_max > 0.0 {
            assert!(d.o1_max <= 1e-9 * s.lambda(1) * d.rho_max, "{t}: {}", d.o1_max);
        }
        assert!(d.nash_route_gap <= 1e-12);
        assert_eq!(d.saturation.saturated, 0);
    }
}

#[test]
fn wave_energy_is_exact() {
    let s = common::scheme(0, 128);
    for t in common::sweep(&s, 6) {
        let e = s.energy(1, t).unwrap();
        let want = s.predicted_wave_energy(1, t).unwrap();
        assert!((e - want).abs() <= 1e-12 * want.max(1.0), "{t}: {e} {want}");
        assert!(s.hamiltonian_ledger(1, t).unwrap() <= 1e-12);
    }
}

#[test]
fn frequency_supports() {
    let s = common::scheme(0, 128);
    let lam = s.lambda(1);
    for t in [0.90384, 0.95084] {
        let w = s.waves(1, t, 0).unwrap();
        assert!(outside_fraction(&w.w, lam / 2.0, 2.0 * lam) <= 1e-12);
        assert!(outside_fraction(&s.v(1, t).unwrap(), 0.0, 2.0 * lam) <= 1e-12);
        let b = s.stress(1, t).unwrap();
        assert!(outside_fraction(&b.total, 0.0, 4.0 * lam) <= 1e-12);
        for (name, f) in b.pieces() {
            assert!(outside_fraction(f, 0.0, 4.0 * lam) <= 1e-12, "{name}");
        }
    }
}

#[test]
fn residual_within_budget() {
    let s = common::scheme(0, 128);
    let mut sup_div = 0.0f64;
    let mut sup_budget = 0.0f64;
    for t in common::sweep(&s, 12) {
        let r = s.residual(1, t).unwrap();
        assert!(r.within_budget(), "{r:?}");
        sup_div = sup_div.max(r.div_stress);
        sup_budget = sup_budget.max(r.budget.total());
    }
    println!("sup budget / sup |div R| = {:.2e}", sup_budget / sup_div);
    assert!(sup_budget <= 1e-4 * sup_div);
}

#[test]
fn zero_gap_gives_zero_waves() {
    let s = common::scheme(0, 128);
    // H(0.33) = 3 is below half the next stress scale, so every ρ_j vanishes.
    let d = s.zero_stress_defect(1, 0.33).unwrap().expect("all cutoffs idle");
    assert_eq!(d, 0.0);
    assert_eq!(s.residual(1, 0.33).unwrap().residual, 0.0);
    assert_eq!(s.residual(0, 0.7).unwrap().residual, 0.0);
}

#[test]
fn dissipation_piece() {
    let s = common::scheme(0, 128);
    let t = 0.95084;
    assert_eq!(c0(&s.stress(1, t).unwrap().dissipation), 0.0);
    let sd = Scheme::new(common::config(0, 128, 0.5)).unwrap();
    let b = sd.stress(1, t).unwrap();
    assert!(c0(&b.dissipation) > 0.0);
    let r = sd.residual(1, t).unwrap();
    assert!(r.within_budget(), "{r:?}");
}

#[test]
fn resolution_is_checked() {
    assert!(matches!(Scheme::new(common::config(1, 64, 0.0)), Err(EngineError::Resolution(_))));
    assert!(matches!(Scheme::new(common::config(0, 63, 0.0)), Err(EngineError::Config(_))));
}
