use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgci_pseudo::*;
use sqgci_spectral::{ops, Grid, ScalarField, VectorField, C64};

const K: [f64; 2] = [0.6, 0.8];

/// `ϑ_{±k}` for `w̃_k = a ik⊥ e^{iλk·x}` and its conjugate.
fn thetas(a: &ScalarField, lambda: f64) -> (ScalarField, ScalarField) {
    let grid = a.grid();
    let kl = ((K[0] * lambda).round() as i64, (K[1] * lambda).round() as i64);
    let carrier = ScalarField::mode(grid, kl, C64::new(1.0, 0.0));
    let phase = ops::product(a, &carrier);
    let kp = [-K[1], K[0]];
    let w = VectorField::new(
        phase.scale_complex(C64::new(0.0, kp[0])),
        phase.scale_complex(C64::new(0.0, kp[1])),
    );
    let th = ops::perp_div(&w);
    let th = sqgci_operators::localize(&th, K, lambda).unwrap();
    let thm = th.conj();
    (th, thm)
}

fn smooth_amplitude(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
    let mut a = ScalarField::constant(grid, 1.0);
    for k in [(1, 0), (0, 1), (1, 1), (2, -1)] {
        let c = C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
        let m = ScalarField::mode(grid, k, c);
        a = &a + &(&m + &m.conj());
    }
    a
}

#[test]
fn constant_amplitude_is_all_principal() {
    let grid = Grid::new(64).unwrap();
    let lambda = 20.0;
    let a = ScalarField::constant(grid, 0.7);
    let (th, thm) = thetas(&a, lambda);
    let p = PrincipalInputs { k: K, lambda, chi_sq: 1.0, amplitude: &a };
    let q = oscillation_q(&PseudoProductPlan::default(), &th, &thm, &p).unwrap();
    let scale = q.principal.c[0][0].max_coeff();
    assert!((scale - 0.5 * lambda * 0.49 * 0.36).abs() < 1e-12);
    let rem = q.remainder.c.iter().flatten().map(|f| f.max_coeff()).fold(0.0, f64::max);
    println!("constant amplitude: remainder/principal {:.2e}", rem / scale);
    assert!(rem <= 1e-8 * scale);
}

#[test]
fn remainder_shrinks_with_frequency() {
    let mut ratios = Vec::new();
    for (lambda, n) in [(40.0, 128), (80.0, 192), (160.0, 384)] {
        let grid = Grid::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = smooth_amplitude(grid, &mut rng);
        let (th, thm) = thetas(&a, lambda);
        let p = PrincipalInputs { k: K, lambda, chi_sq: 1.0, amplitude: &a };
        let q = oscillation_q(&PseudoProductPlan::default(), &th, &thm, &p).unwrap();
        let pr = q.principal.c.iter().flatten().map(|f| f.max_coeff()).fold(0.0, f64::max);
        let rm = q.remainder.c.iter().flatten().map(|f| f.max_coeff()).fold(0.0, f64::max);
        println!("lambda {lambda}: remainder/principal {:.3e}", rm / pr);
        ratios.push(rm / pr);
    }
    for w in ratios.windows(2) {
        assert!(w[1] < 0.7 * w[0], "{ratios:?}");
    }
}

#[test]
fn zero_amplitude_gives_zero() {
    let grid = Grid::new(64).unwrap();
    let a = ScalarField::zeros(grid);
    let (th, thm) = thetas(&a, 20.0);
    let p = PrincipalInputs { k: K, lambda: 20.0, chi_sq: 0.5, amplitude: &a };
    let q = oscillation_q(&PseudoProductPlan::default(), &th, &thm, &p).unwrap();
    for f in q.principal.c.iter().chain(q.remainder.c.iter()).flatten() {
        assert_eq!(f.max_coeff(), 0.0);
    }
}

#[test]
fn unlocalized_input_rejected() {
    let grid = Grid::new(64).unwrap();
    let a = ScalarField::constant(grid, 1.0);
    let stray = ScalarField::mode(grid, (3, 1), C64::new(1.0, 0.0));
    let p = PrincipalInputs { k: K, lambda: 20.0, chi_sq: 1.0, amplitude: &a };
    assert!(matches!(
        oscillation_q(&PseudoProductPlan::default(), &stray, &stray.conj(), &p),
        Err(PseudoError::NotLocalized { .. })
    ));
}

#[test]
fn m_star_support_on_sample_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20_000 {
        let x1 = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let x2 = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let r = rng.gen_range(0.0..1.0);
        let m = m_star(K, r, x1, x2);
        let inside = f64::hypot(x1[0], x1[1]) < 0.125 && f64::hypot(x2[0], x2[1]) < 0.125;
        if !inside {
            assert_eq!(m, [[0.0; 2]; 2]);
        } else {
            assert!(m.iter().flatten().all(|x| x.is_finite()));
        }
    }
}
