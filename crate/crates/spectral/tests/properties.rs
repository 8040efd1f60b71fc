use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgci_spectral::random::{random_scalar, random_scalar_annulus};
use sqgci_spectral::{dump::Dump, ops, Grid, ScalarField, SymMatrixField, C64};

fn conv_oracle(f: &ScalarField, h: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let fl: Vec<_> = f.coeffs().iter().enumerate().filter(|(_, c)| c.norm() > 0.0).collect();
    let hl: Vec<_> = h.coeffs().iter().enumerate().filter(|(_, c)| c.norm() > 0.0).collect();
    for &(i, a) in &fl {
        let (p1, p2) = grid.wavevector(i);
        for &(j, b) in &hl {
            let (q1, q2) = grid.wavevector(j);
            if let Some(t) = grid.flat(p1 + q1, p2 + q2) {
                out[t] += a * b;
            }
        }
    }
    ScalarField::from_coeffs(grid, out)
}

#[test]
fn round_trip_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = Grid::new(64).unwrap();
    for _ in 0..10 {
        let f = random_scalar(g, 30.0, &mut rng);
        let s = f.to_physical();
        let back = ScalarField::from_physical(g, &s).unwrap().to_physical();
        let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = s.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-13 * scale, "{err}");
    }
}

#[test]
fn product_inside_sixth_matches_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Grid::new(48).unwrap();
    let f = random_scalar(g, 8.0, &mut rng);
    let h = random_scalar(g, 8.0, &mut rng);
    let p = ops::product(&f, &h);
    let e = conv_oracle(&f, &h);
    assert!(p.max_abs_diff(&e) <= 1e-13 * e.max_coeff());
}

#[test]
fn plancherel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = Grid::new(32).unwrap();
    let f = random_scalar(g, 12.0, &mut rng);
    let s = f.to_physical();
    let grid_mean = s.iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
    let coeff_sum: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
    assert!((grid_mean - coeff_sum).abs() <= 1e-12 * coeff_sum);
}

#[test]
fn derivatives_keep_mean_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = Grid::new(32).unwrap();
    let f = &random_scalar(g, 10.0, &mut rng) + &ScalarField::constant(g, 2.0);
    assert_eq!(ops::derivative(&f, 0).mean(), 0.0);
    assert_eq!(ops::laplacian(&f).mean(), 0.0);
    let x2_free = ScalarField::from_fn(g, |x, _| (2.0 * x).sin());
    assert!(ops::derivative(&x2_free, 1).max_coeff() < 1e-16);
}

#[test]
fn matrix_dump_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Grid::new(16).unwrap();
    let m = SymMatrixField::new(random_scalar(g, 5.0, &mut rng), random_scalar(g, 5.0, &mut rng));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.sfld");
    Dump::matrix(&m, 1.5).save(&p).unwrap();
    let d = Dump::load(&p).unwrap();
    assert_eq!(d, Dump::matrix(&m, 1.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivative_is_linear_and_conjugate_symmetric(seed in 0u64..1000, a in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(32).unwrap();
        let f = random_scalar(g, 10.0, &mut rng);
        let h = random_scalar(g, 10.0, &mut rng);
        let mut lin = f.clone();
        lin.axpy(a, &h);
        let lhs = ops::derivative(&lin, 1);
        let mut rhs = ops::derivative(&f, 1);
        rhs.axpy(a, &ops::derivative(&h, 1));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        prop_assert!(lhs.hermitian_defect() < 1e-15);
    }

    #[test]
    fn product_matches_oracle(seed in 0u64..1000, r1 in 1.0f64..8.0, r2 in 1.0f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(32).unwrap();
        let f = random_scalar_annulus(g, 0.5, r1, &mut rng);
        let h = random_scalar_annulus(g, 0.5, r2, &mut rng);
        let e = conv_oracle(&f, &h);
        prop_assert!(ops::product(&f, &h).max_abs_diff(&e) <= 1e-13 * e.max_coeff().max(1e-300));
    }
}
