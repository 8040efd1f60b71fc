use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgci_engine::{weak_form_residual, TestFunction};
use sqgci_operators::{lambda, riesz_perp};
use sqgci_solver::*;
use sqgci_spectral::random::{random_div_free, random_scalar};
use sqgci_spectral::{Grid, VectorField};

/// Potential velocity `v = Λ^{-1}R⊥θ`.
fn potential(theta: &sqgci_spectral::ScalarField) -> VectorField {
    riesz_perp(&lambda(theta, -1.0))
}

#[test]
fn solver_trajectory_is_a_weak_solution() {
    let g = Grid::new(32).unwrap();
    // room for the commutator products of the full-box solution
    let fine = Grid::new(72).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let th = random_scalar(g, 4.0, &mut rng).remove_mean();
    let th = th.scale(1.0 / th.max_coeff());
    for gamma in [0.0, 0.5] {
        let s = Solver::new(SolverConfig::new(g, 0.0025, gamma, 0.5)).unwrap();
        let mut samples = Vec::new();
        s.run(&th, 1, |t, f| {
            samples.push((t, potential(f).resample(fine)));
            Ok(())
        })
        .unwrap();
        for _ in 0..5 {
            let phi0 = random_div_free(fine, 5.0, &mut rng);
            let scale = phi0.l2_norm() * samples[0].1.l2_norm();
            let phi = TestFunction { phi0, window: (0.1, 0.4) };
            let r = weak_form_residual(&samples, &phi, gamma).unwrap();
            println!("gamma {gamma}: weak-form residual {:.2e} (relative {:.2e})", r, r / scale);
            assert!(r.abs() <= 1e-8 * scale);
        }
    }
}
