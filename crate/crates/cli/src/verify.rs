//! `verify`: the property suites of every module, seeded from the config.
//!
//! Each check is named `suite.property`; the same name is the key of a
//! `--tol` override.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgci_engine::{weak_form_residual, TestFunction};
use sqgci_operators::{inverse_divergence, lambda, lambda_vec, leray, riesz};
use sqgci_pseudo::{nonlinear_t, t_decomposition, PseudoProductPlan, SymbolQuadrature};
use sqgci_solver::{antisymmetry, conservation_report, Solver, SolverConfig};
use sqgci_spectral::norms::c_norm;
use sqgci_spectral::ops::{advect, grad_transpose_apply, matrix_div, perp_div, perp_grad, product, scale_by};
use sqgci_spectral::random::{random_div_free, random_scalar, random_scalar_annulus, random_vector};
use sqgci_spectral::{Grid, ScalarField, VectorField, C64};
use sqgci_transport::{solve_flow_map, FieldEvaluator, TimePartition, VelocityHistory};
use sqgci_waves::{beltrami_identity_check, beltrami_pair, estimate_epsilon_gamma, mat_norm, DirectionSet, Mat2, IDENTITY};

use crate::config::RunConfig;
use crate::summary::{Body, Check, Summary};
use crate::CliError;

pub type SuiteFn = fn(&RunConfig) -> Vec<Check>;

pub const SUITES: [(&str, SuiteFn); 6] = [
    ("spectral", spectral),
    ("operators", operators),
    ("waves", waves),
    ("pseudo", pseudo),
    ("transport", transport),
    ("solver", solver),
];

fn rng(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.run.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn at_most(cfg: &RunConfig, name: &str, value: f64, default: f64) -> Check {
    Check::at_most(name, value, cfg.tol(name, default))
}

fn at_least(cfg: &RunConfig, name: &str, value: f64, default: f64) -> Check {
    Check::at_least(name, value, cfg.tol(name, default))
}

fn rel(a: f64, scale: f64) -> f64 {
    a / scale.max(1e-300)
}

pub fn spectral(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 1);
    let g = Grid::new(64).unwrap();
    let (mut plancherel, mut herm) = (0.0f64, 0.0f64);
    for _ in 0..cfg.run.verify_count {
        let f = random_scalar(g, 20.0, &mut r);
        let x = f.to_physical();
        let mean = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let sum: f64 = f.coeffs().iter().map(|z| z.norm_sqr()).sum();
        plancherel = plancherel.max(rel((mean - sum).abs(), sum));
        herm = herm.max(lambda(&f, 0.7).hermitian_defect()).max(riesz(&f).c[1].hermitian_defect());
    }
    // product of fields of radius 6 against a direct convolution of coefficients
    let g = Grid::new(32).unwrap();
    let mut conv = 0.0f64;
    for _ in 0..(cfg.run.verify_count / 10).max(1) {
        let f = random_scalar(g, 6.0, &mut r);
        let h = random_scalar(g, 6.0, &mut r);
        let mut want: HashMap<(i64, i64), C64> = HashMap::new();
        for (i, a) in f.coeffs().iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            let ka = g.wavevector(i);
            for (j, b) in h.coeffs().iter().enumerate() {
                if b.norm() == 0.0 {
                    continue;
                }
                let kb = g.wavevector(j);
                *want.entry((ka.0 + kb.0, ka.1 + kb.1)).or_default() += a * b;
            }
        }
        let p = product(&f, &h);
        let scale = want.values().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, z) in p.coeffs().iter().enumerate() {
            let w = want.get(&g.wavevector(i)).copied().unwrap_or_default();
            conv = conv.max(rel((z - w).norm(), scale));
        }
    }
    vec![
        at_most(cfg, "spectral.plancherel", plancherel, 1e-12),
        at_most(cfg, "spectral.conjugate_symmetry", herm, 1e-14),
        at_most(cfg, "spectral.product_convolution", conv, 1e-13),
    ]
}

fn beltrami_field(set: u8, lam: f64, g: Grid, r: &mut ChaCha8Rng) -> VectorField {
    let mut w = VectorField::zeros(g);
    for k in DirectionSet::get(set).plus {
        let a = C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let (b, _) = beltrami_pair(k, lam, g).unwrap();
        let part = b.map(|f| f.scale_complex(a));
        w.axpy(1.0, &part);
        w.axpy(1.0, &part.map(|f| f.conj()));
    }
    w
}

/// Λ-composition, Leray idempotence, div∘B, the Beltrami eigenrelation and
/// the magic identity on random fields at `n = 64`.
pub fn operators(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 2);
    let g = Grid::new(64).unwrap();
    let mut worst = [0.0f64; 5];
    for i in 0..cfg.run.verify_count {
        let f = random_scalar(g, 20.0, &mut r);
        let (a, b) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let want = lambda(&f, a + b);
        worst[0] = worst[0].max(rel(lambda(&lambda(&f, a), b).max_abs_diff(&want), want.max_coeff()));

        let p = leray(&random_vector(g, 20.0, &mut r));
        worst[1] = worst[1].max(rel(leray(&p).max_abs_diff(&p), p.max_coeff()));

        let d = random_div_free(g, 20.0, &mut r);
        let back = matrix_div(&inverse_divergence(&d).to_full());
        worst[2] = worst[2].max(rel(back.max_abs_diff(&d), d.max_coeff()));

        let lam = 5.0 * (1 + i % 4) as f64;
        let w = beltrami_field(1 + (i % 2) as u8, lam, g, &mut r);
        let lw = lambda_vec(&w, 1.0);
        worst[3] = worst[3].max(rel(lw.max_abs_diff(&w.scale(lam)), lam * w.max_coeff()));

        let f = random_div_free(g, 10.0, &mut r);
        let h = random_vector(g, 10.0, &mut r);
        let lf = lambda_vec(&f, 1.0);
        let lhs = &advect(&lf, &h) - &grad_transpose_apply(&h, &lf);
        let rhs = scale_by(&perp_div(&h), &riesz(&perp_div(&f)));
        worst[4] = worst[4].max(rel(lhs.max_abs_diff(&rhs), rhs.max_coeff()));
    }
    let names = ["lambda_composition", "leray_idempotence", "div_inverse_divergence", "beltrami_eigenrelation", "magic_identity"];
    names.iter().zip(worst).map(|(n, v)| at_most(cfg, &format!("operators.{n}"), v, 1e-11)).collect()
}

fn random_unit_sym(r: &mut ChaCha8Rng) -> Mat2 {
    let (a, b, c): (f64, f64, f64) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let n = mat_norm(&[[a, b], [b, c]]);
    [[a / n, b / n], [b / n, c / n]]
}

/// γ²(Id), reconstruction inside the ε_γ ball, ε_γ itself and the Beltrami
/// identities.
pub fn waves(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 3);
    let want = [7.0 / 16.0, 25.0 / 32.0, 25.0 / 32.0];
    let mut id = 0.0f64;
    for j in [1, 2] {
        let g = DirectionSet::get(j).gamma_squared(&IDENTITY).unwrap();
        for i in 0..3 {
            id = id.max((g[i] - want[i]).abs());
        }
    }
    let eps = estimate_epsilon_gamma();
    let mut recon = 0.0f64;
    for _ in 0..10 * cfg.run.verify_count {
        let e = random_unit_sym(&mut r);
        let s = eps * r.gen::<f64>();
        let m = [[1.0 + s * e[0][0], s * e[0][1]], [s * e[1][0], 1.0 + s * e[1][1]]];
        for j in [1, 2] {
            let set = DirectionSet::get(j);
            let back = match set.gamma_squared(&m) {
                Ok(g) => set.reconstruct(&g),
                Err(_) => {
                    recon = f64::INFINITY;
                    continue;
                }
            };
            let d = [[back[0][0] - m[0][0], back[0][1] - m[0][1]], [back[1][0] - m[1][0], back[1][1] - m[1][1]]];
            recon = recon.max(mat_norm(&d));
        }
    }
    let (mut div, mut zero) = (0.0f64, 0.0f64);
    let g = Grid::new(32).unwrap();
    for i in 0..(cfg.run.verify_count / 4).max(2) {
        let set = DirectionSet::get(1 + (i % 2) as u8);
        let mut amps = Vec::new();
        for k in set.plus {
            let a = C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            amps.push((k, a));
            amps.push(([-k[0], -k[1]], a.conj()));
        }
        let res = beltrami_identity_check(&amps, 5.0, g).unwrap();
        div = div.max(res.divergence);
        zero = zero.max(res.zero_mode);
    }
    vec![
        at_most(cfg, "waves.gamma_identity", id, 1e-12),
        at_most(cfg, "waves.reconstruction", recon, 1e-12),
        at_least(cfg, "waves.epsilon_gamma", eps, 0.05),
        at_most(cfg, "waves.beltrami_divergence", div, 1e-12),
        at_most(cfg, "waves.beltrami_zero_mode", zero, 1e-12),
    ]
}

fn decomposition_residual(nodes: usize, f: &ScalarField, g: &ScalarField) -> f64 {
    let d = t_decomposition(&PseudoProductPlan::with_nodes(nodes), f, g).unwrap();
    let t = nonlinear_t(f, g);
    t.max_abs_diff(&d.assemble()) / t.max_coeff()
}

/// `s^m` on mirror pairs, and the gradient-plus-divergence split of `T` at
/// `n = 128` with its convergence under node doubling.
pub fn pseudo(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 4);
    let q = SymbolQuadrature::default();
    let mut mirror = 0.0f64;
    for _ in 0..10 * cfg.run.verify_count {
        let eta = loop {
            let p = [r.gen_range(-60i64..=60) as f64, r.gen_range(-60i64..=60) as f64];
            if p != [0.0, 0.0] {
                break p;
            }
        };
        let s = q.eval([-eta[0], -eta[1]], eta).unwrap();
        let n = eta[0].hypot(eta[1]);
        for m in 0..2 {
            mirror = mirror.max((s[m] - C64::new(0.0, eta[m] / n)).norm());
        }
    }
    let grid = Grid::new(128).unwrap();
    let f = random_scalar_annulus(grid, 6.0, 12.0, &mut r);
    let g = random_scalar_annulus(grid, 6.0, 12.0, &mut r);
    let at_default = decomposition_residual(cfg.numerics.nodes, &f, &g);
    // node ladder until the residual reaches roundoff
    let mut gain = f64::INFINITY;
    let mut prev = decomposition_residual(2, &f, &g);
    let mut nodes = 4;
    while prev > 1e-13 && nodes <= 64 {
        let cur = decomposition_residual(nodes, &f, &g);
        gain = gain.min(prev / cur.max(1e-300));
        prev = cur;
        nodes *= 2;
    }
    vec![
        at_most(cfg, "pseudo.mirror_pairs", mirror, 1e-15),
        at_most(cfg, "pseudo.decomposition", at_default, 1e-8),
        at_least(cfg, "pseudo.refinement_gain", gain, 4.0),
    ]
}

struct Shear;

impl VelocityHistory for Shear {
    fn spacing(&self) -> f64 {
        1.0 / 64.0
    }
    fn sample(&self, _: i64) -> Arc<FieldEvaluator> {
        let g = Grid::new(16).unwrap();
        let u = ScalarField::from_fn(g, |_, y| y.sin());
        Arc::new(FieldEvaluator::new(&[&u, &ScalarField::zeros(g)]))
    }
    fn gradient_bound(&self) -> f64 {
        1.0
    }
}

/// `v(x)(1 + sin(3t)/2)` with `v` a random divergence-free field of unit sup.
struct Pulsing {
    base: VectorField,
    h: f64,
}

impl VelocityHistory for Pulsing {
    fn spacing(&self) -> f64 {
        self.h
    }
    fn sample(&self, i: i64) -> Arc<FieldEvaluator> {
        let v = self.base.scale(1.0 + 0.5 * (3.0 * i as f64 * self.h).sin());
        Arc::new(FieldEvaluator::new(&[&v.c[0], &v.c[1]]))
    }
    fn gradient_bound(&self) -> f64 {
        1.5 * c_norm(&self.base, 1)
    }
}

/// Shear closed form, area preservation over `4τ` and the partition of unity.
pub fn transport(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 5);
    let g = Grid::new(32).unwrap();
    let f = solve_flow_map(&Shear, 0.0, 1.0, g, 1).unwrap();
    let mut shear = 0.0f64;
    for i in 0..g.len() {
        let p = g.point(i);
        shear = shear.max((f.displacement[0][i] + p[1].sin()).abs()).max(f.displacement[1][i].abs());
    }
    let psi = random_scalar(Grid::new(32).unwrap(), 3.0, &mut r);
    let v = perp_grad(&psi);
    let hist = Pulsing { base: v.scale(1.0 / c_norm(&v, 0)), h: 0.01 };
    let tau = cfg.params().map(|p| p.tau(0)).unwrap_or(0.1);
    let det = solve_flow_map(&hist, 0.0, 4.0 * tau, Grid::new(64).unwrap(), 4).map(|m| m.det_defect()).unwrap_or(f64::INFINITY);
    let part = TimePartition::new(tau);
    let mut unity = 0.0f64;
    for _ in 0..10_000 {
        let t = r.gen_range(-5.0..5.0);
        let s: f64 = part.active(t).iter().map(|&j| part.chi_sq(j, t)).sum();
        unity = unity.max((s - 1.0).abs());
    }
    vec![
        at_most(cfg, "transport.shear_closed_form", shear, 1e-8),
        at_most(cfg, "transport.det_drift", det, 1e-6),
        at_most(cfg, "transport.partition_of_unity", unity, 1e-12),
    ]
}

fn smooth(g: Grid, r: &mut ChaCha8Rng) -> ScalarField {
    let th = random_scalar(g, 4.0, r).remove_mean();
    let s = 1.0 / th.to_physical().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    th.scale(s)
}

/// `Σ c_k ik⊥ e^{ik·x} + conj` over the lattice circle `|k| = 5`.
fn single_shell(g: Grid, r: &mut ChaCha8Rng) -> VectorField {
    let mut v = VectorField::zeros(g);
    for k in [(5i64, 0i64), (3, 4), (4, 3), (0, 5), (-3, 4), (-4, 3)] {
        let m = ScalarField::mode(g, k, C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let kp = [-(k.1 as f64), k.0 as f64];
        let part = VectorField::new(m.scale_complex(C64::new(0.0, kp[0])), m.scale_complex(C64::new(0.0, kp[1])));
        v.axpy(1.0, &part);
        v.axpy(1.0, &part.map(|f| f.conj()));
    }
    v
}

/// Plane-wave steadiness, antisymmetry of the nonlinearity, conservation over
/// 10³ steps, decay with dissipation and the weak form of steady shells.
pub fn solver(cfg: &RunConfig) -> Vec<Check> {
    let mut r = rng(cfg, 6);
    let g = Grid::new(32).unwrap();
    let m = ScalarField::mode(g, (3, 4), C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let wave = &m + &m.conj();
    let s = Solver::new(SolverConfig::new(g, 0.01, 0.0, 1.0)).unwrap();
    let mut cur = wave;
    let mut steady = 0.0f64;
    for _ in 0..100 {
        let next = s.step(&cur, 0.01).unwrap();
        steady = steady.max(next.max_abs_diff(&cur));
        cur = next;
    }

    let th = smooth(g, &mut r);
    let (a, b) = antisymmetry(&th);
    let s = Solver::new(SolverConfig::new(g, 0.002, 0.0, 2.0)).unwrap();
    let (_, recs) = s.run(&th, 10, |_, _| Ok(())).unwrap();
    let cons = conservation_report(&recs);
    let s = Solver::new(SolverConfig::new(g, 0.005, 1.0, 1.0)).unwrap();
    let (_, recs) = s.run(&th, 1, |_, _| Ok(())).unwrap();
    let decay = conservation_report(&recs);

    let wg = Grid::new(64).unwrap();
    let v = single_shell(wg, &mut r);
    let samples: Vec<(f64, VectorField)> = (0..=400).map(|i| (i as f64 / 400.0, v.clone())).collect();
    let mut weak = 0.0f64;
    for _ in 0..20 {
        let phi = TestFunction { phi0: random_div_free(wg, 6.0, &mut r), window: (0.1, 0.9) };
        weak = weak.max(weak_form_residual(&samples, &phi, 0.0).map(f64::abs).unwrap_or(f64::INFINITY));
    }
    vec![
        at_most(cfg, "solver.plane_wave_steady", steady, 1e-12),
        at_most(cfg, "solver.antisymmetry_hamiltonian", a.abs(), 1e-11),
        at_most(cfg, "solver.antisymmetry_l2", b.abs(), 1e-11),
        at_most(cfg, "solver.hamiltonian_drift", cons.hamiltonian_drift, 1e-8),
        at_most(cfg, "solver.l2_drift", cons.l2_drift, 1e-8),
        Check::holds("solver.dissipation_decreases_hamiltonian", decay.hamiltonian_strictly_decreasing),
        at_most(cfg, "solver.weak_form_steady", weak, 1e-8),
    ]
}

/// Runs every suite, writes `summary.json` (mode `verify`).
pub fn run_verify(cfg: &RunConfig, out: &Path) -> Result<Summary, CliError> {
    cfg.params()?;
    std::fs::create_dir_all(out)?;
    let mut checks = Vec::new();
    for (_, suite) in SUITES {
        checks.extend(suite(cfg));
    }
    let s = Summary::new(cfg.echo()?, Body::Verify { seed: cfg.run.seed }, checks, vec!["summary.json".into()]);
    s.save(&out.join("summary.json"))?;
    Ok(s)
}
