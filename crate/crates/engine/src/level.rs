//! Lazily evaluated levels `v_0 = 0, v_1, v_2, …` of the construction.
//!
//! Level `l ≥ 1` adds `w_l` to `v_{l-1}`; everything is computed on demand at
//! the requested times and memoized by the exact bit pattern of the time.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use sqgci_operators::{lambda_vec, leray, localize};
use sqgci_spectral::norms::c_norm;
use sqgci_spectral::{friendly_size, Grid, ScalarField, SymMatrixField, VectorField, C64};
use sqgci_transport::{solve_flow_map, FieldEvaluator, FlowMap, TimePartition, VelocityHistory};
use sqgci_waves::{estimate_epsilon_gamma, perp, DirectionSet};

use crate::amplitude::{amplitudes, Saturation};
use crate::config::{EngineConfig, GuardPolicy};
use crate::energy::{hamiltonian, rho};
use crate::fd::{choose_side, stencil};
use crate::stress::StressBundle;
use crate::EngineError;

/// One `(j, Ω_j)` group of waves at a given time.
#[derive(Clone, Debug)]
pub struct Packet {
    pub j: i64,
    pub chi_sq: f64,
    pub rho: f64,
    /// 1 or 2.
    pub set: u8,
    /// `R̊_{l-1}(Φ_j(x, t), jτ)` on the level grid.
    pub pulled: SymMatrixField,
    /// Grid samples of `a_{k,j}` for the three directions in `plus` order.
    pub amps: [Vec<f64>; 3],
    /// `W_{j,k} = P_{λ,k}(a_{k,j} b_k(λΦ_j))`, complex, without `χ_j`.
    pub modes: [VectorField; 3],
}

/// `w_l(t) = Σ_j χ_j Σ_{k∈plus} 2Re W_{j,k}`.
#[derive(Clone, Debug)]
pub struct Waves {
    pub t: f64,
    pub w: VectorField,
    /// Cutoffs with `ρ_j ≠ 0`; kept only for unshifted evaluations.
    pub packets: Vec<Packet>,
    /// Active cutoffs with `ρ_j = 0`, as `(j, χ_j²)`.
    pub idle: Vec<(i64, f64)>,
    pub saturation: Saturation,
}

pub(crate) struct Memo<K, V> {
    map: Mutex<HashMap<K, V>>,
    cap: usize,
}

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    fn new(cap: usize) -> Self {
        Self { map: Mutex::new(HashMap::new()), cap }
    }

    pub(crate) fn get(&self, k: &K) -> Option<V> {
        self.map.lock().unwrap().get(k).cloned()
    }

    pub(crate) fn put(&self, k: K, v: V) {
        let mut m = self.map.lock().unwrap();
        if m.len() >= self.cap {
            m.clear();
        }
        m.insert(k, v);
    }
}

pub(crate) struct Level {
    pub grid: Grid,
    pub lambda: f64,
    pub part: TimePartition,
    /// Spacing of the velocity history of the parent level.
    pub h: f64,
    /// Finite-difference step.
    pub eps: f64,
    pub tracing: Grid,
    rho: Memo<i64, f64>,
    anchors: Memo<i64, Arc<FieldEvaluator>>,
    flows: Memo<(i64, u64, i32), Arc<FlowMap>>,
    waves: Memo<(u64, i32), Arc<Waves>>,
    pub(crate) stress: Memo<u64, Arc<StressBundle>>,
    velocity: Memo<u64, Arc<FieldEvaluator>>,
    energy: Memo<u64, f64>,
}

/// The chain of levels `0..=q_max+1`.
pub struct Scheme {
    pub(crate) cfg: EngineConfig,
    pub(crate) levels: Vec<Level>,
    eps_gamma: f64,
    cap: (f64, f64),
}

struct History<'a> {
    scheme: &'a Scheme,
    parent: usize,
    h: f64,
    grad: f64,
    err: Mutex<Option<EngineError>>,
}

impl VelocityHistory for History<'_> {
    fn spacing(&self) -> f64 {
        self.h
    }

    fn sample(&self, i: i64) -> Arc<FieldEvaluator> {
        match self.scheme.velocity_sample(self.parent, i as f64 * self.h) {
            Ok(e) => e,
            Err(e) => {
                self.err.lock().unwrap().get_or_insert(e);
                let z = ScalarField::zeros(self.scheme.grid(self.parent));
                Arc::new(FieldEvaluator::new(&[&z, &z]))
            }
        }
    }

    fn gradient_bound(&self) -> f64 {
        self.grad
    }
}

fn at(t: f64) -> u64 {
    t.to_bits()
}

impl Scheme {
    pub fn new(cfg: EngineConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        let p = cfg.params;
        let top = cfg.levels();
        let mut levels = Vec::with_capacity(top + 1);
        for l in 0..=top {
            let lambda = p.lambda(l);
            let need = (4.5 * lambda + 8.0).ceil() as usize;
            let grid = if l == 0 {
                16
            } else if l == top {
                friendly_size(need.max(cfg.grid_n))
            } else {
                friendly_size(need.max(16))
            };
            let tau = if l == 0 { 1.0 } else { p.tau(l - 1) };
            let k_parent = if l == 0 { 0.0 } else { (1.125 * p.lambda(l - 1)).ceil() + 1.0 };
            let tracing = friendly_size(((4.0 * k_parent) as usize + 8).max(16));
            let big = grid >= 256;
            levels.push(Level {
                grid: Grid::new(grid).map_err(|e| EngineError::Resolution(e.to_string()))?,
                lambda,
                part: TimePartition::new(tau),
                h: tau / cfg.history_per_tau as f64,
                eps: tau * cfg.fd_fraction,
                tracing: Grid::new(tracing).map_err(|e| EngineError::Resolution(e.to_string()))?,
                rho: Memo::new(usize::MAX),
                anchors: Memo::new(if big { 8 } else { usize::MAX }),
                flows: Memo::new(if big { 64 } else { 4096 }),
                waves: Memo::new(if big { 24 } else { 4096 }),
                stress: Memo::new(if big { 4 } else { 4096 }),
                velocity: Memo::new(4096),
                energy: Memo::new(usize::MAX),
            });
        }
        let eps_gamma = estimate_epsilon_gamma();
        let r_pos = DirectionSet::get(1).positivity_radius_traceless().min(DirectionSet::get(2).positivity_radius_traceless());
        Ok(Self { cfg, levels, eps_gamma, cap: (eps_gamma, 0.5 * (eps_gamma + r_pos)) })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Index of the finest level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn grid(&self, l: usize) -> Grid {
        self.levels[l].grid
    }

    pub fn lambda(&self, l: usize) -> f64 {
        self.levels[l].lambda
    }

    pub fn partition(&self, l: usize) -> TimePartition {
        self.levels[l].part
    }

    pub fn tau(&self, l: usize) -> f64 {
        self.levels[l].part.tau
    }

    pub fn fd_step(&self, l: usize) -> f64 {
        self.levels[l].eps
    }

    /// Kink spacing of the level's wave field in time (none on level 1, whose
    /// flow maps are the identity).
    pub fn kink_spacing(&self, l: usize) -> Option<f64> {
        (l >= 2).then(|| self.levels[l].h)
    }

    pub fn epsilon_gamma(&self) -> f64 {
        self.eps_gamma
    }

    /// `(inner, outer)` radii of the saturation.
    pub fn saturation_radii(&self) -> (f64, f64) {
        self.cap
    }

    pub fn profile_value(&self, t: f64) -> f64 {
        self.cfg.profile.value(t)
    }

    /// `v_l(t)` on the grid of level `l`.
    pub fn v(&self, l: usize, t: f64) -> Result<VectorField, EngineError> {
        if l == 0 {
            return Ok(VectorField::zeros(self.grid(0)));
        }
        let mut v = self.v(l - 1, t)?.resample(self.grid(l));
        v.axpy(1.0, &self.waves(l, t, 0)?.w);
        Ok(v)
    }

    pub fn u(&self, l: usize, t: f64) -> Result<VectorField, EngineError> {
        Ok(lambda_vec(&self.v(l, t)?, 1.0))
    }

    /// `∫|Λ^{1/2}v_l(t)|²`.
    pub fn energy(&self, l: usize, t: f64) -> Result<f64, EngineError> {
        if l == 0 {
            return Ok(0.0);
        }
        let lv = &self.levels[l];
        if let Some(e) = lv.energy.get(&at(t)) {
            return Ok(e);
        }
        let e = hamiltonian(&self.v(l, t)?);
        lv.energy.put(at(t), e);
        Ok(e)
    }

    /// `H(t) - ∫|Λ^{1/2}v_l|²`.
    pub fn gap(&self, l: usize, t: f64) -> Result<f64, EngineError> {
        Ok(self.profile_value(t) - self.energy(l, t)?)
    }

    /// `ρ_j` of level `l`, fixed by the energy of `v_{l-1}` at `jτ_l`.
    pub fn rho(&self, l: usize, j: i64) -> Result<f64, EngineError> {
        let lv = &self.levels[l];
        if let Some(r) = lv.rho.get(&j) {
            return Ok(r);
        }
        let tj = lv.part.anchor(j);
        let r = rho(&self.cfg.params, l, self.profile_value(tj), self.energy(l - 1, tj)?);
        lv.rho.put(j, r);
        Ok(r)
    }

    /// Evaluator of `u_l(t)` for the flow maps of level `l+1`.
    fn velocity_sample(&self, l: usize, t: f64) -> Result<Arc<FieldEvaluator>, EngineError> {
        let lv = &self.levels[l];
        if let Some(e) = lv.velocity.get(&at(t)) {
            return Ok(e);
        }
        let u = self.u(l, t)?;
        let e = Arc::new(FieldEvaluator::new(&[&u.c[0], &u.c[1]]));
        lv.velocity.put(at(t), e.clone());
        Ok(e)
    }

    /// Evaluator of `R̊_{l-1}(·, jτ_l)`.
    fn anchor_stress(&self, l: usize, j: i64) -> Result<Arc<FieldEvaluator>, EngineError> {
        let lv = &self.levels[l];
        if let Some(e) = lv.anchors.get(&j) {
            return Ok(e);
        }
        let r = self.stress_total(l - 1, lv.part.anchor(j))?;
        let e = Arc::new(FieldEvaluator::new(&[&r.m11, &r.m12]));
        lv.anchors.put(j, e.clone());
        Ok(e)
    }

    /// `R̊_l(t)` on the grid of level `l`.
    pub fn stress_total(&self, l: usize, t: f64) -> Result<SymMatrixField, EngineError> {
        if l == 0 {
            return Ok(SymMatrixField::zeros(self.grid(0)));
        }
        Ok(self.stress(l, t)?.total.clone())
    }

    fn history(&self, l: usize, t0: f64, t: f64) -> Result<History<'_>, EngineError> {
        let grad = c_norm(&self.u(l - 1, t0)?, 1).max(c_norm(&self.u(l - 1, t)?, 1));
        Ok(History { scheme: self, parent: l - 1, h: self.levels[l].h, grad: 2.0 * grad, err: Mutex::new(None) })
    }

    /// Back-to-labels map `Φ_j` of level `l` at `t + m·ε`. Shifted maps are
    /// advanced from the one at `t`.
    pub fn flow(&self, l: usize, j: i64, t: f64, m: i32) -> Result<Arc<FlowMap>, EngineError> {
        let lv = &self.levels[l];
        let t0 = lv.part.anchor(j);
        let tt = t + m as f64 * lv.eps;
        if l == 1 {
            return Ok(Arc::new(FlowMap::identity(lv.tracing, t0, tt)));
        }
        let key = (j, at(t), m);
        if let Some(f) = lv.flows.get(&key) {
            return Ok(f);
        }
        let f = if m == 0 {
            let hist = self.history(l, t0, t)?;
            let substeps = ((lv.h * hist.grad / 0.1).ceil() as usize).max(4);
            let f = solve_flow_map(&hist, t0, t, lv.tracing, substeps)?;
            if let Some(e) = hist.err.into_inner().unwrap() {
                return Err(e);
            }
            f
        } else {
            let base = self.flow(l, j, t, 0)?;
            let hist = History { scheme: self, parent: l - 1, h: lv.h, grad: 0.0, err: Mutex::new(None) };
            let f = base.advance(&hist, m as f64 * lv.eps);
            if let Some(e) = hist.err.into_inner().unwrap() {
                return Err(e);
            }
            f
        };
        let f = Arc::new(f);
        lv.flows.put(key, f.clone());
        Ok(f)
    }

    /// Re-traced (not advanced) map at `t + m·ε`, for the interpolation budget.
    pub(crate) fn retraced_flow(&self, l: usize, j: i64, t: f64, m: i32) -> Result<FlowMap, EngineError> {
        let lv = &self.levels[l];
        let t0 = lv.part.anchor(j);
        let tt = t + m as f64 * lv.eps;
        if l == 1 {
            return Ok(FlowMap::identity(lv.tracing, t0, tt));
        }
        let hist = self.history(l, t0, t)?;
        let substeps = ((lv.h * hist.grad / 0.1).ceil() as usize).max(4);
        let f = solve_flow_map(&hist, t0, tt, lv.tracing, substeps)?;
        if let Some(e) = hist.err.into_inner().unwrap() {
            return Err(e);
        }
        Ok(f)
    }

    /// `w_l` at `t + m·ε_l`.
    pub fn waves(&self, l: usize, t: f64, m: i32) -> Result<Arc<Waves>, EngineError> {
        let lv = &self.levels[l];
        let key = (at(t), m);
        if let Some(w) = lv.waves.get(&key) {
            return Ok(w);
        }
        let w = Arc::new(self.build_waves(l, t, m, None)?);
        lv.waves.put(key, w.clone());
        Ok(w)
    }

    /// Builds `w_l(t + m·ε)`; `maps` overrides the flow maps per cutoff.
    pub(crate) fn build_waves(&self, l: usize, t: f64, m: i32, maps: Option<&dyn Fn(i64) -> Result<FlowMap, EngineError>>) -> Result<Waves, EngineError> {
        let lv = &self.levels[l];
        let grid = lv.grid;
        let lam = lv.lambda;
        let tt = t + m as f64 * lv.eps;
        let mut w = VectorField::zeros(grid);
        let mut packets = Vec::new();
        let mut idle = Vec::new();
        let mut saturation = Saturation::default();
        let cap = match self.cfg.guard {
            GuardPolicy::Abort => None,
            GuardPolicy::Saturate => Some(self.cap),
        };
        let points: Vec<[f64; 2]> = (0..grid.len()).map(|i| grid.point(i)).collect();
        for j in lv.part.active(tt) {
            let chi_sq = lv.part.chi_sq(j, tt);
            let r = self.rho(l, j)?;
            if r == 0.0 {
                idle.push((j, chi_sq));
                continue;
            }
            let flow = match maps {
                Some(f) => Arc::new(f(j)?),
                None => self.flow(l, j, t, m)?,
            };
            let d = flow.displacement_on(grid);
            let (m11, m12) = if l == 1 {
                (vec![0.0; grid.len()], vec![0.0; grid.len()])
            } else {
                let feet: Vec<[f64; 2]> = points.iter().enumerate().map(|(i, p)| [p[0] + d[0][i], p[1] + d[1][i]]).collect();
                let mut vals = self.anchor_stress(l, j)?.eval(&feet);
                let b = vals.pop().unwrap();
                (vals.pop().unwrap(), b)
            };
            let set_index = if j.rem_euclid(2) == 1 { 1 } else { 2 };
            let set = DirectionSet::get(set_index);
            let amps = amplitudes(set, &m11, &m12, lam, r, cap);
            if self.cfg.guard == GuardPolicy::Abort && amps.saturation.max_ratio > self.eps_gamma {
                return Err(EngineError::Guard { level: l, j, ratio: amps.saturation.max_ratio, limit: self.eps_gamma });
            }
            saturation.merge(&amps.saturation);
            let chi = chi_sq.sqrt();
            let mut modes = Vec::with_capacity(3);
            for (ki, k) in set.plus.iter().enumerate() {
                let kl = [(lam * k[0]).round(), (lam * k[1]).round()];
                if (kl[0] - lam * k[0]).abs() > 1e-9 || (kl[1] - lam * k[1]).abs() > 1e-9 {
                    return Err(EngineError::Resolution(format!("λk = ({}, {}) is off the lattice", lam * k[0], lam * k[1])));
                }
                let g: Vec<C64> = (0..grid.len())
                    .map(|i| {
                        let p = points[i];
                        let phase = kl[0] * (p[0] + d[0][i]) + kl[1] * (p[1] + d[1][i]);
                        C64::from_polar(amps.a[ki][i], phase)
                    })
                    .collect();
                let g = ScalarField::from_complex_physical(grid, g).map_err(|e| EngineError::Resolution(e.to_string()))?;
                let g = localize(&g, *k, lam)?;
                let kp = perp(*k);
                let wk = leray(&VectorField::new(g.scale_complex(C64::new(0.0, kp[0])), g.scale_complex(C64::new(0.0, kp[1]))));
                for c in 0..2 {
                    w.c[c].axpy(chi, &wk.c[c]);
                    w.c[c].axpy(chi, &wk.c[c].conj());
                }
                modes.push(wk);
            }
            if m == 0 && maps.is_none() {
                let pulled = SymMatrixField::new(
                    ScalarField::from_physical(grid, &m11).map_err(|e| EngineError::Resolution(e.to_string()))?,
                    ScalarField::from_physical(grid, &m12).map_err(|e| EngineError::Resolution(e.to_string()))?,
                );
                let modes: [VectorField; 3] = modes.try_into().expect("three directions");
                packets.push(Packet { j, chi_sq, rho: r, set: set_index, pulled, amps: amps.a, modes });
            }
        }
        Ok(Waves { t: tt, w, packets, idle, saturation })
    }

    /// `∂_t w_l(t)` by an `order`-accurate difference with step `stride·ε`.
    pub fn dw_dt(&self, l: usize, t: f64, order: usize, stride: i32) -> Result<VectorField, EngineError> {
        let eps = self.levels[l].eps;
        let side = choose_side(t, eps, self.kink_spacing(l));
        let mut d = VectorField::zeros(self.grid(l));
        for (m, c) in stencil(order, side, stride) {
            d.axpy(c / eps, &self.waves(l, t, m)?.w);
        }
        Ok(d)
    }

    /// `∂_t v_l(t)`, summing the differences of every level.
    pub fn dv_dt(&self, l: usize, t: f64, order: usize) -> Result<VectorField, EngineError> {
        let mut d = VectorField::zeros(self.grid(l));
        for i in 1..=l {
            d.axpy(1.0, &self.dw_dt(i, t, order, 1)?.resample(self.grid(l)));
        }
        Ok(d)
    }

    /// Anchor times `jτ_l` of the cutoffs active at `t`.
    pub fn active(&self, l: usize, t: f64) -> Vec<i64> {
        self.levels[l].part.active(t)
    }

    /// `2π`-periodic sample points of the level grid.
    pub fn points(&self, l: usize) -> Vec<[f64; 2]> {
        let g = self.grid(l);
        (0..g.len()).map(|i| g.point(i)).collect()
    }
}
