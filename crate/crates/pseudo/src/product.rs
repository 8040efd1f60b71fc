use sqgci_spectral::{MatrixField, ScalarField, VectorField, C64};

use crate::symbol::{segment_clearance, SymbolQuadrature};
use crate::PseudoError;

/// Settings for the lattice evaluation of `S^m`.
#[derive(Clone, Debug)]
pub struct PseudoProductPlan {
    pub quadrature: SymbolQuadrature,
    /// Largest admissible `|supp f|·|supp g|`.
    pub budget: usize,
    /// Coefficients below `drop_tol·max|ĉ|` are treated as outside the support.
    pub drop_tol: f64,
    /// If set, every pair must keep its `r`-segment at least this far from 0.
    pub guard: Option<f64>,
}

impl Default for PseudoProductPlan {
    fn default() -> Self {
        PseudoProductPlan {
            quadrature: SymbolQuadrature::default(),
            budget: 4_000_000,
            drop_tol: 0.0,
            guard: None,
        }
    }
}

struct Support {
    modes: Vec<([i64; 2], usize)>,
}

fn support(fields: &[&ScalarField], drop_tol: f64) -> Support {
    let grid = fields[0].grid();
    let mut modes = Vec::new();
    let max = fields.iter().map(|f| f.max_coeff()).fold(0.0f64, f64::max);
    let cut = drop_tol * max;
    for i in 0..grid.len() {
        let live = fields.iter().any(|f| {
            let c = f.coeffs()[i];
            c.norm() > cut && c != C64::new(0.0, 0.0)
        });
        if live {
            let (k1, k2) = grid.wavevector(i);
            modes.push(([k1, k2], i));
        }
    }
    Support { modes }
}

impl PseudoProductPlan {
    pub fn with_nodes(nodes: usize) -> Self {
        PseudoProductPlan { quadrature: SymbolQuadrature::new(nodes), ..Default::default() }
    }

    /// `S^m(f, g_i)` for every `g_i`, both components `m = 1, 2`.
    ///
    /// The symbol is evaluated once per lattice pair and shared across outputs.
    pub fn apply_many(
        &self,
        f: &ScalarField,
        gs: &[&ScalarField],
    ) -> Result<Vec<[ScalarField; 2]>, PseudoError> {
        let grid = f.grid();
        if gs.iter().any(|g| g.grid() != grid) {
            return Err(PseudoError::GridMismatch);
        }
        let a = support(&[f], self.drop_tol);
        let b = support(gs, self.drop_tol);
        let pairs = a.modes.len() * b.modes.len();
        if pairs > self.budget {
            return Err(PseudoError::Budget { pairs, budget: self.budget });
        }
        let half = (grid.n() / 2) as i64;
        let mut out = vec![[vec![C64::new(0.0, 0.0); grid.len()], vec![C64::new(0.0, 0.0); grid.len()]]; gs.len()];
        for &(p, ip) in &a.modes {
            let fp = f.coeffs()[ip];
            for &(q, iq) in &b.modes {
                let xi = [p[0] + q[0], p[1] + q[1]];
                if xi[0].abs() >= half || xi[1].abs() >= half {
                    return Err(PseudoError::Unresolved { k1: xi[0], k2: xi[1], n: grid.n() });
                }
                let zeta = [p[0] as f64, p[1] as f64];
                let eta = [q[0] as f64, q[1] as f64];
                if let Some(clear) = self.guard {
                    if segment_clearance(zeta, eta) < clear {
                        return Err(PseudoError::Guard { zeta: p, eta: q });
                    }
                }
                let s = self.quadrature.eval(zeta, eta)?;
                let o = grid.flat(xi[0], xi[1]).expect("inside grid");
                for (gi, g) in gs.iter().enumerate() {
                    let w = fp * g.coeffs()[iq];
                    out[gi][0][o] += s[0] * w;
                    out[gi][1][o] += s[1] * w;
                }
            }
        }
        Ok(out
            .into_iter()
            .map(|[c1, c2]| [ScalarField::from_coeffs(grid, c1), ScalarField::from_coeffs(grid, c2)])
            .collect())
    }

    /// `S^m(f, g)`, `m ∈ {1, 2}`.
    pub fn apply(&self, m: usize, f: &ScalarField, g: &ScalarField) -> Result<ScalarField, PseudoError> {
        assert!(m == 1 || m == 2, "component must be 1 or 2");
        let [s1, s2] = self.apply_many(f, &[g])?.pop().unwrap();
        Ok(if m == 1 { s1 } else { s2 })
    }
}

/// `S^m(f, g)` with the default plan.
pub fn pseudo_product(m: usize, f: &ScalarField, g: &ScalarField) -> Result<ScalarField, PseudoError> {
    PseudoProductPlan::default().apply(m, f, g)
}

fn check_mean(f: &ScalarField) -> Result<(), PseudoError> {
    if f.coeffs()[0].norm() > 1e-12 * f.max_coeff().max(1e-300) {
        return Err(PseudoError::NonzeroMean);
    }
    Ok(())
}

/// `T(f, g) = ½((Rf)g + f(Rg))` through dealiased products.
pub fn nonlinear_t(f: &ScalarField, g: &ScalarField) -> VectorField {
    use sqgci_spectral::ops::product;
    let rf = sqgci_operators::riesz(f);
    let rg = sqgci_operators::riesz(g);
    let comp = |l: usize| (&product(&rf.c[l], g) + &product(f, &rg.c[l])).scale(0.5);
    VectorField::new(comp(0), comp(1))
}

/// Gradient and divergence parts of `T(f, g)`.
pub struct TDecomposition {
    /// `Λ^{-1}f · g`
    pub pressure: ScalarField,
    /// `tensor.c[m][l] = S^m(Λ^{-1}f, R^l g)`
    pub tensor: MatrixField,
}

impl TDecomposition {
    /// `½∇pressure + ½ div tensor`, with `(div M)^l = ∂_m M^{ml}`.
    pub fn assemble(&self) -> VectorField {
        use sqgci_spectral::ops::{grad, matrix_div};
        (&grad(&self.pressure) + &matrix_div(&self.tensor)).scale(0.5)
    }
}

pub fn t_decomposition(
    plan: &PseudoProductPlan,
    f: &ScalarField,
    g: &ScalarField,
) -> Result<TDecomposition, PseudoError> {
    check_mean(f)?;
    check_mean(g)?;
    let lf = sqgci_operators::lambda(f, -1.0);
    let rg = sqgci_operators::riesz(g);
    let pressure = sqgci_spectral::ops::product(&lf, g);
    let mut s = plan.apply_many(&lf, &[&rg.c[0], &rg.c[1]])?;
    let [s1l2, s2l2] = s.pop().unwrap();
    let [s1l1, s2l1] = s.pop().unwrap();
    let tensor = MatrixField { c: [[s1l1, s1l2], [s2l1, s2l2]] };
    Ok(TDecomposition { pressure, tensor })
}
