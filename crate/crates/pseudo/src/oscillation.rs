use sqgci_operators::localizer_symbol;
use sqgci_spectral::{ops::product, MatrixField, ScalarField};

use crate::product::PseudoProductPlan;
use crate::PseudoError;

/// Data defining the principal part `-(λ/2) χ² a² k⊗k`.
pub struct PrincipalInputs<'a> {
    pub k: [f64; 2],
    pub lambda: f64,
    pub chi_sq: f64,
    pub amplitude: &'a ScalarField,
}

pub struct QSplit {
    pub full: MatrixField,
    pub principal: MatrixField,
    pub remainder: MatrixField,
}

fn check_localized(f: &ScalarField, k: [f64; 2], lambda: f64) -> Result<(), PseudoError> {
    let g = f.grid();
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let (k1, k2) = g.wavevector(i);
        let d = (k1 as f64 / lambda - k[0]).hypot(k2 as f64 / lambda - k[1]);
        if d > 0.125 + 1e-12 {
            return Err(PseudoError::NotLocalized { k1, k2 });
        }
    }
    Ok(())
}

/// `Q^{ml} = ½ S^m(Λ^{-1}ϑ_k, R^l ϑ_{-k})` split into the principal part and the
/// exact remainder `Q - principal`.
///
/// `theta_k` must be supported in the ball of radius `λ/8` about `λk`, and
/// `theta_mk` in the one about `-λk`.
pub fn oscillation_q(
    plan: &PseudoProductPlan,
    theta_k: &ScalarField,
    theta_mk: &ScalarField,
    p: &PrincipalInputs,
) -> Result<QSplit, PseudoError> {
    check_localized(theta_k, p.k, p.lambda)?;
    check_localized(theta_mk, [-p.k[0], -p.k[1]], p.lambda)?;
    let lf = sqgci_operators::lambda(theta_k, -1.0);
    let rg = sqgci_operators::riesz(theta_mk);
    let mut s = plan.apply_many(&lf, &[&rg.c[0], &rg.c[1]])?;
    let [s1l2, s2l2] = s.pop().unwrap();
    let [s1l1, s2l1] = s.pop().unwrap();
    let full = MatrixField { c: [[s1l1, s1l2], [s2l1, s2l2]] }.scale(0.5);
    let principal = principal_part(p);
    let remainder = &full - &principal;
    Ok(QSplit { full, principal, remainder })
}

/// `-(λ/2) χ² a² (k⊗k)`.
pub fn principal_part(p: &PrincipalInputs) -> MatrixField {
    let a2 = product(p.amplitude, p.amplitude);
    let c = -0.5 * p.lambda * p.chi_sq;
    let e = |m: usize, l: usize| a2.scale(c * p.k[m] * p.k[l]);
    MatrixField { c: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
}

/// Rescaled multiplier `M*_{k,r}(ξ₁, ξ₂)`, a 2×2 matrix indexed `[m][l]`.
pub fn m_star(k: [f64; 2], r: f64, xi1: [f64; 2], xi2: [f64; 2]) -> [[f64; 2]; 2] {
    let cut = localizer_symbol(xi1[0].hypot(xi1[1])) * localizer_symbol(xi2[0].hypot(xi2[1]));
    if cut == 0.0 {
        return [[0.0; 2]; 2];
    }
    let v = [
        (1.0 - r) * xi2[0] - r * xi1[0] - k[0],
        (1.0 - r) * xi2[1] - r * xi1[1] - k[1],
    ];
    let vn = v[0].hypot(v[1]);
    let a = [xi1[0] + k[0], xi1[1] + k[1]];
    let b = [xi2[0] - k[0], xi2[1] - k[1]];
    let fa = (k[0] * a[0] + k[1] * a[1]) / a[0].hypot(a[1]);
    let fb = (k[0] * b[0] + k[1] * b[1]) / b[0].hypot(b[1]);
    let s = fa * fb * cut / vn;
    [
        [v[0] * b[0] * s, v[0] * b[1] * s],
        [v[1] * b[0] * s, v[1] * b[1] * s],
    ]
}

/// `M_{k,r}(ζ, η) = λ M*_{k,r}(ζ/λ, η/λ)`.
pub fn m_kr(k: [f64; 2], r: f64, lambda: f64, zeta: [f64; 2], eta: [f64; 2]) -> [[f64; 2]; 2] {
    let m = m_star(k, r, [zeta[0] / lambda, zeta[1] / lambda], [eta[0] / lambda, eta[1] / lambda]);
    m.map(|row| row.map(|x| lambda * x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_value() {
        let k = [0.6, 0.8];
        for r in [0.0, 0.3, 1.0] {
            let m = m_star(k, r, [0.0, 0.0], [0.0, 0.0]);
            for a in 0..2 {
                for b in 0..2 {
                    assert!((m[a][b] + k[a] * k[b]).abs() < 1e-15);
                }
            }
        }
        let m = m_kr(k, 0.5, 40.0, [0.0, 0.0], [0.0, 0.0]);
        assert!((m[0][1] + 40.0 * 0.48).abs() < 1e-12);
    }

    #[test]
    fn vanishes_off_support() {
        let m = m_star([1.0, 0.0], 0.5, [0.13, 0.0], [0.0, 0.0]);
        assert_eq!(m, [[0.0; 2]; 2]);
    }
}
