use crate::TransportError;

/// `(λ₀, β, γ)` and the derived sequences `λ_q = λ₀^q`, `δ_q = λ₀²λ_q^{-2β}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    pub lambda0: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SchemeParams {
    pub fn new(lambda0: f64, beta: f64, gamma: f64) -> Result<Self, TransportError> {
        if lambda0 < 5.0 || lambda0.fract() != 0.0 || lambda0 as u64 % 5 != 0 {
            return Err(TransportError::Params(format!("lambda0 = {lambda0} must be a positive multiple of 5")));
        }
        if !(beta > 0.5 && beta < 0.8) {
            return Err(TransportError::Params(format!("beta = {beta} must lie in (1/2, 4/5)")));
        }
        if !(gamma >= 0.0 && gamma + beta < 2.0) {
            return Err(TransportError::Params(format!("gamma = {gamma} must satisfy 0 <= gamma < 2 - beta")));
        }
        Ok(Self { lambda0, beta, gamma })
    }

    pub fn lambda(&self, q: usize) -> f64 {
        self.lambda0.powi(q as i32)
    }

    pub fn delta(&self, q: usize) -> f64 {
        self.lambda0 * self.lambda0 * self.lambda(q).powf(-2.0 * self.beta)
    }

    /// `τ_{q+1} = (λ_qλ_{q+1}δ_q^{1/4}δ_{q+1}^{1/4})^{-1}`.
    pub fn tau(&self, q: usize) -> f64 {
        1.0 / (self.lambda(q) * self.lambda(q + 1) * (self.delta(q) * self.delta(q + 1)).powf(0.25))
    }

    /// `λ_qδ_q`, the scale of the stress at stage `q - 1`.
    pub fn stress_scale(&self, q: usize) -> f64 {
        self.lambda(q) * self.delta(q)
    }

    /// `τ_{q+1}λ_q²δ_q^{1/2}`, which equals `λ₀^{-1+β/2}`.
    pub fn cfl(&self, q: usize) -> f64 {
        self.tau(q) * self.lambda(q).powi(2) * self.delta(q).sqrt()
    }

    /// Stress smallness constant `ε_R = ε_γ/8`.
    pub fn epsilon_r(epsilon_gamma: f64) -> f64 {
        epsilon_gamma / 8.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_values() {
        let p = SchemeParams::new(5.0, 0.6, 0.0).unwrap();
        assert_eq!(p.delta(0), 25.0);
        let d1 = 25.0 * 5f64.powf(-1.2);
        assert!((p.delta(1) - d1).abs() < 1e-14);
        let tau1 = 1.0 / (5.0 * 25f64.powf(0.25) * d1.powf(0.25));
        assert!((p.tau(0) - tau1).abs() < 1e-15);
        for q in 0..4 {
            assert!((p.tau(q + 1) / p.tau(q) - 5f64.powf(-1.4)).abs() < 1e-12);
            assert!((p.cfl(q) - 5f64.powf(-0.7)).abs() < 1e-12);
        }
    }

    #[test]
    fn cfl_tends_to_one_as_beta_grows() {
        let p = SchemeParams { lambda0: 5.0, beta: 1.999, gamma: 0.0 };
        assert!((p.cfl(2) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn validation() {
        assert!(SchemeParams::new(7.0, 0.6, 0.0).is_err());
        assert!(SchemeParams::new(5.0, 0.9, 0.0).is_err());
        assert!(SchemeParams::new(5.0, 0.6, 1.5).is_err());
        assert!(SchemeParams::new(10.0, 0.7, 1.0).is_ok());
    }
}
