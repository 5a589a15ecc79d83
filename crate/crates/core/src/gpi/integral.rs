use serde::{Deserialize, Serialize};

use super::{GpiError, Result};
use crate::linalg::{is_positive_definite, sym_eigenvalues, SymMat, DEFAULT_PD_TOL};
use crate::special::{
    log_mvgamma, log_partition_gamma_lower, log_partition_gamma_upper, zonal_expansion_coefficients,
    zonal_polynomial,
};

/// Which convergence window was enforced for the bound integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowRule {
    /// `p = 1`: the integral is a Beta integral, finite iff `0 < ν < α/2`.
    Beta,
    /// `p ≥ 2`: `(p−1)/2 < ν < α/2 − p(p+1)/4`.
    Stated,
}

/// Open interval of `ν` accepted for the `p × p` bound integral.
pub fn convergence_window(p: usize, alpha: f64) -> (f64, f64, WindowRule) {
    if p == 1 {
        (0.0, alpha / 2.0, WindowRule::Beta)
    } else {
        let pf = p as f64;
        ((pf - 1.0) / 2.0, alpha / 2.0 - pf * (pf + 1.0) / 4.0, WindowRule::Stated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub log_value: f64,
    pub rule: WindowRule,
}

impl IntegralValue {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `I_p(M) = ∫_{S₊₊} |T|^{ν−(p+1)/2} |I + √2 T^{1/2} M|^{−α} dT` in closed
/// form:
///
/// `I_p(M) = 2^p |2M²|^{−ν+(p−1)/4} Σ_κ a_κ Γ_p(a, κ) Γ_p(α−a, −κ) / Γ_p(α) · C_κ(M⁻¹/√2)`
///
/// with `a = 2ν − (p−1)/2` and `a_κ` the zonal coefficients of
/// `∏_{i<j}(λ_i + λ_j)`. For `p = 1` this is `2^{1−ν} m^{−2ν} B(2ν, α−2ν)`.
pub fn bound_integral(m: &SymMat, alpha: f64, nu: f64) -> Result<IntegralValue> {
    let p = m.dim();
    let (lo, hi, rule) = convergence_window(p, alpha);
    if !(nu > lo && nu < hi) {
        return Err(GpiError::DivergentIntegral { p, alpha, nu, lo, hi, rule });
    }
    if !is_positive_definite(m, DEFAULT_PD_TOL) {
        return Err(GpiError::Domain("bound integral needs a positive definite M".into()));
    }
    let pf = p as f64;
    let a = 2.0 * nu - (pf - 1.0) / 2.0;
    let b = alpha - a;
    let eig = sym_eigenvalues(m);
    let log_det_m: f64 = eig.iter().map(|l| l.ln()).sum();
    let log_det_2m2 = pf * std::f64::consts::LN_2 + 2.0 * log_det_m;
    let arg: Vec<f64> = eig.iter().map(|l| 1.0 / (std::f64::consts::SQRT_2 * l)).collect();

    let expansion = zonal_expansion_coefficients(p)?;
    let log_gamma_alpha = log_mvgamma(p, alpha)?;
    let mut terms = Vec::with_capacity(expansion.terms.len());
    for (kappa, coeff) in &expansion.terms {
        let lg = log_partition_gamma_upper(p, a, kappa)? + log_partition_gamma_lower(p, b, kappa)?
            - log_gamma_alpha;
        terms.push((lg, coeff * zonal_polynomial(kappa, &arg)?));
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|(lg, c)| c * (lg - top).exp()).sum();
    if !(sum > 0.0) {
        return Err(GpiError::Domain(format!("zonal series summed to {sum}")));
    }
    let log_value = pf * std::f64::consts::LN_2 + (-nu + (pf - 1.0) / 4.0) * log_det_2m2 + top + sum.ln();
    Ok(IntegralValue { log_value, rule })
}

/// Jacobian of `X ↦ X²` on symmetric positive definite matrices:
/// `J_p(X) = 2^p |X| ∏_{i<j}(λ_i + λ_j)`.
pub fn jacobian_j(x: &SymMat) -> Result<f64> {
    if !is_positive_definite(x, DEFAULT_PD_TOL) {
        return Err(GpiError::Domain("Jacobian is evaluated on positive definite X".into()));
    }
    let l = sym_eigenvalues(x);
    let mut v = 2f64.powi(l.len() as i32) * l.iter().product::<f64>();
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            v *= l[i] + l[j];
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_beta;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_examples() {
        let v = bound_integral(&SymMat::from_diagonal(&[1.0]), 4.0, 1.0).unwrap();
        assert_relative_eq!(v.value(), 1.0 / 6.0, max_relative = 1e-12);
        assert_eq!(v.rule, WindowRule::Beta);
        // m^{−2ν} scaling: m = 2, ν = 1 gives B(2,2)/4
        let v = bound_integral(&SymMat::from_diagonal(&[2.0]), 4.0, 1.0).unwrap();
        assert_relative_eq!(v.value(), 1.0 / 24.0, max_relative = 1e-12);
        let closed = (0.25f64) * 2f64.ln() + ln_beta(1.5, 1.5);
        let v = bound_integral(&SymMat::from_diagonal(&[1.0]), 3.0, 0.75).unwrap();
        assert_relative_eq!(v.log_value, closed, max_relative = 1e-12);
    }

    #[test]
    fn windows() {
        let one = SymMat::from_diagonal(&[1.0]);
        assert!(matches!(bound_integral(&one, 4.0, 2.0), Err(GpiError::DivergentIntegral { .. })));
        assert!(matches!(bound_integral(&one, 4.0, 0.0), Err(GpiError::DivergentIntegral { .. })));
        let two = SymMat::identity(2);
        // α/2 − 3/2 = 1.5 for α = 6
        assert!(bound_integral(&two, 6.0, 1.4).is_ok());
        let e = bound_integral(&two, 6.0, 1.6).unwrap_err();
        assert!(matches!(e, GpiError::DivergentIntegral { rule: WindowRule::Stated, .. }));
        assert!(bound_integral(&two, 6.0, 0.5).is_err());
    }

    #[test]
    fn jacobian_examples() {
        assert_relative_eq!(jacobian_j(&SymMat::from_diagonal(&[3.0])).unwrap(), 6.0);
        assert_relative_eq!(jacobian_j(&SymMat::from_diagonal(&[1.0, 2.0])).unwrap(), 24.0, max_relative = 1e-14);
        assert!(jacobian_j(&SymMat::from_diagonal(&[1.0, -2.0])).is_err());
    }
}
