//! Gamma-type functions of matrix argument, integer partitions and zonal
//! polynomials.
//!
//! Every gamma-type quantity is exposed in log space; callers exponentiate
//! only final ratios.

mod partition;
mod zonal;

use std::f64::consts::PI;

use thiserror::Error;

pub use partition::{partitions_of, Partition};
pub use zonal::{
    monomial_symmetric, zonal_expansion_coefficients, zonal_polynomial, zonal_table, ZonalExpansion,
    ZonalTable, EXPANSION_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("dimension {p} exceeds the supported cap {cap}")]
    CapExceeded { p: usize, cap: usize },
    #[error("parts must be non-increasing: {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("zonal reconstruction residual {0:e} too large")]
    Reconstruction(f64),
}

pub type Result<T, E = SpecialError> = std::result::Result<T, E>;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn ln_pi_power(m: usize) -> f64 {
    (m * (m.saturating_sub(1))) as f64 / 4.0 * PI.ln()
}

/// `ln Γ_p(ν) = p(p−1)/4 · ln π + Σ_{i=1}^p ln Γ(ν − (i−1)/2)`, defined for
/// `ν > (p−1)/2`.
pub fn log_mvgamma(p: usize, nu: f64) -> Result<f64> {
    if p == 0 {
        return Err(SpecialError::Domain("dimension must be positive".into()));
    }
    let edge = (p as f64 - 1.0) / 2.0;
    if !(nu > edge) {
        return Err(SpecialError::Domain(format!("ln Γ_{p}({nu}) needs ν > {edge}")));
    }
    Ok(ln_pi_power(p) + (0..p).map(|i| ln_gamma(nu - i as f64 / 2.0)).sum::<f64>())
}

/// `ln Γ_m(a, κ) = m(m−1)/4 · ln π + Σ_j ln Γ(a + k_j − (j−1)/2)`.
pub fn log_partition_gamma_upper(m: usize, a: f64, kappa: &Partition) -> Result<f64> {
    if m == 0 || kappa.len() > m {
        return Err(SpecialError::Domain(format!("partition {kappa} has more than {m} parts")));
    }
    let mut total = ln_pi_power(m);
    for j in 0..m {
        let arg = a + kappa.part(j) as f64 - j as f64 / 2.0;
        if !(arg > 0.0) {
            return Err(SpecialError::Domain(format!("Γ({arg}) in ln Γ_{m}({a}, {kappa})")));
        }
        total += ln_gamma(arg);
    }
    Ok(total)
}

/// `ln Γ_m(b, −κ) = m(m−1)/4 · ln π + Σ_j ln Γ(b − k_j − (m−j)/2)`, defined
/// for `b > (m−1)/2 + k₁`.
pub fn log_partition_gamma_lower(m: usize, b: f64, kappa: &Partition) -> Result<f64> {
    if m == 0 || kappa.len() > m {
        return Err(SpecialError::Domain(format!("partition {kappa} has more than {m} parts")));
    }
    let edge = (m as f64 - 1.0) / 2.0 + kappa.part(0) as f64;
    if !(b > edge) {
        return Err(SpecialError::Domain(format!("ln Γ_{m}({b}, −{kappa}) needs b > {edge}")));
    }
    let mut total = ln_pi_power(m);
    for j in 1..=m {
        total += ln_gamma(b - kappa.part(j - 1) as f64 - (m - j) as f64 / 2.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mvgamma_examples() {
        assert_relative_eq!(log_mvgamma(1, 2.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(log_mvgamma(1, 0.5).unwrap(), PI.sqrt().ln(), epsilon = 1e-15);
        assert_relative_eq!(log_mvgamma(2, 1.5).unwrap(), (PI / 2.0).ln(), epsilon = 1e-14);
        assert!(log_mvgamma(3, 1.0).is_err());
        assert!(log_mvgamma(2, 0.5).is_err());
    }

    #[test]
    fn partition_gamma_examples() {
        assert_relative_eq!(log_partition_gamma_upper(1, 2.0, &part(&[0])).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(log_partition_gamma_upper(1, 1.0, &part(&[2])).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(log_partition_gamma_upper(2, 2.0, &part(&[1, 0])).unwrap(), PI.ln(), epsilon = 1e-14);

        assert_relative_eq!(log_partition_gamma_lower(1, 3.0, &part(&[0])).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(log_partition_gamma_lower(1, 3.0, &part(&[1])).unwrap(), 0.0, epsilon = 1e-15);
        let expected = 0.5 * PI.ln() + ln_gamma(2.5) + 2f64.ln();
        assert_relative_eq!(log_partition_gamma_lower(2, 4.0, &part(&[1, 1])).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn partition_gamma_domain_errors() {
        assert!(log_partition_gamma_upper(1, -0.5, &part(&[0])).is_err());
        assert!(log_partition_gamma_lower(2, 1.4, &part(&[1])).is_err());
        assert!(log_partition_gamma_lower(1, 3.0, &part(&[1, 1])).is_err());
    }

    #[test]
    fn zero_partition_reduces_to_mvgamma() {
        for m in 1..6 {
            for a in [m as f64 / 2.0 + 0.1, 3.3, 10.0] {
                let up = log_partition_gamma_upper(m, a, &Partition::empty()).unwrap();
                assert_relative_eq!(up, log_mvgamma(m, a).unwrap(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn ln_gamma_matches_independent_implementation() {
        for i in 1..300 {
            let x = i as f64 * 0.1;
            let a = ln_gamma(x);
            let b = statrs::function::gamma::ln_gamma(x);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "x={x}: {a} vs {b}");
        }
    }
}
