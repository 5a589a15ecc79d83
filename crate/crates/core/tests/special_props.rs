//! Property tests for gamma-type functions and zonal polynomials, checked
//! against independent implementations and algebraic identities.

use proptest::prelude::*;
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;
use wishart_gpi::special::{
    ln_beta, ln_gamma, log_mvgamma, partitions_of, zonal_expansion_coefficients, zonal_polynomial, Partition,
    SpecialError,
};

fn spectrum(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..4.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ln_gamma_matches_statrs(x in 1e-3f64..150.0) {
        let (a, b) = (ln_gamma(x), statrs_ln_gamma(x));
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn ln_beta_is_gamma_ratio(a in 0.01f64..40.0, b in 0.01f64..40.0) {
        let want = statrs_ln_gamma(a) + statrs_ln_gamma(b) - statrs_ln_gamma(a + b);
        prop_assert!((ln_beta(a, b) - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn mvgamma_product_form(p in 1usize..=6, excess in 1e-3f64..20.0) {
        let nu = (p as f64 - 1.0) / 2.0 + excess;
        let mut want = (p * (p - 1)) as f64 / 4.0 * std::f64::consts::PI.ln();
        for i in 0..p {
            want += statrs_ln_gamma(nu - i as f64 / 2.0);
        }
        let got = log_mvgamma(p, nu).unwrap();
        prop_assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0));
    }

    #[test]
    fn mvgamma_recursion(p in 2usize..=6, excess in 1e-2f64..10.0) {
        // Γ_p(ν) = π^{(p−1)/2} Γ(ν) Γ_{p−1}(ν − 1/2)
        let nu = (p as f64 - 1.0) / 2.0 + excess;
        let lhs = log_mvgamma(p, nu).unwrap();
        let rhs = (p as f64 - 1.0) / 2.0 * std::f64::consts::PI.ln()
            + ln_gamma(nu)
            + log_mvgamma(p - 1, nu - 0.5).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn zonal_normalization(eigs in spectrum(5), k in 0u32..=6) {
        let total: f64 = partitions_of(k, eigs.len())
            .iter()
            .map(|kappa| zonal_polynomial(kappa, &eigs).unwrap())
            .sum();
        let want = eigs.iter().sum::<f64>().powi(k as i32);
        prop_assert!((total - want).abs() <= 1e-8 * want.max(1.0), "{total} vs {want}");
    }

    #[test]
    fn zonal_is_symmetric_and_homogeneous(eigs in spectrum(4), k in 1u32..=6, c in 0.2f64..3.0, rot in 0usize..4) {
        let mut rotated = eigs.clone();
        rotated.rotate_left(rot % eigs.len());
        let scaled: Vec<f64> = eigs.iter().map(|v| c * v).collect();
        for kappa in partitions_of(k, eigs.len()) {
            let base = zonal_polynomial(&kappa, &eigs).unwrap();
            let r = zonal_polynomial(&kappa, &rotated).unwrap();
            prop_assert!((base - r).abs() <= 1e-10 * base.abs().max(1e-300));
            let s = zonal_polynomial(&kappa, &scaled).unwrap();
            let want = c.powi(k as i32) * base;
            prop_assert!((s - want).abs() <= 1e-10 * want.abs().max(1e-300));
            prop_assert!(base > 0.0);
        }
    }

    #[test]
    fn zonal_refuses_too_many_parts(eigs in spectrum(3), extra in 1u32..=2) {
        let parts = vec![1; eigs.len() + extra as usize];
        let kappa = Partition::new(parts).unwrap();
        prop_assert!(matches!(zonal_polynomial(&kappa, &eigs), Err(SpecialError::Domain(_))));
    }

    #[test]
    fn univariate_mvgamma_is_ln_gamma(nu in 1e-3f64..30.0) {
        prop_assert!((log_mvgamma(1, nu).unwrap() - ln_gamma(nu)).abs() <= 1e-13 * ln_gamma(nu).abs().max(1.0));
    }

    #[test]
    fn expansion_reproduces_pair_sum_product(eigs in prop::collection::vec(0.05f64..4.0, 2..=5)) {
        let p = eigs.len();
        let expansion = zonal_expansion_coefficients(p).unwrap();
        let mut want = 1.0;
        for i in 0..p {
            for j in (i + 1)..p {
                want *= eigs[i] + eigs[j];
            }
        }
        let got = expansion.evaluate(&eigs);
        prop_assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }
}
