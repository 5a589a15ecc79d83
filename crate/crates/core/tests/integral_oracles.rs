//! The zonal closed form of the bound integral and the Jacobian of `X ↦ X²`
//! against direct quadrature and the Lyapunov-operator determinant.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wishart_gpi::gpi::{bound_integral, jacobian_j, GpiError, WindowRule};
use wishart_gpi::linalg::SymMat;
use wishart_gpi::oracles::{diagonal_bound_integral_2x2, integral_quadrature_1d, lyapunov_determinant};
use wishart_gpi::special::ln_beta;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn scalar_closed_form_matches_beta_and_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let alpha = rng.random_range(0.5..20.0);
        let nu = rng.random_range(0.02..0.98) * alpha / 2.0;
        let m = rng.random_range(0.2..5.0);
        let v = bound_integral(&SymMat::from_diagonal(&[m]), alpha, nu).unwrap();
        assert_eq!(v.rule, WindowRule::Beta);
        let beta_form = (1.0 - nu) * 2f64.ln() - 2.0 * nu * m.ln() + ln_beta(2.0 * nu, alpha - 2.0 * nu);
        assert!(rel(v.log_value.exp(), beta_form.exp()) < 1e-10, "α={alpha} ν={nu} m={m}");
        let q = integral_quadrature_1d(m, alpha, nu).unwrap();
        assert!(rel(v.value(), q) < 1e-8, "α={alpha} ν={nu} m={m}: {} vs {q}", v.value());
    }
}

#[test]
fn two_by_two_closed_form_matches_quadrature() {
    for &(m1, m2, alpha, nu) in &[
        (1.0, 1.0, 8.0, 1.2),
        (0.5, 0.5, 7.0, 0.8),
        (2.0, 2.0, 10.0, 2.5),
        (1.0, 2.0, 8.0, 1.2),
        (0.4, 1.5, 9.0, 0.9),
        (3.0, 0.7, 12.0, 2.0),
    ] {
        let m = SymMat::from_diagonal(&[m1, m2]);
        let closed = bound_integral(&m, alpha, nu).unwrap();
        assert_eq!(closed.rule, WindowRule::Stated);
        let quad = diagonal_bound_integral_2x2(m1, m2, alpha, nu).unwrap();
        assert!(rel(closed.value(), quad) < 1e-7, "M=diag({m1},{m2}) α={alpha} ν={nu}: {} vs {quad}", closed.value());
    }
}

#[test]
fn closed_form_depends_on_spectrum_only() {
    // I(O M Oᵀ) = I(M): substitute T ↦ O T Oᵀ
    let c = 0.6f64;
    let s = (1.0 - c * c).sqrt();
    let o = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.8, 1.9]));
    let rotated = SymMat::new(&o * d * o.transpose()).unwrap();
    let a = bound_integral(&rotated, 9.0, 1.1).unwrap();
    let b = bound_integral(&SymMat::from_diagonal(&[0.8, 1.9]), 9.0, 1.1).unwrap();
    assert!((a.log_value - b.log_value).abs() < 1e-10);
}

#[test]
fn closed_form_scaling_in_m() {
    // I(cM) = c^{−2pν} I(M)
    for (p, alpha, nu) in [(2usize, 9.0, 1.3), (3, 14.0, 1.6)] {
        let diag: Vec<f64> = (0..p).map(|i| 0.7 + 0.4 * i as f64).collect();
        let base = bound_integral(&SymMat::from_diagonal(&diag), alpha, nu).unwrap();
        let c = 2.5;
        let scaled: Vec<f64> = diag.iter().map(|v| c * v).collect();
        let s = bound_integral(&SymMat::from_diagonal(&scaled), alpha, nu).unwrap();
        let want = base.log_value - 2.0 * p as f64 * nu * c.ln();
        assert!((s.log_value - want).abs() < 1e-10 * want.abs().max(1.0));
    }
}

#[test]
fn window_edges_are_refused() {
    let m = SymMat::identity(3);
    // (p−1)/2 = 1 and α/2 − 3 = 4 for α = 14
    for nu in [1.0, 4.0, 0.5, 5.0] {
        assert!(matches!(bound_integral(&m, 14.0, nu), Err(GpiError::DivergentIntegral { p: 3, .. })));
    }
    assert!(bound_integral(&m, 14.0, 2.0).is_ok());
}

#[test]
fn jacobian_matches_lyapunov_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in 1..=4 {
        for _ in 0..100 {
            let g = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
            let x = SymMat::new(&g * g.transpose() + DMatrix::identity(p, p) * 0.05).unwrap();
            let j = jacobian_j(&x).unwrap();
            let l = lyapunov_determinant(&x);
            assert!(rel(j, l) < 1e-8, "p={p}: {j} vs {l}");
        }
    }
}
