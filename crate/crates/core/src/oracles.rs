//! Independent numerical oracles used to cross-check closed forms: direct
//! quadrature of the bound integral and the Lyapunov-operator determinant.
//!
//! Both quadratures are double-exponential trapezoid rules (exp-sinh on the
//! half line, tanh-sinh on the unit interval), evaluated in log space and
//! refined by halving the step until successive values agree.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::DMatrix;

use crate::gpi::{GpiError, Result, WindowRule};
use crate::linalg::SymMat;

const REL_TOL: f64 = 1e-13;
const MAX_ABS_U: f64 = 12.0;

fn softplus(x: f64) -> f64 {
    if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() }
}

/// Trapezoid sum of `exp(log_term(u))` over the real line with step `h`,
/// walking outward from `u = 0` until terms become negligible.
fn trapezoid<F: Fn(f64) -> f64>(log_term: &F, h: f64) -> f64 {
    let mut sum = log_term(0.0).exp();
    for sign in [1.0, -1.0] {
        let mut k = 1.0;
        loop {
            let u = sign * k * h;
            let t = log_term(u).exp();
            sum += t;
            if (t <= 1e-18 * sum && k * h > 2.0) || u.abs() > MAX_ABS_U {
                break;
            }
            k += 1.0;
        }
    }
    sum * h
}

fn refine<F: Fn(f64) -> f64>(log_term: F) -> f64 {
    let mut h = 0.5;
    let mut prev = trapezoid(&log_term, h);
    for _ in 0..12 {
        h /= 2.0;
        let next = trapezoid(&log_term, h);
        if (next - prev).abs() <= REL_TOL * next.abs() {
            return next;
        }
        prev = next;
    }
    prev
}

/// `∫₀^∞ g(t) dt`, given `log_g(ln t) = ln g(t)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(log_g: F) -> f64 {
    refine(|u: f64| {
        let log_t = FRAC_PI_2 * u.sinh();
        log_g(log_t) + log_t + (FRAC_PI_2 * u.cosh()).ln()
    })
}

/// `∫₀¹ g(s) ds`, given `log_g(ln s, ln(1−s)) = ln g(s)`.
pub fn integrate_unit<F: Fn(f64, f64) -> f64>(log_g: F) -> f64 {
    refine(|u: f64| {
        let w = PI * u.sinh();
        let (log_s, log_1ms) = (-softplus(-w), -softplus(w));
        log_g(log_s, log_1ms) + log_s + log_1ms + (PI * u.cosh()).ln()
    })
}

/// Direct quadrature of `∫₀^∞ t^{ν−1} (1 + √2 m √t)^{−α} dt`, the scalar
/// bound integral; finite iff `0 < ν < α/2`.
pub fn integral_quadrature_1d(m: f64, alpha: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < alpha / 2.0) {
        return Err(GpiError::DivergentIntegral { p: 1, alpha, nu, lo: 0.0, hi: alpha / 2.0, rule: WindowRule::Beta });
    }
    if !(m > 0.0) {
        return Err(GpiError::Domain(format!("scale m = {m} must be positive")));
    }
    let c = (SQRT_2 * m).ln();
    Ok(integrate_half_line(|log_t| (nu - 1.0) * log_t - alpha * softplus(c + log_t / 2.0)))
}

fn log_sum_exp3(a: f64, b: f64, c: f64) -> f64 {
    let top = a.max(b).max(c);
    top + ((a - top).exp() + (b - top).exp() + (c - top).exp()).ln()
}

/// Direct quadrature of the 2×2 bound integral at `M = diag(m₁, m₂)`,
/// written over `X = T^{1/2} = R(θ) diag(l₁, l₂) R(θ)ᵀ`:
/// `∫₀^π dθ ∫_{l₁>l₂>0} (l₁−l₂) · 4 (l₁l₂)^{2ν−2} (l₁+l₂) |I + √2 X M|^{−α} dl`.
/// The angle uses a periodic trapezoid rule, `l₁` an exp-sinh rule and
/// `s = l₂/l₁` a tanh-sinh rule.
pub fn diagonal_bound_integral_2x2(m1: f64, m2: f64, alpha: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.5 && nu < (alpha - 1.0) / 2.0) {
        return Err(GpiError::Domain(format!("quadrature needs 1/2 < ν < (α−1)/2, got ν = {nu}, α = {alpha}")));
    }
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(GpiError::Domain("M must be positive definite".into()));
    }
    let at_angle = |theta: f64| {
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        integrate_unit(|log_s, log_1ms| {
            let s = log_s.exp();
            // |I + √2 X M| = 1 + √2 l₁ (m₁(c² + s·sin²) + m₂(sin² + s·c²)) + 2 m₁ m₂ s l₁²
            let lin = (SQRT_2 * (m1 * (c2 + s * s2) + m2 * (s2 + s * c2))).ln();
            let quad = (2.0 * m1 * m2).ln() + log_s;
            let inner = integrate_half_line(|log_l| {
                (4.0 * nu - 1.0) * log_l - alpha * log_sum_exp3(0.0, lin + log_l, quad + 2.0 * log_l)
            });
            log_1ms + s.ln_1p() + (2.0 * nu - 2.0) * log_s + inner.ln()
        })
    };
    if m1 == m2 {
        return Ok(4.0 * PI * at_angle(0.0));
    }
    // the integrand is π-periodic and even in θ, so the trapezoid rule on
    // [0, π/2] converges geometrically
    let trapezoid = |n: usize| {
        let h = FRAC_PI_2 / n as f64;
        let ends = (at_angle(0.0) + at_angle(FRAC_PI_2)) / 2.0;
        h * (ends + (1..n).map(|j| at_angle(j as f64 * h)).sum::<f64>())
    };
    let mut n = 4;
    let mut prev = trapezoid(n);
    loop {
        n *= 2;
        let next = trapezoid(n);
        if (next - prev).abs() <= 1e-12 * next.abs() || n >= 256 {
            return Ok(4.0 * 2.0 * next);
        }
        prev = next;
    }
}

/// `det` of the Lyapunov operator `H ↦ XH + HX` on symmetric matrices, in
/// the basis `{E_ii} ∪ {E_ij + E_ji : i < j}`.
pub fn lyapunov_determinant(x: &SymMat) -> f64 {
    let p = x.dim();
    let mut basis = Vec::with_capacity(p * (p + 1) / 2);
    for i in 0..p {
        basis.push((i, i));
    }
    for i in 0..p {
        for j in (i + 1)..p {
            basis.push((i, j));
        }
    }
    let n = basis.len();
    let x = x.matrix();
    let mut op = DMatrix::zeros(n, n);
    for (col, &(i, j)) in basis.iter().enumerate() {
        let mut h = DMatrix::zeros(p, p);
        h[(i, j)] = 1.0;
        h[(j, i)] = 1.0;
        let y = x * &h + &h * x;
        // coordinates of a symmetric Y: Y_ii on E_ii, Y_ij on E_ij + E_ji
        for (row, &(a, b)) in basis.iter().enumerate() {
            op[(row, col)] = y[(a, b)];
        }
    }
    op.determinant()
}
