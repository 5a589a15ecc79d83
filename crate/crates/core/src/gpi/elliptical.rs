//! Elliptical reformulation: for `Z = √R · A U` with `U` uniform on the
//! sphere, the product-moment inequality for `Z` splits into a sphere part
//! and a radial ratio `Q_R(α) = ∏ E R^{α_i} / E R^{Σα_i}`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{estimate, MCEstimate, Quantity, CHUNK_SIZE};
use super::verdict::{verdict_from, Direction, InequalityVerdict};
use super::{GpiError, McSettings, Result};
use crate::special::ln_gamma;
use crate::wishart::{sample_sphere, RngStream};

/// A moment sum whose largest single draw carries more than this share is
/// treated as an empirically divergent moment.
pub const HEAVY_TAIL_SHARE: f64 = 0.2;

/// Law of the squared radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RadialLaw {
    /// `scale · χ²_d`; `scale = 1` gives the Gaussian law.
    ChiSquare { scale: f64 },
    PointMass { value: f64 },
    /// `exp(mu + sigma·N(0,1))`.
    LogNormal { mu: f64, sigma: f64 },
}

impl RadialLaw {
    /// The law of `k·R`.
    pub fn scaled(self, k: f64) -> Self {
        match self {
            Self::ChiSquare { scale } => Self::ChiSquare { scale: scale * k },
            Self::PointMass { value } => Self::PointMass { value: value * k },
            Self::LogNormal { mu, sigma } => Self::LogNormal { mu: mu + k.ln(), sigma },
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Self::ChiSquare { scale } if *scale == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::ChiSquare { scale } => scale > 0.0 && scale.is_finite(),
            Self::PointMass { value } => value > 0.0 && value.is_finite(),
            Self::LogNormal { mu, sigma } => mu.is_finite() && sigma >= 0.0 && sigma.is_finite(),
        };
        if ok { Ok(()) } else { Err(GpiError::Domain(format!("invalid radial law {self:?}"))) }
    }
}

/// `Q(α) = ∏Γ(α_i + d/2) / {Γ(α + d/2) Γ(d/2)^{d−1}}`, the radial ratio for
/// `R ~ χ²_d`.
pub fn elliptical_q(d: usize, alphas: &[f64]) -> Result<f64> {
    check_alphas(d, alphas)?;
    let h = d as f64 / 2.0;
    let total: f64 = alphas.iter().sum();
    let log_q = alphas.iter().map(|a| ln_gamma(a + h)).sum::<f64>()
        - ln_gamma(total + h)
        - (d as f64 - 1.0) * ln_gamma(h);
    Ok(log_q.exp())
}

/// `E|U_1|^{2a}` for `U` uniform on the sphere in `d` dimensions.
pub fn sphere_moment(d: usize, a: f64) -> f64 {
    let h = d as f64 / 2.0;
    (ln_gamma(h) + ln_gamma(a + 0.5) - ln_gamma(0.5) - ln_gamma(a + h)).exp()
}

fn check_alphas(d: usize, alphas: &[f64]) -> Result<()> {
    if d == 0 || alphas.len() != d {
        return Err(GpiError::Domain(format!("{} exponents for dimension {d}", alphas.len())));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return Err(GpiError::Domain(format!("exponent {a} must be finite and nonnegative")));
    }
    Ok(())
}

/// Running mean vector and co-moment matrix, merged in chunk order.
#[derive(Debug, Clone)]
struct VecMoments {
    n: u64,
    mean: Vec<f64>,
    comoment: Vec<f64>,
    max: Vec<f64>,
    sum: Vec<f64>,
}

impl VecMoments {
    fn new(k: usize) -> Self {
        Self { n: 0, mean: vec![0.0; k], comoment: vec![0.0; k * k], max: vec![0.0; k], sum: vec![0.0; k] }
    }

    fn push(&mut self, v: &[f64]) {
        let k = v.len();
        self.n += 1;
        let nf = self.n as f64;
        let delta: Vec<f64> = v.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl / nf;
        }
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += delta[i] * (v[j] - self.mean[j]);
            }
            self.max[i] = self.max[i].max(v[i]);
            self.sum[i] += v[i];
        }
    }

    fn merge(mut self, o: Self) -> Self {
        if o.n == 0 {
            return self;
        }
        if self.n == 0 {
            return o;
        }
        let k = self.mean.len();
        let n = self.n + o.n;
        let w = self.n as f64 * o.n as f64 / n as f64;
        let delta: Vec<f64> = o.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += o.comoment[i * k + j] + delta[i] * delta[j] * w;
            }
            self.mean[i] += delta[i] * o.n as f64 / n as f64;
            self.max[i] = self.max[i].max(o.max[i]);
            self.sum[i] += o.sum[i];
        }
        self.n = n;
        self
    }
}

/// `Q_R(α)`: exact for chi-square and point-mass radii, otherwise a Monte
/// Carlo ratio of moment estimates with a delta-method standard error.
pub fn radial_q(law: RadialLaw, d: usize, alphas: &[f64], n: u64, stream: RngStream) -> Result<Quantity> {
    check_alphas(d, alphas)?;
    law.validate()?;
    let (mu, sigma) = match law {
        RadialLaw::ChiSquare { .. } => return Ok(Quantity::exact(elliptical_q(d, alphas)?)),
        RadialLaw::PointMass { .. } => return Ok(Quantity::exact(1.0)),
        RadialLaw::LogNormal { mu, sigma } => (mu, sigma),
    };
    if n < 2 {
        return Err(GpiError::Domain(format!("need at least 2 draws, got {n}")));
    }
    let total: f64 = alphas.iter().sum();
    let mut powers = alphas.to_vec();
    powers.push(total);
    let k = powers.len();
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<VecMoments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.chunk_rng(c);
            let mut acc = VecMoments::new(k);
            let mut v = vec![0.0; k];
            for _ in 0..CHUNK_SIZE.min(n - c * CHUNK_SIZE) {
                let z: f64 = StandardNormal.sample(&mut rng);
                let log_r = mu + sigma * z;
                for (vi, a) in v.iter_mut().zip(&powers) {
                    *vi = (a * log_r).exp();
                }
                acc.push(&v);
            }
            acc
        })
        .collect();
    let m = parts.into_iter().fold(VecMoments::new(k), VecMoments::merge);
    for i in 0..k {
        if !m.sum[i].is_finite() || (m.sum[i] > 0.0 && m.max[i] / m.sum[i] > HEAVY_TAIL_SHARE) {
            return Err(GpiError::InfiniteMoment(format!(
                "E R^{} looks divergent: one draw carries {:.3} of the sum",
                powers[i],
                m.max[i] / m.sum[i]
            )));
        }
    }
    let q = m.mean[..k - 1].iter().product::<f64>() / m.mean[k - 1];
    // ∇ log Q = (1/m_1, …, 1/m_d, −1/m); Var Q ≈ Q² ∇ᵀ C ∇ / n
    let grad: Vec<f64> = (0..k).map(|i| if i < k - 1 { 1.0 / m.mean[i] } else { -1.0 / m.mean[i] }).collect();
    let nf = m.n as f64;
    let mut var = 0.0;
    for i in 0..k {
        for j in 0..k {
            var += grad[i] * grad[j] * m.comoment[i * k + j] / (nf - 1.0);
        }
    }
    let stderr = q * (var.max(0.0) / nf).sqrt();
    Ok(Quantity::Estimate(MCEstimate { mean: q, stderr, n: m.n }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalOutcome {
    pub verdict: InequalityVerdict,
    /// `Q_R ≤ 1 + 3·stderr`.
    pub q_at_most_one: bool,
    /// Left side over `Q_R`: for the Gaussian law this is the moment ratio
    /// `E∏|Z_i|^{2α_i} / ∏E|Z_i|^{2α_i}`.
    pub moment_ratio: f64,
}

/// Sphere side `E∏_i{|X_i|^{2α_i}/E|X_i|^{2α_i}}` with `X = AU` against
/// `Q_R`. Sub-streams: 0 for the sphere, 1 for radial moments.
pub fn elliptical_gpi_check(
    a: &DMatrix<f64>,
    alphas: &[f64],
    law: RadialLaw,
    settings: &McSettings,
    stream: RngStream,
) -> Result<EllipticalOutcome> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(GpiError::Domain("scale matrix must be square".into()));
    }
    for i in 0..d {
        if !(a[(i, i)] > 0.0) {
            return Err(GpiError::Domain("scale matrix needs a positive diagonal".into()));
        }
        if ((i + 1)..d).any(|j| a[(i, j)] != 0.0) {
            return Err(GpiError::Domain("scale matrix must be lower triangular".into()));
        }
    }
    check_alphas(d, alphas)?;
    let q = radial_q(law, d, alphas, settings.n, stream.child(1))?;
    let lhs = if alphas.iter().all(|&x| x == 0.0) {
        Quantity::exact(1.0)
    } else {
        // E|X_i|^{2α_i} = ‖a_i‖^{2α_i} E|U_1|^{2α_i}
        let log_norms: Vec<f64> = (0..d)
            .map(|i| {
                let row_norm = a.row(i).norm();
                2.0 * alphas[i] * row_norm.ln() + sphere_moment(d, alphas[i]).ln()
            })
            .collect();
        estimate(settings.n, stream.child(0), || vec![0.0; d], |x, rng| {
            let u = sample_sphere(d, rng);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = (0..=i).map(|j| a[(i, j)] * u[j]).sum();
            }
            let mut lg = 0.0;
            for i in 0..d {
                if alphas[i] != 0.0 {
                    lg += 2.0 * alphas[i] * x[i].abs().ln() - log_norms[i];
                }
            }
            lg.exp()
        })?
        .into()
    };
    let verdict = verdict_from(lhs, q, Direction::Geq, settings.z_threshold);
    Ok(EllipticalOutcome {
        q_at_most_one: q.value() <= 1.0 + 3.0 * q.stderr() + 1e-12,
        moment_ratio: lhs.value() / q.value(),
        verdict,
    })
}
