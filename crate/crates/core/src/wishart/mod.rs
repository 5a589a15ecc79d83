//! The Wishart law `𝒲_p(α, Σ)` for real `α > p − 1`: Bartlett sampling,
//! density, Laplace transform and closed-form principal-minor moments, plus
//! the random instance generators used by sweeps.

mod rng;

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use thiserror::Error;

use crate::linalg::{
    is_positive_definite, log_det_pd, BlockSpec, LinalgError, SymMat, DEFAULT_PD_TOL,
};
use crate::special::{log_mvgamma, SpecialError};

pub use rng::RngStream;

/// Jitter added to `G Gᵀ` by [`random_correlation`] unless configured otherwise.
pub const DEFAULT_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WishartError {
    #[error("degrees of freedom α = {alpha} must exceed p − 1 = {}", .p - 1)]
    DegreesOfFreedom { alpha: f64, p: usize },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

pub type Result<T, E = WishartError> = std::result::Result<T, E>;

/// `𝒲_p(α, Σ)` together with a block partition of its dimension.
#[derive(Debug, Clone)]
pub struct WishartModel {
    alpha: f64,
    sigma: SymMat,
    spec: BlockSpec,
    /// Lower Cholesky factor of Σ.
    chol: DMatrix<f64>,
}

impl WishartModel {
    pub fn new(alpha: f64, sigma: SymMat, spec: BlockSpec) -> Result<Self> {
        let p = sigma.dim();
        if spec.total() != p {
            return Err(LinalgError::DimensionMismatch { expected: p, got: spec.total() }.into());
        }
        if !(alpha > p as f64 - 1.0) || !alpha.is_finite() {
            return Err(WishartError::DegreesOfFreedom { alpha, p });
        }
        if !is_positive_definite(&sigma, DEFAULT_PD_TOL) {
            return Err(LinalgError::NotPositiveDefinite.into());
        }
        let chol = sigma.matrix().clone().cholesky().ok_or(LinalgError::NotPositiveDefinite)?.l();
        Ok(Self { alpha, sigma, spec, chol })
    }

    pub fn p(&self) -> usize {
        self.sigma.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> &SymMat {
        &self.sigma
    }

    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    /// The same law with a different block partition.
    pub fn with_spec(&self, spec: BlockSpec) -> Result<Self> {
        Self::new(self.alpha, self.sigma.clone(), spec)
    }

    /// The marginal law `𝒲_{p_i}(α, Σ_ii)` of diagonal block `i`.
    pub fn marginal(&self, i: usize) -> Result<Self> {
        let r = self.block_range(i)?;
        Self::new(self.alpha, self.sigma.principal(r.clone()), BlockSpec::single(r.len()))
    }

    fn block_range(&self, i: usize) -> Result<std::ops::Range<usize>> {
        if i >= self.spec.d() {
            return Err(LinalgError::IndexOutOfRange { i, j: i, d: self.spec.d() }.into());
        }
        Ok(self.spec.range(i))
    }

    /// Bulk sampler with its own scratch buffers.
    pub fn sampler(&self) -> Sampler<'_> {
        let p = self.p();
        let chi = (0..p)
            .map(|i| Gamma::new((self.alpha - i as f64) / 2.0, 2.0).expect("α > p − 1"))
            .collect();
        Sampler {
            l: &self.chol,
            chi,
            b: DMatrix::zeros(p, p),
            c: DMatrix::zeros(p, p),
            x: DMatrix::zeros(p, p),
        }
    }

    /// One draw from the start of `stream`.
    pub fn sample(&self, stream: &RngStream) -> SymMat {
        let mut rng = stream.rng();
        SymMat::new(self.sampler().draw(&mut rng).clone()).expect("draw is symmetric")
    }

    /// `count` consecutive draws from `stream`.
    pub fn sample_n(&self, stream: &RngStream, count: usize) -> Vec<SymMat> {
        let mut rng = stream.rng();
        let mut s = self.sampler();
        (0..count).map(|_| SymMat::new(s.draw(&mut rng).clone()).expect("draw is symmetric")).collect()
    }

    /// `ln f_{α,Σ}(X)`.
    pub fn log_density(&self, x: &SymMat) -> Result<f64> {
        let p = self.p();
        if x.dim() != p {
            return Err(LinalgError::DimensionMismatch { expected: p, got: x.dim() }.into());
        }
        if !is_positive_definite(x, DEFAULT_PD_TOL) {
            return Err(WishartError::Domain("density is only defined on positive definite X".into()));
        }
        let pf = p as f64;
        let half = self.alpha / 2.0;
        let ld_x = x.log_det()?;
        let ld_s = self.sigma.log_det()?;
        let sinv = self.sigma.inverse()?;
        let tr = sinv.matrix().component_mul(x.matrix()).sum();
        Ok((half - (pf + 1.0) / 2.0) * ld_x - tr / 2.0
            - half * pf * LN_2
            - half * ld_s
            - log_mvgamma(p, half)?)
    }

    /// `ln |I + 2TΣ|`, requiring `T + Σ⁻¹/2` positive definite.
    pub fn log_det_i_plus_2ts(&self, t: &SymMat) -> Result<f64> {
        let p = self.p();
        if t.dim() != p {
            return Err(LinalgError::DimensionMismatch { expected: p, got: t.dim() }.into());
        }
        // |I + 2TΣ| = |I + 2 Lᵀ T L| with Σ = L Lᵀ; the latter is symmetric.
        let inner = DMatrix::identity(p, p) + (self.chol.transpose() * t.matrix() * &self.chol) * 2.0;
        let inner = SymMat::new(inner)?;
        if !is_positive_definite(&inner, DEFAULT_PD_TOL) {
            return Err(WishartError::Domain("T + Σ⁻¹/2 must be positive definite".into()));
        }
        Ok(inner.log_det()?)
    }

    /// `E etr(−T𝔛) = |I + 2TΣ|^{−α/2}`.
    pub fn laplace_transform(&self, t: &SymMat) -> Result<f64> {
        Ok((-self.alpha / 2.0 * self.log_det_i_plus_2ts(t)?).exp())
    }

    /// `ln E|𝔛_ii|^ν`.
    pub fn log_minor_moment(&self, i: usize, nu: f64) -> Result<f64> {
        let r = self.block_range(i)?;
        let ld = log_det_pd(&self.sigma.principal(r.clone()).into_inner())?;
        log_minor_moment_closed(r.len(), self.alpha, ld, nu)
    }

    /// `E|𝔛_ii|^ν = 2^{p_i ν} |Σ_ii|^ν Γ_{p_i}(α/2 + ν) / Γ_{p_i}(α/2)`.
    pub fn minor_moment(&self, i: usize, nu: f64) -> Result<f64> {
        Ok(self.log_minor_moment(i, nu)?.exp())
    }

    /// `ln E|𝔛|^ν` for the full matrix regardless of the block partition.
    pub fn log_det_moment(&self, nu: f64) -> Result<f64> {
        log_minor_moment_closed(self.p(), self.alpha, self.sigma.log_det()?, nu)
    }
}

/// `ln E|W|^ν` for `W ~ 𝒲_m(α, S)` given `ln |S|`; requires
/// `ν > −α/2 + (m − 1)/2`.
pub fn log_minor_moment_closed(m: usize, alpha: f64, log_det_s: f64, nu: f64) -> Result<f64> {
    let edge = -alpha / 2.0 + (m as f64 - 1.0) / 2.0;
    if !(nu > edge) {
        return Err(WishartError::Domain(format!(
            "moment of order {nu} needs ν > {edge} for a {m}×{m} block with α = {alpha}"
        )));
    }
    if nu == 0.0 {
        return Ok(0.0);
    }
    let half = alpha / 2.0;
    Ok(m as f64 * nu * LN_2 + nu * log_det_s + log_mvgamma(m, half + nu)? - log_mvgamma(m, half)?)
}

/// Bartlett sampler: `X = L B Bᵀ Lᵀ` with `B` lower triangular,
/// `B_ii = √χ²(α − i + 1)` (1-based `i`) and standard normal entries below
/// the diagonal.
pub struct Sampler<'a> {
    l: &'a DMatrix<f64>,
    chi: Vec<Gamma<f64>>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    x: DMatrix<f64>,
}

impl Sampler<'_> {
    /// Next draw; the returned matrix is overwritten by the following call.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &DMatrix<f64> {
        let p = self.b.nrows();
        for i in 0..p {
            for j in 0..i {
                self.b[(i, j)] = StandardNormal.sample(rng);
            }
            self.b[(i, i)] = self.chi[i].sample(rng).sqrt();
        }
        // C = L B, both lower triangular
        for i in 0..p {
            for j in 0..=i {
                let mut v = 0.0;
                for k in j..=i {
                    v += self.l[(i, k)] * self.b[(k, j)];
                }
                self.c[(i, j)] = v;
            }
        }
        // X = C Cᵀ
        for i in 0..p {
            for j in 0..=i {
                let mut v = 0.0;
                for k in 0..=j {
                    v += self.c[(i, k)] * self.c[(j, k)];
                }
                self.x[(i, j)] = v;
                self.x[(j, i)] = v;
            }
        }
        &self.x
    }
}

/// Random correlation matrix: `G Gᵀ + jitter·I` normalized to unit
/// diagonal, where `G` is `p × (p+2)` standard normal.
pub fn random_correlation<R: Rng + ?Sized>(p: usize, rng: &mut R, jitter: f64) -> SymMat {
    assert!(p >= 1, "dimension must be positive");
    let g = DMatrix::<f64>::from_fn(p, p + 2, |_, _| StandardNormal.sample(rng));
    let w = &g * g.transpose() + DMatrix::identity(p, p) * jitter;
    let d: Vec<f64> = (0..p).map(|i| w[(i, i)].sqrt()).collect();
    let r = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { w[(i, j)] / (d[i] * d[j]) });
    SymMat::new(r).expect("normalized Gram matrix is symmetric")
}

/// Uniform point on the unit sphere in `d` dimensions.
pub fn sample_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|v| v / norm).collect();
        }
    }
}
