//! Product-moment inequalities for disjoint principal minors of Wishart
//! matrices.
//!
//! Every check returns an [`InequalityVerdict`] comparing two sides, each
//! either exact (closed form) or a Monte Carlo estimate. Estimates are
//! produced by [`estimate`] over fixed-size chunks of an [`RngStream`], so a
//! verdict is bit-reproducible for any thread count; the two sides of one
//! verdict always come from distinct sub-streams.
//!
//! [`RngStream`]: crate::wishart::RngStream

mod checks;
mod elliptical;
mod estimate;
mod finiteness;
mod integral;
mod verdict;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::special::SpecialError;
use crate::wishart::WishartError;

pub use checks::{
    bernstein_pair_check, eigen_gpi_check, eigen_gpi_check_with, gpi_sandwich, lt_order_gap,
    mc_product_moment, minor_correlation_check, opposite_gpi_lower, opposite_gpi_upper,
    positive_power_check, require_finite, upper_bound, BernsteinSpec, CorrelationOutcome,
    SandwichOutcome, UpperBound,
};
pub use elliptical::{
    elliptical_gpi_check, elliptical_q, radial_q, sphere_moment, EllipticalOutcome, RadialLaw,
    HEAVY_TAIL_SHARE,
};
pub use estimate::{accumulate, bernoulli_estimate, estimate, MCEstimate, Moments, Quantity, CHUNK_SIZE};
pub use finiteness::{finiteness_classify, ExponentVector, Finiteness, Sign};
pub use integral::{bound_integral, convergence_window, jacobian_j, IntegralValue, WindowRule};
pub use verdict::{verdict_from, Direction, InequalityVerdict, Verdict, DEFAULT_Z_THRESHOLD, EXACT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpiError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("infinite moment: {0}")]
    InfiniteMoment(String),
    #[error("finiteness of the expectation is {0:?}, not guaranteed; pass the override to proceed")]
    FinitenessNotGuaranteed(Finiteness),
    #[error("all draws were identical; the standard error is meaningless")]
    DegenerateVariance,
    #[error("estimated event probability {0} is degenerate; choose less extreme thresholds")]
    DegenerateEvent(f64),
    #[error("bound integral diverges for p = {p}, α = {alpha}, ν = {nu}: needs {lo} < ν < {hi} ({rule:?} rule)")]
    DivergentIntegral { p: usize, alpha: f64, nu: f64, lo: f64, hi: f64, rule: WindowRule },
    #[error("upper bound unavailable: {0}")]
    UpperBoundUnavailable(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Wishart(#[from] WishartError),
}

pub type Result<T, E = GpiError> = std::result::Result<T, E>;

/// Monte Carlo settings shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n: u64,
    pub z_threshold: f64,
    /// Allow negative powers whose finiteness is not guaranteed.
    pub override_finiteness: bool,
}

impl McSettings {
    pub fn new(n: u64) -> Self {
        Self { n, z_threshold: DEFAULT_Z_THRESHOLD, override_finiteness: false }
    }
}

/// The inequality families the engine can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Sandwich,
    PositivePowers,
    MinorCorrelation,
    OppLower,
    OppUpper,
    Bernstein,
    Eigen,
    Elliptical,
    LtOrder,
}

/// Whether an instance is covered by a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    /// Holds provided the positive-power product inequality holds.
    Conditional,
    Open,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Self::Proved => "proved",
            Self::Conditional => "conditional",
            Self::Open => "open",
        }
    }
}

impl InequalityKind {
    pub const ALL: [Self; 9] = [
        Self::Sandwich,
        Self::PositivePowers,
        Self::MinorCorrelation,
        Self::OppLower,
        Self::OppUpper,
        Self::Bernstein,
        Self::Eigen,
        Self::Elliptical,
        Self::LtOrder,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Sandwich => "sandwich",
            Self::PositivePowers => "positive_powers",
            Self::MinorCorrelation => "minor_correlation",
            Self::OppLower => "opp_lower",
            Self::OppUpper => "opp_upper",
            Self::Bernstein => "bernstein",
            Self::Eigen => "eigen",
            Self::Elliptical => "elliptical",
            Self::LtOrder => "lt_order",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }

    /// The inequality being checked, written out; stored with every verdict.
    pub fn reference(self) -> &'static str {
        match self {
            Self::Sandwich => {
                "E∏_{i<k}|X_ii|^{-ν_i} · E∏_{i≥k}|X_ii|^{-ν_i} ≤ E∏_i|X_ii|^{-ν_i} ≤ ∏_i 2^{p_i α/2} I_{p_i}(M_ii)/Γ_{p_i}(ν_i), Σ = MMᵀ block Cholesky"
            }
            Self::PositivePowers => "E∏_i|X_ii|^{ν_i} ≥ E∏_{i<k}|X_ii|^{ν_i} · E∏_{i≥k}|X_ii|^{ν_i}, ν_i ≥ 0",
            Self::MinorCorrelation => {
                "P(∩_i{|X_ii| ≤ t_i}) ≥ P(∩_{i<k}{|X_ii| ≤ t_i}) · P(∩_{i≥k}{|X_ii| ≤ t_i})"
            }
            Self::OppLower => {
                "E(|X_11|^{-ν_1}∏_{i≥2}|X_ii|^{ν_i}) ≥ ∏_{i≥2}|I − P_1iᵀP_1i|^{ν_i} · E|X_11|^{-ν_1} · ∏_{i≥2}E|X_ii|^{ν_i}, P_1i = Σ_11^{-1/2}Σ_1iΣ_ii^{-1/2}"
            }
            Self::OppUpper => {
                "E(∏_{i<d}|X_ii|^{-ν_i} · |X_dd|^{ν_d}) ≤ E∏_{i<d}|X_ii|^{-ν_i} · E|X_dd|^{ν_d}"
            }
            Self::Bernstein => "E{f(X_11) g(X_22)} ≥ E f(X*_11) · E g(X*_22) for Bernstein f, g with zero linear part",
            Self::Eigen => "E∏_i Λ_i^{ν_i} ≥ E∏_{i<k}Λ_i^{ν_i} · E∏_{i≥k}Λ_i^{ν_i}, Λ descending eigenvalues",
            Self::Elliptical => "E∏_i{|X_i|^{2α_i}/E|X_i|^{2α_i}} ≥ Q_R(α) = ∏_i E R^{α_i} / E R^{Σα_i}, X = AU",
            Self::LtOrder => "E etr(−T ⊕ X_ii) ≥ E etr(−T ⊕ X*_ii): |I + 2TΣ|^{-α/2} ≥ |I + 2TΣ*|^{-α/2}",
        }
    }

    /// Proof status of an instance with the given block sizes. For the
    /// elliptical family, `sizes = [d]` and `gaussian` tells whether the
    /// radial law is chi-square with `d` degrees of freedom.
    pub fn status(self, sizes: &[usize], gaussian: bool) -> Status {
        let d = sizes.len();
        match self {
            Self::Sandwich | Self::OppUpper | Self::Bernstein | Self::Eigen | Self::LtOrder => Status::Proved,
            Self::OppLower if d <= 2 => Status::Proved,
            Self::OppLower => Status::Conditional,
            Self::PositivePowers if d <= 2 => Status::Proved,
            Self::MinorCorrelation if sizes.iter().all(|&p| p == 1) => Status::Proved,
            Self::Elliptical if gaussian && sizes.first().is_some_and(|&d| d <= 2) => Status::Proved,
            Self::PositivePowers | Self::MinorCorrelation | Self::Elliptical => Status::Open,
        }
    }
}
