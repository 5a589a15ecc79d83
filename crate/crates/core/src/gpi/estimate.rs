use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GpiError, Result};
use crate::wishart::RngStream;

/// Draws per Monte Carlo chunk. Chunk boundaries are part of the
/// reproducibility contract: changing this changes every estimate.
pub const CHUNK_SIZE: u64 = 4096;

/// Monte Carlo mean with its standard error (`sd / √n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// One side of an inequality: either known exactly or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    Exact { value: f64 },
    Estimate(MCEstimate),
}

impl Quantity {
    pub fn exact(value: f64) -> Self {
        Self::Exact { value }
    }

    pub fn value(&self) -> f64 {
        match self {
            Self::Exact { value } => *value,
            Self::Estimate(e) => e.mean,
        }
    }

    pub fn stderr(&self) -> f64 {
        match self {
            Self::Exact { .. } => 0.0,
            Self::Estimate(e) => e.stderr,
        }
    }

    /// Sample count, `0` for exact values.
    pub fn n(&self) -> u64 {
        match self {
            Self::Exact { .. } => 0,
            Self::Estimate(e) => e.n,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact { .. })
    }

    /// Product of two independent quantities; the variance of a product of
    /// independent estimates is `b²σa² + a²σb² + σa²σb²`.
    pub fn product(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Exact { value: a }, Self::Exact { value: b }) => Self::exact(a * b),
            _ => {
                let (a, b) = (self.value(), other.value());
                let (sa, sb) = (self.stderr(), other.stderr());
                let var = b * b * sa * sa + a * a * sb * sb + sa * sa * sb * sb;
                let n = [self.n(), other.n()].into_iter().filter(|&n| n > 0).min().unwrap_or(0);
                Self::Estimate(MCEstimate { mean: a * b, stderr: var.sqrt(), n })
            }
        }
    }

    /// Scale by a known constant.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Self::Exact { value } => Self::exact(value * c),
            Self::Estimate(e) => Self::Estimate(MCEstimate { mean: e.mean * c, stderr: e.stderr * c.abs(), n: e.n }),
        }
    }
}

impl From<MCEstimate> for Quantity {
    fn from(e: MCEstimate) -> Self {
        Self::Estimate(e)
    }
}

/// Streaming moments of one chunk, merged pairwise in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
    /// Largest `|x|` seen and `Σ|x|`, for heavy-tail diagnostics.
    pub max_abs: f64,
    pub sum_abs: f64,
    pub non_finite: bool,
}

impl Moments {
    fn push(&mut self, x: f64) {
        if !x.is_finite() {
            self.non_finite = true;
            return;
        }
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.max_abs = self.max_abs.max(x.abs());
        self.sum_abs += x.abs();
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return Self { non_finite: self.non_finite || other.non_finite, ..other };
        }
        if other.n == 0 {
            return Self { non_finite: self.non_finite || other.non_finite, ..self };
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        Self {
            n,
            mean,
            m2,
            max_abs: self.max_abs.max(other.max_abs),
            sum_abs: self.sum_abs + other.sum_abs,
            non_finite: self.non_finite || other.non_finite,
        }
    }

    pub fn estimate(&self) -> MCEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        MCEstimate { mean: self.mean, stderr: (var.max(0.0) / self.n as f64).sqrt(), n: self.n }
    }

    /// Share of `Σ|x|` carried by the single largest sample.
    pub fn max_share(&self) -> f64 {
        if self.sum_abs > 0.0 { self.max_abs / self.sum_abs } else { 0.0 }
    }
}

/// Runs `n` draws of `f` over `stream` in fixed chunks on the current rayon
/// pool and merges the chunk moments in chunk order. The result is
/// bit-identical for any number of worker threads.
///
/// `init` builds per-chunk state (samplers, scratch buffers).
pub fn accumulate<S, I, F>(n: u64, stream: RngStream, init: I, f: F) -> Moments
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.chunk_rng(c);
            let mut state = init();
            let count = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(f(&mut state, &mut rng));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

/// [`accumulate`] followed by the finiteness check every caller needs.
pub fn estimate<S, I, F>(n: u64, stream: RngStream, init: I, f: F) -> Result<MCEstimate>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ChaCha8Rng) -> f64 + Sync,
{
    if n < 2 {
        return Err(GpiError::Domain(format!("need at least 2 draws, got {n}")));
    }
    let m = accumulate(n, stream, init, f);
    if m.non_finite {
        return Err(GpiError::InfiniteMoment("a draw produced a non-finite value".into()));
    }
    Ok(m.estimate())
}

/// Bernoulli mean with the binomial standard error `√(p̂(1−p̂)/n)`.
pub fn bernoulli_estimate<S, I, F>(n: u64, stream: RngStream, init: I, f: F) -> Result<MCEstimate>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut ChaCha8Rng) -> bool + Sync,
{
    if n < 2 {
        return Err(GpiError::Domain(format!("need at least 2 draws, got {n}")));
    }
    let m = accumulate(n, stream, init, |s, r| if f(s, r) { 1.0 } else { 0.0 });
    let p = m.mean;
    if p <= 0.0 || p >= 1.0 {
        return Err(GpiError::DegenerateEvent(p));
    }
    Ok(MCEstimate { mean: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), n })
}
