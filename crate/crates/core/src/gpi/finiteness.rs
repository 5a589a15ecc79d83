use serde::{Deserialize, Serialize};

use super::{GpiError, Result};

/// Sign attached to each determinant power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Self::Pos => 1.0,
            Self::Neg => -1.0,
        }
    }
}

/// Exponents `ν_i ≥ 0` with signs: block `i` contributes `|𝔛_ii|^{s_i ν_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentVector {
    values: Vec<f64>,
    signs: Vec<Sign>,
}

impl ExponentVector {
    pub fn new(values: Vec<f64>, signs: Vec<Sign>) -> Result<Self> {
        if values.len() != signs.len() {
            return Err(GpiError::Domain(format!(
                "{} exponents but {} signs",
                values.len(),
                signs.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(GpiError::Domain(format!("exponent {v} must be finite and nonnegative")));
        }
        Ok(Self { values, signs })
    }

    pub fn positive(values: Vec<f64>) -> Result<Self> {
        let signs = vec![Sign::Pos; values.len()];
        Self::new(values, signs)
    }

    pub fn negative(values: Vec<f64>) -> Result<Self> {
        let signs = vec![Sign::Neg; values.len()];
        Self::new(values, signs)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Signed power `s_i ν_i` of block `i`.
    pub fn power(&self, i: usize) -> f64 {
        self.signs[i].factor() * self.values[i]
    }

    pub fn all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Finiteness {
    Infinite,
    FiniteGuaranteed,
    Unknown,
}

/// Classifies `E ∏|𝔛_ii|^{s_i ν_i}`. Positive powers are always finite; a
/// negative power `ν_i > 0` on a `p_i × p_i` block makes the expectation
/// infinite once `ν_i ≥ α/2 − (p_i−1)/2`, and is known to be finite inside
/// `(p_i−1)/2 < ν_i < α/2 − (p_i−1)/2`. Zero exponents are ignored.
pub fn finiteness_classify(alpha: f64, sizes: &[usize], exps: &ExponentVector) -> Finiteness {
    assert_eq!(sizes.len(), exps.len(), "one exponent per block");
    let mut verdict = Finiteness::FiniteGuaranteed;
    for (i, &p) in sizes.iter().enumerate() {
        let nu = exps.values[i];
        if exps.signs[i] == Sign::Pos || nu == 0.0 {
            continue;
        }
        let half = (p as f64 - 1.0) / 2.0;
        if nu >= alpha / 2.0 - half {
            return Finiteness::Infinite;
        }
        if nu <= half {
            verdict = Finiteness::Unknown;
        }
    }
    verdict
}
