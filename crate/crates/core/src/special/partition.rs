use std::fmt;

use super::{Result, SpecialError};

/// Integer partition `k₁ ≥ k₂ ≥ … ≥ 0`, stored without trailing zeros so that
/// `(2, 1, 0)` and `(2, 1)` compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SpecialError::NotAPartition(parts));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Nonzero parts.
    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// `k_{j+1}` (0-based `j`), zero past the last nonzero part.
    pub fn part(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `Σ_i k_i (k_i − i)` with 1-based `i`.
    pub(crate) fn rho(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &k)| k as f64 * (k as f64 - (i + 1) as f64))
            .sum()
    }

    /// Dominance order: `self ≤ other` iff every partial sum of `self` is at
    /// most the matching partial sum of `other` (equal weights assumed).
    pub(crate) fn dominated_by(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        let (mut a, mut b) = (0u32, 0u32);
        for j in 0..n {
            a += self.part(j);
            b += other.part(j);
            if a > b {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` into at most `max_parts` parts, in reverse
/// lexicographic order (`(3), (2,1), (1,1,1)`).
pub fn partitions_of(k: u32, max_parts: usize) -> Vec<Partition> {
    fn rec(rest: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            rec(rest - first, first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, max_parts, &mut Vec::new(), &mut out);
    out
}
