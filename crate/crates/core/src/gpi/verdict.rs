use serde::{Deserialize, Serialize};

use super::estimate::Quantity;

/// Default two-sided z threshold.
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;

/// Tolerance for comparisons in which both sides are exact.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `lhs ≥ rhs`
    #[serde(rename = ">=")]
    Geq,
    /// `lhs ≤ rhs`
    #[serde(rename = "<=")]
    Leq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Holds => "Holds",
            Self::Violated => "Violated",
            Self::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub direction: Direction,
    /// Oriented margin: `lhs − rhs` for `≥`, `rhs − lhs` for `≤`.
    pub margin: f64,
    /// Margin in pooled standard errors; `±∞` when both sides are exact.
    pub z: f64,
    pub verdict: Verdict,
    pub z_threshold: f64,
}

impl InequalityVerdict {
    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// Classifies `lhs (direction) rhs` by the pooled z-score
/// `margin / √(se_l² + se_r²)`.
pub fn verdict_from(lhs: Quantity, rhs: Quantity, direction: Direction, z_threshold: f64) -> InequalityVerdict {
    let (l, r) = (lhs.value(), rhs.value());
    let margin = match direction {
        Direction::Geq => l - r,
        Direction::Leq => r - l,
    };
    let se = lhs.stderr().hypot(rhs.stderr());
    let (z, verdict) = if se == 0.0 {
        let tol = EXACT_TOL * 1f64.max(l.abs()).max(r.abs());
        if margin >= -tol {
            (f64::INFINITY, Verdict::Holds)
        } else {
            (f64::NEG_INFINITY, Verdict::Violated)
        }
    } else {
        let z = margin / se;
        let v = if z >= z_threshold {
            Verdict::Holds
        } else if z <= -z_threshold {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        (z, v)
    };
    InequalityVerdict { lhs, rhs, direction, margin, z, verdict, z_threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpi::MCEstimate;

    fn est(mean: f64, stderr: f64) -> Quantity {
        Quantity::Estimate(MCEstimate { mean, stderr, n: 1000 })
    }

    #[test]
    fn examples() {
        let v = verdict_from(Quantity::exact(1.0), Quantity::exact(1.0), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Holds);
        assert_eq!(v.z, f64::INFINITY);

        let v = verdict_from(est(1.0, 0.01), est(0.9, 0.01), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Holds);
        assert!((v.z - 7.0710678118654755).abs() < 1e-9);

        let v = verdict_from(est(1.0, 0.05), est(0.98, 0.05), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert!((v.z - 0.28284271247461906).abs() < 1e-9);
    }

    #[test]
    fn orientation() {
        let v = verdict_from(est(0.9, 0.01), est(1.0, 0.01), Direction::Leq, 3.0);
        assert_eq!(v.verdict, Verdict::Holds);
        let v = verdict_from(est(0.9, 0.01), est(1.0, 0.01), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Violated);
        let v = verdict_from(Quantity::exact(0.5), Quantity::exact(1.0), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Violated);
        assert_eq!(v.z, f64::NEG_INFINITY);
        let v = verdict_from(Quantity::exact(1.0 - 1e-12), Quantity::exact(1.0), Direction::Geq, 3.0);
        assert_eq!(v.verdict, Verdict::Holds);
    }
}
