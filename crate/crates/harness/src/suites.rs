//! Named verification suites built from the acceptance criteria.

use std::fmt;
use std::str::FromStr;

use crate::criteria::{self, CriterionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Closed forms and exact identities against independent oracles.
    Oracles,
    /// Monte Carlo checks of the proved inequalities.
    Proved,
    /// Explorers on open and conditional instances.
    Conjectures,
}

impl Suite {
    pub const ALL: [Self; 3] = [Self::Oracles, Self::Proved, Self::Conjectures];

    pub fn name(self) -> &'static str {
        match self {
            Self::Oracles => "oracles",
            Self::Proved => "proved",
            Self::Conjectures => "conjectures",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected oracles, proved or conjectures)"))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub results: Vec<CriterionResult>,
    /// Violations on open instances that survived a larger re-run.
    pub confirmed_violations: usize,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    /// 0 when every check passed; 2 for a failed check of a proved result
    /// or a confirmed violation of an open one; 1 for any other failure.
    pub fn exit_code(&self) -> i32 {
        match self.suite {
            Suite::Conjectures if self.confirmed_violations > 0 => 2,
            _ if self.passed() => 0,
            Suite::Proved => 2,
            _ => 1,
        }
    }
}

/// Runs every criterion of `suite`, printing one line per criterion as it
/// finishes.
pub fn verify_suite(suite: Suite) -> SuiteSummary {
    let mut results = Vec::new();
    let mut confirmed_violations = 0;
    let mut record = |r: CriterionResult| {
        println!("{r}");
        results.push(r);
    };
    match suite {
        Suite::Oracles => {
            for f in [
                criteria::c1_minor_moments,
                criteria::c2_laplace_transform,
                criteria::c3_lt_order,
                criteria::c6_integral_oracles,
                criteria::c12_determinism,
            ] {
                record(f());
            }
        }
        Suite::Proved => {
            for f in [
                criteria::c4_sandwich_lower,
                criteria::c5_sandwich_upper,
                criteria::c7_opposite,
                criteria::c8_bernstein,
                criteria::c9_eigen,
                criteria::c10_proved_cases,
                criteria::c11_elliptical,
            ] {
                record(f());
            }
        }
        Suite::Conjectures => {
            let (r, confirmed) = criteria::c10_open_cases();
            confirmed_violations = confirmed;
            record(r);
        }
    }
    SuiteSummary { suite, results, confirmed_violations }
}
