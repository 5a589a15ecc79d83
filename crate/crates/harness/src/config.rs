//! Experiment configuration: one versioned JSON document per sweep, checked
//! in full before any sampling starts.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "experiment_id": "sandwich-scalar",
//!   "inequality_id": "sandwich",
//!   "d": 3,
//!   "block_sizes": [1, 1, 1],
//!   "alpha": 5.0,
//!   "sigma": { "random": { "count": 20, "jitter": 1e-6 } },
//!   "exponents": { "values": [0.4, 0.4, 0.4] },
//!   "n_samples": 200000,
//!   "seed": 7
//! }
//! ```

use std::path::{Path, PathBuf};

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wishart_gpi::gpi::{
    finiteness_classify, BernsteinSpec, ExponentVector, Finiteness, InequalityKind, RadialLaw, Sign, Status,
    DEFAULT_Z_THRESHOLD,
};
use wishart_gpi::linalg::{sym_eigenvalues, BlockSpec, SymMat};
use wishart_gpi::wishart::{random_correlation, RngStream, WishartModel, DEFAULT_JITTER};

pub const SCHEMA_VERSION: u32 = 1;

/// Upper limit on random Σ instances, keeping stream ids in range.
pub const MAX_SIGMA_COUNT: usize = 1 << 20;

/// Dense matrix as a list of rows.
pub type Matrix = Vec<Vec<f64>>;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Also the default output file stem; `[A-Za-z0-9_.-]+`.
    pub experiment_id: String,
    pub inequality_id: InequalityKind,
    pub d: usize,
    pub block_sizes: Vec<usize>,
    /// Wishart degrees of freedom; unused by the elliptical family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub sigma: SigmaSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernstein: Option<BernsteinPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_law: Option<RadialLaw>,
    /// One nonnegative definite `T_i` per block, for `lt_order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lt_blocks: Option<Vec<Matrix>>,
    /// 1-based splits `k`; defaults to every admissible split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splits: Option<Vec<usize>>,
    pub n_samples: u64,
    pub seed: u64,
    #[serde(default = "default_z_threshold")]
    pub z_threshold: f64,
    /// Worker threads; defaults to the available cores. Never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub override_finiteness: bool,
    /// CSV destination; the JSON report goes next to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

fn default_z_threshold() -> f64 {
    DEFAULT_Z_THRESHOLD
}

fn default_jitter() -> f64 {
    DEFAULT_JITTER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaSource {
    /// Row-major matrices, one instance each.
    Explicit(Vec<Matrix>),
    /// Random correlation matrices drawn from the config seed.
    Random {
        count: usize,
        #[serde(default = "default_jitter")]
        jitter: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    pub values: Vec<f64>,
    /// Defaults to the sign pattern the inequality requires.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<Sign>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Thresholds {
    /// Marginal medians from a pilot run.
    Auto(AutoKeyword),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernsteinPair {
    pub f: BernsteinConfig,
    pub g: BernsteinConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernsteinConfig {
    pub trace_offset: Matrix,
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub weight: f64,
    pub site: Matrix,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validates every field and materializes the Σ instances.
    pub fn plan(&self) -> Result<Plan, ConfigError> {
        Plan::build(self.clone())
    }
}

/// Per-family parameters after validation.
#[derive(Debug, Clone)]
pub enum Params {
    Sandwich { nu: Vec<f64> },
    PositivePowers { nu: Vec<f64> },
    MinorCorrelation { thresholds: Option<Vec<f64>> },
    OppLower { nu: Vec<f64> },
    OppUpper { nu: Vec<f64> },
    Bernstein { f: BernsteinSpec, g: BernsteinSpec },
    Eigen { nu: Vec<f64> },
    Elliptical { alphas: Vec<f64>, law: RadialLaw },
    LtOrder { t_blocks: Vec<SymMat> },
}

/// One Σ instance prepared for evaluation.
#[derive(Debug, Clone)]
pub enum Instance {
    Wishart(WishartModel),
    /// Lower Cholesky factor of Σ.
    Elliptical(DMatrix<f64>),
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: ExperimentConfig,
    pub kind: InequalityKind,
    pub spec: BlockSpec,
    pub sigmas: Vec<SymMat>,
    pub instances: Vec<Instance>,
    pub params: Params,
    /// `None` for families without a split.
    pub splits: Vec<Option<usize>>,
    pub status: Status,
    /// Signed exponents (or thresholds) as reported.
    pub exponents: Vec<f64>,
}

/// Stream for the Σ instances of a sweep, disjoint from every row stream.
pub fn sigma_stream(seed: u64) -> RngStream {
    RngStream::new(seed, 1 << 60)
}

fn symmat(field: &str, m: &Matrix, dim: usize) -> Result<SymMat, ConfigError> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(invalid(field, format!("expected a {dim}×{dim} matrix")));
    }
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    SymMat::from_row_slice(dim, &flat).map_err(|e| invalid(field, e.to_string()))
}

fn nonnegative_definite(field: &str, s: &SymMat) -> Result<(), ConfigError> {
    let min = sym_eigenvalues(s).last().copied().unwrap_or(0.0);
    if min < -1e-12 * s.matrix().amax().max(1.0) {
        return Err(invalid(field, format!("must be nonnegative definite (smallest eigenvalue {min:e})")));
    }
    Ok(())
}

fn forbid<T>(field: &str, value: &Option<T>, kind: InequalityKind) -> Result<(), ConfigError> {
    match value {
        Some(_) => Err(invalid(field, format!("not used by `{}`", kind.id()))),
        None => Ok(()),
    }
}

impl Plan {
    fn build(config: ExperimentConfig) -> Result<Self, ConfigError> {
        let c = &config;
        let kind = c.inequality_id;
        if c.schema_version != SCHEMA_VERSION {
            return Err(invalid("schema_version", format!("unsupported version {}, expected {SCHEMA_VERSION}", c.schema_version)));
        }
        if c.experiment_id.is_empty()
            || !c.experiment_id.chars().all(|ch| ch.is_ascii_alphanumeric() || "_.-".contains(ch))
        {
            return Err(invalid("experiment_id", "must be non-empty and use only [A-Za-z0-9_.-]"));
        }
        if c.block_sizes.len() != c.d {
            return Err(invalid("block_sizes", format!("{} sizes given for d = {}", c.block_sizes.len(), c.d)));
        }
        let spec = BlockSpec::new(c.block_sizes.clone()).map_err(|e| invalid("block_sizes", e.to_string()))?;
        if c.n_samples < 2 {
            return Err(invalid("n_samples", "need at least 2 draws"));
        }
        if !(c.z_threshold > 0.0 && c.z_threshold.is_finite()) {
            return Err(invalid("z_threshold", "must be positive and finite"));
        }
        if c.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }

        let elliptical = kind == InequalityKind::Elliptical;
        let alpha = match (c.alpha, elliptical) {
            (None, false) => return Err(invalid("alpha", format!("required by `{}`", kind.id()))),
            (Some(_), true) => return Err(invalid("alpha", "not used by `elliptical`")),
            (a, _) => a,
        };
        if elliptical && spec.sizes().iter().any(|&p| p != 1) {
            return Err(invalid("block_sizes", "the elliptical family has scalar components"));
        }

        let for_kind = |k: InequalityKind| kind == k;
        if !matches!(kind, InequalityKind::MinorCorrelation) {
            forbid("thresholds", &c.thresholds, kind)?;
        }
        if !for_kind(InequalityKind::Bernstein) {
            forbid("bernstein", &c.bernstein, kind)?;
        }
        if !elliptical {
            forbid("radial_law", &c.radial_law, kind)?;
        }
        if !for_kind(InequalityKind::LtOrder) {
            forbid("lt_blocks", &c.lt_blocks, kind)?;
        }
        if matches!(kind, InequalityKind::MinorCorrelation | InequalityKind::Bernstein | InequalityKind::LtOrder) {
            forbid("exponents", &c.exponents, kind)?;
        }

        let (params, exponents) = Self::params(c, &spec, alpha)?;

        let split_max = match kind {
            InequalityKind::Eigen => Some(spec.total()),
            InequalityKind::OppLower | InequalityKind::OppUpper | InequalityKind::Bernstein | InequalityKind::Elliptical => None,
            _ => Some(spec.d()),
        };
        let splits = match (split_max, &c.splits) {
            (None, Some(_)) => return Err(invalid("splits", format!("`{}` has no split", kind.id()))),
            (None, None) => vec![None],
            (Some(max), None) => {
                if max < 2 {
                    return Err(invalid("block_sizes", "a split needs at least two components"));
                }
                (2..=max).map(Some).collect()
            }
            (Some(max), Some(ks)) => {
                if ks.is_empty() {
                    return Err(invalid("splits", "must not be empty"));
                }
                if let Some(k) = ks.iter().find(|k| !(2..=max).contains(*k)) {
                    return Err(invalid("splits", format!("split {k} outside 2..={max}")));
                }
                ks.iter().map(|&k| Some(k)).collect()
            }
        };

        let p = spec.total();
        let sigmas = match &c.sigma {
            SigmaSource::Explicit(ms) => {
                if ms.is_empty() {
                    return Err(invalid("sigma.explicit", "needs at least one matrix"));
                }
                ms.iter()
                    .enumerate()
                    .map(|(i, m)| symmat(&format!("sigma.explicit[{i}]"), m, p))
                    .collect::<Result<Vec<_>, _>>()?
            }
            SigmaSource::Random { count, jitter } => {
                if *count == 0 || *count > MAX_SIGMA_COUNT {
                    return Err(invalid("sigma.random.count", format!("must lie in 1..={MAX_SIGMA_COUNT}")));
                }
                if !(*jitter >= 0.0 && jitter.is_finite()) {
                    return Err(invalid("sigma.random.jitter", "must be finite and nonnegative"));
                }
                let stream = sigma_stream(c.seed);
                (0..*count as u64).map(|i| random_correlation(p, &mut stream.chunk_rng(i), *jitter)).collect()
            }
        };
        let instances = sigmas
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let field = format!("sigma[{i}]");
                if elliptical {
                    Cholesky::new(s.matrix().clone())
                        .map(|ch| Instance::Elliptical(ch.l()))
                        .ok_or_else(|| invalid(field, "Σ must be positive definite"))
                } else {
                    WishartModel::new(alpha.expect("checked above"), s.clone(), spec.clone())
                        .map(Instance::Wishart)
                        .map_err(|e| invalid(field, e.to_string()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;

        let gaussian = matches!(&params, Params::Elliptical { law, .. } if law.is_gaussian());
        let status_sizes = if elliptical { vec![spec.d()] } else { spec.sizes().to_vec() };
        let status = kind.status(&status_sizes, gaussian);
        Ok(Self { kind, spec, sigmas, instances, params, splits, status, exponents, config })
    }

    fn exponents_for(c: &ExperimentConfig, len: usize, pattern: &[Sign]) -> Result<Vec<f64>, ConfigError> {
        let e = c.exponents.as_ref().ok_or_else(|| invalid("exponents", format!("required by `{}`", c.inequality_id.id())))?;
        if e.values.len() != len {
            return Err(invalid("exponents.values", format!("{} values given, expected {len}", e.values.len())));
        }
        if let Some(v) = e.values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(invalid("exponents.values", format!("{v} must be finite and nonnegative")));
        }
        if let Some(signs) = &e.signs {
            if signs.as_slice() != pattern {
                let want: Vec<&str> = pattern.iter().map(|s| if *s == Sign::Pos { "+" } else { "-" }).collect();
                return Err(invalid("exponents.signs", format!("`{}` requires signs [{}]", c.inequality_id.id(), want.join(", "))));
            }
        }
        Ok(e.values.clone())
    }

    /// Negative powers must be inside the finiteness window.
    fn check_windows(
        c: &ExperimentConfig,
        spec: &BlockSpec,
        alpha: f64,
        nu: &[f64],
        signs: &[Sign],
        allow_override: bool,
    ) -> Result<(), ConfigError> {
        let exps = ExponentVector::new(nu.to_vec(), signs.to_vec()).map_err(|e| invalid("exponents", e.to_string()))?;
        match finiteness_classify(alpha, spec.sizes(), &exps) {
            Finiteness::FiniteGuaranteed => Ok(()),
            Finiteness::Unknown if allow_override && c.override_finiteness => Ok(()),
            class => {
                let mut windows = Vec::new();
                for (i, (&p, s)) in spec.sizes().iter().zip(signs).enumerate() {
                    if *s == Sign::Neg {
                        let half = (p as f64 - 1.0) / 2.0;
                        windows.push(format!("ν_{} ∈ ({half}, {})", i + 1, alpha / 2.0 - half));
                    }
                }
                Err(invalid("exponents.values", format!("negative powers are {class:?}; need {}", windows.join(", "))))
            }
        }
    }

    fn params(c: &ExperimentConfig, spec: &BlockSpec, alpha: Option<f64>) -> Result<(Params, Vec<f64>), ConfigError> {
        let d = spec.d();
        let kind = c.inequality_id;
        let pos = |n: usize| vec![Sign::Pos; n];
        let signed = |nu: &[f64], signs: &[Sign]| nu.iter().zip(signs).map(|(v, s)| v * s.factor()).collect::<Vec<_>>();
        Ok(match kind {
            InequalityKind::Sandwich => {
                let signs = vec![Sign::Neg; d];
                let nu = Self::exponents_for(c, d, &signs)?;
                Self::check_windows(c, spec, alpha.unwrap(), &nu, &signs, true)?;
                let shown = signed(&nu, &signs);
                (Params::Sandwich { nu }, shown)
            }
            InequalityKind::PositivePowers => {
                let nu = Self::exponents_for(c, d, &pos(d))?;
                (Params::PositivePowers { nu: nu.clone() }, nu)
            }
            InequalityKind::Eigen => {
                let p = spec.total();
                let nu = Self::exponents_for(c, p, &pos(p))?;
                (Params::Eigen { nu: nu.clone() }, nu)
            }
            InequalityKind::OppLower | InequalityKind::OppUpper => {
                if d < 2 {
                    return Err(invalid("d", "opposite inequalities need at least two blocks"));
                }
                let mut signs = pos(d);
                if kind == InequalityKind::OppLower {
                    signs[0] = Sign::Neg;
                } else {
                    signs[..d - 1].fill(Sign::Neg);
                }
                let nu = Self::exponents_for(c, d, &signs)?;
                Self::check_windows(c, spec, alpha.unwrap(), &nu, &signs, false)?;
                if let Some(i) = signs.iter().zip(&nu).position(|(s, v)| *s == Sign::Pos && !(*v > 0.0)) {
                    return Err(invalid("exponents.values", format!("positive power ν_{} must be > 0", i + 1)));
                }
                let shown = signed(&nu, &signs);
                if kind == InequalityKind::OppLower { (Params::OppLower { nu }, shown) } else { (Params::OppUpper { nu }, shown) }
            }
            InequalityKind::MinorCorrelation => match &c.thresholds {
                None | Some(Thresholds::Auto(_)) => (Params::MinorCorrelation { thresholds: None }, Vec::new()),
                Some(Thresholds::Values(t)) => {
                    if t.len() != d {
                        return Err(invalid("thresholds", format!("{} thresholds for {d} blocks", t.len())));
                    }
                    if let Some(v) = t.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                        return Err(invalid("thresholds", format!("{v} must be positive and finite")));
                    }
                    (Params::MinorCorrelation { thresholds: Some(t.clone()) }, t.clone())
                }
            },
            InequalityKind::Bernstein => {
                if d != 2 {
                    return Err(invalid("d", "Bernstein pairs need exactly two blocks"));
                }
                let b = c.bernstein.as_ref().ok_or_else(|| invalid("bernstein", "required by `bernstein`"))?;
                let build = |name: &str, cfg: &BernsteinConfig, p: usize| -> Result<BernsteinSpec, ConfigError> {
                    let offset = symmat(&format!("bernstein.{name}.trace_offset"), &cfg.trace_offset, p)?;
                    let atoms = cfg
                        .atoms
                        .iter()
                        .enumerate()
                        .map(|(j, a)| Ok((a.weight, symmat(&format!("bernstein.{name}.atoms[{j}].site"), &a.site, p)?)))
                        .collect::<Result<Vec<_>, ConfigError>>()?;
                    BernsteinSpec::new(offset, atoms).map_err(|e| invalid(format!("bernstein.{name}"), e.to_string()))
                };
                let f = build("f", &b.f, spec.size(0))?;
                let g = build("g", &b.g, spec.size(1))?;
                (Params::Bernstein { f, g }, Vec::new())
            }
            InequalityKind::Elliptical => {
                let law = c.radial_law.ok_or_else(|| invalid("radial_law", "required by `elliptical`"))?;
                law.validate().map_err(|e| invalid("radial_law", e.to_string()))?;
                let alphas = Self::exponents_for(c, d, &pos(d))?;
                (Params::Elliptical { alphas: alphas.clone(), law }, alphas)
            }
            InequalityKind::LtOrder => {
                let blocks = c.lt_blocks.as_ref().ok_or_else(|| invalid("lt_blocks", "required by `lt_order`"))?;
                if blocks.len() != d {
                    return Err(invalid("lt_blocks", format!("{} blocks for d = {d}", blocks.len())));
                }
                let t_blocks = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let field = format!("lt_blocks[{i}]");
                        let t = symmat(&field, m, spec.size(i))?;
                        nonnegative_definite(&field, &t)?;
                        Ok(t)
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                (Params::LtOrder { t_blocks }, Vec::new())
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            experiment_id: "t".into(),
            inequality_id: InequalityKind::Sandwich,
            d: 3,
            block_sizes: vec![1, 1, 1],
            alpha: Some(5.0),
            sigma: SigmaSource::Random { count: 4, jitter: 1e-6 },
            exponents: Some(ExponentsConfig { values: vec![0.4; 3], signs: None }),
            thresholds: None,
            bernstein: None,
            radial_law: None,
            lt_blocks: None,
            splits: None,
            n_samples: 1000,
            seed: 1,
            z_threshold: 3.0,
            workers: None,
            override_finiteness: false,
            output_path: None,
        }
    }

    #[test]
    fn round_trip() {
        let mut c = base();
        c.thresholds = None;
        c.output_path = Some("out/x.csv".into());
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        let mut mc = base();
        mc.inequality_id = InequalityKind::MinorCorrelation;
        mc.exponents = None;
        mc.thresholds = Some(Thresholds::Auto(AutoKeyword::Auto));
        mc.sigma = SigmaSource::Explicit(vec![vec![vec![1.0, 0.2, 0.0], vec![0.2, 1.0, 0.0], vec![0.0, 0.0, 1.0]]]);
        assert_eq!(ExperimentConfig::from_json(&mc.to_json()).unwrap(), mc);
        assert!(mc.to_json().contains("\"auto\""));
    }

    #[test]
    fn sandwich_plan_cardinality() {
        let plan = base().plan().unwrap();
        assert_eq!(plan.sigmas.len(), 4);
        assert_eq!(plan.splits, vec![Some(2), Some(3)]);
        assert_eq!(plan.status, Status::Proved);
        assert_eq!(plan.exponents, vec![-0.4; 3]);
    }

    #[test]
    fn random_sigmas_do_not_depend_on_count() {
        let a = base().plan().unwrap();
        let mut c = base();
        c.sigma = SigmaSource::Random { count: 2, jitter: 1e-6 };
        let b = c.plan().unwrap();
        assert_eq!(a.sigmas[..2], b.sigmas[..]);
    }

    #[test]
    fn windows_fail_fast() {
        let mut c = base();
        c.exponents = Some(ExponentsConfig { values: vec![2.5, 0.4, 0.4], signs: None });
        let e = c.plan().unwrap_err();
        assert!(matches!(&e, ConfigError::Invalid { field, .. } if field == "exponents.values"), "{e}");
    }

    #[test]
    fn unknown_fields_and_parse_positions() {
        let e = ExperimentConfig::from_json("{\n  \"schema_version\": 1,\n  \"bogus\": 3\n}").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn irrelevant_fields_are_refused() {
        let mut c = base();
        c.thresholds = Some(Thresholds::Values(vec![1.0; 3]));
        assert!(matches!(c.plan(), Err(ConfigError::Invalid { field, .. }) if field == "thresholds"));
        let mut c = base();
        c.exponents = Some(ExponentsConfig { values: vec![0.4; 3], signs: Some(vec![Sign::Pos; 3]) });
        assert!(matches!(c.plan(), Err(ConfigError::Invalid { field, .. }) if field == "exponents.signs"));
    }

    #[test]
    fn explicit_sigma_must_be_pd() {
        let mut c = base();
        c.sigma = SigmaSource::Explicit(vec![vec![vec![1.0, 2.0, 0.0], vec![2.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]]);
        assert!(matches!(c.plan(), Err(ConfigError::Invalid { field, .. }) if field == "sigma[0]"));
    }
}
