//! Sweep execution: one row per (Σ instance × split), each on its own
//! sub-stream of the config seed, so rows are reproducible individually and
//! independent of the worker count.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use wishart_gpi::gpi::{
    bernstein_pair_check, eigen_gpi_check, elliptical_gpi_check, gpi_sandwich, lt_order_gap,
    minor_correlation_check, opposite_gpi_lower, opposite_gpi_upper, positive_power_check, verdict_from, Direction,
    GpiError, InequalityVerdict, McSettings, Quantity, Status, Verdict,
};
use wishart_gpi::linalg::direct_sum_all;
use wishart_gpi::wishart::RngStream;

use crate::config::{ConfigError, ExperimentConfig, Instance, Params, Plan};
use crate::report::{fmt_float, BoundCheck, Report, ReportRow, Rerun, SigmaRecord};

/// Names the default output directory when the config has no `output_path`.
pub const OUTPUT_DIR_ENV: &str = "GPI_HARNESS_OUT";

/// Confirmation runs use this multiple of the configured sample count.
pub const RERUN_FACTOR: u64 = 10;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the config's `workers`.
    pub workers: Option<usize>,
    /// Ors with the config's `override_finiteness`.
    pub override_finiteness: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: Report,
    pub proved_violations: usize,
    pub confirmed_violations: usize,
    pub errors: usize,
}

impl RunSummary {
    /// 2 if a proved instance was violated, 1 if any instance failed to
    /// evaluate, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.proved_violations > 0 {
            2
        } else if self.errors > 0 {
            1
        } else {
            0
        }
    }
}

/// Stream of one row. Row ids stay below `2^45`, leaving room for
/// two levels of [`RngStream::child`] inside the checks.
pub fn row_stream(seed: u64, sigma_index: usize, split: Option<usize>, rerun: bool) -> RngStream {
    let id = (u64::from(rerun) << 44) | ((sigma_index as u64) << 8) | split.unwrap_or(0) as u64;
    RngStream::new(seed, id)
}

/// CSV destination: the config's `output_path`, else
/// `$GPI_HARNESS_OUT/<experiment_id>.csv` (current directory if unset).
pub fn output_path(config: &ExperimentConfig) -> PathBuf {
    match &config.output_path {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("{}.csv", config.experiment_id))
        }
    }
}

struct Evaluation {
    verdict: InequalityVerdict,
    bound: Option<BoundCheck>,
    note: String,
}

fn evaluate(plan: &Plan, instance: &Instance, split: Option<usize>, settings: &McSettings, stream: RngStream) -> Result<Evaluation, GpiError> {
    let plain = |verdict| Evaluation { verdict, bound: None, note: String::new() };
    let k = split.unwrap_or(0);
    let model = match instance {
        Instance::Wishart(m) => Some(m),
        Instance::Elliptical(_) => None,
    };
    let model = || model.ok_or_else(|| GpiError::Domain("not a Wishart instance".into()));
    Ok(match (&plan.params, instance) {
        (Params::Sandwich { nu }, _) => {
            let out = gpi_sandwich(model()?, nu, k, settings, stream)?;
            let (bound, note) = match out.upper {
                Ok(u) => {
                    let rules: Vec<String> = u.rules.iter().map(|r| format!("{r:?}")).collect();
                    (
                        Some(BoundCheck { value: u.bound, z: u.verdict.z, verdict: u.verdict.verdict }),
                        format!("bound windows: {}", rules.join(";")),
                    )
                }
                Err(e) => (None, e.to_string()),
            };
            Evaluation { verdict: out.lower, bound, note }
        }
        (Params::PositivePowers { nu }, _) => plain(positive_power_check(model()?, nu, k, settings, stream)?),
        (Params::MinorCorrelation { thresholds }, _) => {
            let out = minor_correlation_check(model()?, thresholds.as_deref(), k, settings, stream)?;
            let t: Vec<String> = out.thresholds.iter().map(|v| fmt_float(*v)).collect();
            let source = if thresholds.is_some() { "given" } else { "pilot medians" };
            Evaluation { verdict: out.verdict, bound: None, note: format!("thresholds ({source}): {}", t.join(";")) }
        }
        (Params::OppLower { nu }, _) => plain(opposite_gpi_lower(model()?, nu, settings, stream)?),
        (Params::OppUpper { nu }, _) => plain(opposite_gpi_upper(model()?, nu, settings, stream)?),
        (Params::Bernstein { f, g }, _) => plain(bernstein_pair_check(model()?, f, g, settings, stream)?),
        (Params::Eigen { nu }, _) => plain(eigen_gpi_check(model()?, nu, k, settings, stream)?),
        (Params::Elliptical { alphas, law }, Instance::Elliptical(a)) => {
            let out = elliptical_gpi_check(a, alphas, *law, settings, stream)?;
            Evaluation {
                verdict: out.verdict,
                bound: None,
                note: format!("q_at_most_one: {}; moment_ratio: {}", out.q_at_most_one, fmt_float(out.moment_ratio)),
            }
        }
        (Params::Elliptical { .. }, _) => return Err(GpiError::Domain("elliptical rows need a scale matrix".into())),
        (Params::LtOrder { t_blocks }, _) => {
            let m = model()?;
            let gap = lt_order_gap(m, k, t_blocks)?;
            let full = m.laplace_transform(&direct_sum_all(t_blocks))?;
            plain(verdict_from(Quantity::exact(full), Quantity::exact(full - gap), Direction::Geq, settings.z_threshold))
        }
    })
}

struct Task {
    sigma_index: usize,
    split: Option<usize>,
}

fn run_task(plan: &Plan, task: &Task, settings: &McSettings) -> ReportRow {
    let started = Instant::now();
    let c = &plan.config;
    let instance = &plan.instances[task.sigma_index];
    let stream = row_stream(c.seed, task.sigma_index, task.split, false);
    let result = evaluate(plan, instance, task.split, settings, stream);
    let mut row = ReportRow {
        experiment_id: c.experiment_id.clone(),
        inequality_id: plan.kind.id().to_string(),
        reference: plan.kind.reference().to_string(),
        status: plan.status,
        d: plan.spec.d(),
        alpha: c.alpha,
        block_sizes: plan.spec.sizes().to_vec(),
        sigma_index: task.sigma_index,
        sigma_digest: crate::report::sigma_digest(&plan.sigmas[task.sigma_index]),
        exponents: plan.exponents.clone(),
        split: task.split,
        lhs: f64::NAN,
        lhs_se: f64::NAN,
        rhs: f64::NAN,
        rhs_se: f64::NAN,
        margin: f64::NAN,
        z: f64::NAN,
        verdict: None,
        n: settings.n,
        seed: c.seed,
        bound: None,
        rerun: None,
        note: String::new(),
        wall_time_ms: None,
    };
    match result {
        Ok(e) => {
            let v = &e.verdict;
            row.lhs = v.lhs.value();
            row.lhs_se = v.lhs.stderr();
            row.rhs = v.rhs.value();
            row.rhs_se = v.rhs.stderr();
            row.margin = v.margin;
            row.z = v.z;
            row.verdict = Some(v.verdict);
            row.bound = e.bound;
            row.note = e.note;
            if v.verdict == Verdict::Violated && plan.status != Status::Proved {
                let big = McSettings { n: settings.n * RERUN_FACTOR, ..*settings };
                let again = evaluate(plan, instance, task.split, &big, row_stream(c.seed, task.sigma_index, task.split, true));
                row.rerun = Some(match again {
                    Ok(e) => Rerun { n: big.n, z: e.verdict.z, verdict: Some(e.verdict.verdict) },
                    Err(_) => Rerun { n: big.n, z: f64::NAN, verdict: None },
                });
            }
        }
        Err(e) => row.note = e.to_string(),
    }
    row.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    row
}

/// Runs a validated plan on the current rayon pool.
pub fn execute(plan: &Plan, override_finiteness: bool) -> RunSummary {
    let started = Instant::now();
    let c = &plan.config;
    let settings = McSettings {
        n: c.n_samples,
        z_threshold: c.z_threshold,
        override_finiteness: c.override_finiteness || override_finiteness,
    };
    let tasks: Vec<Task> = (0..plan.sigmas.len())
        .flat_map(|s| plan.splits.iter().map(move |&split| Task { sigma_index: s, split }))
        .collect();
    let rows: Vec<ReportRow> = tasks.par_iter().map(|t| run_task(plan, t, &settings)).collect();
    let proved_violations = rows.iter().filter(|r| r.is_proved_violation()).count();
    let confirmed_violations = rows.iter().filter(|r| r.is_confirmed_violation()).count();
    let errors = rows.iter().filter(|r| r.verdict.is_none()).count();
    let report = Report {
        schema_version: crate::config::SCHEMA_VERSION,
        experiment_id: c.experiment_id.clone(),
        config: c.clone(),
        sigmas: plan.sigmas.iter().enumerate().map(|(i, s)| SigmaRecord::new(i, s)).collect(),
        rows,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    RunSummary { report, proved_violations, confirmed_violations, errors }
}

/// Validates `config` and runs it with the requested worker count.
pub fn run(config: &ExperimentConfig, options: RunOptions) -> Result<RunSummary, ConfigError> {
    let plan = config.plan()?;
    let workers = options.workers.or(config.workers);
    Ok(match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| ConfigError::Invalid { field: "workers".into(), message: e.to_string() })?;
            pool.install(|| execute(&plan, options.override_finiteness))
        }
        None => execute(&plan, options.override_finiteness),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExponentsConfig, SigmaSource};
    use wishart_gpi::gpi::InequalityKind;

    fn sandwich() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            experiment_id: "unit".into(),
            inequality_id: InequalityKind::Sandwich,
            d: 3,
            block_sizes: vec![1, 1, 1],
            alpha: Some(5.0),
            sigma: SigmaSource::Random { count: 3, jitter: 1e-6 },
            exponents: Some(ExponentsConfig { values: vec![0.4; 3], signs: None }),
            thresholds: None,
            bernstein: None,
            radial_law: None,
            lt_blocks: None,
            splits: None,
            n_samples: 5000,
            seed: 3,
            z_threshold: 3.0,
            workers: None,
            override_finiteness: false,
            output_path: None,
        }
    }

    #[test]
    fn one_row_per_sigma_and_split() {
        let out = run(&sandwich(), RunOptions::default()).unwrap();
        assert_eq!(out.report.rows.len(), 3 * 2);
        assert_eq!(out.exit_code(), 0);
        for r in &out.report.rows {
            assert_eq!(r.reference, InequalityKind::Sandwich.reference());
            assert!(r.bound.is_some());
        }
    }

    #[test]
    fn rows_are_worker_independent() {
        let a = run(&sandwich(), RunOptions { workers: Some(1), ..Default::default() }).unwrap();
        let b = run(&sandwich(), RunOptions { workers: Some(3), ..Default::default() }).unwrap();
        assert_eq!(a.report.csv_string(), b.report.csv_string());
    }

    #[test]
    fn row_streams_are_distinct() {
        let ids: std::collections::HashSet<u64> = (0..50)
            .flat_map(|s| (0..4).flat_map(move |k| [false, true].map(|r| row_stream(1, s, Some(k), r).stream_id)))
            .collect();
        assert_eq!(ids.len(), 50 * 4 * 2);
    }
}
