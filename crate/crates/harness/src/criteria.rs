//! The twelve acceptance criteria as self-contained, seeded sweeps. Each
//! returns a [`CriterionResult`] with a one-line summary; the verification
//! suites and the `acceptance` test target both run these.

use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;
use wishart_gpi::gpi::{
    bernstein_pair_check, bound_integral, eigen_gpi_check, elliptical_gpi_check, elliptical_q, estimate,
    gpi_sandwich, jacobian_j, lt_order_gap, minor_correlation_check, opposite_gpi_lower, opposite_gpi_upper,
    positive_power_check, radial_q, BernsteinSpec, InequalityKind, InequalityVerdict, McSettings, RadialLaw,
    Verdict,
};
use wishart_gpi::linalg::{log_det_block, split_block_diagonal, BlockSpec, SymMat};
use wishart_gpi::oracles::{integral_quadrature_1d, lyapunov_determinant};
use wishart_gpi::special::{ln_beta, partitions_of, zonal_polynomial};
use wishart_gpi::wishart::{random_correlation, RngStream, WishartModel, DEFAULT_JITTER};

use crate::config::{ExperimentConfig, ExponentsConfig, SigmaSource, Thresholds, AutoKeyword};
use crate::runner::{execute, RunOptions};

/// Seed shared by every criterion; each criterion owns a disjoint range of
/// stream ids.
pub const SEED: u64 = 20_240_611;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<4} {} ({:.1} s of {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Accumulates per-case outcomes of one criterion.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
    /// Largest |z| of checks expected to be noise (equalities, oracles).
    max_abs_z: f64,
    /// Smallest z of one-sided inequality checks.
    min_margin_z: Option<f64>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn z(&mut self, z: f64) {
        if z.is_finite() {
            self.max_abs_z = self.max_abs_z.max(z.abs());
        }
    }

    fn margin_z(&mut self, z: f64) {
        if !z.is_nan() {
            self.min_margin_z = Some(self.min_margin_z.map_or(z, |m| m.min(z)));
        }
    }

    /// Counts a verdict that must not be Violated.
    fn not_violated(&mut self, v: &InequalityVerdict, what: impl FnOnce() -> String) {
        self.margin_z(v.z);
        self.check(v.verdict != Verdict::Violated, || format!("{} violated (z = {:.2})", what(), v.z));
    }

    fn error(&mut self, what: String) {
        self.cases += 1;
        self.failures.push(what);
    }

    fn finish(self, id: &'static str, title: &'static str, budget_s: u64, started: Instant) -> CriterionResult {
        let elapsed = started.elapsed();
        let budget = Duration::from_secs(budget_s);
        let mut detail = format!("{}/{} checks passed", self.cases - self.failures.len(), self.cases);
        if self.max_abs_z > 0.0 {
            detail += &format!(", max |z| under equality = {:.2}", self.max_abs_z);
        }
        if let Some(z) = self.min_margin_z {
            detail += &format!(", min margin z = {z:.2}");
        }
        for n in &self.notes {
            detail += &format!("; {n}");
        }
        if elapsed > budget {
            detail += "; over the runtime budget";
        }
        if let Some(first) = self.failures.first() {
            detail += &format!("; first failure: {first}");
        }
        CriterionResult { id, title, passed: self.failures.is_empty() && elapsed <= budget, detail, elapsed, budget }
    }
}

fn rng(id: u64) -> impl Rng {
    RngStream::new(SEED, id).rng()
}

fn stream(id: u64) -> RngStream {
    RngStream::new(SEED, id)
}

fn settings(n: u64) -> McSettings {
    McSettings::new(n)
}

fn model(alpha: f64, sigma: SymMat, sizes: &[usize]) -> WishartModel {
    WishartModel::new(alpha, sigma, BlockSpec::new(sizes.to_vec()).expect("valid sizes")).expect("valid model")
}

fn random_psd<R: Rng>(r: &mut R, p: usize, scale: f64, rank: usize) -> SymMat {
    let g = DMatrix::from_fn(p, rank, |_, _| r.random_range(-1.0..1.0) * scale);
    SymMat::new(&g * g.transpose()).expect("Gram matrix is symmetric")
}

fn within(mc: f64, se: f64, exact: f64, k: f64) -> bool {
    (mc - exact).abs() <= k * se
}

/// 1. Closed-form minor moments against 2·10⁵-draw Monte Carlo.
pub fn c1_minor_moments() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(100);
    for case in 0..30u64 {
        let sizes = [r.random_range(1..=3usize), r.random_range(1..=3usize)];
        let p = sizes[0] + sizes[1];
        let alpha = r.random_range(p as f64 + 0.5..20.0);
        let i = (case % 2) as usize;
        let pi = sizes[i] as f64;
        let window = alpha / 2.0 - (pi - 1.0) / 2.0;
        let nu = [-0.4 * window, 0.5, 1.0, 2.5][(case % 4) as usize];
        let m = model(alpha, random_correlation(p, &mut r, DEFAULT_JITTER), &sizes);
        let exact = m.minor_moment(i, nu).expect("inside the moment window");
        let range = m.spec().range(i);
        let e = estimate(200_000, stream(1000 + case), || (m.sampler(), Vec::new()), |(s, scratch), g| {
            (nu * log_det_block(s.draw(g), range.clone(), scratch).unwrap_or(f64::NEG_INFINITY)).exp()
        });
        match e {
            Ok(e) => {
                t.z((e.mean - exact) / e.stderr);
                t.check(within(e.mean, e.stderr, exact, 4.0), || {
                    format!("p={sizes:?} α={alpha:.2} block {i} ν={nu:.3}: MC {} ± {} vs {exact}", e.mean, e.stderr)
                });
            }
            Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    t.finish("C1", "closed-form minor moments vs Monte Carlo", 60, started)
}

/// 2. Laplace transform closed form against the average of `etr(−TX)`.
pub fn c2_laplace_transform() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(200);
    for case in 0..20u64 {
        let p = 1 + (case % 6) as usize;
        let alpha = r.random_range(p as f64 - 0.5..p as f64 + 8.0).max(p as f64 - 1.0 + 0.5);
        let sigma = random_correlation(p, &mut r, DEFAULT_JITTER).scaled(r.random_range(0.5..2.0));
        let rank = r.random_range(1..=p);
        let tm = random_psd(&mut r, p, 0.6 / (p as f64).sqrt(), rank);
        let m = WishartModel::new(alpha, sigma, BlockSpec::single(p)).expect("valid model");
        let exact = m.laplace_transform(&tm).expect("T ⪰ 0");
        let tmat = tm.matrix().clone();
        match estimate(100_000, stream(2000 + case), || m.sampler(), |s, g| (-(&tmat * s.draw(g)).trace()).exp()) {
            Ok(e) => {
                t.z((e.mean - exact) / e.stderr);
                t.check(within(e.mean, e.stderr, exact, 4.0), || format!("p={p} α={alpha:.2}: {} ± {} vs {exact}", e.mean, e.stderr));
            }
            Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    t.finish("C2", "Laplace transform closed form vs Monte Carlo", 30, started)
}

fn random_sizes<R: Rng>(r: &mut R, max_total: usize) -> Vec<usize> {
    loop {
        let d = r.random_range(2..=4usize);
        let sizes: Vec<usize> = (0..d).map(|_| r.random_range(1..=3usize)).collect();
        if sizes.iter().sum::<usize>() <= max_total {
            return sizes;
        }
    }
}

/// 3. Exact Laplace-order gap: nonnegative, and zero for block-diagonal Σ.
pub fn c3_lt_order() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(300);
    let mut min_gap = f64::INFINITY;
    for case in 0..1100 {
        let sizes = random_sizes(&mut r, 8);
        let spec = BlockSpec::new(sizes.clone()).expect("valid sizes");
        let p = spec.total();
        let alpha = r.random_range(p as f64 - 0.9..p as f64 + 10.0);
        let k = r.random_range(2..=spec.d());
        let mut sigma = random_correlation(p, &mut r, DEFAULT_JITTER);
        let diagonal = case >= 1000;
        if diagonal {
            sigma = split_block_diagonal(&sigma, &spec, k - 1);
        }
        let blocks: Vec<SymMat> = sizes
            .iter()
            .map(|&pi| {
                let rank = r.random_range(0..=pi);
                let scale = r.random_range(0.0..1.5);
                random_psd(&mut r, pi, scale, rank)
            })
            .collect();
        let m = WishartModel::new(alpha, sigma, spec).expect("valid model");
        match lt_order_gap(&m, k, &blocks) {
            Ok(gap) if diagonal => t.check(gap.abs() <= 1e-12, || format!("block-diagonal gap {gap:e} at {sizes:?}, k={k}")),
            Ok(gap) => {
                min_gap = min_gap.min(gap);
                t.check(gap >= -1e-12, || format!("gap {gap:e} at {sizes:?}, k={k}"));
            }
            Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    t.notes.push(format!("smallest gap {min_gap:e}"));
    t.finish("C3", "exact Laplace-order gap", 10, started)
}

/// 4. Lower side of the negative-power sandwich never violated.
pub fn c4_sandwich_lower() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(400);
    let sets: [(&[usize], f64, &[f64], u64); 2] = [(&[1, 1, 1], 5.0, &[0.4, 0.4, 0.4], 20), (&[2, 1, 2], 10.0, &[0.7, 0.4, 0.7], 10)];
    let mut id = 4000;
    for (sizes, alpha, nu, count) in sets {
        for _ in 0..count {
            let m = model(alpha, random_correlation(sizes.iter().sum(), &mut r, DEFAULT_JITTER), sizes);
            for k in 2..=3 {
                id += 1;
                match gpi_sandwich(&m, nu, k, &settings(200_000), stream(id)) {
                    Ok(out) => t.not_violated(&out.lower, || format!("p={sizes:?} k={k}")),
                    Err(e) => t.error(format!("p={sizes:?} k={k}: {e}")),
                }
            }
        }
    }
    t.finish("C4", "sandwich lower bound (negative powers)", 300, started)
}

/// 5. Upper side of the sandwich: Monte Carlo mean below the exact bound.
pub fn c5_sandwich_upper() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(500);
    for case in 0..10u64 {
        let m = model(6.0, random_correlation(2, &mut r, DEFAULT_JITTER), &[1, 1]);
        match gpi_sandwich(&m, &[0.5, 0.5], 2, &settings(200_000), stream(5000 + case)).map(|o| o.upper) {
            Ok(Ok(u)) => {
                t.margin_z(u.verdict.z);
                t.check(u.verdict.z >= -3.0, || format!("case {case}: mean {} vs bound {} (z = {:.2})", u.verdict.lhs.value(), u.bound, u.verdict.z));
            }
            Ok(Err(e)) | Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    t.finish("C5", "sandwich upper bound (exact integral)", 60, started)
}

/// 6. Bound integral, Jacobian and zonal identities against oracles.
pub fn c6_integral_oracles() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(600);
    for _ in 0..50 {
        let alpha = r.random_range(0.5..20.0);
        let nu = r.random_range(0.02..0.98) * alpha / 2.0;
        let m = r.random_range(0.2..5.0);
        match (bound_integral(&SymMat::from_diagonal(&[m]), alpha, nu), integral_quadrature_1d(m, alpha, nu)) {
            (Ok(v), Ok(q)) => {
                let beta = ((1.0 - nu) * 2f64.ln() - 2.0 * nu * m.ln() + ln_beta(2.0 * nu, alpha - 2.0 * nu)).exp();
                t.check(((v.value() - beta) / beta).abs() <= 1e-10, || format!("Beta form at m={m}, α={alpha}, ν={nu}"));
                t.check(((v.value() - q) / q).abs() <= 1e-6, || format!("quadrature at m={m}, α={alpha}, ν={nu}"));
            }
            (Err(e), _) | (_, Err(e)) => t.error(format!("m={m}, α={alpha}, ν={nu}: {e}")),
        }
    }
    for p in 1..=4 {
        for _ in 0..100 {
            let x = SymMat::new(random_psd(&mut r, p, 1.0, p).matrix() + DMatrix::identity(p, p) * 0.05).expect("symmetric");
            let (j, l) = (jacobian_j(&x).expect("PD"), lyapunov_determinant(&x));
            t.check(((j - l) / l).abs() <= 1e-8, || format!("Jacobian p={p}: {j} vs {l}"));
        }
    }
    for p in 1..=4 {
        for k in 0..=6u32 {
            for _ in 0..20 {
                let eigs: Vec<f64> = (0..p).map(|_| r.random_range(0.05..4.0)).collect();
                let sum: f64 = partitions_of(k, p).iter().map(|kappa| zonal_polynomial(kappa, &eigs).expect("fits")).sum();
                let want = eigs.iter().sum::<f64>().powi(k as i32);
                t.check((sum - want).abs() <= 1e-8 * want, || format!("zonal normalization p={p} k={k}"));
            }
        }
    }
    t.finish("C6", "bound integral, Jacobian and zonal oracles", 30, started)
}

/// 7. Opposite inequalities: never violated; equality under independence.
pub fn c7_opposite() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(700);
    let mut id = 7000;
    let upper: [(&[usize], f64, &[f64]); 2] = [(&[1, 1], 5.0, &[0.4, 1.0]), (&[1, 1, 2], 8.0, &[0.3, 0.3, 0.8])];
    let lower: [(&[usize], f64, &[f64]); 2] = [(&[1, 1], 4.0, &[0.5, 1.0]), (&[2, 2], 6.0, &[0.7, 1.3])];
    for (which, configs) in [("upper", upper), ("lower", lower)] {
        for (sizes, alpha, nu) in configs {
            let spec = BlockSpec::new(sizes.to_vec()).expect("valid sizes");
            for case in 0..15 {
                id += 1;
                let mut sigma = random_correlation(spec.total(), &mut r, DEFAULT_JITTER);
                // the last 5 instances per configuration decouple the blocks
                let independent = case >= 10;
                if independent {
                    let cut = if which == "upper" { spec.d() - 1 } else { 1 };
                    sigma = split_block_diagonal(&sigma, &spec, cut);
                }
                let m = WishartModel::new(alpha, sigma, spec.clone()).expect("valid model");
                let v = if which == "upper" {
                    opposite_gpi_upper(&m, nu, &settings(200_000), stream(id))
                } else {
                    opposite_gpi_lower(&m, nu, &settings(200_000), stream(id))
                };
                match v {
                    Ok(v) if independent => {
                        t.z(v.z);
                        t.check(v.z.abs() < 3.0, || format!("{which} p={sizes:?} independent: |z| = {:.2}", v.z.abs()));
                    }
                    Ok(v) => t.not_violated(&v, || format!("{which} p={sizes:?}")),
                    Err(e) => t.error(format!("{which} p={sizes:?}: {e}")),
                }
            }
        }
    }
    t.finish("C7", "opposite inequalities", 300, started)
}

fn bernstein_spec<R: Rng>(r: &mut R, p: usize, atoms: usize) -> BernsteinSpec {
    let offset = if r.random_bool(0.5) { SymMat::zeros(p) } else { SymMat::identity(p).scaled(0.2) };
    let sites = (0..atoms)
        .map(|j| {
            let s = SymMat::new(random_psd(r, p, 0.5, p).matrix() + DMatrix::identity(p, p) * 0.1).expect("symmetric");
            ([0.5, 1.0, 2.0][j % 3], s)
        })
        .collect();
    BernsteinSpec::new(offset, sites).expect("valid Bernstein spec")
}

/// 8. Bernstein pairs: never violated; equality under independence.
pub fn c8_bernstein() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(800);
    for case in 0..28u64 {
        let p = if case % 2 == 0 { 1 } else { 2 };
        let atoms = if (case / 2) % 2 == 0 { 1 } else { 3 };
        let spec = BlockSpec::new(vec![p, p]).expect("valid sizes");
        let alpha = r.random_range(2.0 * p as f64 + 0.5..2.0 * p as f64 + 6.0);
        let mut sigma = random_correlation(2 * p, &mut r, DEFAULT_JITTER);
        let independent = case >= 20;
        if independent {
            sigma = split_block_diagonal(&sigma, &spec, 1);
        }
        let m = WishartModel::new(alpha, sigma, spec).expect("valid model");
        let (f, g) = (bernstein_spec(&mut r, p, atoms), bernstein_spec(&mut r, p, atoms));
        match bernstein_pair_check(&m, &f, &g, &settings(200_000), stream(8000 + case)) {
            Ok(v) if independent => {
                t.z(v.z);
                t.check(v.verdict != Verdict::Violated && v.z.abs() < 3.0, || format!("independent p={p}: z = {:.2}", v.z));
            }
            Ok(v) => t.not_violated(&v, || format!("p={p}, {atoms} atoms")),
            Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    t.finish("C8", "Bernstein-function pairs", 120, started)
}

/// 9. Ordered-eigenvalue inequality and the determinant identity.
pub fn c9_eigen() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(900);
    let mut id = 9000;
    for case in 0..20 {
        let p = 2 + case % 2;
        let alpha = [4.0, 8.0][(case / 2) % 2];
        let nu: Vec<f64> = (0..p).map(|_| r.random_range(0.0..2.5)).collect();
        let k = r.random_range(2..=p);
        let m = WishartModel::new(alpha, random_correlation(p, &mut r, DEFAULT_JITTER), BlockSpec::single(p)).expect("valid model");
        id += 1;
        match eigen_gpi_check(&m, &nu, k, &settings(200_000), stream(id)) {
            Ok(v) => t.not_violated(&v, || format!("p={p} α={alpha} ν={nu:.2?} k={k}")),
            Err(e) => t.error(format!("case {case}: {e}")),
        }
    }
    for (p, alpha) in [(2usize, 4.0), (3, 6.0), (3, 8.0)] {
        let m = WishartModel::new(alpha, random_correlation(p, &mut r, DEFAULT_JITTER), BlockSpec::single(p)).expect("valid model");
        let exact = m.log_det_moment(1.0).expect("finite").exp();
        id += 1;
        match eigen_gpi_check(&m, &vec![1.0; p], 2, &settings(200_000), stream(id)) {
            Ok(v) => {
                let (mean, se) = (v.lhs.value(), v.lhs.stderr());
                t.z((mean - exact) / se);
                t.check(within(mean, se, exact, 4.0), || format!("E∏Λ p={p}: {mean} ± {se} vs {exact}"));
            }
            Err(e) => t.error(format!("identity p={p}: {e}")),
        }
    }
    t.finish("C9", "ordered-eigenvalue inequality", 180, started)
}

fn explorer_config(id: &str, kind: InequalityKind, sizes: &[usize], alpha: f64, nu: Option<Vec<f64>>) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: crate::config::SCHEMA_VERSION,
        experiment_id: id.into(),
        inequality_id: kind,
        d: sizes.len(),
        block_sizes: sizes.to_vec(),
        alpha: Some(alpha),
        sigma: SigmaSource::Random { count: 3, jitter: DEFAULT_JITTER },
        exponents: nu.map(|values| ExponentsConfig { values, signs: None }),
        thresholds: None,
        bernstein: None,
        radial_law: None,
        lt_blocks: None,
        splits: None,
        n_samples: 100_000,
        seed: SEED,
        z_threshold: 3.0,
        workers: None,
        override_finiteness: false,
        output_path: None,
    }
}

/// Open and conditional instances run as explorers: each must complete
/// and produce rows. Returns (rows, confirmed violations, failures).
pub fn open_case_configs() -> Vec<ExperimentConfig> {
    let mut minor = explorer_config("open-minor-correlation", InequalityKind::MinorCorrelation, &[2, 2], 6.0, None);
    minor.thresholds = Some(Thresholds::Auto(AutoKeyword::Auto));
    vec![
        explorer_config("open-positive-powers", InequalityKind::PositivePowers, &[1, 1, 1], 5.0, Some(vec![1.0, 1.0, 1.0])),
        explorer_config("open-positive-powers-matrix", InequalityKind::PositivePowers, &[2, 1, 2], 7.0, Some(vec![0.6, 1.2, 0.9])),
        minor,
        explorer_config("conditional-opp-lower", InequalityKind::OppLower, &[1, 1, 1], 5.0, Some(vec![0.4, 0.8, 1.1])),
    ]
}

fn c10_proved_part<R: Rng>(t: &mut Tally, r: &mut R) {
    let mut id = 10_000;
    for case in 0..20 {
        let sizes = [[1, 1], [2, 2], [1, 2], [2, 1]][case % 4];
        let p: usize = sizes.iter().sum();
        let alpha = r.random_range(p as f64..p as f64 + 6.0);
        let nu: Vec<f64> = (0..2).map(|_| r.random_range(0.1..2.0)).collect();
        let m = model(alpha, random_correlation(p, r, DEFAULT_JITTER), &sizes);
        id += 1;
        match positive_power_check(&m, &nu, 2, &settings(200_000), stream(id)) {
            Ok(v) => t.not_violated(&v, || format!("positive powers p={sizes:?} ν={nu:.2?}")),
            Err(e) => t.error(format!("positive powers case {case}: {e}")),
        }
    }
    for case in 0..20 {
        let d = 2 + case % 2;
        let alpha = r.random_range(d as f64..d as f64 + 6.0);
        let m = model(alpha, random_correlation(d, r, DEFAULT_JITTER), &vec![1; d]);
        let k = r.random_range(2..=d);
        id += 1;
        match minor_correlation_check(&m, None, k, &settings(200_000), stream(id)) {
            Ok(out) => t.not_violated(&out.verdict, || format!("minor correlation d={d} k={k}")),
            Err(e) => t.error(format!("minor correlation case {case}: {e}")),
        }
    }
}

/// Runs the open-case explorers; returns the number of confirmed
/// violations.
fn c10_open_part(t: &mut Tally) -> usize {
    let mut confirmed = 0;
    for config in open_case_configs() {
        let plan = match config.plan() {
            Ok(p) => p,
            Err(e) => {
                t.error(format!("{}: {e}", config.experiment_id));
                continue;
            }
        };
        let out = execute(&plan, false);
        let expected = plan.sigmas.len() * plan.splits.len();
        t.check(out.report.rows.len() == expected && out.errors == 0, || {
            format!("{}: {} rows, {} errors", config.experiment_id, out.report.rows.len(), out.errors)
        });
        let violated = out.report.rows.iter().filter(|r| r.verdict == Some(Verdict::Violated)).count();
        confirmed += out.confirmed_violations;
        t.notes.push(format!("{}: {} rows, {violated} candidate violations", config.experiment_id, out.report.rows.len()));
    }
    confirmed
}

/// 10. Conjecture checkers behave as explorers.
pub fn c10_conjectures() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(1000);
    c10_proved_part(&mut t, &mut r);
    let confirmed = c10_open_part(&mut t);
    t.notes.push(format!("{confirmed} confirmed violations on open cases"));
    t.finish("C10", "conjecture checkers (proved cases and explorers)", 300, started)
}

/// Proved instances of the conjecture checkers only.
pub fn c10_proved_cases() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    c10_proved_part(&mut t, &mut rng(1000));
    t.finish("C10a", "conjecture checkers on proved cases", 300, started)
}

/// Open cases only; passes when every explorer completes. Also returns
/// the number of confirmed violations for the suite's exit code.
pub fn c10_open_cases() -> (CriterionResult, usize) {
    let started = Instant::now();
    let mut t = Tally::default();
    let confirmed = c10_open_part(&mut t);
    t.notes.push(format!("{confirmed} confirmed violations"));
    (t.finish("C10b", "conjecture explorers on open cases", 300, started), confirmed)
}

/// 11. Elliptical reformulation and the radial ratio.
pub fn c11_elliptical() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let mut r = rng(1100);
    let q = elliptical_q(2, &[1.0, 1.0]).unwrap_or(f64::NAN);
    t.check((q - 0.5).abs() <= 1e-15, || format!("Q(1,1) = {q}"));

    let rho: f64 = 0.5;
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, rho, (1.0 - rho * rho).sqrt()]);
    match elliptical_gpi_check(&a, &[1.0, 1.0], RadialLaw::ChiSquare { scale: 1.0 }, &settings(200_000), stream(11_000)) {
        Ok(out) => {
            t.check(out.verdict.verdict == Verdict::Holds, || format!("Gaussian ρ=0.5 verdict {}", out.verdict.verdict));
            // the Gaussian-scale ratio E Z₁²Z₂²/(E Z₁² E Z₂²) = 1 + 2ρ²
            let se = out.verdict.lhs.stderr() / out.verdict.rhs.value();
            t.z((out.moment_ratio - 1.5) / se);
            t.check((out.moment_ratio - 1.5).abs() <= 4.0 * se, || format!("Gaussian moment ratio {} ± {se}", out.moment_ratio));
        }
        Err(e) => t.error(format!("Gaussian instance: {e}")),
    }

    let mut id = 11_100;
    for case in 0..10 {
        let d = 2 + case % 2;
        let alphas: Vec<f64> = (0..d).map(|_| r.random_range(0.2..1.0)).collect();
        let law = if case < 5 {
            RadialLaw::LogNormal { mu: r.random_range(-1.0..1.0), sigma: r.random_range(0.2..0.8) }
        } else {
            RadialLaw::PointMass { value: r.random_range(0.5..3.0) }
        };
        id += 2;
        match (radial_q(law, d, &alphas, 100_000, stream(id)), radial_q(law.scaled(7.0), d, &alphas, 100_000, stream(id + 1))) {
            (Ok(q), Ok(q7)) => {
                t.check(q.value() <= 1.0 + 3.0 * q.stderr(), || format!("{law:?}: Q = {} ± {}", q.value(), q.stderr()));
                let pooled = (q.stderr().powi(2) + q7.stderr().powi(2)).sqrt();
                if pooled > 0.0 {
                    t.z((q7.value() - q.value()) / pooled);
                }
                t.check((q7.value() - q.value()).abs() <= 4.0 * pooled + 1e-12, || {
                    format!("{law:?}: Q_7R = {} vs Q_R = {}", q7.value(), q.value())
                });
            }
            (Err(e), _) | (_, Err(e)) => t.error(format!("{law:?}: {e}")),
        }
    }
    // chi-square scaling is exact
    for d in 2..=4 {
        let alphas: Vec<f64> = (0..d).map(|i| 0.5 + 0.3 * i as f64).collect();
        let base = radial_q(RadialLaw::ChiSquare { scale: 1.0 }, d, &alphas, 10, stream(11_500));
        let scaled = radial_q(RadialLaw::ChiSquare { scale: 7.0 }, d, &alphas, 10, stream(11_501));
        match (base, scaled) {
            (Ok(a), Ok(b)) => t.check((a.value() - b.value()).abs() <= 1e-14 && a.value() <= 1.0, || format!("chi-square Q d={d}")),
            (Err(e), _) | (_, Err(e)) => t.error(format!("chi-square d={d}: {e}")),
        }
    }
    // d = 1 is an equality
    match elliptical_gpi_check(&DMatrix::from_element(1, 1, 1.3), &[0.7], RadialLaw::ChiSquare { scale: 1.0 }, &settings(1000), stream(11_600)) {
        Ok(out) => t.check(out.verdict.lhs.value() == 1.0 && out.verdict.rhs.value() == 1.0, || "d = 1 sides differ".into()),
        Err(e) => t.error(format!("d = 1: {e}")),
    }
    t.finish("C11", "elliptical reformulation", 60, started)
}

fn determinism_configs() -> Vec<ExperimentConfig> {
    let mut sandwich = explorer_config("determinism-sandwich", InequalityKind::Sandwich, &[1, 1, 1], 5.0, Some(vec![0.4, 0.4, 0.4]));
    sandwich.sigma = SigmaSource::Random { count: 4, jitter: DEFAULT_JITTER };
    sandwich.n_samples = 30_000;
    let mut minor = explorer_config("determinism-minor", InequalityKind::MinorCorrelation, &[1, 2], 5.0, None);
    minor.n_samples = 30_000;
    vec![sandwich, minor]
}

/// 12. Byte-identical CSV across 1, 2 and 8 workers.
pub fn c12_determinism() -> CriterionResult {
    let started = Instant::now();
    let mut t = Tally::default();
    let dir = std::env::temp_dir().join(format!("gpi-harness-determinism-{}", std::process::id()));
    for config in determinism_configs() {
        let mut files = Vec::new();
        for workers in [1usize, 2, 8] {
            let mut c = config.clone();
            let path = dir.join(format!("{}-w{workers}.csv", c.experiment_id));
            c.output_path = Some(path.clone());
            match crate::runner::run(&c, RunOptions { workers: Some(workers), override_finiteness: false }) {
                Ok(out) => match out.report.write_files(&path).and_then(|_| std::fs::read(&path)) {
                    Ok(bytes) => files.push((workers, bytes)),
                    Err(e) => t.error(format!("{}: {e}", c.experiment_id)),
                },
                Err(e) => t.error(format!("{}: {e}", c.experiment_id)),
            }
        }
        if let Some((_, first)) = files.first() {
            for (w, bytes) in &files[1..] {
                t.check(bytes == first, || format!("{}: {w} workers differ from 1 worker", config.experiment_id));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    t.finish("C12", "byte-identical CSV across worker counts", 60, started)
}

/// All criteria in order.
pub fn all() -> Vec<fn() -> CriterionResult> {
    vec![
        c1_minor_moments,
        c2_laplace_transform,
        c3_lt_order,
        c4_sandwich_lower,
        c5_sandwich_upper,
        c6_integral_oracles,
        c7_opposite,
        c8_bernstein,
        c9_eigen,
        c10_conjectures,
        c11_elliptical,
        c12_determinism,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_case_configs_validate() {
        for c in open_case_configs().into_iter().chain(determinism_configs()) {
            c.plan().unwrap_or_else(|e| panic!("{}: {e}", c.experiment_id));
        }
    }
}
