use std::ops::Range;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::estimate::{bernoulli_estimate, estimate, MCEstimate, Quantity};
use super::finiteness::{finiteness_classify, ExponentVector, Finiteness, Sign};
use super::integral::{bound_integral, WindowRule};
use super::verdict::{verdict_from, Direction, InequalityVerdict};
use super::{GpiError, McSettings, Result};
use crate::linalg::{
    block_cholesky, direct_sum_all, inv_sqrt_pd, is_positive_definite, log_det_block, log_det_pd,
    split_block_diagonal, sym_eigenvalues_of, SymMat, DEFAULT_PD_TOL,
};
use crate::special::log_mvgamma;
use crate::wishart::{RngStream, Sampler, WishartModel};

/// Per-chunk state for determinant-power estimators.
struct MinorState<'a> {
    sampler: Sampler<'a>,
    scratch: Vec<f64>,
}

fn minor_state(model: &WishartModel) -> MinorState<'_> {
    MinorState { sampler: model.sampler(), scratch: Vec::new() }
}

/// `Σ_i power_i · ln|X_{r_i}|` for the current draw.
fn log_power_sum(x: &DMatrix<f64>, powers: &[(Range<usize>, f64)], scratch: &mut Vec<f64>) -> f64 {
    let mut total = 0.0;
    for (r, power) in powers {
        let ld = log_det_block(x, r.clone(), scratch).unwrap_or(f64::NEG_INFINITY);
        total += power * ld;
    }
    total
}

fn check_blocks(model: &WishartModel, blocks: &[usize]) -> Result<()> {
    let d = model.spec().d();
    match blocks.iter().find(|&&i| i >= d) {
        Some(i) => Err(GpiError::Domain(format!("block {i} out of range for {d} blocks"))),
        None => Ok(()),
    }
}

fn check_len(model: &WishartModel, len: usize, what: &str) -> Result<()> {
    let d = model.spec().d();
    if len != d {
        return Err(GpiError::Domain(format!("{len} {what} for {d} blocks")));
    }
    Ok(())
}

/// Classification restricted to `subset`.
fn classify_subset(model: &WishartModel, exps: &ExponentVector, subset: &[usize]) -> Result<Finiteness> {
    let sizes: Vec<usize> = subset.iter().map(|&i| model.spec().size(i)).collect();
    let sub = ExponentVector::new(
        subset.iter().map(|&i| exps.values()[i]).collect(),
        subset.iter().map(|&i| exps.signs()[i]).collect(),
    )?;
    Ok(finiteness_classify(model.alpha(), &sizes, &sub))
}

/// Refuses estimators whose finiteness is not guaranteed unless overridden;
/// a provably infinite expectation is refused regardless.
pub fn require_finite(model: &WishartModel, exps: &ExponentVector, override_finiteness: bool) -> Result<Finiteness> {
    check_len(model, exps.len(), "exponents")?;
    let all: Vec<usize> = (0..exps.len()).collect();
    let class = classify_subset(model, exps, &all)?;
    match class {
        Finiteness::FiniteGuaranteed => Ok(class),
        Finiteness::Infinite => Err(GpiError::InfiniteMoment(format!(
            "a negative power reaches α/2 − (p_i − 1)/2 with α = {}",
            model.alpha()
        ))),
        Finiteness::Unknown if override_finiteness => Ok(class),
        Finiteness::Unknown => Err(GpiError::FinitenessNotGuaranteed(class)),
    }
}

/// Monte Carlo estimate of `E ∏_{i∈subset} |𝔛_ii|^{s_i ν_i}`.
pub fn mc_product_moment(
    model: &WishartModel,
    exps: &ExponentVector,
    subset: &[usize],
    n: u64,
    stream: RngStream,
) -> Result<MCEstimate> {
    check_len(model, exps.len(), "exponents")?;
    check_blocks(model, subset)?;
    if classify_subset(model, exps, subset)? == Finiteness::Infinite {
        return Err(GpiError::InfiniteMoment(format!(
            "a negative power reaches α/2 − (p_i − 1)/2 with α = {}",
            model.alpha()
        )));
    }
    let powers: Vec<(Range<usize>, f64)> = subset
        .iter()
        .filter(|&&i| exps.values()[i] != 0.0)
        .map(|&i| (model.spec().range(i), exps.power(i)))
        .collect();
    if powers.is_empty() {
        return Ok(MCEstimate { mean: 1.0, stderr: 0.0, n });
    }
    let e = estimate(n, stream, || minor_state(model), |s, rng| {
        let x = s.sampler.draw(rng);
        log_power_sum(x, &powers, &mut s.scratch).exp()
    })?;
    if e.stderr == 0.0 {
        return Err(GpiError::DegenerateVariance);
    }
    Ok(e)
}

/// `E ∏_{i∈blocks} |𝔛_ii|^{s_i ν_i}`: closed form for a single block,
/// Monte Carlo otherwise.
fn group_moment(
    model: &WishartModel,
    exps: &ExponentVector,
    blocks: Range<usize>,
    n: u64,
    stream: RngStream,
) -> Result<Quantity> {
    if blocks.len() == 1 {
        return Ok(Quantity::exact(model.minor_moment(blocks.start, exps.power(blocks.start))?));
    }
    let subset: Vec<usize> = blocks.collect();
    Ok(mc_product_moment(model, exps, &subset, n, stream)?.into())
}

fn check_split(model: &WishartModel, k: usize) -> Result<()> {
    let d = model.spec().d();
    if !(2..=d).contains(&k) {
        return Err(GpiError::Domain(format!("split k = {k} must lie in 2..={d}")));
    }
    Ok(())
}

/// Upper side of the sandwich: a verdict plus the window rule used per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub verdict: InequalityVerdict,
    pub bound: f64,
    pub rules: Vec<WindowRule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichOutcome {
    pub lower: InequalityVerdict,
    pub upper: Result<UpperBound>,
}

/// `∏_i 2^{p_i α/2} / Γ_{p_i}(ν_i) · I_{p_i}(M_ii)` with `M` the block
/// Cholesky factor of Σ.
pub fn upper_bound(model: &WishartModel, nu: &[f64]) -> Result<(f64, Vec<WindowRule>)> {
    check_len(model, nu.len(), "exponents")?;
    let spec = model.spec();
    let m = block_cholesky(model.sigma(), spec)?;
    let mut log_bound = 0.0;
    let mut rules = Vec::with_capacity(spec.d());
    for i in 0..spec.d() {
        let r = spec.range(i);
        let mii = SymMat::new(m.view((r.start, r.start), (r.len(), r.len())).into_owned())?;
        let integral = bound_integral(&mii, model.alpha(), nu[i]).map_err(|e| match e {
            GpiError::DivergentIntegral { .. } => GpiError::UpperBoundUnavailable(e.to_string()),
            other => other,
        })?;
        let pi = r.len();
        log_bound += pi as f64 * model.alpha() / 2.0 * std::f64::consts::LN_2 - log_mvgamma(pi, nu[i])?
            + integral.log_value;
        rules.push(integral.rule);
    }
    Ok((log_bound.exp(), rules))
}

/// Both sides of the negative-power sandwich at split `k` (blocks
/// `1..k−1` against `k..d`, 1-based).
///
/// Sub-streams: 0 for the full product, 1 and 2 for the two groups.
pub fn gpi_sandwich(
    model: &WishartModel,
    nu: &[f64],
    k: usize,
    settings: &McSettings,
    stream: RngStream,
) -> Result<SandwichOutcome> {
    let exps = ExponentVector::negative(nu.to_vec())?;
    require_finite(model, &exps, settings.override_finiteness)?;
    check_split(model, k)?;
    let d = model.spec().d();
    let all: Vec<usize> = (0..d).collect();
    let full = Quantity::from(mc_product_moment(model, &exps, &all, settings.n, stream.child(0))?);
    let first = group_moment(model, &exps, 0..k - 1, settings.n, stream.child(1))?;
    let second = group_moment(model, &exps, k - 1..d, settings.n, stream.child(2))?;
    let lower = verdict_from(first.product(&second), full, Direction::Leq, settings.z_threshold);
    let upper = upper_bound(model, nu).map(|(bound, rules)| UpperBound {
        verdict: verdict_from(full, Quantity::exact(bound), Direction::Leq, settings.z_threshold),
        bound,
        rules,
    });
    Ok(SandwichOutcome { lower, upper })
}

/// `|I + 2TΣ|^{−α/2} − |I + 2TΣ*|^{−α/2}` for block-diagonal
/// `T = ⊕ T_i`, where `Σ*` drops the cross blocks at split `k` (1-based).
pub fn lt_order_gap(model: &WishartModel, k: usize, t_blocks: &[SymMat]) -> Result<f64> {
    check_split(model, k)?;
    let spec = model.spec();
    check_len(model, t_blocks.len(), "T blocks")?;
    for (i, t) in t_blocks.iter().enumerate() {
        if t.dim() != spec.size(i) {
            return Err(GpiError::Domain(format!("T block {i} has dimension {} ≠ {}", t.dim(), spec.size(i))));
        }
        let min_eig = crate::linalg::sym_eigenvalues(t).last().copied().unwrap_or(0.0);
        if min_eig < -1e-12 * t.matrix().amax().max(1.0) {
            return Err(GpiError::Domain(format!("T block {i} is not nonnegative definite")));
        }
    }
    let t = direct_sum_all(t_blocks);
    let star = WishartModel::new(model.alpha(), split_block_diagonal(model.sigma(), spec, k - 1), spec.clone())?;
    Ok(model.laplace_transform(&t)? - star.laplace_transform(&t)?)
}

fn check_negative_window(model: &WishartModel, i: usize, nu: f64) -> Result<()> {
    let half = (model.spec().size(i) as f64 - 1.0) / 2.0;
    let hi = model.alpha() / 2.0 - half;
    if !(nu > half && nu < hi) {
        return Err(GpiError::Domain(format!(
            "negative power ν_{} = {nu} must lie in ({half}, {hi})",
            i + 1
        )));
    }
    Ok(())
}

fn check_positive(i: usize, nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(GpiError::Domain(format!("positive power ν_{} = {nu} must be > 0", i + 1)));
    }
    Ok(())
}

/// `ln |I − PᵀP|` with `P = Σ_11^{−1/2} Σ_1i Σ_ii^{−1/2}`.
fn log_det_decorrelation(model: &WishartModel, i: usize) -> Result<f64> {
    let spec = model.spec();
    let (r1, ri) = (spec.range(0), spec.range(i));
    let s = model.sigma();
    let a = inv_sqrt_pd(&s.principal(r1.clone()))?;
    let b = inv_sqrt_pd(&s.principal(ri.clone()))?;
    let cross = s.matrix().view((r1.start, ri.start), (r1.len(), ri.len())).into_owned();
    let p = a.matrix() * cross * b.matrix();
    let m = DMatrix::identity(ri.len(), ri.len()) - p.transpose() * p;
    Ok(log_det_pd(&SymMat::new(m)?.into_inner())?)
}

/// Opposite inequality with one negative power on the first block and
/// positive powers elsewhere; the right side is exact.
pub fn opposite_gpi_lower(
    model: &WishartModel,
    nu: &[f64],
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict> {
    check_len(model, nu.len(), "exponents")?;
    let d = nu.len();
    if d < 2 {
        return Err(GpiError::Domain("need at least two blocks".into()));
    }
    check_negative_window(model, 0, nu[0])?;
    for (i, &v) in nu.iter().enumerate().skip(1) {
        check_positive(i, v)?;
    }
    let mut signs = vec![Sign::Pos; d];
    signs[0] = Sign::Neg;
    let exps = ExponentVector::new(nu.to_vec(), signs)?;
    let all: Vec<usize> = (0..d).collect();
    let lhs = mc_product_moment(model, &exps, &all, settings.n, stream.child(0))?;
    let mut log_rhs = model.log_minor_moment(0, -nu[0])?;
    for (i, &v) in nu.iter().enumerate().skip(1) {
        log_rhs += v * log_det_decorrelation(model, i)? + model.log_minor_moment(i, v)?;
    }
    Ok(verdict_from(lhs.into(), Quantity::exact(log_rhs.exp()), Direction::Geq, settings.z_threshold))
}

/// Opposite inequality with negative powers on blocks `1..d−1` and a
/// positive power on the last block.
///
/// Sub-streams: 0 for the joint product, 1 for the negative-power factor.
pub fn opposite_gpi_upper(
    model: &WishartModel,
    nu: &[f64],
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict> {
    check_len(model, nu.len(), "exponents")?;
    let d = nu.len();
    if d < 2 {
        return Err(GpiError::Domain("need at least two blocks".into()));
    }
    for (i, &v) in nu.iter().enumerate().take(d - 1) {
        check_negative_window(model, i, v)?;
    }
    check_positive(d - 1, nu[d - 1])?;
    let mut signs = vec![Sign::Neg; d];
    signs[d - 1] = Sign::Pos;
    let exps = ExponentVector::new(nu.to_vec(), signs)?;
    let all: Vec<usize> = (0..d).collect();
    let lhs = mc_product_moment(model, &exps, &all, settings.n, stream.child(0))?;
    let negative = group_moment(model, &exps, 0..d - 1, settings.n, stream.child(1))?;
    let rhs = negative.scaled(model.minor_moment(d - 1, nu[d - 1])?);
    Ok(verdict_from(lhs.into(), rhs, Direction::Leq, settings.z_threshold))
}

/// Positive-power product inequality at split `k`: the full product moment
/// against the product of the two group moments.
///
/// Sub-streams: 0 for the full product, 1 and 2 for multi-block groups.
pub fn positive_power_check(
    model: &WishartModel,
    nu: &[f64],
    k: usize,
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict> {
    let exps = ExponentVector::positive(nu.to_vec())?;
    check_len(model, nu.len(), "exponents")?;
    check_split(model, k)?;
    let d = nu.len();
    if exps.all_zero() {
        return Ok(verdict_from(Quantity::exact(1.0), Quantity::exact(1.0), Direction::Geq, settings.z_threshold));
    }
    let all: Vec<usize> = (0..d).collect();
    let lhs = mc_product_moment(model, &exps, &all, settings.n, stream.child(0))?;
    let first = group_moment(model, &exps, 0..k - 1, settings.n, stream.child(1))?;
    let second = group_moment(model, &exps, k - 1..d, settings.n, stream.child(2))?;
    Ok(verdict_from(lhs.into(), first.product(&second), Direction::Geq, settings.z_threshold))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationOutcome {
    pub verdict: InequalityVerdict,
    pub thresholds: Vec<f64>,
}

/// Medians of `|𝔛_ii|` from a pilot run.
fn median_thresholds(model: &WishartModel, n: u64, stream: RngStream) -> Vec<f64> {
    let spec = model.spec();
    let mut rng = stream.rng();
    let mut s = minor_state(model);
    let mut logs: Vec<Vec<f64>> = vec![Vec::with_capacity(n as usize); spec.d()];
    for _ in 0..n {
        let x = s.sampler.draw(&mut rng);
        for (i, col) in logs.iter_mut().enumerate() {
            col.push(log_det_block(x, spec.range(i), &mut s.scratch).unwrap_or(f64::NEG_INFINITY));
        }
    }
    logs.into_iter()
        .map(|mut col| {
            col.sort_by(f64::total_cmp);
            let m = col.len() / 2;
            let med = if col.len() % 2 == 1 { col[m] } else { 0.5 * (col[m - 1] + col[m]) };
            med.exp()
        })
        .collect()
}

/// Probability inequality for the events `{|𝔛_ii| ≤ t_i}` at split `k`.
/// With `thresholds = None` each `t_i` is the median of `|𝔛_ii|` in a
/// pilot run of `n/10` draws.
///
/// Sub-streams: 0 joint, 1 and 2 for the groups, 3 for the pilot.
pub fn minor_correlation_check(
    model: &WishartModel,
    thresholds: Option<&[f64]>,
    k: usize,
    settings: &McSettings,
    stream: RngStream,
) -> Result<CorrelationOutcome> {
    check_split(model, k)?;
    let d = model.spec().d();
    let t = match thresholds {
        Some(t) => {
            check_len(model, t.len(), "thresholds")?;
            if let Some(v) = t.iter().find(|v| !(**v > 0.0)) {
                return Err(GpiError::Domain(format!("threshold {v} must be positive")));
            }
            t.to_vec()
        }
        None => median_thresholds(model, (settings.n / 10).max(2), stream.child(3)),
    };
    let log_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let event = |blocks: Range<usize>, sub: RngStream| {
        let ranges: Vec<(Range<usize>, f64)> = blocks.map(|i| (model.spec().range(i), log_t[i])).collect();
        bernoulli_estimate(settings.n, sub, || minor_state(model), move |s, rng: &mut ChaCha8Rng| {
            let x = s.sampler.draw(rng);
            ranges.iter().all(|(r, lt)| {
                log_det_block(x, r.clone(), &mut s.scratch).unwrap_or(f64::NEG_INFINITY) <= *lt
            })
        })
    };
    let joint = event(0..d, stream.child(0))?;
    let first = event(0..k - 1, stream.child(1))?;
    let second = event(k - 1..d, stream.child(2))?;
    let rhs = Quantity::from(first).product(&second.into());
    Ok(CorrelationOutcome {
        verdict: verdict_from(joint.into(), rhs, Direction::Geq, settings.z_threshold),
        thresholds: t,
    })
}

/// Ordered-eigenvalue inequality `E{f(Λ_{<k}) g(Λ_{≥k})} ≥ E f · E g` for
/// nonnegative, componentwise non-decreasing `f` and `g`; `k` is 1-based in
/// `2..=p`.
///
/// Sub-streams: 0 for the joint term, 1 and 2 for the factors.
pub fn eigen_gpi_check_with<F, G>(
    model: &WishartModel,
    k: usize,
    f: F,
    g: G,
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    let p = model.p();
    if !(2..=p).contains(&k) {
        return Err(GpiError::Domain(format!("eigenvalue split k = {k} must lie in 2..={p}")));
    }
    let run = |h: &(dyn Fn(&[f64]) -> f64 + Sync), sub: RngStream| {
        estimate(settings.n, sub, || model.sampler(), |s, rng| {
            let ev = sym_eigenvalues_of(s.draw(rng).clone());
            h(&ev)
        })
    };
    let split = k - 1;
    let lhs = run(&|ev: &[f64]| f(&ev[..split]) * g(&ev[split..]), stream.child(0))?;
    let a = run(&|ev: &[f64]| f(&ev[..split]), stream.child(1))?;
    let b = run(&|ev: &[f64]| g(&ev[split..]), stream.child(2))?;
    let rhs = Quantity::from(a).product(&b.into());
    Ok(verdict_from(lhs.into(), rhs, Direction::Geq, settings.z_threshold))
}

/// [`eigen_gpi_check_with`] for the powers `f = ∏_{i<k} Λ_i^{ν_i}`,
/// `g = ∏_{i≥k} Λ_i^{ν_i}`.
pub fn eigen_gpi_check(
    model: &WishartModel,
    nu: &[f64],
    k: usize,
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict> {
    let p = model.p();
    if nu.len() != p {
        return Err(GpiError::Domain(format!("{} exponents for {p} eigenvalues", nu.len())));
    }
    ExponentVector::positive(nu.to_vec())?;
    if nu.iter().all(|&v| v == 0.0) {
        return Ok(verdict_from(Quantity::exact(1.0), Quantity::exact(1.0), Direction::Geq, settings.z_threshold));
    }
    let split = k.saturating_sub(1);
    let (head, tail) = nu.split_at(split.min(p));
    let power = |exps: &[f64], ev: &[f64]| exps.iter().zip(ev).map(|(e, l)| e * l.ln()).sum::<f64>().exp();
    eigen_gpi_check_with(model, k, |ev| power(head, ev), |ev| power(tail, ev), settings, stream)
}

/// `g(T) = tr(A) + Σ_j c_j {1 − etr(−T S_j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinSpec {
    pub trace_offset: SymMat,
    pub atoms: Vec<(f64, SymMat)>,
}

impl BernsteinSpec {
    pub fn new(trace_offset: SymMat, atoms: Vec<(f64, SymMat)>) -> Result<Self> {
        let p = trace_offset.dim();
        let min_eig = crate::linalg::sym_eigenvalues(&trace_offset).last().copied().unwrap_or(0.0);
        if min_eig < -1e-12 * trace_offset.matrix().amax().max(1.0) {
            return Err(GpiError::Domain("trace offset must be nonnegative definite".into()));
        }
        for (c, s) in &atoms {
            if !(*c > 0.0) || !c.is_finite() {
                return Err(GpiError::Domain(format!("atom weight {c} must be positive")));
            }
            if s.dim() != p || !is_positive_definite(s, DEFAULT_PD_TOL) {
                return Err(GpiError::Domain("atom sites must be positive definite and conformal".into()));
            }
        }
        Ok(Self { trace_offset, atoms })
    }

    pub fn dim(&self) -> usize {
        self.trace_offset.dim()
    }

    /// `g` at the principal block `x[r, r]`.
    fn eval_block(&self, x: &DMatrix<f64>, r: &Range<usize>) -> f64 {
        let mut v = self.trace_offset.trace();
        for (c, s) in &self.atoms {
            let mut tr = 0.0;
            for i in 0..r.len() {
                for j in 0..r.len() {
                    tr += s.get(i, j) * x[(r.start + j, r.start + i)];
                }
            }
            v += c * (1.0 - (-tr).exp());
        }
        v
    }

    /// `E g(W)` for `W ~ model`, exact through the Laplace transform.
    pub fn expectation(&self, model: &WishartModel) -> Result<f64> {
        let mut v = self.trace_offset.trace();
        for (c, s) in &self.atoms {
            v += c * (1.0 - model.laplace_transform(s)?);
        }
        Ok(v)
    }
}

/// `E{f(𝔛_11) g(𝔛_22)} ≥ E f(𝔛*_11) E g(𝔛*_22)` on a two-block model; the
/// right side is exact.
pub fn bernstein_pair_check(
    model: &WishartModel,
    f: &BernsteinSpec,
    g: &BernsteinSpec,
    settings: &McSettings,
    stream: RngStream,
) -> Result<InequalityVerdict> {
    let spec = model.spec();
    if spec.d() != 2 {
        return Err(GpiError::Domain(format!("Bernstein pairs need 2 blocks, got {}", spec.d())));
    }
    if f.dim() != spec.size(0) || g.dim() != spec.size(1) {
        return Err(GpiError::Domain("Bernstein specs must match the block sizes".into()));
    }
    let rhs = f.expectation(&model.marginal(0)?)? * g.expectation(&model.marginal(1)?)?;
    let lhs = if f.atoms.is_empty() && g.atoms.is_empty() {
        Quantity::exact(f.trace_offset.trace() * g.trace_offset.trace())
    } else {
        let (r0, r1) = (spec.range(0), spec.range(1));
        estimate(settings.n, stream.child(0), || model.sampler(), |s, rng| {
            let x = s.draw(rng);
            f.eval_block(x, &r0) * g.eval_block(x, &r1)
        })?
        .into()
    };
    Ok(verdict_from(lhs, Quantity::exact(rhs), Direction::Geq, settings.z_threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpi::Verdict;
    use crate::linalg::BlockSpec;
    use approx::assert_relative_eq;

    fn corr2(rho: f64) -> SymMat {
        SymMat::from_row_slice(2, &[1.0, rho, rho, 1.0]).unwrap()
    }

    fn model(alpha: f64, sigma: SymMat, sizes: Vec<usize>) -> WishartModel {
        WishartModel::new(alpha, sigma, BlockSpec::new(sizes).unwrap()).unwrap()
    }

    fn settings(n: u64) -> McSettings {
        McSettings::new(n)
    }

    #[test]
    fn product_moment_examples() {
        let m = model(2.0, SymMat::identity(2), vec![1, 1]);
        let zero = ExponentVector::positive(vec![0.0, 0.0]).unwrap();
        let e = mc_product_moment(&m, &zero, &[0, 1], 1000, RngStream::new(1, 0)).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));

        let one = ExponentVector::positive(vec![1.0, 1.0]).unwrap();
        let e = mc_product_moment(&m, &one, &[0, 1], 200_000, RngStream::new(1, 1)).unwrap();
        assert!((e.mean - 4.0).abs() < 4.0 * e.stderr, "{e:?}");

        let m = model(3.0, corr2(0.5), vec![1, 1]);
        let neg = ExponentVector::negative(vec![0.3, 0.3]).unwrap();
        let e = mc_product_moment(&m, &neg, &[0, 1], 200_000, RngStream::new(1, 2)).unwrap();
        let marginals = m.minor_moment(0, -0.3).unwrap() * m.minor_moment(1, -0.3).unwrap();
        assert!(e.mean - marginals > -3.0 * e.stderr, "{} vs {marginals}", e.mean);
    }

    #[test]
    fn refuses_infinite_and_unknown() {
        let m = model(4.0, SymMat::identity(2), vec![1, 1]);
        let e = ExponentVector::negative(vec![2.0, 0.5]).unwrap();
        assert!(matches!(
            mc_product_moment(&m, &e, &[0, 1], 100, RngStream::new(1, 0)),
            Err(GpiError::InfiniteMoment(_))
        ));
        let m = model(6.0, SymMat::identity(4), vec![2, 2]);
        let e = ExponentVector::negative(vec![0.3, 0.3]).unwrap();
        assert!(matches!(require_finite(&m, &e, false), Err(GpiError::FinitenessNotGuaranteed(_))));
        assert_eq!(require_finite(&m, &e, true).unwrap(), Finiteness::Unknown);
    }

    #[test]
    fn sandwich_upper_bound_scalar_identity() {
        let m = model(6.0, SymMat::identity(2), vec![1, 1]);
        let (bound, rules) = upper_bound(&m, &[0.5, 0.5]).unwrap();
        // per block: 2³/Γ(1/2) · 2^{1/2} B(1, 5)
        let per = 8.0 / std::f64::consts::PI.sqrt() * 2f64.sqrt() / 5.0;
        assert_relative_eq!(bound, per * per, max_relative = 1e-12);
        assert_eq!(rules, vec![WindowRule::Beta; 2]);
        let out = gpi_sandwich(&m, &[0.5, 0.5], 2, &settings(100_000), RngStream::new(2, 0)).unwrap();
        assert_eq!(out.upper.unwrap().verdict.verdict, Verdict::Holds);
        assert_ne!(out.lower.verdict, Verdict::Violated);
    }

    #[test]
    fn sandwich_upper_unavailable_outside_window() {
        // p_i = 2, α = 6: the stated window ends at ν = 1.5
        let m = model(6.0, SymMat::identity(4), vec![2, 2]);
        let out = gpi_sandwich(&m, &[0.7, 1.7], 2, &settings(2000), RngStream::new(2, 1)).unwrap();
        assert!(matches!(out.upper, Err(GpiError::UpperBoundUnavailable(_))));
    }

    #[test]
    fn lt_gap_examples() {
        let m = model(3.0, corr2(0.6), vec![1, 1]);
        let t = [SymMat::from_diagonal(&[0.5]), SymMat::from_diagonal(&[0.5])];
        let gap = lt_order_gap(&m, 2, &t).unwrap();
        let expected = (4.0f64 - 0.36).powf(-1.5) - 4f64.powf(-1.5);
        assert_relative_eq!(gap, expected, max_relative = 1e-12);
        assert!(gap > 0.0);
        let zero = [SymMat::zeros(1), SymMat::zeros(1)];
        assert_eq!(lt_order_gap(&m, 2, &zero).unwrap(), 0.0);
        let diag = model(3.0, SymMat::from_diagonal(&[1.0, 2.0]), vec![1, 1]);
        assert_eq!(lt_order_gap(&diag, 2, &t).unwrap(), 0.0);
    }

    #[test]
    fn decorrelation_factor_scalar() {
        let m = model(4.0, corr2(0.5), vec![1, 1]);
        assert_relative_eq!(log_det_decorrelation(&m, 1).unwrap().exp(), 0.75, max_relative = 1e-14);
        let v = opposite_gpi_lower(&m, &[0.5, 1.0], &settings(200_000), RngStream::new(3, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(opposite_gpi_lower(&m, &[2.0, 1.0], &settings(100), RngStream::new(3, 0)).is_err());
    }

    #[test]
    fn opposite_upper_scalar() {
        let m = model(5.0, corr2(0.7), vec![1, 1]);
        let v = opposite_gpi_upper(&m, &[0.4, 1.0], &settings(200_000), RngStream::new(4, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
    }

    #[test]
    fn positive_powers_trivial_and_scalar() {
        let m = model(6.0, SymMat::identity(4), vec![2, 2]);
        let v = positive_power_check(&m, &[0.0, 0.0], 2, &settings(100), RngStream::new(5, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.lhs.is_exact() && v.rhs.is_exact());
        let m = model(4.0, corr2(0.6), vec![1, 1]);
        let v = positive_power_check(&m, &[1.0, 1.0], 2, &settings(100_000), RngStream::new(5, 1)).unwrap();
        // E X₁X₂ = α² + 2αρ² against α²
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.rhs.is_exact());
        assert_relative_eq!(v.rhs.value(), 16.0, max_relative = 1e-14);
    }

    #[test]
    fn correlation_thresholds_and_degenerate_events() {
        let m = model(4.0, corr2(0.8), vec![1, 1]);
        let out = minor_correlation_check(&m, None, 2, &settings(100_000), RngStream::new(6, 0)).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Holds);
        for (i, t) in out.thresholds.iter().enumerate() {
            // median of χ²(4) is about 3.357
            assert!((t - 3.357).abs() < 0.2, "threshold {i}: {t}");
        }
        let tiny = [1e-12, 1e-12];
        assert!(matches!(
            minor_correlation_check(&m, Some(&tiny), 2, &settings(1000), RngStream::new(6, 1)),
            Err(GpiError::DegenerateEvent(_))
        ));
    }

    #[test]
    fn eigen_determinant_identity() {
        let m = model(4.0, SymMat::identity(2), vec![2]);
        let v = eigen_gpi_check(&m, &[1.0, 1.0], 2, &settings(200_000), RngStream::new(7, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        let exact = m.log_det_moment(1.0).unwrap().exp();
        let lhs = v.lhs;
        assert!((lhs.value() - exact).abs() < 4.0 * lhs.stderr(), "{} vs {exact}", lhs.value());
        let zero = eigen_gpi_check(&m, &[0.0, 0.0], 2, &settings(10), RngStream::new(7, 1)).unwrap();
        assert!(zero.lhs.is_exact());
    }

    #[test]
    fn bernstein_examples() {
        let one = SymMat::from_diagonal(&[1.0]);
        let konst = BernsteinSpec::new(SymMat::from_diagonal(&[2.0]), vec![]).unwrap();
        let m = model(3.0, corr2(0.6), vec![1, 1]);
        let v = bernstein_pair_check(&m, &konst, &konst, &settings(100), RngStream::new(8, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        assert_eq!(v.lhs.value(), 4.0);
        let f = BernsteinSpec::new(SymMat::zeros(1), vec![(1.0, one)]).unwrap();
        let v = bernstein_pair_check(&m, &f, &f, &settings(200_000), RngStream::new(8, 1)).unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        // E(1 − e^{−X}) for χ²(3) is 1 − 3^{−3/2}
        assert_relative_eq!(v.rhs.value(), (1.0 - 3f64.powf(-1.5)).powi(2), max_relative = 1e-13);
        assert!(BernsteinSpec::new(SymMat::zeros(1), vec![(-1.0, SymMat::identity(1))]).is_err());
    }
}
