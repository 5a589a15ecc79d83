//! Zonal polynomials `C_κ` in the normalization `Σ_{κ⊢k} C_κ(X) = (tr X)^k`.
//!
//! Each `C_κ` is stored by its coefficients in the monomial symmetric basis.
//! The coefficients follow from the classical triangular recurrence over
//! partitions dominated by `κ`; the overall scale of each polynomial is then
//! fixed by matching the multinomial expansion of `(tr X)^k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::partition::{partitions_of, Partition};
use super::{Result, SpecialError};

/// Largest matrix dimension accepted by [`zonal_expansion_coefficients`].
pub const EXPANSION_CAP: usize = 5;

/// Zonal polynomials of one degree in the monomial basis.
#[derive(Debug, Clone)]
pub struct ZonalTable {
    degree: u32,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `coeffs[κ][λ]`: coefficient of `m_λ` in `C_κ`.
    coeffs: Vec<Vec<f64>>,
}

impl ZonalTable {
    fn build(k: u32) -> Self {
        let partitions = partitions_of(k, k.max(1) as usize);
        let n = partitions.len();
        let index: HashMap<Partition, usize> =
            partitions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let mut raw = vec![vec![0.0; n]; n];
        for (a, kappa) in partitions.iter().enumerate() {
            raw[a][a] = 1.0;
            let rho_k = kappa.rho();
            for b in (a + 1)..n {
                let lambda = &partitions[b];
                if !lambda.dominated_by(kappa) {
                    continue;
                }
                let parts = lambda.parts();
                let mut acc = 0.0;
                for i in 0..parts.len() {
                    for j in (i + 1)..parts.len() {
                        for t in 1..=parts[j] {
                            let mut mu = parts.to_vec();
                            mu[i] += t;
                            mu[j] -= t;
                            mu.sort_unstable_by(|x, y| y.cmp(x));
                            let mu = Partition::new(mu).expect("sorted");
                            let c = raw[a][index[&mu]];
                            if c != 0.0 {
                                let gap = (parts[i] + t) as f64 - (parts[j] - t) as f64;
                                acc += gap * c;
                            }
                        }
                    }
                }
                raw[a][b] = acc / (rho_k - lambda.rho());
            }
        }

        // (tr X)^k = Σ_λ k!/∏λ_i! m_λ; solve for the scale of each C_κ from
        // the top of the (triangular) system down.
        let mut scale = vec![0.0; n];
        for b in 0..n {
            let target = multinomial(k, partitions[b].parts());
            let above: f64 = (0..b).map(|a| scale[a] * raw[a][b]).sum();
            scale[b] = (target - above) / raw[b][b];
        }
        let coeffs = raw
            .into_iter()
            .zip(&scale)
            .map(|(row, s)| row.into_iter().map(|c| c * s).collect())
            .collect();
        Self { degree: k, partitions, index, coeffs }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// All partitions of the degree, reverse lexicographic.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Coefficient of `m_λ` in `C_κ`.
    pub fn coefficient(&self, kappa: &Partition, lambda: &Partition) -> Option<f64> {
        Some(self.coeffs[*self.index.get(kappa)?][*self.index.get(lambda)?])
    }

    /// `C_κ` at the given spectrum.
    pub fn evaluate(&self, kappa: &Partition, eigenvalues: &[f64]) -> Result<f64> {
        let a = *self.index.get(kappa).ok_or_else(|| {
            SpecialError::Domain(format!("{kappa} is not a partition of {}", self.degree))
        })?;
        if kappa.len() > eigenvalues.len() {
            return Err(SpecialError::Domain(format!(
                "{kappa} has more parts than the {} eigenvalues",
                eigenvalues.len()
            )));
        }
        Ok(self.partitions
            .iter()
            .zip(&self.coeffs[a])
            .filter(|(lambda, c)| **c != 0.0 && lambda.len() <= eigenvalues.len())
            .map(|(lambda, c)| c * monomial_symmetric(lambda, eigenvalues))
            .sum())
    }
}

fn multinomial(k: u32, parts: &[u32]) -> f64 {
    let ln_fact = |n: u32| super::ln_gamma(n as f64 + 1.0);
    (ln_fact(k) - parts.iter().map(|&p| ln_fact(p)).sum::<f64>()).exp().round()
}

/// Monomial symmetric function `m_λ(x)`: the sum of `x^β` over the distinct
/// rearrangements `β` of `λ` padded with zeros.
pub fn monomial_symmetric(lambda: &Partition, x: &[f64]) -> f64 {
    let p = x.len();
    if lambda.len() > p {
        return 0.0;
    }
    // exponents in ascending order so `next_permutation` walks all arrangements
    let mut exps: Vec<u32> = (0..p).map(|j| lambda.part(p - 1 - j)).collect();
    let mut total = 0.0;
    loop {
        total += exps.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>();
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

static TABLES: OnceLock<RwLock<HashMap<u32, Arc<ZonalTable>>>> = OnceLock::new();

/// Cached zonal table of degree `k`. The monomial coefficients do not depend
/// on the matrix dimension, so one table serves every `p`.
pub fn zonal_table(k: u32) -> Arc<ZonalTable> {
    let cache = TABLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = cache.read().expect("zonal cache poisoned").get(&k) {
        return Arc::clone(t);
    }
    let built = Arc::new(ZonalTable::build(k));
    let mut w = cache.write().expect("zonal cache poisoned");
    Arc::clone(w.entry(k).or_insert(built))
}

/// `C_κ` evaluated at a spectrum.
pub fn zonal_polynomial(kappa: &Partition, eigenvalues: &[f64]) -> Result<f64> {
    zonal_table(kappa.weight()).evaluate(kappa, eigenvalues)
}

/// Coefficients `a_κ` with `∏_{i<j}(λ_i + λ_j) = Σ_κ a_κ C_κ(Λ)` for `p`
/// eigenvalues. The product has degree `p(p−1)/2`.
#[derive(Debug, Clone)]
pub struct ZonalExpansion {
    pub p: usize,
    pub degree: u32,
    pub terms: Vec<(Partition, f64)>,
}

impl ZonalExpansion {
    pub fn evaluate(&self, eigenvalues: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(kappa, a)| a * zonal_polynomial(kappa, eigenvalues).expect("validated partition"))
            .sum()
    }
}

fn pair_sum_product(x: &[f64]) -> f64 {
    let mut prod = 1.0;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            prod *= x[i] + x[j];
        }
    }
    prod
}

/// Expands `∏_{i<j}(λ_i + λ_j)` in the zonal basis.
///
/// The polynomial is multiplied out in the monomial basis and the triangular
/// zonal system is solved against it; the result is then checked pointwise on
/// 50 random spectra.
pub fn zonal_expansion_coefficients(p: usize) -> Result<ZonalExpansion> {
    if p == 0 || p > EXPANSION_CAP {
        return Err(SpecialError::CapExceeded { p, cap: EXPANSION_CAP });
    }
    let degree = (p * (p - 1) / 2) as u32;

    // monomial coefficients of the product, keyed by exponent vectors
    let mut poly: HashMap<Vec<u32>, f64> = HashMap::from([(vec![0; p], 1.0)]);
    for i in 0..p {
        for j in (i + 1)..p {
            let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
            for (e, c) in &poly {
                for v in [i, j] {
                    let mut e2 = e.clone();
                    e2[v] += 1;
                    *next.entry(e2).or_insert(0.0) += c;
                }
            }
            poly = next;
        }
    }

    let table = zonal_table(degree);
    let lambdas: Vec<Partition> = table.partitions().iter().filter(|l| l.len() <= p).cloned().collect();
    let target: Vec<f64> = lambdas
        .iter()
        .map(|l| {
            let e: Vec<u32> = (0..p).map(|j| l.part(j)).collect();
            poly.get(&e).copied().unwrap_or(0.0)
        })
        .collect();

    let mut a = vec![0.0; lambdas.len()];
    for b in 0..lambdas.len() {
        let above: f64 = (0..b)
            .map(|c| a[c] * table.coefficient(&lambdas[c], &lambdas[b]).unwrap())
            .sum();
        a[b] = (target[b] - above) / table.coefficient(&lambdas[b], &lambdas[b]).unwrap();
    }
    let expansion = ZonalExpansion {
        p,
        degree,
        terms: lambdas.into_iter().zip(a).filter(|(_, c)| *c != 0.0).collect(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5a0e_a1e5 ^ p as u64);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: Vec<f64> = (0..p).map(|_| rng.random_range(0.1..3.0)).collect();
        let exact = pair_sum_product(&x);
        let got = expansion.evaluate(&x);
        worst = worst.max((got - exact).abs() / exact.abs());
    }
    if !(worst <= 1e-8) {
        return Err(SpecialError::Reconstruction(worst));
    }
    Ok(expansion)
}
