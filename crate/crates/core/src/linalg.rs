//! Dense symmetric-matrix primitives.
//!
//! Everything here operates on small dense matrices (the harness never goes
//! beyond a few dozen rows) and is a pure function of its inputs. Block
//! structure is described by [`BlockSpec`]; all block indices are 0-based.

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Relative definiteness tolerance used when callers have no better value.
pub const DEFAULT_PD_TOL: f64 = 1e-12;

/// Largest relative asymmetry accepted (and then averaged away) by [`SymMat::new`].
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("pivot block is numerically singular")]
    SingularPivot,
    #[error("block index ({i}, {j}) out of range for {d} blocks")]
    IndexOutOfRange { i: usize, j: usize, d: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("invalid block sizes: {0}")]
    InvalidBlocks(String),
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Dense symmetric matrix. Symmetry holds exactly: the constructor rejects
/// inputs that are visibly asymmetric and averages away rounding-level noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat(DMatrix<f64>);

impl SymMat {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let p = m.nrows();
        if p == 0 {
            return Err(LinalgError::InvalidBlocks("empty matrix".into()));
        }
        if m.ncols() != p {
            return Err(LinalgError::DimensionMismatch { expected: p, got: m.ncols() });
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).amax() / scale;
        if !asym.is_finite() || asym > SYMMETRY_TOL {
            return Err(LinalgError::NotSymmetric(asym));
        }
        let mut s = m;
        for i in 0..p {
            for j in (i + 1)..p {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Ok(Self(s))
    }

    pub fn from_row_slice(p: usize, data: &[f64]) -> Result<Self> {
        if data.len() != p * p {
            return Err(LinalgError::DimensionMismatch { expected: p * p, got: data.len() });
        }
        Self::new(DMatrix::from_row_slice(p, p, data))
    }

    pub fn identity(p: usize) -> Self {
        Self(DMatrix::identity(p, p))
    }

    pub fn zeros(p: usize) -> Self {
        Self(DMatrix::zeros(p, p))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Wraps a matrix already known to be symmetric (e.g. `A Aᵀ`), forcing
    /// exact symmetry by copying the lower triangle upward.
    pub(crate) fn from_lower(mut m: DMatrix<f64>) -> Self {
        let p = m.nrows();
        for j in 0..p {
            for i in (j + 1)..p {
                m[(j, i)] = m[(i, j)];
            }
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        let p = self.dim();
        let mut out = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Principal submatrix on a contiguous index range.
    pub fn principal(&self, range: Range<usize>) -> Self {
        let n = range.len();
        Self(self.0.view((range.start, range.start), (n, n)).into_owned())
    }

    /// `ln |S|` for positive definite `S`.
    pub fn log_det(&self) -> Result<f64> {
        log_det_pd(&self.0)
    }

    pub fn inverse(&self) -> Result<Self> {
        let chol = self.0.clone().cholesky().ok_or(LinalgError::NotPositiveDefinite)?;
        Ok(Self::from_lower(chol.inverse()))
    }

    pub fn is_diagonal(&self) -> bool {
        let p = self.dim();
        (0..p).all(|i| (0..p).all(|j| i == j || self.0[(i, j)] == 0.0))
    }
}

/// Partition `p = p₁ + … + p_d` of the rows/columns into contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(LinalgError::InvalidBlocks("need at least one block".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(LinalgError::InvalidBlocks("block sizes must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in &sizes {
            acc += s;
            offsets.push(acc);
        }
        Ok(Self { sizes, offsets })
    }

    /// A single block covering the whole matrix.
    pub fn single(p: usize) -> Self {
        Self::new(vec![p]).expect("positive dimension")
    }

    /// `p` blocks of size one.
    pub fn scalars(p: usize) -> Self {
        Self::new(vec![1; p]).expect("positive dimension")
    }

    pub fn d(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// Row range of block `i`.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Row range spanned by the consecutive blocks `blocks`.
    pub fn span(&self, blocks: Range<usize>) -> Range<usize> {
        self.offsets[blocks.start]..self.offsets[blocks.end]
    }

    /// Block spec for the consecutive blocks `blocks`.
    pub fn sub(&self, blocks: Range<usize>) -> Self {
        Self::new(self.sizes[blocks].to_vec()).expect("non-empty sub-range")
    }
}

/// Positive definiteness by pivoted Cholesky: every pivot must exceed
/// `tol · max diagonal entry`.
pub fn is_positive_definite(s: &SymMat, tol: f64) -> bool {
    let p = s.dim();
    let mut a = s.0.clone();
    let max_diag = (0..p).map(|i| a[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) || !max_diag.is_finite() {
        return false;
    }
    let threshold = tol * max_diag;
    let mut perm: Vec<usize> = (0..p).collect();
    for k in 0..p {
        // choose the largest remaining diagonal entry
        let (mut best, mut best_val) = (k, a[(perm[k], perm[k])]);
        for (idx, &r) in perm.iter().enumerate().skip(k + 1) {
            if a[(r, r)] > best_val {
                best = idx;
                best_val = a[(r, r)];
            }
        }
        perm.swap(k, best);
        let pk = perm[k];
        let pivot = a[(pk, pk)];
        if !(pivot > threshold) {
            return false;
        }
        let root = pivot.sqrt();
        for &r in &perm[k + 1..] {
            a[(r, pk)] /= root;
        }
        for (ii, &r) in perm.iter().enumerate().skip(k + 1) {
            let lr = a[(r, pk)];
            for &c in &perm[k + 1..=ii] {
                let v = a[(r, c)] - lr * a[(c, pk)];
                a[(r, c)] = v;
                a[(c, r)] = v;
            }
        }
    }
    true
}

/// `ln |A|` through a Cholesky factorization.
pub fn log_det_pd(a: &DMatrix<f64>) -> Result<f64> {
    let chol = a.clone().cholesky().ok_or(LinalgError::NotPositiveDefinite)?;
    let l = chol.l();
    Ok(2.0 * (0..a.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// `ln |A|` of a principal block `A[range, range]`, computed in place on a
/// scratch buffer. Returns `None` when the block is not positive definite.
pub fn log_det_block(a: &DMatrix<f64>, range: Range<usize>, scratch: &mut Vec<f64>) -> Option<f64> {
    let n = range.len();
    scratch.clear();
    scratch.resize(n * n, 0.0);
    for j in 0..n {
        for i in j..n {
            scratch[i * n + j] = a[(range.start + i, range.start + j)];
        }
    }
    let mut log_det = 0.0;
    for j in 0..n {
        let mut diag = scratch[j * n + j];
        for k in 0..j {
            diag -= scratch[j * n + k] * scratch[j * n + k];
        }
        if !(diag > 0.0) {
            return None;
        }
        let root = diag.sqrt();
        scratch[j * n + j] = root;
        log_det += root.ln();
        for i in (j + 1)..n {
            let mut v = scratch[i * n + j];
            for k in 0..j {
                v -= scratch[i * n + k] * scratch[j * n + k];
            }
            scratch[i * n + j] = v / root;
        }
    }
    Some(2.0 * log_det)
}

/// Block lower-triangular factor `M` with `M Mᵀ = S`, whose diagonal blocks
/// are the symmetric positive definite square roots of the successive
/// Schur-reduced diagonal blocks.
pub fn block_cholesky(s: &SymMat, spec: &BlockSpec) -> Result<DMatrix<f64>> {
    let p = s.dim();
    if spec.total() != p {
        return Err(LinalgError::DimensionMismatch { expected: p, got: spec.total() });
    }
    let mut m = DMatrix::zeros(p, p);
    // Remaining Schur-reduced trailing matrix.
    let mut rest = s.0.clone();
    for i in 0..spec.d() {
        let r = spec.range(i);
        let tail = r.end..p;
        let local = r.start;
        let ni = r.len();
        let diag = SymMat::new(rest.view((0, 0), (ni, ni)).into_owned())?;
        let mii = sqrt_pd(&diag)?;
        m.view_mut((r.start, r.start), (ni, ni)).copy_from(mii.matrix());
        if tail.is_empty() {
            break;
        }
        let nt = tail.len();
        let below = rest.view((ni, 0), (nt, ni)).into_owned();
        // M_ji = S_ji M_ii^{-1}  (M_ii symmetric)
        let mii_inv = mii.inverse()?;
        let col = &below * mii_inv.matrix();
        m.view_mut((tail.start, local), (nt, ni)).copy_from(&col);
        let trailing = rest.view((ni, ni), (nt, nt)).into_owned() - &col * col.transpose();
        rest = SymMat::new(trailing)?.into_inner();
    }
    Ok(m)
}

fn solve_pivot(pivot: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(chol) = pivot.clone().cholesky() {
        return Ok(chol.solve(rhs));
    }
    let lu = pivot.clone().lu();
    let u = lu.u();
    let n = pivot.nrows();
    let max = (0..n).map(|i| u[(i, i)].abs()).fold(0.0, f64::max);
    let min = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-14 * max {
        return Err(LinalgError::SingularPivot);
    }
    lu.solve(rhs).ok_or(LinalgError::SingularPivot)
}

fn gather(s: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| s[(rows[i], cols[j])])
}

/// `S_kk − S_kp S_pp⁻¹ S_pk` on explicit index sets.
pub fn schur_complement_indices(s: &SymMat, keep: &[usize], pivot: &[usize]) -> Result<SymMat> {
    let p = s.dim();
    if keep.iter().chain(pivot).any(|&i| i >= p) {
        return Err(LinalgError::IndexOutOfRange { i: p, j: p, d: p });
    }
    if keep.iter().any(|k| pivot.contains(k)) {
        return Err(LinalgError::InvalidBlocks("keep and pivot overlap".into()));
    }
    let skk = gather(&s.0, keep, keep);
    if pivot.is_empty() {
        return SymMat::new(skk);
    }
    let skp = gather(&s.0, keep, pivot);
    let spp = gather(&s.0, pivot, pivot);
    let solved = solve_pivot(&spp, &skp.transpose())?;
    SymMat::new(skk - &skp * solved)
}

fn block_indices(spec: &BlockSpec, blocks: Range<usize>) -> Vec<usize> {
    spec.span(blocks).collect()
}

/// Schur complement of the blocks `pivot` within the blocks `keep ∪ pivot`.
pub fn schur_complement(
    s: &SymMat,
    spec: &BlockSpec,
    keep: Range<usize>,
    pivot: Range<usize>,
) -> Result<SymMat> {
    if spec.total() != s.dim() {
        return Err(LinalgError::DimensionMismatch { expected: s.dim(), got: spec.total() });
    }
    if keep.end > spec.d() || pivot.end > spec.d() {
        return Err(LinalgError::IndexOutOfRange { i: keep.end, j: pivot.end, d: spec.d() });
    }
    schur_complement_indices(s, &block_indices(spec, keep), &block_indices(spec, pivot))
}

/// Inverse assembled from the 2×2 block formula with the leading
/// `split × split` block as pivot.
pub fn block_inverse_2x2(s: &SymMat, split: usize) -> Result<SymMat> {
    let p = s.dim();
    if split == 0 || split >= p {
        return Err(LinalgError::IndexOutOfRange { i: split, j: split, d: p });
    }
    let n2 = p - split;
    let m11 = s.0.view((0, 0), (split, split)).into_owned();
    let m12 = s.0.view((0, split), (split, n2)).into_owned();
    let m21 = m12.transpose();
    let m22 = s.0.view((split, split), (n2, n2)).into_owned();

    let id1 = DMatrix::identity(split, split);
    let m11_inv = solve_pivot(&m11, &id1)?;
    let star = &m22 - &m21 * &m11_inv * &m12;
    let star_inv = solve_pivot(&star, &DMatrix::identity(n2, n2))?;

    let upper_right = -(&m11_inv * &m12 * &star_inv);
    let upper_left = &m11_inv + &m11_inv * &m12 * &star_inv * &m21 * &m11_inv;
    let mut inv = DMatrix::zeros(p, p);
    inv.view_mut((0, 0), (split, split)).copy_from(&upper_left);
    inv.view_mut((0, split), (split, n2)).copy_from(&upper_right);
    inv.view_mut((split, 0), (n2, split)).copy_from(&upper_right.transpose());
    inv.view_mut((split, split), (n2, n2)).copy_from(&star_inv);

    let residual = (&s.0 * &inv - DMatrix::<f64>::identity(p, p)).norm();
    if !(residual <= 1e-10 * (p as f64).sqrt().max(1.0) * s.0.norm() * inv.norm()) {
        return Err(LinalgError::SingularPivot);
    }
    Ok(SymMat::from_lower(inv))
}

/// `diag(A, B)`.
pub fn direct_sum(a: &SymMat, b: &SymMat) -> SymMat {
    let (na, nb) = (a.dim(), b.dim());
    let mut m = DMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(&a.0);
    m.view_mut((na, na), (nb, nb)).copy_from(&b.0);
    SymMat(m)
}

/// Direct sum of any number of blocks.
pub fn direct_sum_all(blocks: &[SymMat]) -> SymMat {
    let p: usize = blocks.iter().map(SymMat::dim).sum();
    let mut m = DMatrix::zeros(p, p);
    let mut off = 0;
    for b in blocks {
        let n = b.dim();
        m.view_mut((off, off), (n, n)).copy_from(&b.0);
        off += n;
    }
    SymMat(m)
}

/// The unique symmetric positive definite square root.
pub fn sqrt_pd(s: &SymMat) -> Result<SymMat> {
    let eig = SymmetricEigen::new(s.0.clone());
    let max = eig.eigenvalues.amax();
    if !(max > 0.0) || eig.eigenvalues.iter().any(|&l| !(l > DEFAULT_PD_TOL * max)) {
        return Err(LinalgError::NotPositiveDefinite);
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    let q = &eig.eigenvectors;
    let r = q * DMatrix::from_diagonal(&roots) * q.transpose();
    Ok(SymMat::from_lower(r))
}

/// `S^{-1/2}` for positive definite `S`.
pub fn inv_sqrt_pd(s: &SymMat) -> Result<SymMat> {
    let eig = SymmetricEigen::new(s.0.clone());
    let max = eig.eigenvalues.amax();
    if !(max > 0.0) || eig.eigenvalues.iter().any(|&l| !(l > DEFAULT_PD_TOL * max)) {
        return Err(LinalgError::NotPositiveDefinite);
    }
    let roots = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    let q = &eig.eigenvectors;
    Ok(SymMat::from_lower(q * DMatrix::from_diagonal(&roots) * q.transpose()))
}

/// Spectrum in descending order (Householder tridiagonalization followed by
/// implicit symmetric QR).
pub fn sym_eigenvalues(s: &SymMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(s.0.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Descending spectrum of a raw symmetric matrix, reusing its storage.
pub fn sym_eigenvalues_of(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// The `p_i × p_j` block `S_ij`.
pub fn block_view(s: &SymMat, spec: &BlockSpec, i: usize, j: usize) -> Result<DMatrix<f64>> {
    if i >= spec.d() || j >= spec.d() {
        return Err(LinalgError::IndexOutOfRange { i, j, d: spec.d() });
    }
    if spec.total() != s.dim() {
        return Err(LinalgError::DimensionMismatch { expected: s.dim(), got: spec.total() });
    }
    let (ri, rj) = (spec.range(i), spec.range(j));
    Ok(s.0.view((ri.start, rj.start), (ri.len(), rj.len())).into_owned())
}

/// `Σ_{1:k−1,1:k−1} ⊕ Σ_{k:d,k:d}`: drop the cross blocks at block split `k`
/// (0-based index of the first block of the second group).
pub fn split_block_diagonal(s: &SymMat, spec: &BlockSpec, k: usize) -> SymMat {
    let r = spec.span(0..k);
    let mut m = s.0.clone();
    let p = s.dim();
    for i in 0..p {
        for j in 0..p {
            if r.contains(&i) != r.contains(&j) {
                m[(i, j)] = 0.0;
            }
        }
    }
    SymMat(m)
}
