//! Property tests for the block linear algebra layer.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wishart_gpi::linalg::{
    block_cholesky, block_inverse_2x2, block_view, direct_sum_all, inv_sqrt_pd, is_positive_definite,
    schur_complement, split_block_diagonal, sqrt_pd, sym_eigenvalues, BlockSpec, SymMat, DEFAULT_PD_TOL,
};

/// `G Gᵀ + 0.1 I` with standard-normal-ish entries; well conditioned enough
/// for 1e−9 identities.
fn random_pd(p: usize, seed: u64) -> SymMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    SymMat::new(&g * g.transpose() + DMatrix::identity(p, p) * 0.1).unwrap()
}

fn block_sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 2..=4)
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol * b.amax().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_cholesky_reconstructs(sizes in block_sizes(), seed in any::<u64>()) {
        let spec = BlockSpec::new(sizes).unwrap();
        let s = random_pd(spec.total(), seed);
        let m = block_cholesky(&s, &spec).unwrap();
        prop_assert!(close(&(&m * m.transpose()), s.matrix(), 1e-9));
        for i in 0..spec.d() {
            for j in (i + 1)..spec.d() {
                let upper = m.view((spec.range(i).start, spec.range(j).start), (spec.size(i), spec.size(j)));
                prop_assert!(upper.amax() == 0.0);
            }
            let r = spec.range(i);
            let diag = m.view((r.start, r.start), (r.len(), r.len())).into_owned();
            prop_assert!(close(&diag, &diag.transpose(), 1e-12));
        }
    }

    #[test]
    fn block_inverse_matches_direct(p in 2usize..=7, split in 1usize..=6, seed in any::<u64>()) {
        prop_assume!(split < p);
        let s = random_pd(p, seed);
        let inv = block_inverse_2x2(&s, split).unwrap();
        prop_assert!(close(&(s.matrix() * inv.matrix()), &DMatrix::identity(p, p), 1e-8));
        prop_assert!(close(inv.matrix(), s.inverse().unwrap().matrix(), 1e-8));
    }

    #[test]
    fn schur_complement_is_inverse_block(sizes in block_sizes(), seed in any::<u64>()) {
        // (S⁻¹)_{22}⁻¹ = S_22 − S_21 S_11⁻¹ S_12 with block 0 as pivot
        let spec = BlockSpec::new(sizes).unwrap();
        let s = random_pd(spec.total(), seed);
        let d = spec.d();
        let sc = schur_complement(&s, &spec, 1..d, 0..1).unwrap();
        let tail = spec.span(1..d);
        let inv = s.inverse().unwrap().principal(tail);
        prop_assert!(close(sc.inverse().unwrap().matrix(), inv.matrix(), 1e-8));
        prop_assert!(is_positive_definite(&sc, DEFAULT_PD_TOL));
    }

    #[test]
    fn fischer_inequality(sizes in block_sizes(), seed in any::<u64>(), k in 1usize..=3) {
        let spec = BlockSpec::new(sizes).unwrap();
        prop_assume!(k < spec.d());
        let s = random_pd(spec.total(), seed);
        let split = split_block_diagonal(&s, &spec, k);
        prop_assert!(s.log_det().unwrap() <= split.log_det().unwrap() + 1e-10);
        let blocks: Vec<SymMat> = (0..spec.d()).map(|i| s.principal(spec.range(i))).collect();
        let diag = direct_sum_all(&blocks);
        prop_assert!(split.log_det().unwrap() <= diag.log_det().unwrap() + 1e-10);
    }

    #[test]
    fn square_roots(p in 1usize..=6, seed in any::<u64>()) {
        let s = random_pd(p, seed);
        let r = sqrt_pd(&s).unwrap();
        prop_assert!(close(&(r.matrix() * r.matrix()), s.matrix(), 1e-9));
        let ri = inv_sqrt_pd(&s).unwrap();
        prop_assert!(close(&(ri.matrix() * s.matrix() * ri.matrix()), &DMatrix::identity(p, p), 1e-8));
    }

    #[test]
    fn eigenvalues_sum_and_product(p in 1usize..=7, seed in any::<u64>()) {
        let s = random_pd(p, seed);
        let l = sym_eigenvalues(&s);
        prop_assert!(l.windows(2).all(|w| w[0] >= w[1]));
        let sum: f64 = l.iter().sum();
        prop_assert!((sum - s.trace()).abs() <= 1e-10 * s.trace());
        let log_prod: f64 = l.iter().map(|v| v.ln()).sum();
        prop_assert!((log_prod - s.log_det().unwrap()).abs() <= 1e-8 * log_prod.abs().max(1.0));
    }

    #[test]
    fn block_views_tile_the_matrix(sizes in block_sizes(), seed in any::<u64>()) {
        let spec = BlockSpec::new(sizes).unwrap();
        let s = random_pd(spec.total(), seed);
        for i in 0..spec.d() {
            for j in 0..spec.d() {
                let b = block_view(&s, &spec, i, j).unwrap();
                let direct = s.matrix().view((spec.range(i).start, spec.range(j).start), (spec.size(i), spec.size(j)));
                prop_assert_eq!(b, direct.into_owned());
            }
        }
    }
}
