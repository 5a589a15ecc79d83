//! Sampler consistency: Monte Carlo moments of the Bartlett sampler against
//! the closed forms they should reproduce.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wishart_gpi::gpi::{estimate, lt_order_gap};
use wishart_gpi::linalg::{log_det_block, split_block_diagonal, BlockSpec, SymMat};
use wishart_gpi::wishart::{random_correlation, RngStream, WishartModel};

const N: u64 = 100_000;

fn within(mc: f64, se: f64, exact: f64, k: f64) -> bool {
    (mc - exact).abs() <= k * se
}

#[test]
fn first_and_second_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sigma = random_correlation(3, &mut rng, 0.1).scaled(1.7);
    let alpha = 4.6;
    let model = WishartModel::new(alpha, sigma.clone(), BlockSpec::single(3)).unwrap();
    let stream = RngStream::new(3, 0);
    for (i, j) in [(0, 0), (1, 2), (2, 0)] {
        let e = estimate(N, stream.child(i as u64 * 3 + j as u64), || model.sampler(), |s, r| s.draw(r)[(i, j)]).unwrap();
        assert!(within(e.mean, e.stderr, alpha * sigma.get(i, j), 4.0), "E X_{i}{j}: {e:?}");
        // Var X_ij = α(Σ_ij² + Σ_ii Σ_jj)
        let var_want = alpha * (sigma.get(i, j).powi(2) + sigma.get(i, i) * sigma.get(j, j));
        let var_mc = e.stderr.powi(2) * N as f64;
        assert!((var_mc / var_want - 1.0).abs() < 0.05, "Var X_{i}{j}: {var_mc} vs {var_want}");
    }
}

#[test]
fn laplace_transform_matches_sampler() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [1usize, 2, 4] {
        let sigma = random_correlation(p, &mut rng, 0.2);
        let alpha = p as f64 + 0.5 + rng.random_range(0.0..5.0);
        let g = DMatrix::from_fn(p, p, |_, _| rng.random_range(-0.5..0.5));
        let t = SymMat::new(&g * g.transpose()).unwrap();
        let model = WishartModel::new(alpha, sigma, BlockSpec::single(p)).unwrap();
        let exact = model.laplace_transform(&t).unwrap();
        let tm = t.matrix().clone();
        let e = estimate(N, RngStream::new(7, p as u64), || model.sampler(), |s, r| {
            (-(&tm * s.draw(r)).trace()).exp()
        })
        .unwrap();
        assert!(within(e.mean, e.stderr, exact, 4.0), "p={p}: {e:?} vs {exact}");
    }
}

#[test]
fn minor_moments_match_sampler() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = BlockSpec::new(vec![2, 1, 3]).unwrap();
    let sigma = random_correlation(6, &mut rng, 0.1);
    let model = WishartModel::new(9.0, sigma, spec.clone()).unwrap();
    for (i, nu) in [(0, 0.5), (1, -1.2), (2, 1.0), (2, -0.6)] {
        let exact = model.minor_moment(i, nu).unwrap();
        let range = spec.range(i);
        let e = estimate(N, RngStream::new(11, i as u64), || (model.sampler(), Vec::new()), |(s, scratch), r| {
            let x = s.draw(r);
            (nu * log_det_block(x, range.clone(), scratch).unwrap()).exp()
        })
        .unwrap();
        assert!(within(e.mean, e.stderr, exact, 4.0), "block {i}, ν={nu}: {e:?} vs {exact}");
    }
}

#[test]
fn diagonal_block_follows_marginal_law() {
    // 𝔛_ii ~ 𝒲(α, Σ_ii): the block's Laplace transform matches the marginal model's
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = BlockSpec::new(vec![1, 2, 2]).unwrap();
    let sigma = random_correlation(5, &mut rng, 0.1);
    let model = WishartModel::new(6.5, sigma, spec.clone()).unwrap();
    let marginal = model.marginal(1).unwrap();
    assert_eq!(marginal.p(), 2);
    let t = SymMat::from_row_slice(2, &[0.3, 0.1, 0.1, 0.2]).unwrap();
    let exact = marginal.laplace_transform(&t).unwrap();
    let r = spec.range(1);
    let tm = t.matrix().clone();
    let e = estimate(N, RngStream::new(5, 0), || model.sampler(), |s, rng| {
        let x = s.draw(rng);
        let block = x.view((r.start, r.start), (2, 2));
        (-(&tm * block).trace()).exp()
    })
    .unwrap();
    assert!(within(e.mean, e.stderr, exact, 4.0), "{e:?} vs {exact}");
}

#[test]
fn draws_are_reproducible_per_stream() {
    let model = WishartModel::new(3.5, SymMat::identity(3), BlockSpec::single(3)).unwrap();
    let a = model.sample_n(&RngStream::new(9, 1), 5);
    let b = model.sample_n(&RngStream::new(9, 1), 5);
    let c = model.sample_n(&RngStream::new(9, 2), 5);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lt_order_gap_is_nonnegative(seed in any::<u64>(), alpha_excess in 0.0f64..10.0, scale in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = BlockSpec::new(vec![1, 2, 1]).unwrap();
        let sigma = random_correlation(spec.total(), &mut rng, 0.05);
        let model = WishartModel::new(3.0 + alpha_excess, sigma, spec.clone()).unwrap();
        let blocks: Vec<SymMat> = (0..spec.d())
            .map(|i| {
                let g = DMatrix::from_fn(spec.size(i), spec.size(i), |_, _| rng.random_range(-1.0..1.0) * scale);
                SymMat::new(&g * g.transpose()).unwrap()
            })
            .collect();
        for k in 2..=spec.d() {
            prop_assert!(lt_order_gap(&model, k, &blocks).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn lt_order_gap_vanishes_when_split_is_independent(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = BlockSpec::new(vec![2, 1, 2]).unwrap();
        let sigma = split_block_diagonal(&random_correlation(5, &mut rng, 0.05), &spec, k - 1);
        let model = WishartModel::new(6.0, sigma, spec.clone()).unwrap();
        let blocks: Vec<SymMat> = (0..spec.d()).map(|i| SymMat::identity(spec.size(i)).scaled(0.4)).collect();
        prop_assert!(lt_order_gap(&model, k, &blocks).unwrap().abs() <= 1e-12);
    }
}
