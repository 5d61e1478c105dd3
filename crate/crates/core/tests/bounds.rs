mod common;

use common::*;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use pgw::bounds::*;
use pgw::experiments::job_rng;
use pgw::generators::erdos_renyi;
use pgw::network::{uniform, Matrix};
use pgw::ot::DiscreteMeasure;
use pgw::pgw::empirical_pm_net;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pairs(m: &DiscreteMeasure) -> Vec<(f64, f64)> {
    m.points().iter().copied().zip(m.weights().iter().copied()).collect()
}

/// Nested distance with quantile inner costs and an LP outer problem.
fn nested_oracle(dx: &WeightDistribution, dy: &WeightDistribution, p: f64, q: f64) -> f64 {
    let cost = Matrix::from_fn(dx.atoms().len(), dy.atoms().len(), |i, j| {
        quantile_wasserstein(&pairs(&dx.atoms()[i]), &pairs(&dy.atoms()[j]), p).powf(q)
    });
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..cost.nrows())
        .map(|i| (0..cost.ncols()).map(|j| lp.add_var(cost[(i, j)], (0.0, f64::INFINITY))).collect())
        .collect();
    for (i, &a) in dx.weights().iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(&row, ComparisonOp::Eq, a);
    }
    for (j, &b) in dy.weights().iter().enumerate() {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        lp.add_constraint(&col, ComparisonOp::Eq, b);
    }
    lp.solve().unwrap().objective().max(0.0).powf(1.0 / q)
}

fn empirical(seed: u64, n: usize, rho: f64, samples: usize) -> WeightDistribution {
    let graphs = (0..samples).map(|s| erdos_renyi(n, rho, &mut job_rng(seed, &[s as u64])).unwrap().adjacency()).collect();
    weight_distribution(&empirical_pm_net(graphs, uniform(n)).unwrap())
}

#[test]
fn small_er_distribution_is_binomial() {
    let d = er_edge_distribution(3, 0.5).unwrap();
    assert_eq!(d.atoms().len(), 4);
    let expected = [1.0, 3.0, 3.0, 1.0];
    for (k, (atom, w)) in d.atoms().iter().zip(d.weights()).enumerate() {
        assert!((w - expected[k] / 8.0).abs() <= 1e-15);
        let one = atom.points().iter().zip(atom.weights()).filter(|(x, _)| **x == 1.0).map(|(_, w)| *w).sum::<f64>();
        assert!((one - 2.0 * k as f64 / 9.0).abs() <= 1e-15);
    }
}

#[test]
fn er_weights_match_log_binomial_directly() {
    let (n, rho) = (12usize, 0.3);
    let m = n * (n - 1) / 2;
    let d = er_edge_distribution(n, rho).unwrap();
    let ln_choose = |k: usize| (1..=k).map(|i| ((m - k + i) as f64 / i as f64).ln()).sum::<f64>();
    for (k, w) in d.weights().iter().enumerate() {
        let want = (ln_choose(k) + k as f64 * rho.ln() + (m - k) as f64 * (1.0 - rho).ln()).exp();
        assert!((w - want).abs() <= 1e-12 * want.max(1e-300) + 1e-300, "k = {k}");
    }
}

#[test]
fn nested_bound_matches_the_oracle_for_er_samples() {
    let model = er_edge_distribution(50, 0.5).unwrap();
    for seed in 0..3 {
        let emp = empirical(seed, 50, 0.5, 20);
        let got = nested_wasserstein_lb(&emp, &model, 1.0, 2.0).unwrap();
        let want = nested_oracle(&emp, &model, 1.0, 2.0);
        assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
    }
}

#[test]
fn more_samples_approach_the_model() {
    let model = er_edge_distribution(20, 0.4).unwrap();
    let closer = (0..10)
        .filter(|&seed| {
            let small = nested_wasserstein_lb(&empirical(seed, 20, 0.4, 25), &model, 1.0, 2.0).unwrap();
            let large = nested_wasserstein_lb(&empirical(100 + seed, 20, 0.4, 400), &model, 1.0, 2.0).unwrap();
            large < small
        })
        .count();
    assert!(closer >= 9, "only {closer} of 10");
}

#[test]
fn weight_distribution_merges_identical_samples() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let g = erdos_renyi(8, 0.5, &mut r).unwrap().adjacency();
    let x = empirical_pm_net(vec![g.clone(), g], uniform(8)).unwrap();
    assert_eq!(weight_distribution(&x).atoms().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nested_bound_is_a_pseudometric(s in 0u64..1000) {
        let mut r = ChaCha8Rng::seed_from_u64(s);
        let nets: Vec<_> = (0..3).map(|_| { let nu = prob(&mut r, 3); pm_net(&mut r, 4, nu, true) }).collect();
        let d: Vec<_> = nets.iter().map(weight_distribution).collect();
        let w = |a: usize, b: usize| nested_wasserstein_lb(&d[a], &d[b], 1.0, 2.0).unwrap();
        prop_assert!(w(0, 0) <= 1e-12);
        prop_assert!((w(0, 1) - w(1, 0)).abs() <= 1e-12);
        prop_assert!(w(0, 2) <= w(0, 1) + w(1, 2) + 1e-9);
    }
}
