//! Lower bounds on PGW from weight distributions and from GW-space transport.

use crate::error::{PgwError, Result};
use crate::gw::{gw2, same_measure, Init, SolverOptions};
use crate::network::{Matrix, PmNet};
use crate::ot::{solve_linear_ot, wasserstein_1d, DiscreteMeasure};
use crate::par::{try_map_indexed, Execution};
use crate::validate::check_probability;

const ATOM_TOL: f64 = 1e-12;

/// A finitely supported distribution over finitely supported distributions
/// on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    atoms: Vec<DiscreteMeasure>,
    weights: Vec<f64>,
}

fn same_atom(a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    a.points().len() == b.points().len()
        && a.points().iter().zip(b.points()).all(|(x, y)| (x - y).abs() <= ATOM_TOL)
        && a.weights().iter().zip(b.weights()).all(|(x, y)| (x - y).abs() <= ATOM_TOL)
}

impl WeightDistribution {
    /// Builds the distribution, merging atoms that agree to `1e-12` after
    /// canonicalization.
    pub fn new(atoms: Vec<DiscreteMeasure>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(PgwError::DimensionMismatch(format!("{} atoms, {} weights", atoms.len(), weights.len())));
        }
        check_probability(&weights).map_err(|v| PgwError::InvalidInput(v.to_string()))?;
        let mut merged: Vec<DiscreteMeasure> = Vec::new();
        let mut mass: Vec<f64> = Vec::new();
        for (atom, w) in atoms.into_iter().zip(weights) {
            let atom = atom.canonical();
            match merged.iter().position(|a| same_atom(a, &atom)) {
                Some(k) => mass[k] += w,
                None => {
                    merged.push(atom);
                    mass.push(w);
                }
            }
        }
        Ok(Self { atoms: merged, weights: mass })
    }

    pub fn atoms(&self) -> &[DiscreteMeasure] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mixture of the atoms, weighted by the outer measure.
    pub fn mean_measure(&self) -> DiscreteMeasure {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (atom, w) in self.atoms.iter().zip(&self.weights) {
            points.extend_from_slice(atom.points());
            weights.extend(atom.weights().iter().map(|v| v * w));
        }
        DiscreteMeasure::new(points, weights).expect("mixture of probability measures").canonical()
    }
}

/// Pushforward of `mu (x) mu` under each kernel, weighted by `nu`.
pub fn weight_distribution(x: &PmNet) -> WeightDistribution {
    let mu = x.mu();
    let n = mu.len();
    let atoms = x
        .kernels()
        .iter()
        .map(|k| {
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    points.push(k[(i, j)]);
                    weights.push(mu[i] * mu[j]);
                }
            }
            DiscreteMeasure::new(points, weights).expect("product of probability vectors").canonical()
        })
        .collect();
    WeightDistribution::new(atoms, x.nu().to_vec()).expect("valid parameter measure")
}

/// `ln P(Binomial(trials, rho) = k)` for all `k`, by the ratio recursion.
fn binomial_log_pmf(trials: usize, rho: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(trials + 1);
    let mut lp = trials as f64 * (1.0 - rho).ln();
    let ratio = (rho / (1.0 - rho)).ln();
    out.push(lp);
    for k in 0..trials {
        lp += ((trials - k) as f64 / (k + 1) as f64).ln() + ratio;
        out.push(lp);
    }
    out
}

/// Exact distribution of total edges of the Erdos-Renyi model `G(n, rho)`
/// with the uniform node measure: `k` edges fill `2k` of the `n^2` entries of
/// the adjacency matrix, so the atom is Bernoulli with mass `2k / n^2` on 1.
pub fn er_edge_distribution(n: usize, rho: f64) -> Result<WeightDistribution> {
    if n == 0 {
        return Err(PgwError::InvalidInput("n must be positive".into()));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(PgwError::InvalidInput(format!("rho = {rho} outside [0, 1]")));
    }
    let pairs = n * (n - 1) / 2;
    let n2 = (n * n) as f64;
    let atom = |k: usize| DiscreteMeasure::bernoulli(2.0 * k as f64 / n2);
    if rho == 0.0 || pairs == 0 {
        return WeightDistribution::new(vec![atom(0)], vec![1.0]);
    }
    if rho == 1.0 {
        return WeightDistribution::new(vec![atom(pairs)], vec![1.0]);
    }
    let logs = binomial_log_pmf(pairs, rho);
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for (k, lp) in logs.into_iter().enumerate() {
        let w = lp.exp();
        if w > 0.0 {
            atoms.push(atom(k));
            weights.push(w);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    WeightDistribution::new(atoms, weights)
}

/// `W_q` over `(P(R), W_p)` between two weight distributions. Half of this
/// value bounds the PGW distance from below.
pub fn nested_wasserstein_lb(dx: &WeightDistribution, dy: &WeightDistribution, p: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(PgwError::InvalidInput(format!("outer order q = {q} must be >= 1")));
    }
    let (s, t) = (dx.atoms.len(), dy.atoms.len());
    let mut cost = Matrix::zeros(s, t);
    for i in 0..s {
        for j in 0..t {
            cost[(i, j)] = wasserstein_1d(&dx.atoms[i], &dy.atoms[j], p)?.powf(q);
        }
    }
    let sol = solve_linear_ot(&cost, &dx.weights, &dy.weights)?;
    Ok(sol.value.max(0.0).powf(1.0 / q))
}

/// Transport over `(nu_X, nu_Y)` with ground cost the per-parameter GW
/// estimates. Because every entry is a local-solver upper bound this is an
/// estimate of the GW-space bound, not a certified lower bound.
pub fn gw_space_lb(x: &PmNet, y: &PmNet, q: f64, opts: &SolverOptions, exec: Execution) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(PgwError::InvalidInput(format!("outer order q = {q} must be >= 1")));
    }
    let (tx, ty) = (x.num_params(), y.num_params());
    let try_identity = same_measure(x.mu(), y.mu()) && !matches!(opts.init, Init::Identity);
    let entries = try_map_indexed(tx * ty, exec, |k| -> Result<f64> {
        let (t, s) = (k / ty, k % ty);
        let (xt, ys) = (x.slice(t), y.slice(s));
        let mut v = gw2(&xt, &ys, opts)?.value;
        if try_identity && v > 0.0 {
            let id = SolverOptions { init: Init::Identity, ..opts.clone() };
            v = v.min(gw2(&xt, &ys, &id)?.value);
        }
        Ok(v)
    })?;
    let cost = Matrix::from_fn(tx, ty, |t, s| entries[t * ty + s].powf(q));
    let sol = solve_linear_ot(&cost, x.nu(), y.nu())?;
    Ok(sol.value.max(0.0).powf(1.0 / q))
}
