//! Feature selection over parameter weights: a clustering cost on pairwise
//! PGW distances, its gradient in `nu`, the alternating minimization, and the
//! nearest-neighbour classifiers used to evaluate the selected weights.

use log::{debug, warn};

use crate::coupling::Coupling;
use crate::distortion::distortion2_squared;
use crate::error::{PgwError, Result};
use crate::gw::{gw2, Init, SolverOptions};
use crate::network::{Matrix, PmNet};
use crate::ot::project_simplex;
use crate::par::{try_map_indexed, upper_pairs, Execution};
use crate::pgw::pgw_fixed;

/// Floor applied to `nu` before taking logarithms.
pub const NU_FLOOR: f64 = 1e-12;

/// Pm-nets with integer class labels sorted so that same-class items are
/// contiguous.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    nets: Vec<PmNet>,
    labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(nets: Vec<PmNet>, labels: Vec<usize>) -> Result<Self> {
        if nets.is_empty() || nets.len() != labels.len() {
            return Err(PgwError::InvalidInput(format!("{} nets with {} labels", nets.len(), labels.len())));
        }
        if labels.windows(2).any(|w| w[0] > w[1]) {
            return Err(PgwError::InvalidInput("labels must be sorted".into()));
        }
        let t = nets[0].num_params();
        if nets.iter().any(|x| x.num_params() != t) {
            return Err(PgwError::ParameterMismatch("nets have different parameter counts".into()));
        }
        Ok(Self { nets, labels })
    }

    pub fn nets(&self) -> &[PmNet] {
        &self.nets
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.nets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nets.is_empty()
    }

    pub fn num_params(&self) -> usize {
        self.nets[0].num_params()
    }
}

fn check_nu(nu: &[f64], t: usize) -> Result<()> {
    if nu.len() != t {
        return Err(PgwError::DimensionMismatch(format!("nu has {} entries, expected {t}", nu.len())));
    }
    crate::validate::check_probability(nu).map_err(|v| PgwError::InvalidInput(v.to_string()))
}

/// `KL(nu | uniform)` with `nu` floored at [`NU_FLOOR`] inside the logarithm.
pub fn kl_to_uniform(nu: &[f64]) -> f64 {
    let t = nu.len() as f64;
    nu.iter().map(|&v| v * (v.max(NU_FLOOR) * t).ln()).sum()
}

fn block_ratio(m: &Matrix, labels: &[usize]) -> (f64, f64) {
    let mut inside = 0.0;
    let mut total = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)].abs();
            total += v;
            if labels[i] == labels[j] {
                inside += v;
            }
        }
    }
    (inside, total)
}

/// Fraction of the entry mass of `m` on same-label pairs plus
/// `lambda KL(nu | uniform)`. An all-zero `m` contributes nothing.
pub fn cost_lambda(m: &Matrix, labels: &[usize], lambda: f64, nu: &[f64]) -> Result<f64> {
    let n = labels.len();
    if m.shape() != (n, n) {
        return Err(PgwError::DimensionMismatch(format!("matrix is {:?} for {n} labels", m.shape())));
    }
    if !(lambda >= 0.0) {
        return Err(PgwError::InvalidInput(format!("lambda = {lambda}")));
    }
    let (inside, total) = block_ratio(m, labels);
    let ratio = if total > 0.0 {
        inside / total
    } else {
        warn!("distance matrix is zero; cost reduces to the KL term");
        0.0
    };
    Ok(ratio + if lambda > 0.0 { lambda * kl_to_uniform(nu) } else { 0.0 })
}

/// Pairwise fixed-parameter solves over a dataset.
#[derive(Debug, Clone)]
pub struct PairwiseFit {
    /// Squared PGW values `GW_C(X_i, X_j)^2`, zero diagonal.
    pub distances: Matrix,
    /// Per parameter, the symmetric matrix of `dis_2(pi_ij, X_i^t, X_j^t)^2`.
    pub distortions: Vec<Matrix>,
    /// Optimal couplings in [`upper_pairs`] order.
    pub couplings: Vec<Coupling>,
    pub converged: bool,
}

/// `1/4 sum_t nu_t D_t`, the squared distances implied by frozen couplings.
pub fn squared_distances(distortions: &[Matrix], nu: &[f64]) -> Matrix {
    let mut m = &distortions[0] * (0.25 * nu[0]);
    for (d, &w) in distortions.iter().zip(nu).skip(1) {
        m += d * (0.25 * w);
    }
    m
}

/// Solves every pair of the dataset under parameter weights `nu`, optionally
/// warm-starting from earlier couplings.
pub fn pairwise_fit(
    data: &LabeledDataset,
    nu: &[f64],
    warm: Option<&[Coupling]>,
    opts: &SolverOptions,
    exec: Execution,
) -> Result<PairwiseFit> {
    check_nu(nu, data.num_params())?;
    let nets: Vec<PmNet> = data.nets.iter().map(|x| x.with_nu(nu.to_vec())).collect::<Result<_>>()?;
    let pairs = upper_pairs(nets.len());
    if let Some(w) = warm {
        if w.len() != pairs.len() {
            return Err(PgwError::DimensionMismatch("warm start has the wrong number of couplings".into()));
        }
    }
    let solved = try_map_indexed(pairs.len(), exec, |k| {
        let (i, j) = pairs[k];
        let mut o = opts.clone();
        if let Some(w) = warm {
            o.init = Init::Coupling(w[k].clone());
        }
        let r = pgw_fixed(&nets[i], &nets[j], &o)?;
        let dis = (0..nu.len())
            .map(|t| distortion2_squared(&r.coupling, nets[i].kernel(t), nets[j].kernel(t)))
            .collect::<Result<Vec<f64>>>()?;
        Ok::<_, PgwError>((r, dis))
    })?;
    let n = nets.len();
    let mut distances = Matrix::zeros(n, n);
    let mut distortions = vec![Matrix::zeros(n, n); nu.len()];
    let mut couplings = Vec::with_capacity(pairs.len());
    let mut converged = true;
    for (&(i, j), (r, dis)) in pairs.iter().zip(solved) {
        let v = r.value * r.value;
        distances[(i, j)] = v;
        distances[(j, i)] = v;
        for (d, &x) in distortions.iter_mut().zip(&dis) {
            d[(i, j)] = x;
            d[(j, i)] = x;
        }
        converged &= r.converged;
        couplings.push(r.coupling);
    }
    Ok(PairwiseFit { distances, distortions, couplings, converged })
}

/// Gradient in `nu` of [`cost_lambda`] with the pair couplings held fixed,
/// given the per-parameter squared distortions of those couplings.
pub fn cost_gradient_nu(distortions: &[Matrix], labels: &[usize], lambda: f64, nu: &[f64]) -> Result<Vec<f64>> {
    if distortions.len() != nu.len() || distortions.is_empty() {
        return Err(PgwError::DimensionMismatch(format!(
            "{} distortion matrices for {} weights",
            distortions.len(),
            nu.len()
        )));
    }
    let m = squared_distances(distortions, nu);
    let (inside, total) = block_ratio(&m, labels);
    let mut grad = vec![0.0; nu.len()];
    if total > 0.0 {
        let s = inside / total;
        for (g, d) in grad.iter_mut().zip(distortions) {
            for j in 0..d.ncols() {
                for i in 0..d.nrows() {
                    let w = if labels[i] == labels[j] { 1.0 - s } else { -s };
                    *g += w * 0.25 * d[(i, j)];
                }
            }
            *g /= total;
        }
    }
    if lambda > 0.0 {
        let t = nu.len() as f64;
        for (g, &v) in grad.iter_mut().zip(nu) {
            *g += lambda * ((v.max(NU_FLOOR) * t).ln() + 1.0);
        }
    }
    Ok(grad)
}

#[derive(Debug, Clone)]
pub struct NuOptions {
    /// Pair solver settings.
    pub solver: SolverOptions,
    /// Alternation rounds of (pair solves, `nu` descent).
    pub max_rounds: usize,
    /// Projected-gradient steps per round with couplings frozen.
    pub inner_steps: usize,
    /// Initial step length of each backtracking search.
    pub step: f64,
    pub max_halvings: usize,
    /// Stop when a round lowers the cost by less than this fraction.
    pub rel_tol: f64,
    pub exec: Execution,
}

impl Default for NuOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            max_rounds: 20,
            inner_steps: 100,
            step: 1.0,
            max_halvings: 30,
            rel_tol: 1e-6,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuFit {
    pub nu: Vec<f64>,
    /// Cost after every full round, starting from uniform `nu`.
    pub trace: Vec<f64>,
    pub fit: PairwiseFit,
}

/// Projected gradient descent on `nu` with frozen distortions. Each step
/// halves its length until the cost decreases.
fn descend_nu(distortions: &[Matrix], labels: &[usize], lambda: f64, nu: &[f64], opts: &NuOptions) -> Result<(Vec<f64>, f64)> {
    let mut nu = nu.to_vec();
    let mut cost = cost_lambda(&squared_distances(distortions, &nu), labels, lambda, &nu)?;
    for _ in 0..opts.inner_steps {
        let g = cost_gradient_nu(distortions, labels, lambda, &nu)?;
        let mut step = opts.step;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = nu.iter().zip(&g).map(|(v, gi)| v - step * gi).collect();
            let trial = project_simplex(&trial);
            let c = cost_lambda(&squared_distances(distortions, &trial), labels, lambda, &trial)?;
            if c < cost {
                accepted = Some((trial, c));
                break;
            }
            step *= 0.5;
        }
        let Some((next, c)) = accepted else { break };
        let done = cost - c <= 1e-12 * cost.abs().max(1e-300);
        nu = next;
        cost = c;
        if done {
            break;
        }
    }
    Ok((nu, cost))
}

/// Alternates all-pairs solves at the current `nu` with projected gradient
/// descent on `nu`, starting from uniform weights. A round whose re-solved
/// cost rises is rejected and ends the alternation.
pub fn optimize_nu(data: &LabeledDataset, lambda: f64, opts: &NuOptions) -> Result<NuFit> {
    if !(lambda >= 0.0) {
        return Err(PgwError::InvalidInput(format!("lambda = {lambda}")));
    }
    let t = data.num_params();
    let mut nu = crate::network::uniform(t);
    let mut fit = pairwise_fit(data, &nu, None, &opts.solver, opts.exec)?;
    let mut cost = cost_lambda(&fit.distances, &data.labels, lambda, &nu)?;
    let mut trace = vec![cost];
    for round in 0..opts.max_rounds {
        let (next_nu, _) = descend_nu(&fit.distortions, &data.labels, lambda, &nu, opts)?;
        let next_fit = pairwise_fit(data, &next_nu, Some(&fit.couplings), &opts.solver, opts.exec)?;
        let next_cost = cost_lambda(&next_fit.distances, &data.labels, lambda, &next_nu)?;
        debug!("round {round}: cost {next_cost} nu {next_nu:?}");
        if next_cost > cost {
            break;
        }
        let done = cost - next_cost <= opts.rel_tol * cost.abs();
        nu = next_nu;
        fit = next_fit;
        cost = next_cost;
        trace.push(cost);
        if done {
            break;
        }
    }
    Ok(NuFit { nu, trace, fit })
}

/// Leave-one-out nearest-neighbour accuracy of a distance matrix; ties go to
/// the smallest index.
pub fn loonn_score(d: &Matrix, labels: &[usize]) -> Result<f64> {
    let n = labels.len();
    if n < 2 || d.shape() != (n, n) {
        return Err(PgwError::InvalidInput(format!("need n >= 2 and an n x n matrix, got {:?}", d.shape())));
    }
    let hits = (0..n)
        .filter(|&i| {
            let nearest = (0..n).filter(|&j| j != i).fold(None, |best: Option<usize>, j| match best {
                Some(b) if d[(i, b)] <= d[(i, j)] => Some(b),
                _ => Some(j),
            });
            nearest.is_some_and(|j| labels[j] == labels[i])
        })
        .count();
    Ok(hits as f64 / n as f64)
}

fn argmin_label(row: &[f64], labels: &[usize]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v < row[best] {
            best = j;
        }
    }
    labels[best]
}

fn check_split(train: &LabeledDataset, test: &[PmNet]) -> Result<()> {
    if train.is_empty() {
        return Err(PgwError::InvalidInput("empty training set".into()));
    }
    if test.iter().any(|x| x.num_params() != train.num_params()) {
        return Err(PgwError::ParameterMismatch("test and training nets have different parameter counts".into()));
    }
    Ok(())
}

/// Labels each test net by its nearest training net under fixed-parameter PGW
/// with weights `nu`.
pub fn nn_classify(train: &LabeledDataset, test: &[PmNet], nu: &[f64], opts: &SolverOptions, exec: Execution) -> Result<Vec<usize>> {
    check_split(train, test)?;
    check_nu(nu, train.num_params())?;
    let tr: Vec<PmNet> = train.nets.iter().map(|x| x.with_nu(nu.to_vec())).collect::<Result<_>>()?;
    let te: Vec<PmNet> = test.iter().map(|x| x.with_nu(nu.to_vec())).collect::<Result<_>>()?;
    let n = tr.len();
    let values = try_map_indexed(te.len() * n, exec, |k| pgw_fixed(&te[k / n], &tr[k % n], opts).map(|r| r.value))?;
    Ok(values.chunks(n).map(|row| argmin_label(row, &train.labels)).collect())
}

/// Majority vote of one GW nearest-neighbour classifier per parameter; ties
/// go to the smaller label.
pub fn ensemble_classify(train: &LabeledDataset, test: &[PmNet], opts: &SolverOptions, exec: Execution) -> Result<Vec<usize>> {
    check_split(train, test)?;
    let (n, t) = (train.len(), train.num_params());
    let values = try_map_indexed(test.len() * n * t, exec, |k| {
        let (q, rest) = (k / (n * t), k % (n * t));
        let (i, s) = (rest / t, rest % t);
        gw2(&test[q].slice(s), &train.nets[i].slice(s), opts).map(|r| r.value)
    })?;
    let out = (0..test.len())
        .map(|q| {
            let mut votes: Vec<usize> = (0..t)
                .map(|s| {
                    let row: Vec<f64> = (0..n).map(|i| values[(q * n + i) * t + s]).collect();
                    argmin_label(&row, &train.labels)
                })
                .collect();
            votes.sort_unstable();
            let mut best = (votes[0], 0);
            let mut k = 0;
            while k < votes.len() {
                let run = votes[k..].iter().take_while(|&&v| v == votes[k]).count();
                if run > best.1 {
                    best = (votes[k], run);
                }
                k += run;
            }
            best.0
        })
        .collect();
    Ok(out)
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len().max(1) as f64
}
