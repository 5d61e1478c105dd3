//! Drone flights: feature selection over the five frames and nearest-neighbour
//! classification of clear versus obstructed flight.

use serde::Serialize;

use crate::error::{PgwError, Result};
use crate::experiments::{job_rng, mean, std_dev};
use crate::featsel::{accuracy, ensemble_classify, nn_classify, optimize_nu, LabeledDataset, NuOptions};
use crate::generators::drone_flight;
use crate::network::{Matrix, PmNet};
use crate::par::{try_map_indexed, Execution};

#[derive(Debug, Clone)]
pub struct DronesConfig {
    /// Flights per class for the feature-selection table.
    pub selection_per_class: usize,
    pub lambdas: Vec<f64>,
    pub trials: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Regularization used to pick the classifier weights.
    pub lambda: f64,
    pub seed: u64,
    pub nu_opts: NuOptions,
    pub exec: Execution,
}

impl Default for DronesConfig {
    fn default() -> Self {
        Self {
            selection_per_class: 5,
            lambdas: vec![0.01, 0.1, 1.0, 10.0],
            trials: 10,
            train_per_class: 10,
            test_per_class: 5,
            lambda: 0.1,
            seed: 0,
            nu_opts: NuOptions::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionRow {
    pub lambda: f64,
    pub nu: Vec<f64>,
    pub cost: f64,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DronesReport {
    pub selection: Vec<SelectionRow>,
    /// PGW nearest-neighbour accuracy per trial.
    pub accuracy_pgw: Vec<f64>,
    /// Per-frame GW majority-vote accuracy per trial.
    pub accuracy_ensemble: Vec<f64>,
    pub mean_accuracy_pgw: f64,
    pub mean_accuracy_ensemble: f64,
    pub std_accuracy_pgw: f64,
    pub std_accuracy_ensemble: f64,
    /// Selected weights per trial.
    pub trial_nu: Vec<Vec<f64>>,
}

/// `count` flights of each class, clear (label 0) first. Flight `k` of class
/// `c` uses stream `(group, c, k)`.
pub fn flights(seed: u64, group: u64, count: usize) -> Result<(Vec<PmNet>, Vec<usize>)> {
    let mut nets = Vec::with_capacity(2 * count);
    let mut labels = Vec::with_capacity(2 * count);
    for class in 0..2u64 {
        for k in 0..count {
            let mut rng = job_rng(seed, &[group, class, k as u64]);
            nets.push(drone_flight(class == 1, &mut rng)?);
            labels.push(class as usize);
        }
    }
    Ok((nets, labels))
}

/// Minimizes the clustering cost on a fresh sample for each `lambda`.
pub fn selection_table(cfg: &DronesConfig) -> Result<Vec<SelectionRow>> {
    let (nets, labels) = flights(cfg.seed, 0, cfg.selection_per_class)?;
    let data = LabeledDataset::new(nets, labels)?;
    cfg.lambdas
        .iter()
        .map(|&lambda| {
            let fit = optimize_nu(&data, lambda, &cfg.nu_opts)?;
            Ok(SelectionRow { lambda, cost: *fit.trace.last().expect("trace starts non-empty"), nu: fit.nu, trace: fit.trace })
        })
        .collect()
}

/// One classification trial: returns (PGW accuracy, ensemble accuracy, weights).
pub fn trial(cfg: &DronesConfig, t: usize) -> Result<(f64, f64, Vec<f64>)> {
    let per = cfg.train_per_class + cfg.test_per_class;
    let (nets, labels) = flights(cfg.seed, 1 + t as u64, per)?;
    let (mut train, mut train_labels, mut test, mut truth) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, (x, l)) in nets.into_iter().zip(labels).enumerate() {
        if k % per < cfg.train_per_class {
            train.push(x);
            train_labels.push(l);
        } else {
            test.push(x);
            truth.push(l);
        }
    }
    let train = LabeledDataset::new(train, train_labels)?;
    let fit = optimize_nu(&train, cfg.lambda, &cfg.nu_opts)?;
    let solver = &cfg.nu_opts.solver;
    let pgw = nn_classify(&train, &test, &fit.nu, solver, cfg.nu_opts.exec)?;
    let ens = ensemble_classify(&train, &test, solver, cfg.nu_opts.exec)?;
    Ok((accuracy(&pgw, &truth), accuracy(&ens, &truth), fit.nu))
}

pub fn run(cfg: &DronesConfig) -> Result<DronesReport> {
    let selection = selection_table(cfg)?;
    let trials = try_map_indexed(cfg.trials, cfg.exec, |t| trial(cfg, t))?;
    if trials.is_empty() {
        return Err(PgwError::InvalidInput("need at least one trial".into()));
    }
    let accuracy_pgw: Vec<f64> = trials.iter().map(|r| r.0).collect();
    let accuracy_ensemble: Vec<f64> = trials.iter().map(|r| r.1).collect();
    Ok(DronesReport {
        selection,
        mean_accuracy_pgw: mean(&accuracy_pgw),
        mean_accuracy_ensemble: mean(&accuracy_ensemble),
        std_accuracy_pgw: std_dev(&accuracy_pgw),
        std_accuracy_ensemble: std_dev(&accuracy_ensemble),
        trial_nu: trials.into_iter().map(|r| r.2).collect(),
        accuracy_pgw,
        accuracy_ensemble,
    })
}

impl DronesReport {
    /// `selection`: rows `(lambda, nu_0..nu_T, cost)`; `accuracy`: rows
    /// `(pgw, ensemble)` per trial.
    pub fn tables(&self) -> Vec<(String, Matrix)> {
        let t = self.selection.first().map_or(0, |r| r.nu.len());
        let sel = Matrix::from_fn(self.selection.len(), t + 2, |i, j| {
            let r = &self.selection[i];
            if j == 0 {
                r.lambda
            } else if j <= t {
                r.nu[j - 1]
            } else {
                r.cost
            }
        });
        let acc = Matrix::from_fn(self.accuracy_pgw.len(), 2, |i, j| [self.accuracy_pgw[i], self.accuracy_ensemble[i]][j]);
        vec![("selection".into(), sel), ("accuracy".into(), acc)]
    }
}
