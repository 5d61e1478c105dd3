//! Sampling convergence on the Karate Club perturbation model: general PGW
//! between two independent empirical pm-nets as the sample count grows,
//! against the average pairwise GW baseline.

use serde::Serialize;

use crate::error::Result;
use crate::experiments::{adjacency_samples, job_rng, median};
use crate::generators::{karate_club, perturb_graph, Graph};
use crate::gw::{gw2, SolverOptions};
use crate::network::{uniform, Matrix, MeasureNetwork};
use crate::par::{try_map_indexed, Execution};
use crate::pgw::{empirical_pm_net, pgw_general};

#[derive(Debug, Clone)]
pub struct RandomGraphConfig {
    pub ks: Vec<usize>,
    pub samples: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverOptions,
    pub exec: Execution,
}

impl Default for RandomGraphConfig {
    fn default() -> Self {
        Self {
            ks: vec![1, 2, 3, 4, 5],
            samples: vec![10, 20, 50, 100, 150],
            trials: 10,
            seed: 0,
            solver: SolverOptions::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub k: usize,
    pub samples: usize,
    /// General PGW per trial.
    pub pgw: Vec<f64>,
    /// Per trial, the mean GW over sample pairs in draw order.
    pub gw: Vec<f64>,
    pub median_pgw: f64,
    pub median_gw: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomGraphReport {
    pub cells: Vec<Cell>,
}

fn draw(base: &Graph, k: usize, count: usize, seed: u64, ids: [u64; 4]) -> Result<Vec<Graph>> {
    let mut rng = job_rng(seed, &ids);
    (0..count).map(|_| perturb_graph(base, k, &mut rng)).collect()
}

/// One trial: two independent estimates with `samples` draws each.
pub fn trial(base: &Graph, k: usize, samples: usize, trial: usize, cfg: &RandomGraphConfig) -> Result<(f64, f64)> {
    let ids = |side: u64| [k as u64, samples as u64, trial as u64, side];
    let a = adjacency_samples(&draw(base, k, samples, cfg.seed, ids(0))?);
    let b = adjacency_samples(&draw(base, k, samples, cfg.seed, ids(1))?);
    let mu = uniform(base.n());
    let gw = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let x = MeasureNetwork::new(x.clone(), mu.clone())?;
            let y = MeasureNetwork::new(y.clone(), mu.clone())?;
            Ok(gw2(&x, &y, &cfg.solver)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let x = empirical_pm_net(a, mu.clone())?;
    let y = empirical_pm_net(b, mu)?;
    let pgw = pgw_general(&x, &y, &cfg.solver)?.value;
    Ok((pgw, gw.iter().sum::<f64>() / gw.len() as f64))
}

pub fn run(cfg: &RandomGraphConfig) -> Result<RandomGraphReport> {
    let base = karate_club();
    let grid: Vec<(usize, usize)> = cfg.ks.iter().flat_map(|&k| cfg.samples.iter().map(move |&n| (k, n))).collect();
    let jobs = grid.len() * cfg.trials;
    let results = try_map_indexed(jobs, cfg.exec, |j| {
        let (k, n) = grid[j / cfg.trials];
        trial(&base, k, n, j % cfg.trials, cfg)
    })?;
    let cells = grid
        .iter()
        .enumerate()
        .map(|(c, &(k, samples))| {
            let chunk = &results[c * cfg.trials..(c + 1) * cfg.trials];
            let pgw: Vec<f64> = chunk.iter().map(|r| r.0).collect();
            let gw: Vec<f64> = chunk.iter().map(|r| r.1).collect();
            Cell { k, samples, median_pgw: median(&pgw), median_gw: median(&gw), pgw, gw }
        })
        .collect();
    Ok(RandomGraphReport { cells })
}

impl RandomGraphReport {
    /// Rows `(k, samples, median PGW, median GW)`.
    pub fn tables(&self) -> Vec<(String, Matrix)> {
        let rows = self.cells.len();
        let m = Matrix::from_fn(rows, 4, |i, j| {
            let c = &self.cells[i];
            [c.k as f64, c.samples as f64, c.median_pgw, c.median_gw][j]
        });
        vec![("medians".into(), m)]
    }
}
