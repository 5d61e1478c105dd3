//! Nested cycles of cliques compared through heat kernels at several times:
//! a grid over the first parameter weight and a set of seeded restarts at a
//! chosen weight, each summarized by its per-scale cyclic pattern.

use serde::Serialize;

use crate::error::{PgwError, Result};
use crate::generators::{cyclic_block_analysis, nested_cycle_of_cliques};
use crate::gw::{Init, SolverOptions};
use crate::network::{uniform, Matrix, PmNet};
use crate::par::{try_map_indexed, Execution};
use crate::pgw::pgw_fixed;

#[derive(Debug, Clone)]
pub struct NestedConfig {
    pub type_x: Vec<usize>,
    pub type_y: Vec<usize>,
    pub times: Vec<f64>,
    /// Parameter measures for the grid, solved from the product coupling.
    pub grid: Vec<Vec<f64>>,
    /// Parameter measure for the seeded restarts.
    pub nu: Vec<f64>,
    /// Seeded restarts from random vertices of the transport polytope.
    pub runs: usize,
    pub seed: u64,
    pub normalize: bool,
    pub solver: SolverOptions,
    pub exec: Execution,
}

fn two_weights(first: &[f64]) -> Vec<Vec<f64>> {
    first.iter().map(|&a| vec![a, 1.0 - a]).collect()
}

impl NestedConfig {
    pub fn two_levels() -> Self {
        Self {
            type_x: vec![10, 5, 5],
            type_y: vec![10, 5, 20],
            times: vec![50.0, 200.0],
            grid: two_weights(&[0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5]),
            nu: vec![1e-3, 1.0 - 1e-3],
            runs: 10,
            seed: 0,
            normalize: false,
            solver: SolverOptions::default(),
            exec: Execution::Parallel,
        }
    }

    pub fn three_levels() -> Self {
        let (a, b) = (1.29e-4, 3.39e-5);
        let nu = vec![a, b, 1.0 - a - b];
        Self {
            type_x: vec![4, 4, 4, 5],
            type_y: vec![4, 4, 4, 20],
            times: vec![30.0, 100.0, 410.0],
            grid: vec![nu.clone()],
            nu,
            runs: 0,
            ..Self::two_levels()
        }
    }

    pub fn levels(levels: usize) -> Result<Self> {
        match levels {
            2 => Ok(Self::two_levels()),
            3 => Ok(Self::three_levels()),
            _ => Err(PgwError::InvalidInput(format!("levels must be 2 or 3, got {levels}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NestedRun {
    pub nu: Vec<f64>,
    /// Restart seed; `None` for product initialization.
    pub seed: Option<u64>,
    pub value: f64,
    pub cyclic: Vec<bool>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestedReport {
    pub type_x: Vec<usize>,
    pub type_y: Vec<usize>,
    pub times: Vec<f64>,
    pub grid: Vec<NestedRun>,
    pub runs: Vec<NestedRun>,
    /// Restarts whose pattern is cyclic at every scale.
    pub all_scales_cyclic: usize,
    #[serde(skip)]
    pub couplings: Vec<Matrix>,
}

fn heat_net(ty: &[usize], times: &[f64], normalize: bool) -> Result<PmNet> {
    let g = nested_cycle_of_cliques(ty)?;
    let kernels = g.heat_kernels(times)?;
    let labels = times.iter().map(|t| t.to_string()).collect();
    let x = PmNet::new(kernels, uniform(g.n()), uniform(times.len()), labels)?;
    Ok(if normalize { x.frobenius_normalized() } else { x })
}

pub fn run(cfg: &NestedConfig) -> Result<NestedReport> {
    let x = heat_net(&cfg.type_x, &cfg.times, cfg.normalize)?;
    let y = heat_net(&cfg.type_y, &cfg.times, cfg.normalize)?;
    let mut jobs: Vec<(Vec<f64>, Option<u64>)> = cfg.grid.iter().map(|nu| (nu.clone(), None)).collect();
    jobs.extend((0..cfg.runs as u64).map(|r| (cfg.nu.clone(), Some(cfg.seed.wrapping_mul(1 << 16).wrapping_add(r)))));
    let solved = try_map_indexed(jobs.len(), cfg.exec, |k| {
        let (nu, seed) = &jobs[k];
        let (xs, ys) = (x.with_nu(nu.clone())?, y.with_nu(nu.clone())?);
        let opts = match seed {
            Some(s) => SolverOptions { init: Init::Random, seed: *s, ..cfg.solver.clone() },
            None => cfg.solver.clone(),
        };
        let r = pgw_fixed(&xs, &ys, &opts)?;
        let cyclic = cyclic_block_analysis(&r.coupling, &cfg.type_x, &cfg.type_y)?;
        let run = NestedRun { nu: nu.clone(), seed: *seed, value: r.value, cyclic, converged: r.converged, iterations: r.iterations };
        Ok::<_, PgwError>((run, r.coupling.into_matrix()))
    })?;
    let (all, couplings): (Vec<NestedRun>, Vec<Matrix>) = solved.into_iter().unzip();
    let runs = all[cfg.grid.len()..].to_vec();
    let all_scales_cyclic = runs.iter().filter(|r| r.cyclic.iter().all(|&c| c)).count();
    Ok(NestedReport {
        type_x: cfg.type_x.clone(),
        type_y: cfg.type_y.clone(),
        times: cfg.times.clone(),
        grid: all[..cfg.grid.len()].to_vec(),
        runs,
        all_scales_cyclic,
        couplings,
    })
}

impl NestedReport {
    /// Couplings in job order: grid points, then restarts.
    pub fn tables(&self) -> Vec<(String, Matrix)> {
        let names = (0..self.grid.len()).map(|k| format!("coupling_grid{k}")).chain((0..self.runs.len()).map(|k| format!("coupling_run{k}")));
        names.zip(self.couplings.iter().cloned()).collect()
    }
}
