//! Panda graphs: fixed-parameter PGW between a (25, 10, 6) and a
//! (30, 12, 6) panda with head- and ear-masked distance kernels.

use serde::Serialize;

use crate::error::Result;
use crate::generators::{panda, panda_graph, PandaLayout, PandaParts};
use crate::gw::{gw2, SolverOptions};
use crate::network::Matrix;
use crate::pgw::pgw_fixed;

#[derive(Debug, Clone)]
pub struct PandaConfig {
    pub small: (usize, usize, usize),
    pub large: (usize, usize, usize),
    pub solver: SolverOptions,
}

impl Default for PandaConfig {
    fn default() -> Self {
        Self { small: (25, 10, 6), large: (30, 12, 6), solver: SolverOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PandaReport {
    pub value: f64,
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Coupling mass between (head, first ear, second ear) of the two pandas,
    /// with glue vertices counted in their ear.
    pub block_mass: Vec<Vec<f64>>,
    /// Standard GW on the full shortest-path kernels, for comparison.
    pub gw_value: f64,
    #[serde(skip)]
    pub coupling: Matrix,
}

fn part_of(parts: &PandaParts, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for (k, ear) in parts.ears.iter().enumerate() {
        ear.iter().for_each(|&v| out[v] = k + 1);
    }
    out
}

pub fn run(cfg: &PandaConfig) -> Result<PandaReport> {
    let (a, b) = (cfg.small, cfg.large);
    let (gx, x) = panda(a.0, a.1, a.2, PandaLayout::HeadFirst)?;
    let (gy, y) = panda(b.0, b.1, b.2, PandaLayout::EarsFirst)?;
    let r = pgw_fixed(&x, &y, &cfg.solver)?;
    let px = part_of(&panda_graph(a.0, a.1, a.2, PandaLayout::HeadFirst)?.1, gx.n());
    let py = part_of(&panda_graph(b.0, b.1, b.2, PandaLayout::EarsFirst)?.1, gy.n());
    let pi = r.coupling.matrix();
    let mut block_mass = vec![vec![0.0; 3]; 3];
    for i in 0..pi.nrows() {
        for j in 0..pi.ncols() {
            block_mass[px[i]][py[j]] += pi[(i, j)];
        }
    }
    let full = |g: &crate::generators::Graph| -> Result<crate::network::MeasureNetwork> {
        crate::network::MeasureNetwork::uniform(g.shortest_paths()?)
    };
    let gw_value = gw2(&full(&gx)?, &full(&gy)?, &cfg.solver)?.value;
    Ok(PandaReport {
        value: r.value,
        trace: r.trace,
        converged: r.converged,
        iterations: r.iterations,
        block_mass,
        gw_value,
        coupling: pi.clone(),
    })
}

impl PandaReport {
    pub fn tables(&self) -> Vec<(String, Matrix)> {
        vec![("coupling".into(), self.coupling.clone())]
    }
}
