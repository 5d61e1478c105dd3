//! Clustering of empirical random graph models by the Wasserstein distance
//! between their distributions of total edges, scored by LOONN.

use serde::Serialize;

use crate::bounds::{nested_wasserstein_lb, weight_distribution, WeightDistribution};
use crate::error::Result;
use crate::experiments::{adjacency_samples, job_rng, mean};
use crate::featsel::loonn_score;
use crate::generators::{erdos_renyi, sbm, Graph};
use crate::network::{uniform, Matrix};
use crate::par::{try_map_indexed, upper_pairs, Execution};
use crate::pgw::empirical_pm_net;

/// A random graph model class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Model {
    ErdosRenyi { n: usize, rho: f64 },
    /// Two equal blocks with within- and between-block probabilities.
    Sbm { n: usize, within: f64, between: f64 },
}

impl Model {
    fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Graph> {
        match *self {
            Model::ErdosRenyi { n, rho } => erdos_renyi(n, rho, rng),
            Model::Sbm { n, within, between } => sbm(&[n / 2, n - n / 2], within, between, rng),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterConfig {
    pub classes: Vec<Model>,
    pub ks: Vec<usize>,
    pub models_per_class: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl ClusterConfig {
    pub fn erdos_renyi() -> Self {
        let classes = [0.44, 0.46, 0.48, 0.50].iter().map(|&rho| Model::ErdosRenyi { n: 50, rho }).collect();
        Self { classes, ks: vec![1, 5, 10, 15, 20], models_per_class: 10, repetitions: 10, seed: 0, exec: Execution::Parallel }
    }

    pub fn sbm() -> Self {
        let classes = [(0.5, 0.28), (0.5, 0.3), (0.6, 0.28), (0.6, 0.3)]
            .iter()
            .map(|&(within, between)| Model::Sbm { n: 50, within, between })
            .collect();
        Self { classes, ..Self::erdos_renyi() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LoonnRow {
    pub k: usize,
    /// Score per repetition.
    pub scores: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSetting {
    pub classes: Vec<Model>,
    pub loonn: Vec<LoonnRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub erdos_renyi: ClusterSetting,
    pub sbm: ClusterSetting,
}

/// Pairwise `W_2` over `W_1` distances between total-edge distributions.
pub fn edge_distance_matrix(dists: &[WeightDistribution], exec: Execution) -> Result<Matrix> {
    let n = dists.len();
    let pairs = upper_pairs(n);
    let vals = try_map_indexed(pairs.len(), exec, |k| {
        let (i, j) = pairs[k];
        nested_wasserstein_lb(&dists[i], &dists[j], 1.0, 2.0)
    })?;
    let mut d = Matrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(vals) {
        d[(i, j)] = v;
        d[(j, i)] = v;
    }
    Ok(d)
}

/// LOONN score of one repetition at sample count `k`.
pub fn repetition(cfg: &ClusterConfig, setting: u64, k: usize, rep: usize) -> Result<f64> {
    let per = cfg.models_per_class;
    let total = cfg.classes.len() * per;
    let dists = try_map_indexed(total, cfg.exec, |idx| {
        let c = idx / per;
        let mut rng = job_rng(cfg.seed, &[setting, k as u64, rep as u64, idx as u64]);
        let graphs = (0..k).map(|_| cfg.classes[c].sample(&mut rng)).collect::<Result<Vec<_>>>()?;
        let n = graphs[0].n();
        Ok::<_, crate::error::PgwError>(weight_distribution(&empirical_pm_net(adjacency_samples(&graphs), uniform(n))?))
    })?;
    let labels: Vec<usize> = (0..total).map(|i| i / per).collect();
    loonn_score(&edge_distance_matrix(&dists, cfg.exec)?, &labels)
}

pub fn run_setting(cfg: &ClusterConfig, setting: u64) -> Result<ClusterSetting> {
    let loonn = cfg
        .ks
        .iter()
        .map(|&k| {
            let scores = (0..cfg.repetitions).map(|r| repetition(cfg, setting, k, r)).collect::<Result<Vec<_>>>()?;
            Ok(LoonnRow { k, mean: mean(&scores), scores })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterSetting { classes: cfg.classes.clone(), loonn })
}

pub fn run(er: &ClusterConfig, sbm: &ClusterConfig) -> Result<ClusterReport> {
    Ok(ClusterReport { erdos_renyi: run_setting(er, 0)?, sbm: run_setting(sbm, 1)? })
}

impl ClusterReport {
    /// Rows `(k, mean LOONN)` per setting.
    pub fn tables(&self) -> Vec<(String, Matrix)> {
        let table = |s: &ClusterSetting| Matrix::from_fn(s.loonn.len(), 2, |i, j| [s.loonn[i].k as f64, s.loonn[i].mean][j]);
        vec![("loonn_er".into(), table(&self.erdos_renyi)), ("loonn_sbm".into(), table(&self.sbm))]
    }
}
