//! Exact linear optimal transport, one-dimensional Wasserstein distances and
//! the Euclidean projection onto the probability simplex.

mod network_simplex;
mod simplex;
mod wasserstein1d;

pub use simplex::project_simplex;
pub use wasserstein1d::{wasserstein_1d, DiscreteMeasure};

use crate::coupling::Coupling;
use crate::error::{PgwError, Result};
use crate::network::Matrix;
use crate::validate::{check_probability, MARGINAL_TOL};
use network_simplex::NetworkSimplex;

/// Optimal vertex of the transportation polytope together with a dual
/// certificate.
#[derive(Debug, Clone)]
pub struct OtSolution {
    pub coupling: Coupling,
    /// `<cost, coupling>`.
    pub value: f64,
    /// Dual potentials with `u_i + v_j <= cost_ij`, tight on the support.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Nonzero entries as `(row, col, mass)`.
    pub support: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 50_000_000;

/// Solves `min <cost, pi>` over couplings of `a` and `b` exactly.
pub fn solve_linear_ot(cost: &Matrix, a: &[f64], b: &[f64]) -> Result<OtSolution> {
    let (n, m) = cost.shape();
    if a.len() != n || b.len() != m {
        return Err(PgwError::DimensionMismatch(format!(
            "cost is {n}x{m}, marginals have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    check_probability(a).map_err(|v| PgwError::Infeasible(format!("source marginal: {v}")))?;
    check_probability(b).map_err(|v| PgwError::Infeasible(format!("target marginal: {v}")))?;
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if (sa - sb).abs() > MARGINAL_TOL {
        return Err(PgwError::Infeasible(format!("mass mismatch {sa} vs {sb}")));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(PgwError::NonFinite);
    }

    // shift and rescale to costs in [0, 1]; the optimal vertices are
    // unchanged and the pivoting tolerance becomes relative to the cost range
    let shift = cost.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = cost.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - shift;
    let scale = if range > 0.0 { range } else { 1.0 };
    let mut flat = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            flat.push((cost[(i, j)] - shift) / scale);
        }
    }
    let sol = NetworkSimplex::new(&flat, a, b).run(MAX_PIVOTS).map_err(PgwError::PivotLimit)?;

    let mut pi = Matrix::zeros(n, m);
    let mut value = 0.0;
    for &(i, j, f) in &sol.flows {
        pi[(i, j)] = f;
        value += f * cost[(i, j)];
    }
    let u = sol.u.iter().map(|x| x * scale + shift).collect();
    let v = sol.v.iter().map(|x| x * scale).collect();
    Ok(OtSolution {
        coupling: Coupling::from_parts(pi, a.to_vec(), b.to_vec()),
        value,
        u,
        v,
        support: sol.flows,
        pivots: sol.pivots,
    })
}
