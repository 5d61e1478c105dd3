//! Order-2 Gromov-Wasserstein distance between measure networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coupling::Coupling;
use crate::error::{PgwError, Result};
use crate::fw::{frank_wolfe, Problem};
use crate::network::{Matrix, MeasureNetwork};
use crate::ot::solve_linear_ot;
use crate::validate::{Validate, MASS_TOL};

/// Starting coupling for the node-level descent.
#[derive(Debug, Clone, Default)]
pub enum Init {
    /// `mu_X mu_Y^T`.
    #[default]
    Product,
    /// Diagonal coupling; requires equal node measures.
    Identity,
    /// A vertex of the transport polytope chosen by a seeded random cost.
    Random,
    Coupling(Coupling),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub init: Init,
    pub seed: u64,
    /// Alternation rounds for general parameter spaces.
    pub max_rounds: usize,
    /// Starting parameter coupling for general parameter spaces. Defaults to
    /// the product (or the diagonal under [`Init::Identity`] when possible).
    pub param_init: Option<Coupling>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iters: 1000, rel_tol: 1e-9, init: Init::Product, seed: 0, max_rounds: 50, param_init: None }
    }
}

impl SolverOptions {
    pub fn identity() -> Self {
        Self { init: Init::Identity, ..Self::default() }
    }

    pub fn warm(coupling: Coupling) -> Self {
        Self { init: Init::Coupling(coupling), ..Self::default() }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.max_iters == 0 || self.max_rounds == 0 {
            return Err(PgwError::InvalidInput("iteration budgets must be positive".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(PgwError::InvalidInput(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimResult {
    #[serde(skip)]
    pub coupling: Coupling,
    #[serde(skip)]
    pub param_coupling: Option<Coupling>,
    /// `1/2 E^(1/2)` at the returned coupling(s).
    pub value: f64,
    /// Objective `E` after every accepted step, starting from the initial one.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

pub(crate) fn same_measure(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MASS_TOL)
}

/// Builds the initial node coupling between measures `a` and `b`.
pub(crate) fn initial_coupling(init: &Init, a: &[f64], b: &[f64], seed: u64) -> Result<Matrix> {
    match init {
        Init::Product => Ok(Coupling::product(a, b).into_matrix()),
        Init::Identity => {
            if !same_measure(a, b) {
                return Err(PgwError::InvalidInput("identity init needs equal node measures".into()));
            }
            Ok(Coupling::identity(a).into_matrix())
        }
        Init::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cost = Matrix::from_fn(a.len(), b.len(), |_, _| rng.random::<f64>());
            Ok(solve_linear_ot(&cost, a, b)?.coupling.into_matrix())
        }
        Init::Coupling(c) => {
            c.validate().map_err(|v| PgwError::MarginalMismatch(v.to_string()))?;
            if c.shape() != (a.len(), b.len())
                || !same_measure(c.row_marginal(), a)
                || !same_measure(c.col_marginal(), b)
            {
                return Err(PgwError::MarginalMismatch("initial coupling does not match the node measures".into()));
            }
            Ok(c.matrix().clone())
        }
    }
}

pub(crate) fn value_of(energy: f64) -> f64 {
    0.5 * energy.max(0.0).sqrt()
}

/// Estimates `GW_2(X, Y) = 1/2 inf_pi dis_2(pi)` by conditional gradient with
/// exact line search. The result is a stationary point, hence an upper bound.
pub fn gw2(x: &MeasureNetwork, y: &MeasureNetwork, opts: &SolverOptions) -> Result<OptimResult> {
    opts.check()?;
    let problem = Problem::new(vec![x.kernel()], vec![y.kernel()], vec![(0, 0, 1.0)])?;
    let pi0 = initial_coupling(&opts.init, x.mu(), y.mu(), opts.seed)?;
    let out = frank_wolfe(&problem, pi0, x.mu(), y.mu(), opts.max_iters, opts.rel_tol)?;
    Ok(OptimResult {
        coupling: Coupling::from_parts(out.pi, x.mu().to_vec(), y.mu().to_vec()),
        param_coupling: None,
        value: value_of(out.energy),
        trace: out.trace,
        converged: out.converged,
        iterations: out.iterations,
    })
}

fn check_same_marginals(pi: &Coupling, tau: &Coupling) -> Result<()> {
    if pi.shape() != tau.shape()
        || !same_measure(pi.row_marginal(), tau.row_marginal())
        || !same_measure(pi.col_marginal(), tau.col_marginal())
    {
        return Err(PgwError::MarginalMismatch("pi and tau couple different measures".into()));
    }
    Ok(())
}

/// Coefficients `(a, b)` of `E(pi + g (tau - pi)) = a g^2 + b g + E(pi)`.
pub fn line_search_coeffs(c: &Matrix, cbar: &Matrix, pi: &Coupling, tau: &Coupling) -> Result<(f64, f64)> {
    check_same_marginals(pi, tau)?;
    let problem = Problem::new(vec![c], vec![cbar], vec![(0, 0, 1.0)])?;
    if problem.shape() != pi.shape() {
        return Err(PgwError::DimensionMismatch("kernels do not match the coupling".into()));
    }
    Ok(problem.line_search_coeffs(pi.matrix(), tau.matrix()))
}

/// Gradient of `E(pi) = <L2(C, Cbar) (x) pi, pi>` with respect to the entries
/// of `pi`. Equals `2 L2(C, Cbar) (x) pi` for symmetric kernels.
pub fn gradient(c: &Matrix, cbar: &Matrix, pi: &Matrix) -> Result<Matrix> {
    let problem = Problem::new(vec![c], vec![cbar], vec![(0, 0, 1.0)])?;
    if problem.shape() != pi.shape() {
        return Err(PgwError::DimensionMismatch("kernels do not match the coupling".into()));
    }
    Ok(problem.gradient(pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::{distortion2_squared, tensor_l2};
    use crate::network::uniform;

    fn random_kernel(rng: &mut ChaCha8Rng, n: usize, symmetric: bool) -> Matrix {
        let k = Matrix::from_fn(n, n, |_, _| rng.random::<f64>());
        if symmetric {
            (&k + k.transpose()) * 0.5
        } else {
            k
        }
    }

    #[test]
    fn self_distance_with_identity_init_is_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = MeasureNetwork::uniform(random_kernel(&mut rng, 7, false)).unwrap();
        let r = gw2(&x, &x, &SolverOptions::identity()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.coupling, Coupling::identity(x.mu()));
    }

    #[test]
    fn symmetric_gradient_is_twice_the_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_kernel(&mut rng, 4, true);
        let cbar = random_kernel(&mut rng, 5, true);
        let pi = Coupling::product(&uniform(4), &uniform(5));
        let g = gradient(&c, &cbar, pi.matrix()).unwrap();
        let t = tensor_l2(&c, &cbar, &pi).unwrap() * 2.0;
        assert!((g - t).abs().max() < 1e-12);
    }

    #[test]
    fn scalar_line_search() {
        let c = Matrix::from_element(1, 1, 3.0);
        let cbar = Matrix::from_element(1, 1, 1.0);
        let pi = Coupling::identity(&[1.0]);
        assert_eq!(line_search_coeffs(&c, &cbar, &pi, &pi).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn trace_is_monotone_and_value_matches_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = MeasureNetwork::uniform(random_kernel(&mut rng, 9, true)).unwrap();
        let y = MeasureNetwork::uniform(random_kernel(&mut rng, 6, true)).unwrap();
        let opts = SolverOptions { rel_tol: 1e-7, ..SolverOptions::default() };
        let r = gw2(&x, &y, &opts).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0] + 1e-10));
        let e = distortion2_squared(&r.coupling, x.kernel(), y.kernel()).unwrap();
        assert!((value_of(e) - r.value).abs() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn identity_init_needs_equal_measures() {
        let x = MeasureNetwork::uniform(Matrix::zeros(2, 2)).unwrap();
        let y = MeasureNetwork::uniform(Matrix::zeros(3, 3)).unwrap();
        assert!(gw2(&x, &y, &SolverOptions::identity()).is_err());
    }

    #[test]
    fn options_are_checked() {
        let x = MeasureNetwork::uniform(Matrix::zeros(2, 2)).unwrap();
        let opts = SolverOptions { rel_tol: 0.0, ..SolverOptions::default() };
        assert!(gw2(&x, &x, &opts).is_err());
    }
}
