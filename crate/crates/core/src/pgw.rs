//! Parameterized GW: shared parameter measure (fixed) and jointly optimized
//! parameter couplings (general).

use crate::coupling::Coupling;
use crate::distortion::squared_row_moment;
use crate::error::{PgwError, Result};
use crate::fw::{frank_wolfe, nonzeros, Problem};
use crate::gw::{initial_coupling, same_measure, value_of, Init, OptimResult, SolverOptions};
use crate::network::{uniform, Matrix, PmNet};
use crate::ot::solve_linear_ot;
use crate::validate::Validate;

fn check_nodes(x: &PmNet, y: &PmNet, pi: &Matrix) -> Result<()> {
    if pi.shape() != (x.len(), y.len()) {
        return Err(PgwError::DimensionMismatch(format!(
            "coupling is {:?}, pm-nets have {} and {} nodes",
            pi.shape(),
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn check_fixed(x: &PmNet, y: &PmNet) -> Result<()> {
    if !same_measure(x.nu(), y.nu()) {
        return Err(PgwError::ParameterMismatch(format!(
            "{} vs {} parameters or different weights",
            x.num_params(),
            y.num_params()
        )));
    }
    Ok(())
}

fn kernel_refs(x: &PmNet) -> Vec<&Matrix> {
    x.kernels().iter().collect()
}

fn fixed_problem<'a>(x: &'a PmNet, y: &'a PmNet) -> Result<Problem<'a>> {
    check_fixed(x, y)?;
    let terms = x.nu().iter().enumerate().map(|(t, &w)| (t, t, w)).collect();
    Problem::new(kernel_refs(x), kernel_refs(y), terms)
}

fn general_problem<'a>(x: &'a PmNet, y: &'a PmNet, xi: &Matrix) -> Result<Problem<'a>> {
    if xi.shape() != (x.num_params(), y.num_params()) {
        return Err(PgwError::DimensionMismatch("parameter coupling has the wrong shape".into()));
    }
    Problem::new(kernel_refs(x), kernel_refs(y), nonzeros(xi))
}

/// `sum_t nu_t dis_2(pi, X_t, Y_t)^2`.
pub fn fixed_energy(x: &PmNet, y: &PmNet, pi: &Coupling) -> Result<f64> {
    check_fixed(x, y)?;
    check_nodes(x, y, pi.matrix())?;
    let mut total = 0.0;
    for t in 0..x.num_params() {
        total += x.nu()[t] * crate::distortion::distortion2_squared(pi, x.kernel(t), y.kernel(t))?;
    }
    Ok(total)
}

/// `sum_ts xi_ts dis_2(pi, X_t, Y_s)^2`.
pub fn general_energy(x: &PmNet, y: &PmNet, pi: &Coupling, xi: &Coupling) -> Result<f64> {
    let m = param_cost_matrix(x, y, pi)?;
    if xi.shape() != m.shape() {
        return Err(PgwError::DimensionMismatch("parameter coupling has the wrong shape".into()));
    }
    Ok(m.dot(xi.matrix()))
}

/// Gradient in `pi` of the fixed-parameter objective.
pub fn fixed_gradient(x: &PmNet, y: &PmNet, pi: &Matrix) -> Result<Matrix> {
    check_nodes(x, y, pi)?;
    Ok(fixed_problem(x, y)?.gradient(pi))
}

/// Gradient in `pi` of the general objective at parameter coupling `xi`.
pub fn general_gradient(x: &PmNet, y: &PmNet, pi: &Matrix, xi: &Matrix) -> Result<Matrix> {
    check_nodes(x, y, pi)?;
    Ok(general_problem(x, y, xi)?.gradient(pi))
}

/// Line-search coefficients of the fixed-parameter objective along `tau - pi`.
pub fn fixed_line_search_coeffs(x: &PmNet, y: &PmNet, pi: &Coupling, tau: &Coupling) -> Result<(f64, f64)> {
    check_nodes(x, y, pi.matrix())?;
    check_nodes(x, y, tau.matrix())?;
    Ok(fixed_problem(x, y)?.line_search_coeffs(pi.matrix(), tau.matrix()))
}

/// Line-search coefficients of the general objective along `tau - pi` at
/// fixed `xi`.
pub fn general_line_search_coeffs(
    x: &PmNet,
    y: &PmNet,
    pi: &Coupling,
    tau: &Coupling,
    xi: &Coupling,
) -> Result<(f64, f64)> {
    check_nodes(x, y, pi.matrix())?;
    check_nodes(x, y, tau.matrix())?;
    Ok(general_problem(x, y, xi.matrix())?.line_search_coeffs(pi.matrix(), tau.matrix()))
}

/// Fixed-parameter PGW between pm-nets sharing `(labels, nu)`.
pub fn pgw_fixed(x: &PmNet, y: &PmNet, opts: &SolverOptions) -> Result<OptimResult> {
    opts.check()?;
    let problem = fixed_problem(x, y)?;
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

/// `T x S` matrix of squared distortions `dis_2(pi, X_t, Y_s)^2`.
pub fn param_cost_matrix(x: &PmNet, y: &PmNet, pi: &Coupling) -> Result<Matrix> {
    let p = pi.matrix();
    check_nodes(x, y, p)?;
    let (n, m) = p.shape();
    let a = pi.row_marginal();
    let b = pi.col_marginal();
    let moment = |k: &Matrix, w: &[f64]| -> f64 { squared_row_moment(k, w).iter().zip(w).map(|(c, p)| c * p).sum() };
    let ex: Vec<f64> = x.kernels().iter().map(|k| moment(k, a)).collect();
    let ey: Vec<f64> = y.kernels().iter().map(|k| moment(k, b)).collect();
    // <C_t pi Cbar_s^T, pi> = <C_t^T pi, pi Cbar_s^T>, as one Gram product
    let mut u = Matrix::zeros(n * m, x.num_params());
    for (t, k) in x.kernels().iter().enumerate() {
        u.column_mut(t).copy_from_slice((k.transpose() * p).as_slice());
    }
    let mut v = Matrix::zeros(n * m, y.num_params());
    for (s, k) in y.kernels().iter().enumerate() {
        v.column_mut(s).copy_from_slice((p * k.transpose()).as_slice());
    }
    let cross = u.tr_mul(&v);
    let out = Matrix::from_fn(ex.len(), ey.len(), |t, s| (ex[t] + ey[s] - 2.0 * cross[(t, s)]).max(0.0));
    if out.iter().any(|v| !v.is_finite()) {
        return Err(PgwError::NonFinite);
    }
    Ok(out)
}

fn initial_param_coupling(x: &PmNet, y: &PmNet, opts: &SolverOptions) -> Result<Matrix> {
    if let Some(xi) = &opts.param_init {
        xi.validate().map_err(|v| PgwError::MarginalMismatch(v.to_string()))?;
        if !same_measure(xi.row_marginal(), x.nu()) || !same_measure(xi.col_marginal(), y.nu()) {
            return Err(PgwError::MarginalMismatch("parameter coupling does not match nu".into()));
        }
        return Ok(xi.matrix().clone());
    }
    if matches!(opts.init, Init::Identity) && same_measure(x.nu(), y.nu()) {
        return Ok(Coupling::identity(x.nu()).into_matrix());
    }
    Ok(Coupling::product(x.nu(), y.nu()).into_matrix())
}

/// General-parameter PGW: alternates a full conditional-gradient solve in
/// `pi` with an exact transport solve in `xi`.
pub fn pgw_general(x: &PmNet, y: &PmNet, opts: &SolverOptions) -> Result<OptimResult> {
    opts.check()?;
    let (a, b) = (x.mu(), y.mu());
    let mut pi = initial_coupling(&opts.init, a, b, opts.seed)?;
    let mut xi = initial_param_coupling(x, y, opts)?;
    let mut trace: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut energy = f64::INFINITY;
    for round in 0..opts.max_rounds {
        let problem = general_problem(x, y, &xi)?;
        let out = frank_wolfe(&problem, pi, a, b, opts.max_iters, opts.rel_tol)?;
        iterations += out.iterations;
        let skip = usize::from(round > 0);
        trace.extend_from_slice(&out.trace[skip.min(out.trace.len())..]);
        pi = out.pi;
        let round_start = energy;
        energy = out.energy;
        if energy == 0.0 {
            converged = out.converged;
            break;
        }

        let pi_c = Coupling::from_parts(pi.clone(), a.to_vec(), b.to_vec());
        let costs = param_cost_matrix(x, y, &pi_c)?;
        let sol = solve_linear_ot(&costs, x.nu(), y.nu())?;
        let current = costs.dot(&xi);
        let next_xi = sol.coupling.into_matrix();
        if next_xi == xi || sol.value >= current {
            converged = out.converged;
            break;
        }
        xi = next_xi;
        energy = sol.value.min(energy);
        trace.push(energy);
        if round_start.is_finite() && round_start - energy <= opts.rel_tol * round_start {
            converged = out.converged;
            break;
        }
    }
    Ok(OptimResult {
        coupling: Coupling::from_parts(pi, a.to_vec(), b.to_vec()),
        param_coupling: Some(Coupling::from_parts(xi, x.nu().to_vec(), y.nu().to_vec())),
        value: value_of(energy),
        trace,
        converged,
        iterations,
    })
}

/// Empirical pm-net: uniform parameter measure over the samples, labels
/// `0..N`.
pub fn empirical_pm_net(samples: Vec<Matrix>, mu: Vec<f64>) -> Result<PmNet> {
    if samples.is_empty() {
        return Err(PgwError::InvalidInput("no samples".into()));
    }
    let n = mu.len();
    if let Some(k) = samples.iter().find(|k| k.shape() != (n, n)) {
        return Err(PgwError::DimensionMismatch(format!("sample of shape {:?} for {n} nodes", k.shape())));
    }
    let t = samples.len();
    let labels = (0..t).map(|i| i.to_string()).collect();
    PmNet::new(samples, mu, uniform(t), labels)
}
