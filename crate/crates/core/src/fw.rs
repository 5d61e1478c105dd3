//! Conditional-gradient engine shared by the GW and PGW solvers.
//!
//! Every objective handled here has the form
//!
//! ```text
//! E(pi) = sum_(t,s) w_ts sum_ijkl (X_t[i,k] - Y_s[j,l])^2 pi_ij pi_kl
//!       = K - 2 sum_t <X_t pi B_t^T, pi>,     B_t = sum_s w_ts Y_s,
//! ```
//!
//! where `K` depends only on the marginals. Only `P = sum_t X_t pi B_t^T` is
//! carried between iterations; the step `P(tau)` is formed from the sparse
//! LP vertex `tau`.

use crate::distortion::{squared_row_moment, support_distortion_squared};
use crate::error::{PgwError, Result};
use crate::network::Matrix;
use crate::ot::solve_linear_ot;

pub(crate) struct Problem<'a> {
    kx: Vec<&'a Matrix>,
    ky: Vec<&'a Matrix>,
    terms: Vec<(usize, usize, f64)>,
    groups: Vec<(Matrix, Matrix)>,
    n: usize,
    m: usize,
}

fn is_symmetric(k: &Matrix) -> bool {
    let n = k.nrows();
    (0..n).all(|i| (0..i).all(|j| k[(i, j)] == k[(j, i)]))
}

impl<'a> Problem<'a> {
    /// `terms` lists `(t, s, w_ts)`; entries with zero weight are dropped.
    pub(crate) fn new(kx: Vec<&'a Matrix>, ky: Vec<&'a Matrix>, terms: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = kx.first().map_or(0, |k| k.nrows());
        let m = ky.first().map_or(0, |k| k.nrows());
        if kx.iter().any(|k| k.shape() != (n, n)) || ky.iter().any(|k| k.shape() != (m, m)) {
            return Err(PgwError::DimensionMismatch("kernels within a pm-net differ in size".into()));
        }
        let terms: Vec<_> = terms.into_iter().filter(|t| t.2 > 0.0).collect();
        let mut b: Vec<Option<Matrix>> = vec![None; kx.len()];
        for &(t, s, w) in &terms {
            match &mut b[t] {
                Some(acc) => *acc += ky[s] * w,
                slot => *slot = Some(if w == 1.0 { ky[s].clone() } else { ky[s] * w }),
            }
        }
        let symmetric = kx.iter().chain(ky.iter()).all(|k| is_symmetric(k));
        let mut groups = Vec::new();
        for (t, bt) in b.into_iter().enumerate() {
            let Some(bt) = bt else { continue };
            if symmetric {
                groups.push((kx[t].clone(), bt));
            } else {
                // <A pi B^T, pi> = <A^T pi B, pi>; averaging both makes the
                // gradient of the cross term exactly 4 P.
                let half = bt * 0.5;
                groups.push((kx[t].transpose(), half.transpose()));
                groups.push((kx[t].clone(), half));
            }
        }
        Ok(Self { kx, ky, terms, groups, n, m })
    }

    pub(crate) fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// The marginal-only part of the objective.
    pub(crate) fn constant(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut wx = vec![0.0; self.kx.len()];
        let mut wy = vec![0.0; self.ky.len()];
        for &(t, s, w) in &self.terms {
            wx[t] += w;
            wy[s] += w;
        }
        let side = |ks: &[&Matrix], ws: &[f64], marg: &[f64]| -> f64 {
            ks.iter()
                .zip(ws)
                .filter(|(_, &w)| w > 0.0)
                .map(|(k, &w)| w * squared_row_moment(k, marg).iter().zip(marg).map(|(c, p)| c * p).sum::<f64>())
                .sum()
        };
        side(&self.kx, &wx, a) + side(&self.ky, &wy, b)
    }

    /// `P = sum_g A_g pi B_g^T` for a dense `pi`.
    pub(crate) fn cross(&self, pi: &Matrix) -> Matrix {
        let mut p = Matrix::zeros(self.n, self.m);
        for (a, b) in &self.groups {
            p += a * pi * b.transpose();
        }
        p
    }

    /// `P` for a coupling given by its nonzero entries.
    pub(crate) fn cross_sparse(&self, support: &[(usize, usize, f64)]) -> Matrix {
        let (n, m) = (self.n, self.m);
        let mut p = Matrix::zeros(n, m);
        for (a, b) in &self.groups {
            if n <= m {
                // (tau B^T)^T = B tau^T, built column by column
                let mut yt = Matrix::zeros(m, n);
                for &(i, j, v) in support {
                    yt.column_mut(i).axpy(v, &b.column(j), 1.0);
                }
                p += a * yt.transpose();
            } else {
                let mut z = Matrix::zeros(n, m);
                for &(i, j, v) in support {
                    z.column_mut(j).axpy(v, &a.column(i), 1.0);
                }
                p += z * b.transpose();
            }
        }
        p
    }

    /// `E = K - 2 <P, pi>`.
    pub(crate) fn energy(&self, constant: f64, p: &Matrix, pi: &Matrix) -> f64 {
        constant - 2.0 * p.dot(pi)
    }

    /// Exact objective summed over the support of `pi`.
    pub(crate) fn support_energy(&self, pi: &Matrix) -> f64 {
        self.terms.iter().map(|&(t, s, w)| w * support_distortion_squared(pi, self.kx[t], self.ky[s])).sum()
    }

    /// Full gradient of `E` with respect to the entries of `pi`, marginals
    /// included as functions of `pi`.
    pub(crate) fn gradient(&self, pi: &Matrix) -> Matrix {
        let (n, m) = (self.n, self.m);
        let a: Vec<f64> = (0..n).map(|i| pi.row(i).sum()).collect();
        let b: Vec<f64> = (0..m).map(|j| pi.column(j).sum()).collect();
        let mut gx = vec![0.0; n];
        let mut gy = vec![0.0; m];
        for &(t, s, w) in &self.terms {
            let kx = self.kx[t];
            let ky = self.ky[s];
            let rx = squared_row_moment(kx, &a);
            let cx = squared_row_moment(&kx.transpose(), &a);
            let ry = squared_row_moment(ky, &b);
            let cy = squared_row_moment(&ky.transpose(), &b);
            for i in 0..n {
                gx[i] += w * (rx[i] + cx[i]);
            }
            for j in 0..m {
                gy[j] += w * (ry[j] + cy[j]);
            }
        }
        let p = self.cross(pi);
        Matrix::from_fn(n, m, |i, j| gx[i] + gy[j] - 4.0 * p[(i, j)])
    }

    /// `(a, b)` with `E(pi + g (tau - pi)) = a g^2 + b g + E(pi)`.
    pub(crate) fn line_search_coeffs(&self, pi: &Matrix, tau: &Matrix) -> (f64, f64) {
        let d = tau - pi;
        let p = self.cross(pi);
        let pd = self.cross(&d);
        (-2.0 * pd.dot(&d), -4.0 * p.dot(&d))
    }
}

pub(crate) fn nonzeros(pi: &Matrix) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (j, col) in pi.column_iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            if v != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Minimizer of `a g^2 + b g` over `{0, 1}` and the interior vertex when the
/// parabola is convex. Ties resolve toward the smaller step.
pub(crate) fn exact_step(a: f64, b: f64) -> f64 {
    let f = |g: f64| a * g * g + b * g;
    let mut best = (0.0, 0.0);
    let mut candidates = vec![1.0];
    if a > 0.0 {
        let g = -b / (2.0 * a);
        if g > 0.0 && g < 1.0 {
            candidates.insert(0, g);
        }
    }
    for g in candidates {
        let v = f(g);
        if v < best.1 {
            best = (g, v);
        }
    }
    best.0
}

pub(crate) struct FwOutcome {
    pub pi: Matrix,
    pub energy: f64,
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Runs conditional gradient from `pi` until the relative decrease of `E`
/// drops below `rel_tol`, the step vanishes, or `max_iters` is reached.
pub(crate) fn frank_wolfe(
    problem: &Problem,
    mut pi: Matrix,
    a: &[f64],
    b: &[f64],
    max_iters: usize,
    rel_tol: f64,
) -> Result<FwOutcome> {
    let (n, m) = problem.shape();
    let constant = problem.constant(a, b);
    let nnz = pi.iter().filter(|&&v| v != 0.0).count();
    if nnz <= n + m && problem.support_energy(&pi) == 0.0 {
        return Ok(FwOutcome { pi, energy: 0.0, trace: vec![0.0], converged: true, iterations: 0 });
    }
    let mut p = problem.cross(&pi);
    let mut energy = problem.energy(constant, &p, &pi);
    if !energy.is_finite() {
        return Err(PgwError::NonFinite);
    }
    let mut trace = vec![energy];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let sol = solve_linear_ot(&(-&p), a, b)?;
        let tau = sol.coupling.into_matrix();
        let dm = problem.cross_sparse(&sol.support) - &p;
        let d = &tau - &pi;
        let qa = -2.0 * dm.dot(&d);
        let qb = -4.0 * p.dot(&d);
        let gamma = exact_step(qa, qb);
        if gamma == 0.0 {
            converged = true;
            break;
        }
        let next_pi = &pi + &d * gamma;
        let next_p = &p + &dm * gamma;
        let next = problem.energy(constant, &next_p, &next_pi);
        if !next.is_finite() {
            return Err(PgwError::NonFinite);
        }
        if next > energy {
            // rounding in the recomputed objective; keep the previous iterate
            converged = true;
            break;
        }
        let decrease = energy - next;
        pi = next_pi;
        p = next_p;
        energy = next;
        trace.push(energy);
        if decrease <= rel_tol * (energy + decrease) || energy <= 0.0 {
            converged = true;
            break;
        }
    }
    Ok(FwOutcome { pi, energy: energy.max(0.0), trace, converged, iterations })
}
