//! The order-2 distortion functional and its tensor-matrix product.
//!
//! For kernels `C` (n x n) and `Cbar` (m x m) and a coupling `pi` with
//! marginals `(a, b)`, the square loss factorizes as
//!
//! ```text
//! L2(C, Cbar) (x) pi = cx 1^T + 1 cy^T - 2 C pi Cbar^T,
//! cx_i = sum_k C_ik^2 a_k,   cy_j = sum_l Cbar_jl^2 b_l,
//! ```
//!
//! so evaluating the distortion costs two matrix products instead of a
//! four-index sum.

use crate::coupling::Coupling;
use crate::error::{PgwError, Result};
use crate::network::Matrix;

fn check_dims(pi: &Matrix, kx: &Matrix, ky: &Matrix) -> Result<()> {
    let (n, m) = pi.shape();
    if kx.shape() != (n, n) || ky.shape() != (m, m) {
        return Err(PgwError::DimensionMismatch(format!(
            "coupling is {n}x{m} but kernels are {:?} and {:?}",
            kx.shape(),
            ky.shape()
        )));
    }
    Ok(())
}

/// `cx_i = sum_k C_ik^2 w_k`.
pub(crate) fn squared_row_moment(c: &Matrix, w: &[f64]) -> Vec<f64> {
    let n = c.nrows();
    let mut out = vec![0.0; n];
    for (k, &wk) in w.iter().enumerate() {
        if wk == 0.0 {
            continue;
        }
        let col = c.column(k);
        for i in 0..n {
            out[i] += col[i] * col[i] * wk;
        }
    }
    out
}

/// `L2(C, Cbar) (x) pi`, an `n x m` matrix.
pub fn tensor_l2(c: &Matrix, cbar: &Matrix, pi: &Coupling) -> Result<Matrix> {
    check_dims(pi.matrix(), c, cbar)?;
    let cx = squared_row_moment(c, pi.row_marginal());
    let cy = squared_row_moment(cbar, pi.col_marginal());
    let cross = c * pi.matrix() * cbar.transpose();
    let (n, m) = pi.shape();
    Ok(Matrix::from_fn(n, m, |i, j| cx[i] + cy[j] - 2.0 * cross[(i, j)]))
}

/// Squared distortion `dis_2(pi, kx, ky)^2 = <L2 (x) pi, pi>`, clamped at 0.
pub fn distortion2_squared(pi: &Coupling, kx: &Matrix, ky: &Matrix) -> Result<f64> {
    check_dims(pi.matrix(), kx, ky)?;
    let p = pi.matrix();
    let cx = squared_row_moment(kx, pi.row_marginal());
    let cy = squared_row_moment(ky, pi.col_marginal());
    let a = pi.row_marginal();
    let b = pi.col_marginal();
    let constant: f64 = a.iter().zip(&cx).map(|(w, c)| w * c).sum::<f64>()
        + b.iter().zip(&cy).map(|(w, c)| w * c).sum::<f64>();
    // <C pi Cbar^T, pi> = <C^T pi, pi Cbar^T>
    let left = kx.transpose() * p;
    let right = p * ky.transpose();
    let cross = left.dot(&right);
    let value = constant - 2.0 * cross;
    if !value.is_finite() {
        return Err(PgwError::NonFinite);
    }
    Ok(value.max(0.0))
}

/// `dis_2(pi, kx, ky)`.
pub fn distortion2(pi: &Coupling, kx: &Matrix, ky: &Matrix) -> Result<f64> {
    distortion2_squared(pi, kx, ky).map(f64::sqrt)
}

/// Squared distortion summed over the support of `pi` only. Exact (no
/// cancellation) and cheap when `pi` has few nonzeros, e.g. a vertex of the
/// transport polytope or a diagonal coupling.
pub(crate) fn support_distortion_squared(pi: &Matrix, kx: &Matrix, ky: &Matrix) -> f64 {
    let support: Vec<(usize, usize, f64)> = pi
        .column_iter()
        .enumerate()
        .flat_map(|(j, col)| {
            col.iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(move |(i, &v)| (i, j, v))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut total = 0.0;
    for &(i, j, pij) in &support {
        let mut inner = 0.0;
        for &(k, l, pkl) in &support {
            let d = kx[(i, k)] - ky[(j, l)];
            inner += d * d * pkl;
        }
        total += inner * pij;
    }
    total
}
