//! Couplings between finite probability measures and their algebra.

use crate::error::{PgwError, Result};
use crate::network::Matrix;
use crate::validate::{check_probability, Validate, Violation, MARGINAL_TOL};

/// A nonnegative `n x m` matrix whose row and column sums are prescribed.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pi: Matrix,
    row: Vec<f64>,
    col: Vec<f64>,
}

impl Coupling {
    /// Checked constructor.
    pub fn new(pi: Matrix, row: Vec<f64>, col: Vec<f64>) -> Result<Self> {
        let c = Self { pi, row, col };
        c.validate().map_err(|v| PgwError::MarginalMismatch(v.to_string()))?;
        Ok(c)
    }

    /// Builds a coupling whose marginals are read off the matrix.
    pub fn from_matrix(pi: Matrix) -> Result<Self> {
        let row = (0..pi.nrows()).map(|i| pi.row(i).sum()).collect();
        let col = (0..pi.ncols()).map(|j| pi.column(j).sum()).collect();
        Self::new(pi, row, col)
    }

    pub(crate) fn from_parts(pi: Matrix, row: Vec<f64>, col: Vec<f64>) -> Self {
        debug_assert_eq!(pi.nrows(), row.len());
        debug_assert_eq!(pi.ncols(), col.len());
        Self { pi, row, col }
    }

    /// The independent coupling `a b^T`.
    pub fn product(a: &[f64], b: &[f64]) -> Self {
        let pi = Matrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]);
        Self::from_parts(pi, a.to_vec(), b.to_vec())
    }

    /// The diagonal coupling of a measure with itself.
    pub fn identity(mu: &[f64]) -> Self {
        let n = mu.len();
        let pi = Matrix::from_fn(n, n, |i, j| if i == j { mu[i] } else { 0.0 });
        Self::from_parts(pi, mu.to_vec(), mu.to_vec())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.pi
    }

    pub fn into_matrix(self) -> Matrix {
        self.pi
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col
    }

    pub fn shape(&self) -> (usize, usize) {
        self.pi.shape()
    }

    /// Number of strictly positive entries.
    pub fn nnz(&self) -> usize {
        self.pi.iter().filter(|&&v| v > 0.0).count()
    }

    /// The transposed coupling with swapped marginals.
    pub fn adjoint(&self) -> Self {
        Self { pi: self.pi.transpose(), row: self.col.clone(), col: self.row.clone() }
    }

    /// Composes `self: X -> Y` with `other: Y -> Z` through the middle measure
    /// `mu_y`, returning the `X x Z` marginal of the glued measure
    /// `pi_xy diag(mu_y)^-1 pi_yz`. Null middle points contribute nothing.
    pub fn glue(&self, other: &Coupling, mu_y: &[f64]) -> Result<Coupling> {
        let m = mu_y.len();
        if self.pi.ncols() != m || other.pi.nrows() != m {
            return Err(PgwError::DimensionMismatch(format!(
                "cannot glue {}x{} with {}x{} through {} points",
                self.pi.nrows(),
                self.pi.ncols(),
                other.pi.nrows(),
                other.pi.ncols(),
                m
            )));
        }
        for (k, &w) in mu_y.iter().enumerate() {
            let c = self.pi.column(k).sum();
            let r = other.pi.row(k).sum();
            if (c - w).abs() > MARGINAL_TOL || (r - w).abs() > MARGINAL_TOL {
                return Err(PgwError::MarginalMismatch(format!(
                    "inner marginal at {k}: {c} / {r} vs {w}"
                )));
            }
        }
        let mut scaled = self.pi.clone();
        for (k, &w) in mu_y.iter().enumerate() {
            let inv = if w > 0.0 { 1.0 / w } else { 0.0 };
            scaled.column_mut(k).scale_mut(inv);
        }
        let pi = scaled * &other.pi;
        Ok(Self::from_parts(pi, self.row.clone(), other.col.clone()))
    }
}

impl Validate for Coupling {
    fn validate(&self) -> std::result::Result<(), Violation> {
        let (n, m) = self.pi.shape();
        if self.row.len() != n {
            return Err(Violation::Dimension { expected: n, found: self.row.len(), what: "row marginal" });
        }
        if self.col.len() != m {
            return Err(Violation::Dimension { expected: m, found: self.col.len(), what: "column marginal" });
        }
        check_probability(&self.row)?;
        check_probability(&self.col)?;
        for i in 0..n {
            for j in 0..m {
                let v = self.pi[(i, j)];
                if !(v >= 0.0) {
                    return Err(Violation::NegativeEntry { index: (i, j), value: v });
                }
            }
        }
        for i in 0..n {
            let s = self.pi.row(i).sum();
            if (s - self.row[i]).abs() > MARGINAL_TOL {
                return Err(Violation::RowMarginal { row: i, expected: self.row[i], found: s });
            }
        }
        for j in 0..m {
            let s = self.pi.column(j).sum();
            if (s - self.col[j]).abs() > MARGINAL_TOL {
                return Err(Violation::ColMarginal { col: j, expected: self.col[j], found: s });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::uniform;

    #[test]
    fn negative_entry_is_reported_with_index() {
        let pi = Matrix::from_row_slice(2, 2, &[0.75, -0.25, -0.25, 0.75]);
        let err = Coupling::new(pi, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn identity_composes_to_identity() {
        let mu = vec![0.2, 0.3, 0.5];
        let id = Coupling::identity(&mu);
        assert_eq!(id.glue(&id, &mu).unwrap(), id);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn bijection_glued_with_its_adjoint_is_identity() {
        let mu = uniform(3);
        let mut pi = Matrix::zeros(3, 3);
        for (i, j) in [(0, 2), (1, 0), (2, 1)] {
            pi[(i, j)] = 1.0 / 3.0;
        }
        let c = Coupling::new(pi, mu.clone(), mu.clone()).unwrap();
        let g = c.glue(&c.adjoint(), &mu).unwrap();
        assert!((g.matrix() - Coupling::identity(&mu).matrix()).abs().max() < 1e-15);
    }

    #[test]
    fn adjoint_is_an_involution() {
        let c = Coupling::product(&[0.1, 0.9], &[0.3, 0.3, 0.4]);
        assert_eq!(c.adjoint().adjoint(), c);
        assert_eq!(c.adjoint().shape(), (3, 2));
    }

    #[test]
    fn glue_handles_null_middle_points() {
        let a = Coupling::new(
            Matrix::from_row_slice(2, 3, &[0.5, 0.0, 0.0, 0.0, 0.0, 0.5]),
            vec![0.5, 0.5],
            vec![0.5, 0.0, 0.5],
        )
        .unwrap();
        let b = a.adjoint();
        let g = a.glue(&b, &[0.5, 0.0, 0.5]).unwrap();
        assert!(g.validate().is_ok());
    }

    #[test]
    fn glue_rejects_inner_mismatch() {
        let a = Coupling::product(&[0.5, 0.5], &[0.5, 0.5]);
        let b = Coupling::product(&[0.2, 0.8], &[1.0]);
        assert!(a.glue(&b, &[0.5, 0.5]).is_err());
    }
}
