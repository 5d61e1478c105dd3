//! Invariant checks for networks, pm-nets and couplings.
//!
//! Validation is report-based: a failed check yields a [`Violation`] naming
//! the offending entry instead of an error, so callers can decide whether to
//! abort (the CLI exits with status 2) or continue.

use std::fmt;

use nalgebra::DMatrix;

/// Tolerance for probability vectors supplied by users.
pub const MASS_TOL: f64 = 1e-9;
/// Tolerance for coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-8;

/// First invariant violation found by [`Validate::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeMass { index: usize, value: f64 },
    Mass { total: f64 },
    NonFinite { index: (usize, usize) },
    NotSquare { rows: usize, cols: usize },
    Dimension { expected: usize, found: usize, what: &'static str },
    NegativeEntry { index: (usize, usize), value: f64 },
    RowMarginal { row: usize, expected: f64, found: f64 },
    ColMarginal { col: usize, expected: f64, found: f64 },
    Empty { what: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeMass { index, value } => {
                write!(f, "negative mass {value} at index {index}")
            }
            Violation::Mass { total } => write!(f, "mass {total}"),
            Violation::NonFinite { index } => {
                write!(f, "non-finite kernel entry at ({}, {})", index.0, index.1)
            }
            Violation::NotSquare { rows, cols } => write!(f, "kernel is {rows}x{cols}, not square"),
            Violation::Dimension { expected, found, what } => {
                write!(f, "{what}: expected dimension {expected}, found {found}")
            }
            Violation::NegativeEntry { index, value } => {
                write!(f, "negative entry {value} at ({}, {})", index.0, index.1)
            }
            Violation::RowMarginal { row, expected, found } => {
                write!(f, "row {row} sums to {found}, expected {expected}")
            }
            Violation::ColMarginal { col, expected, found } => {
                write!(f, "column {col} sums to {found}, expected {expected}")
            }
            Violation::Empty { what } => write!(f, "{what} is empty"),
        }
    }
}

impl std::error::Error for Violation {}

pub trait Validate {
    fn validate(&self) -> Result<(), Violation>;
}

pub(crate) fn check_probability(v: &[f64]) -> Result<(), Violation> {
    if v.is_empty() {
        return Err(Violation::Empty { what: "probability vector" });
    }
    for (index, &value) in v.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Violation::NegativeMass { index, value });
        }
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Violation::Mass { total });
    }
    Ok(())
}

pub(crate) fn check_kernel(k: &DMatrix<f64>, n: usize) -> Result<(), Violation> {
    if k.nrows() != k.ncols() {
        return Err(Violation::NotSquare { rows: k.nrows(), cols: k.ncols() });
    }
    if k.nrows() != n {
        return Err(Violation::Dimension { expected: n, found: k.nrows(), what: "kernel" });
    }
    for j in 0..n {
        for i in 0..n {
            if !k[(i, j)].is_finite() {
                return Err(Violation::NonFinite { index: (i, j) });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_excess_mass() {
        let err = check_probability(&[0.5, 0.6]).unwrap_err();
        assert!(err.to_string().contains("mass 1.1"), "{err}");
    }

    #[test]
    fn reports_negative_mass_index() {
        let err = check_probability(&[1.5, -0.5]).unwrap_err();
        assert_eq!(err, Violation::NegativeMass { index: 1, value: -0.5 });
    }

    #[test]
    fn kernel_must_be_finite() {
        let mut k = DMatrix::zeros(2, 2);
        k[(1, 0)] = f64::NAN;
        assert_eq!(check_kernel(&k, 2).unwrap_err(), Violation::NonFinite { index: (1, 0) });
    }
}
