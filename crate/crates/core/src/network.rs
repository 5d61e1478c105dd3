//! Measure networks and parameterized measure networks.

use nalgebra::DMatrix;

use crate::error::{PgwError, Result};
use crate::validate::{check_kernel, check_probability, Validate, Violation};

pub type Matrix = DMatrix<f64>;

/// Uniform probability vector of length `n`.
pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// A finite node set carrying a probability vector and a (not necessarily
/// symmetric) kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureNetwork {
    kernel: Matrix,
    mu: Vec<f64>,
}

impl MeasureNetwork {
    pub fn new(kernel: Matrix, mu: Vec<f64>) -> Result<Self> {
        let net = Self { kernel, mu };
        net.validate().map_err(|v| PgwError::InvalidInput(v.to_string()))?;
        Ok(net)
    }

    /// Network with the uniform node measure.
    pub fn uniform(kernel: Matrix) -> Result<Self> {
        let n = kernel.nrows();
        Self::new(kernel, uniform(n))
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

impl Validate for MeasureNetwork {
    fn validate(&self) -> std::result::Result<(), Violation> {
        check_probability(&self.mu)?;
        check_kernel(&self.kernel, self.mu.len())
    }
}

/// A measure network whose kernel is indexed by a finite, weighted parameter
/// set `(labels, nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmNet {
    kernels: Vec<Matrix>,
    mu: Vec<f64>,
    nu: Vec<f64>,
    labels: Vec<String>,
}

impl PmNet {
    pub fn new(kernels: Vec<Matrix>, mu: Vec<f64>, nu: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let net = Self { kernels, mu, nu, labels };
        net.validate().map_err(|v| PgwError::InvalidInput(v.to_string()))?;
        Ok(net)
    }

    /// Pm-net with uniform node and parameter measures and labels `0..T`.
    pub fn uniform(kernels: Vec<Matrix>) -> Result<Self> {
        let n = kernels.first().map_or(0, |k| k.nrows());
        let t = kernels.len();
        let labels = (0..t).map(|i| i.to_string()).collect();
        Self::new(kernels, uniform(n), uniform(t), labels)
    }

    /// Single-parameter pm-net wrapping a measure network.
    pub fn from_network(net: &MeasureNetwork) -> Self {
        Self {
            kernels: vec![net.kernel.clone()],
            mu: net.mu.clone(),
            nu: vec![1.0],
            labels: vec!["0".to_string()],
        }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Number of parameters `T`.
    pub fn num_params(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernels(&self) -> &[Matrix] {
        &self.kernels
    }

    pub fn kernel(&self, t: usize) -> &Matrix {
        &self.kernels[t]
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The measure network at parameter index `t`.
    pub fn slice(&self, t: usize) -> MeasureNetwork {
        MeasureNetwork { kernel: self.kernels[t].clone(), mu: self.mu.clone() }
    }

    /// Same pm-net with the parameter measure replaced.
    pub fn with_nu(&self, nu: Vec<f64>) -> Result<Self> {
        Self::new(self.kernels.clone(), self.mu.clone(), nu, self.labels.clone())
    }

    /// Divides every kernel by its Frobenius norm (zero kernels are kept).
    pub fn frobenius_normalized(&self) -> Self {
        let kernels = self
            .kernels
            .iter()
            .map(|k| {
                let norm = k.norm();
                if norm > 0.0 {
                    k / norm
                } else {
                    k.clone()
                }
            })
            .collect();
        Self { kernels, ..self.clone() }
    }
}

impl Validate for PmNet {
    fn validate(&self) -> std::result::Result<(), Violation> {
        if self.kernels.is_empty() {
            return Err(Violation::Empty { what: "kernel list" });
        }
        check_probability(&self.mu)?;
        check_probability(&self.nu)?;
        if self.nu.len() != self.kernels.len() {
            return Err(Violation::Dimension {
                expected: self.kernels.len(),
                found: self.nu.len(),
                what: "parameter measure",
            });
        }
        if self.labels.len() != self.kernels.len() {
            return Err(Violation::Dimension {
                expected: self.kernels.len(),
                found: self.labels.len(),
                what: "labels",
            });
        }
        for k in &self.kernels {
            check_kernel(k, self.mu.len())?;
        }
        Ok(())
    }
}
