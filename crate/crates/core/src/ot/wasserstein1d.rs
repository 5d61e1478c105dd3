use crate::error::{PgwError, Result};
use crate::validate::check_probability;

/// A finitely supported probability measure on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(PgwError::DimensionMismatch(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(PgwError::NonFinite);
        }
        check_probability(&weights).map_err(|v| PgwError::InvalidInput(v.to_string()))?;
        Ok(Self { points, weights })
    }

    pub fn dirac(x: f64) -> Self {
        Self { points: vec![x], weights: vec![1.0] }
    }

    /// Measure on `{0, 1}` with mass `p` at 1.
    pub fn bernoulli(p: f64) -> Self {
        Self { points: vec![0.0, 1.0], weights: vec![1.0 - p, p] }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sorted by location with coincident points merged and null atoms dropped.
    pub fn canonical(&self) -> Self {
        let mut pairs: Vec<(f64, f64)> =
            self.points.iter().cloned().zip(self.weights.iter().cloned()).filter(|p| p.1 > 0.0).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            if points.last() == Some(&x) {
                *weights.last_mut().unwrap() += w;
            } else {
                points.push(x);
                weights.push(w);
            }
        }
        Self { points, weights }
    }
}

/// `W_q` between two measures on the line, via the monotone (quantile)
/// coupling of their sorted atoms.
pub fn wasserstein_1d(x: &DiscreteMeasure, y: &DiscreteMeasure, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(PgwError::InvalidInput(format!("order q = {q} must be >= 1")));
    }
    let x = x.canonical();
    let y = y.canonical();
    if x.points.is_empty() || y.points.is_empty() {
        return Err(PgwError::InvalidInput("empty measure".into()));
    }
    let (mut i, mut j) = (0, 0);
    let (mut wi, mut wj) = (x.weights[0], y.weights[0]);
    let mut total = 0.0;
    loop {
        let step = wi.min(wj);
        total += step * (x.points[i] - y.points[j]).abs().powf(q);
        if wi <= wj {
            wj -= wi;
            i += 1;
            if i == x.points.len() {
                break;
            }
            wi = x.weights[i];
        } else {
            wi -= wj;
            j += 1;
            if j == y.points.len() {
                break;
            }
            wj = y.weights[j];
        }
    }
    Ok(total.powf(1.0 / q))
}
