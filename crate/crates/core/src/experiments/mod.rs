//! Drivers for the numerical experiments. Each returns a serializable report
//! plus named matrices for CSV export.
//!
//! Randomness: every job draws from `RngSeed(seed).stream(id)` where `id`
//! packs the job's indices (repetition, class, item, ...) into 16-bit fields
//! with [`stream_id`], so results do not depend on scheduling.

pub mod cluster;
pub mod drones;
pub mod nested;
pub mod pandas;
pub mod randomgraph;

use rand_chacha::ChaCha8Rng;

use crate::generators::{Graph, RngSeed};
use crate::network::Matrix;

/// Packs up to four indices, each below `2^16`, into one stream number.
pub fn stream_id(parts: &[u64]) -> u64 {
    assert!(parts.len() <= 4 && parts.iter().all(|&p| p < 1 << 16), "stream indices out of range");
    parts.iter().fold(0, |acc, &p| (acc << 16) | p)
}

pub fn job_rng(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    RngSeed(seed).stream(stream_id(parts))
}

pub(crate) fn adjacency_samples(graphs: &[Graph]) -> Vec<Matrix> {
    graphs.iter().map(Graph::adjacency).collect()
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_ids_are_distinct() {
        assert_ne!(stream_id(&[1, 0]), stream_id(&[0, 1]));
        assert_eq!(stream_id(&[0, 0, 7]), 7);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
