use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{PgwError, Result};
use crate::network::{uniform, Matrix, PmNet};

pub const GRID: usize = 5;
pub const FRAMES: usize = 5;
pub const STEP: f64 = 0.6;
pub const NOISE_STD: f64 = 0.05;
const OBSTACLE_X: f64 = 1.5;
const OBSTACLE_RX: f64 = 0.5;
const OBSTACLE_RY: f64 = 0.7;
const MAX_RESAMPLES: usize = 100;

/// `((x - 1.5) / 0.5)^2 + (y / 0.7)^2`; below 1 means inside the obstacle.
pub fn obstacle_level(x: f64, y: f64) -> f64 {
    ((x - OBSTACLE_X) / OBSTACLE_RX).powi(2) + (y / OBSTACLE_RY).powi(2)
}

fn collides(x: f64, y: f64) -> bool {
    obstacle_level(x, y) <= 1.0 + 1e-9
}

/// Noise-free drone positions at frame `t`, indexed `5 * column + row`.
pub fn nominal_positions(t: usize, obstructed: bool) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(GRID * GRID);
    for col in 0..GRID {
        let x = col as f64 / 4.0 + STEP * t as f64;
        let ys: Vec<f64> = (0..GRID).map(|row| -1.0 + row as f64 / 2.0).collect();
        let ys = if obstructed && (x - OBSTACLE_X).abs() <= OBSTACLE_RX {
            let top = OBSTACLE_RY * (1.0 - ((x - OBSTACLE_X) / OBSTACLE_RX).powi(2)).max(0.0).sqrt();
            let above: Vec<usize> = (0..GRID).filter(|&r| ys[r] > 0.0).collect();
            let below: Vec<usize> = (0..GRID).filter(|&r| ys[r] <= 0.0).collect();
            let mut moved = ys.clone();
            // highest drone stays on y = 1, the rest spread down toward the top
            for (k, &r) in above.iter().rev().enumerate() {
                moved[r] = 1.0 - (1.0 - top) * k as f64 / above.len() as f64;
            }
            for (k, &r) in below.iter().enumerate() {
                moved[r] = -1.0 + (1.0 - top) * k as f64 / below.len() as f64;
            }
            moved
        } else {
            ys
        };
        out.extend(ys.into_iter().map(|y| (x, y)));
    }
    out
}

fn distance_matrix(points: &[(f64, f64)]) -> Matrix {
    let n = points.len();
    Matrix::from_fn(n, n, |i, j| {
        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
        dx.hypot(dy)
    })
}

/// Drone positions for frames `0..5`. In obstructed flight, noise that
/// would put a drone inside the obstacle is redrawn up to 100 times and then
/// dropped.
pub fn flight_positions<R: Rng + ?Sized>(obstructed: bool, noise_std: f64, rng: &mut R) -> Result<Vec<Vec<(f64, f64)>>> {
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(PgwError::InvalidInput(format!("noise std {noise_std}")));
    }
    let normal = Normal::new(0.0, noise_std).map_err(|e| PgwError::InvalidInput(e.to_string()))?;
    let frames = (0..FRAMES)
        .map(|t| {
            nominal_positions(t, obstructed)
                .into_iter()
                .map(|(x, y)| {
                    for _ in 0..MAX_RESAMPLES {
                        let (px, py) = (x + normal.sample(rng), y + normal.sample(rng));
                        if !(obstructed && collides(px, py)) {
                            return (px, py);
                        }
                    }
                    (x, y)
                })
                .collect()
        })
        .collect();
    Ok(frames)
}

/// One flight through the corridor as a 25-node pm-net over frames `0..5`
/// with Euclidean distance kernels.
pub fn drone_flight_with<R: Rng + ?Sized>(obstructed: bool, noise_std: f64, rng: &mut R) -> Result<PmNet> {
    let kernels = flight_positions(obstructed, noise_std, rng)?.iter().map(|f| distance_matrix(f)).collect();
    let labels = (0..FRAMES).map(|t| t.to_string()).collect();
    PmNet::new(kernels, uniform(GRID * GRID), uniform(FRAMES), labels)
}

/// [`drone_flight_with`] at the standard noise level.
pub fn drone_flight<R: Rng + ?Sized>(obstructed: bool, rng: &mut R) -> Result<PmNet> {
    drone_flight_with(obstructed, NOISE_STD, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clear_flight_without_noise_is_rigid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = drone_flight_with(false, 0.0, &mut rng).unwrap();
        assert_eq!(x.len(), 25);
        assert_eq!(x.num_params(), 5);
        for t in 1..5 {
            assert!((x.kernel(t) - x.kernel(0)).abs().max() < 1e-12);
        }
    }

    #[test]
    fn nominal_obstructed_points_avoid_the_obstacle() {
        for t in 0..FRAMES {
            for (x, y) in nominal_positions(t, true) {
                assert!(obstacle_level(x, y) > 1.0 + 1e-9, "t={t} ({x}, {y})");
            }
        }
    }

    #[test]
    fn only_frames_meeting_the_obstacle_are_rerouted() {
        assert_ne!(nominal_positions(2, false), nominal_positions(2, true));
        assert_eq!(nominal_positions(4, false), nominal_positions(4, true));
    }

    #[test]
    fn noisy_obstructed_points_stay_outside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let frames = flight_positions(true, NOISE_STD, &mut rng).unwrap();
            assert!(frames.iter().flatten().all(|&(x, y)| obstacle_level(x, y) > 1.0 + 1e-9));
        }
    }
}
