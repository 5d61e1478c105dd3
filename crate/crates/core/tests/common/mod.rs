//! Independent oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use pgw::coupling::Coupling;
use pgw::network::{Matrix, PmNet};
use pgw::ot::solve_linear_ot;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn kernel(rng: &mut ChaCha8Rng, n: usize, symmetric: bool) -> Matrix {
    let k = Matrix::from_fn(n, n, |_, _| rng.random::<f64>());
    if symmetric {
        (&k + k.transpose()) * 0.5
    } else {
        k
    }
}

pub fn prob(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// A random coupling strictly inside the polytope: a mix of the product and
/// a vertex picked by a random cost.
pub fn coupling(rng: &mut ChaCha8Rng, a: &[f64], b: &[f64]) -> Coupling {
    let cost = Matrix::from_fn(a.len(), b.len(), |_, _| rng.random::<f64>());
    let vertex = solve_linear_ot(&cost, a, b).unwrap().coupling.into_matrix();
    let product = Matrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]);
    let w = rng.random::<f64>();
    Coupling::new(vertex * w + product * (1.0 - w), a.to_vec(), b.to_vec()).unwrap()
}

pub fn pm_net(rng: &mut ChaCha8Rng, n: usize, nu: Vec<f64>, symmetric: bool) -> PmNet {
    let kernels = (0..nu.len()).map(|_| kernel(rng, n, symmetric)).collect();
    let labels = (0..nu.len()).map(|t| t.to_string()).collect();
    let mu = prob(rng, n);
    PmNet::new(kernels, mu, nu, labels).unwrap()
}

/// `sum_{ijkl} (C_ik - Cbar_jl)^2 P_ij P_kl` by direct summation.
pub fn energy_loop(c: &Matrix, cbar: &Matrix, p: &Matrix) -> f64 {
    let (n, m) = p.shape();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                for l in 0..m {
                    total += (c[(i, k)] - cbar[(j, l)]).powi(2) * p[(i, j)] * p[(k, l)];
                }
            }
        }
    }
    total
}

/// `sum_ts w_ts energy_loop(X_t, Y_s, P)`.
pub fn weighted_energy_loop(x: &PmNet, y: &PmNet, w: &Matrix, p: &Matrix) -> f64 {
    let mut total = 0.0;
    for t in 0..x.num_params() {
        for s in 0..y.num_params() {
            if w[(t, s)] != 0.0 {
                total += w[(t, s)] * energy_loop(x.kernel(t), y.kernel(s), p);
            }
        }
    }
    total
}

/// Central differences of `f` at every entry of `p`.
pub fn fd_gradient(f: impl Fn(&Matrix) -> f64, p: &Matrix, h: f64) -> Matrix {
    Matrix::from_fn(p.nrows(), p.ncols(), |i, j| {
        let mut up = p.clone();
        up[(i, j)] += h;
        let mut down = p.clone();
        down[(i, j)] -= h;
        (f(&up) - f(&down)) / (2.0 * h)
    })
}

pub fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

/// Floyd-Warshall distances from a 0/1 adjacency matrix.
pub fn floyd_warshall(adj: &Matrix) -> Matrix {
    let n = adj.nrows();
    let mut d = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else if adj[(i, j)] != 0.0 { 1.0 } else { f64::INFINITY });
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    d
}

/// `W_q` between weighted point sets on the line via the quantile coupling,
/// walking both cumulative distributions.
pub fn quantile_wasserstein(xs: &[(f64, f64)], ys: &[(f64, f64)], q: f64) -> f64 {
    let sort = |v: &[(f64, f64)]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let (xs, ys) = (sort(xs), sort(ys));
    let (mut i, mut j) = (0, 0);
    let (mut rx, mut ry) = (xs[0].1, ys[0].1);
    let mut total = 0.0;
    loop {
        let m = rx.min(ry);
        total += m * (xs[i].0 - ys[j].0).abs().powf(q);
        rx -= m;
        ry -= m;
        if rx <= 1e-15 {
            i += 1;
            if i == xs.len() {
                break;
            }
            rx += xs[i].1;
        }
        if ry <= 1e-15 {
            j += 1;
            if j == ys.len() {
                break;
            }
            ry += ys[j].1;
        }
    }
    total.powf(1.0 / q)
}
