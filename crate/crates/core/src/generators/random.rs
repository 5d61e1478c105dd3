use rand::seq::index::sample;
use rand::Rng;

use crate::error::{PgwError, Result};
use crate::generators::Graph;

fn check_prob(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PgwError::InvalidInput(format!("{what} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `G(n, rho)`: every unordered pair is an edge independently with
/// probability `rho`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Result<Graph> {
    check_prob(rho, "rho")?;
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < rho {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Stochastic block model with contiguous blocks of the given sizes.
pub fn sbm<R: Rng + ?Sized>(sizes: &[usize], within: f64, between: f64, rng: &mut R) -> Result<Graph> {
    check_prob(within, "within-block probability")?;
    check_prob(between, "between-block probability")?;
    let block: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
    let n = block.len();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let p = if block[i] == block[j] { within } else { between };
            if rng.random::<f64>() < p {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// Deletes `k` edges and adds `k` former non-edges, both uniformly without
/// replacement.
pub fn perturb_graph<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Graph> {
    let edges = g.edges();
    let n = g.n();
    let non_edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !g.has_edge(i, j)).collect();
    if k > edges.len() || k > non_edges.len() || (k > 0 && k == edges.len()) {
        return Err(PgwError::InvalidInput(format!(
            "k = {k} with {} edges and {} non-edges",
            edges.len(),
            non_edges.len()
        )));
    }
    let mut out = g.clone();
    for idx in sample(rng, edges.len(), k) {
        let (u, v) = edges[idx];
        out.remove_edge(u, v);
    }
    for idx in sample(rng, non_edges.len(), k) {
        let (u, v) = non_edges[idx];
        out.add_edge(u, v)?;
    }
    Ok(out)
}

const KARATE: &str = include_str!("../../data/karate_club.txt");

/// Zachary's karate club network (34 vertices, 78 edges).
pub fn karate_club() -> Graph {
    let edges = KARATE.lines().filter(|l| !l.trim().is_empty()).map(|l| {
        let mut it = l.split_whitespace().map(|t| t.parse::<usize>().expect("numeric edge list"));
        (it.next().unwrap(), it.next().unwrap())
    });
    Graph::from_edges(34, edges).expect("bundled edge list is valid")
}
