use crate::error::{PgwError, Result};
use crate::generators::Graph;
use crate::network::{uniform, Matrix, PmNet};

/// Vertex numbering of a panda graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PandaLayout {
    /// Head `0..N`, then the two ears.
    #[default]
    HeadFirst,
    /// The two ears, then the head.
    EarsFirst,
}

/// Vertex sets of a panda graph. Glue vertices belong to the head and to
/// their ear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PandaParts {
    pub head: Vec<usize>,
    pub ears: [Vec<usize>; 2],
}

/// An `(N, n, e)` panda: an `N`-cycle (head) with two `n`-cycles (ears) glued
/// at two head vertices at distance `e`.
pub fn panda_graph(big_n: usize, n: usize, e: usize, layout: PandaLayout) -> Result<(Graph, PandaParts)> {
    if n < 3 || n >= big_n || e > big_n / 2 {
        return Err(PgwError::InvalidInput(format!(
            "panda needs 3 <= n < N and e <= N/2, got N={big_n}, n={n}, e={e}"
        )));
    }
    let total = big_n + 2 * (n - 1);
    let (head0, ear_start) = match layout {
        PandaLayout::HeadFirst => (0, [big_n, big_n + n - 1]),
        PandaLayout::EarsFirst => (2 * (n - 1), [0, n - 1]),
    };
    let head: Vec<usize> = (head0..head0 + big_n).collect();
    let glue = [head[big_n - 1 - e], head[big_n - 1]];
    let mut g = Graph::empty(total);
    for i in 0..big_n {
        g.add_edge(head[i], head[(i + 1) % big_n])?;
    }
    let mut ears: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for k in 0..2 {
        let own: Vec<usize> = (ear_start[k]..ear_start[k] + n - 1).collect();
        let mut cycle = vec![glue[k]];
        cycle.extend(&own);
        for i in 0..n {
            g.add_edge(cycle[i], cycle[(i + 1) % n])?;
        }
        let mut set = cycle;
        set.sort_unstable();
        ears[k] = set;
    }
    Ok((g, PandaParts { head, ears }))
}

fn masked(d: &Matrix, part: &[usize]) -> Matrix {
    let n = d.nrows();
    let mut inside = vec![false; n];
    part.iter().for_each(|&v| inside[v] = true);
    Matrix::from_fn(n, n, |i, j| if inside[i] && inside[j] { d[(i, j)] } else { 0.0 })
}

/// Panda graph with the pm-net of its head- and ear-masked shortest-path
/// distances, uniform node and parameter measures.
pub fn panda(big_n: usize, n: usize, e: usize, layout: PandaLayout) -> Result<(Graph, PmNet)> {
    let (g, parts) = panda_graph(big_n, n, e, layout)?;
    let d = g.shortest_paths()?;
    let kernels = vec![masked(&d, &parts.head), masked(&d, &parts.ears[0]), masked(&d, &parts.ears[1])];
    let pm = PmNet::new(kernels, uniform(g.n()), uniform(3), vec!["1".into(), "2".into(), "3".into()])?;
    Ok((g, pm))
}
