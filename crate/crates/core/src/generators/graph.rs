use std::collections::{BTreeSet, VecDeque};

use nalgebra::SymmetricEigen;

use crate::error::{PgwError, Result};
use crate::network::Matrix;

/// A simple undirected graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Reads a 0/1 symmetric adjacency matrix with zero diagonal.
    pub fn from_adjacency(a: &Matrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(PgwError::DimensionMismatch("adjacency must be square".into()));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            if a[(i, i)] != 0.0 {
                return Err(PgwError::InvalidInput(format!("self-loop at {i}")));
            }
            for j in i + 1..n {
                let (x, y) = (a[(i, j)], a[(j, i)]);
                if x != y || (x != 0.0 && x != 1.0) {
                    return Err(PgwError::InvalidInput(format!("entry ({i}, {j}) is not a symmetric 0/1 value")));
                }
                if x == 1.0 {
                    g.add_edge(i, j)?;
                }
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.adj.len();
        if u >= n || v >= n || u == v {
            return Err(PgwError::InvalidInput(format!("bad edge ({u}, {v}) on {n} vertices")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().copied()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    pub fn adjacency(&self) -> Matrix {
        let n = self.n();
        let mut a = Matrix::zeros(n, n);
        for (u, v) in self.edges() {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Combinatorial Laplacian `D - A`.
    pub fn laplacian(&self) -> Matrix {
        let mut l = -self.adjacency();
        for u in 0..self.n() {
            l[(u, u)] = self.degree(u) as f64;
        }
        l
    }

    fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    /// All-pairs hop distances.
    pub fn shortest_paths(&self) -> Result<Matrix> {
        let n = self.n();
        let mut d = Matrix::zeros(n, n);
        for s in 0..n {
            for (t, dist) in self.bfs(s).into_iter().enumerate() {
                d[(s, t)] = dist.ok_or(PgwError::Disconnected)? as f64;
            }
        }
        Ok(d)
    }

    /// `exp(-t L)` through the eigendecomposition of the Laplacian.
    pub fn heat_kernel(&self, t: f64) -> Result<Matrix> {
        Ok(self.heat_kernels(&[t])?.remove(0))
    }

    /// Heat kernels at several times sharing one eigendecomposition.
    pub fn heat_kernels(&self, times: &[f64]) -> Result<Vec<Matrix>> {
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(PgwError::InvalidInput(format!("time t = {t} must be finite and nonnegative")));
        }
        let n = self.n();
        if times.iter().all(|&t| t == 0.0) {
            return Ok(vec![Matrix::identity(n, n); times.len()]);
        }
        let eig = SymmetricEigen::new(self.laplacian());
        let kernels = times
            .iter()
            .map(|&t| {
                if t == 0.0 {
                    return Matrix::identity(n, n);
                }
                let mut scaled = eig.eigenvectors.clone();
                for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                    scaled.column_mut(k).scale_mut((-t * lambda.max(0.0)).exp());
                }
                let h = scaled * eig.eigenvectors.transpose();
                (&h + h.transpose()) * 0.5
            })
            .collect();
        Ok(kernels)
    }

    /// Copy with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).expect("permutation of a valid graph");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_distances() {
        let d = path3().shortest_paths().unwrap();
        assert_eq!(d, Matrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0]));
    }

    #[test]
    fn complete_graph_distances() {
        let g = Graph::from_edges(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j)))).unwrap();
        let d = g.shortest_paths().unwrap();
        assert_eq!(d, Matrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 }));
    }

    #[test]
    fn disconnected_graph_has_no_distances() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(g.shortest_paths(), Err(PgwError::Disconnected)));
    }

    #[test]
    fn heat_kernel_of_an_edge() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let t = 0.7;
        let h = g.heat_kernel(t).unwrap();
        let e = (-2.0 * t).exp();
        assert!((h[(0, 0)] - (1.0 + e) / 2.0).abs() < 1e-14);
        assert!((h[(0, 1)] - (1.0 - e) / 2.0).abs() < 1e-14);
        assert_eq!(g.heat_kernel(0.0).unwrap(), Matrix::identity(2, 2));
    }

    #[test]
    fn heat_kernel_rows_sum_to_one() {
        let h = path3().heat_kernel(1.3).unwrap();
        for i in 0..3 {
            assert!((h.row(i).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adjacency_roundtrip() {
        let g = path3();
        assert_eq!(Graph::from_adjacency(&g.adjacency()).unwrap(), g);
        assert!(Graph::from_adjacency(&Matrix::identity(2, 2)).is_err());
    }
}
