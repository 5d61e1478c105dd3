//! Primal network simplex for the uncapacitated transportation problem.
//!
//! Nodes `0..n` are sources with supply `a_i`, nodes `n..n+m` are sinks with
//! demand `b_j`, and every source is joined to every sink. An artificial root
//! with one artificial arc per node provides the initial strongly feasible
//! spanning tree. Entering arcs are chosen by block search; leaving arcs by
//! the strongly-feasible-tree rule, which prevents cycling under degeneracy.
//! The tree is stored with parent/thread/successor-count arrays so that each
//! pivot touches only the subtree that moves.

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;
const NONE: usize = usize::MAX;

/// Outcome of a network simplex run.
pub(crate) struct SimplexSolution {
    /// Positive flows on real arcs as `(source, sink, flow)`.
    pub flows: Vec<(usize, usize, f64)>,
    /// Source potentials `u` and sink potentials `v` with `u_i + v_j <= c_ij`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pivots: usize,
}

pub(crate) struct NetworkSimplex<'a> {
    n: usize,
    m: usize,
    cost: &'a [f64], // row-major n*m
    node_num: usize,
    arc_num: usize,
    // per-arc (real arcs first, then one artificial arc per node)
    flow: Vec<f64>,
    state: Vec<i8>,
    art_source: Vec<usize>,
    art_target: Vec<usize>,
    art_cost: Vec<f64>,
    // per-node (including root)
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<i8>,
    dirty_revs: Vec<usize>,
    // pivot scratch
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
    next_arc: usize,
    block_size: usize,
    eps: f64,
}

impl<'a> NetworkSimplex<'a> {
    /// `cost` is row-major with `cost[i * m + j]` the cost from source `i` to
    /// sink `j`; it must be nonnegative.
    pub fn new(cost: &'a [f64], supply: &[f64], demand: &[f64]) -> Self {
        let n = supply.len();
        let m = demand.len();
        let node_num = n + m;
        let arc_num = n * m;
        let all = arc_num + node_num;
        let root = node_num;
        let max_cost = cost.iter().cloned().fold(0.0_f64, f64::max);
        let art = (max_cost + 1.0) * node_num as f64;

        let mut s = Self {
            n,
            m,
            cost,
            node_num,
            arc_num,
            flow: vec![0.0; all],
            state: vec![STATE_LOWER; all],
            art_source: vec![0; node_num],
            art_target: vec![0; node_num],
            art_cost: vec![0.0; node_num],
            pi: vec![0.0; node_num + 1],
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            pred_dir: vec![0; node_num + 1],
            dirty_revs: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
            next_arc: 0,
            block_size: ((arc_num as f64).sqrt().ceil() as usize).max(10),
            eps: 1e-13 * (max_cost + 1.0),
        };

        s.parent[root] = NONE;
        s.pred[root] = NONE;
        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        s.pi[root] = 0.0;
        for u in 0..node_num {
            let e = arc_num + u;
            let sup = if u < n { supply[u] } else { -demand[u - n] };
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            if sup >= 0.0 {
                s.pred_dir[u] = DIR_UP;
                s.pi[u] = 0.0;
                s.art_source[u] = u;
                s.art_target[u] = root;
                s.flow[e] = sup;
                s.art_cost[u] = 0.0;
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.pi[u] = art;
                s.art_source[u] = root;
                s.art_target[u] = u;
                s.flow[e] = -sup;
                s.art_cost[u] = art;
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arc_num {
            e / self.m
        } else {
            self.art_source[e - self.arc_num]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arc_num {
            self.n + e % self.m
        } else {
            self.art_target[e - self.arc_num]
        }
    }

    #[inline]
    fn arc_cost(&self, e: usize) -> f64 {
        if e < self.arc_num {
            self.cost[e]
        } else {
            self.art_cost[e - self.arc_num]
        }
    }

    fn find_entering_arc(&mut self) -> bool {
        let mut min = -self.eps;
        let mut found = false;
        let mut cnt = self.block_size;
        let m = self.m;
        let n = self.n;
        let mut e = self.next_arc;
        for _ in 0..self.arc_num {
            if self.state[e] != STATE_TREE {
                let i = e / m;
                let j = n + e % m;
                let c = f64::from(self.state[e]) * (self.cost[e] + self.pi[i] - self.pi[j]);
                if c < min {
                    min = c;
                    self.in_arc = e;
                    found = true;
                }
            }
            e += 1;
            if e == self.arc_num {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if found {
                    self.next_arc = e;
                    return true;
                }
                cnt = self.block_size;
            }
        }
        if found {
            self.next_arc = e;
        }
        found
    }

    fn find_join(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Returns false when the entering cycle is unbounded.
    fn find_leaving_arc(&mut self) -> bool {
        // all arcs are uncapacitated and the entering arc is at its lower bound
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        self.delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            if self.pred_dir[u] == DIR_UP {
                let d = self.flow[self.pred[u]];
                if d < self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 1;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            if self.pred_dir[u] == DIR_DOWN {
                let d = self.flow[self.pred[u]];
                if d <= self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 2;
                }
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self) {
        let val = self.delta;
        if val > 0.0 {
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= f64::from(self.pred_dir[u]) * val;
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += f64::from(self.pred_dir[u]) * val;
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        self.state[out] = STATE_LOWER;
        self.flow[out] = 0.0;
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;

        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue =
                if old_rev_thread == v_in { self.thread[old_last_succ] } else { self.thread[v_in] };

            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for idx in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[idx];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc: isize = 0;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc += self.succ_num[u] as isize - self.succ_num[p] as isize;
                self.succ_num[u] = tmp_sc as usize;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { DIR_UP } else { DIR_DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let sigma = self.pi[self.v_in] - self.pi[u_in]
            - f64::from(self.pred_dir[u_in]) * self.arc_cost(self.in_arc);
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    /// Runs pivots until optimality or `max_pivots`; `Err(pivots)` on the
    /// latter.
    pub fn run(mut self, max_pivots: usize) -> Result<SimplexSolution, usize> {
        let mut pivots = 0;
        while self.find_entering_arc() {
            if pivots >= max_pivots {
                return Err(pivots);
            }
            self.find_join();
            if !self.find_leaving_arc() {
                // cannot happen for bounded transportation problems
                return Err(pivots);
            }
            self.change_flow();
            self.update_tree_structure();
            self.update_potential();
            pivots += 1;
        }
        let mut flows = Vec::with_capacity(self.n + self.m);
        for e in 0..self.arc_num {
            if self.flow[e] > 0.0 {
                flows.push((e / self.m, e % self.m, self.flow[e]));
            }
        }
        // reduced cost c_ij + pi_i - pi_j >= 0  =>  u_i = -pi_i, v_j = pi_j
        let u = (0..self.n).map(|i| -self.pi[i]).collect();
        let v = (0..self.m).map(|j| self.pi[self.n + j]).collect();
        debug_assert!(self.node_num == self.n + self.m);
        Ok(SimplexSolution { flows, u, v, pivots })
    }
}
