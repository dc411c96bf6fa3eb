//! Simple undirected graphs on `0..n` with bitset adjacency.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;

use crate::error::{param, FsError, Result};
use crate::seed::rng_from_seed;

/// A finite simple undirected graph on vertices `0..n`.
///
/// Each vertex owns a row of `words` 64-bit words; bit `v` of row `u` is set
/// iff `{u, v}` is an edge. Rows are kept symmetric and the diagonal is clear.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

/// Standard graph families accepted by [`Graph::named`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGraph {
    Complete,
    /// Star with center 0.
    Star,
    Path,
    Cycle,
    /// `K_{s,t}`; the first part is `0..s`.
    CompleteBipartite(usize, usize),
    /// `rows x cols` grid, vertex `r * cols + c`.
    Grid(usize, usize),
    Empty,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            bits: vec![0; words * n],
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return param(format!("edge {{{u},{v}}} out of range for n = {n}"));
            }
            if u == v {
                return param(format!("self-loop at {u}"));
            }
            if g.has_edge(u, v) {
                return param(format!("duplicate edge {{{u},{v}}}"));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn named(kind: NamedGraph, n: usize) -> Result<Self> {
        if n == 0 {
            return param("graph families need n >= 1");
        }
        let mut g = Graph::empty(n);
        match kind {
            NamedGraph::Complete => {
                for u in 0..n {
                    for v in u + 1..n {
                        g.add_edge(u, v);
                    }
                }
            }
            NamedGraph::Star => {
                for v in 1..n {
                    g.add_edge(0, v);
                }
            }
            NamedGraph::Path => {
                for v in 1..n {
                    g.add_edge(v - 1, v);
                }
            }
            NamedGraph::Cycle => {
                if n < 3 {
                    return param(format!("cycle needs n >= 3, got {n}"));
                }
                for v in 0..n {
                    g.add_edge(v, (v + 1) % n);
                }
            }
            NamedGraph::CompleteBipartite(s, t) => {
                if s + t != n {
                    return param(format!("complete bipartite needs s + t = n ({s} + {t} != {n})"));
                }
                for u in 0..s {
                    for v in s..n {
                        g.add_edge(u, v);
                    }
                }
            }
            NamedGraph::Grid(rows, cols) => {
                if rows * cols != n {
                    return param(format!("grid needs rows * cols = n ({rows} * {cols} != {n})"));
                }
                for r in 0..rows {
                    for c in 0..cols {
                        let v = r * cols + c;
                        if c + 1 < cols {
                            g.add_edge(v, v + 1);
                        }
                        if r + 1 < rows {
                            g.add_edge(v, v + cols);
                        }
                    }
                }
            }
            NamedGraph::Empty => {}
        }
        Ok(g)
    }

    /// Erdős–Rényi `G(n, p)`.
    ///
    /// Pairs are visited in lexicographic order and each consumes exactly one
    /// draw from a ChaCha8 stream keyed by `seed`, so the result is the same on
    /// every platform.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return param(format!("edge probability {p} outside [0, 1]"));
        }
        let mut rng = rng_from_seed(seed);
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds `{u, v}`. Panics on a self-loop; adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop at {u}");
        assert!(u < self.n && v < self.n, "vertex out of range");
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] &= !(1 << (v % 64));
        self.bits[v * self.words + u / 64] &= !(1 << (u % 64));
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Neighbors of `u` in increasing order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Subgraph induced by `s`, relabeled `0..|s|` in the order given.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<Graph> {
        let mut seen = vec![false; self.n];
        for &v in s {
            if v >= self.n {
                return param(format!("vertex {v} out of range for n = {}", self.n));
            }
            if seen[v] {
                return param(format!("vertex {v} listed twice"));
            }
            seen[v] = true;
        }
        let mut g = Graph::empty(s.len());
        for (i, &a) in s.iter().enumerate() {
            for (j, &b) in s.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Breadth-first distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest-path distance, `None` if `u` and `v` are disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        self.bfs_distances(u)[v]
    }

    /// Connected. The null graph and `K_1` count as connected.
    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            dist.fill(usize::MAX);
            parent.fill(usize::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[u] + 1 >= b {
                        break;
                    }
                }
                for v in self.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// True if no two vertices of `set` are adjacent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }

    /// True if every edge of `self` is an edge of `other` (same vertex count).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(a, b)| a & !b == 0)
    }

    /// Serializes in the edge-list format: `n m` then one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parses the edge-list format. Leading `#` lines are skipped; edges
    /// must satisfy `u < v` and appear in strictly increasing order.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let perr = |line: usize, msg: String| FsError::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .skip_while(|(_, l)| l.starts_with('#'))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
        let nums = parse_usizes(header).map_err(|m| perr(hl, m))?;
        let [n, m] = nums[..] else {
            return Err(perr(hl, format!("header must be `n m`, got `{header}`")));
        };
        let mut g = Graph::empty(n);
        let mut prev: Option<(usize, usize)> = None;
        let mut count = 0;
        for (ln, line) in lines {
            let nums = parse_usizes(line).map_err(|m| perr(ln, m))?;
            let [u, v] = nums[..] else {
                return Err(perr(ln, format!("edge line must be `u v`, got `{line}`")));
            };
            if u == v {
                return Err(perr(ln, format!("self-loop at {u}")));
            }
            if u > v {
                return Err(perr(ln, format!("edge `{u} {v}` must satisfy u < v")));
            }
            if v >= n {
                return Err(perr(ln, format!("vertex {v} out of range for n = {n}")));
            }
            if let Some(p) = prev {
                if p == (u, v) {
                    return Err(perr(ln, format!("duplicate edge {u} {v}")));
                }
                if p > (u, v) {
                    return Err(perr(ln, "edges not sorted lexicographically".into()));
                }
            }
            prev = Some((u, v));
            g.add_edge(u, v);
            count += 1;
        }
        if count != m {
            return Err(perr(hl, format!("header declares {m} edges, found {count}")));
        }
        Ok(g)
    }
}

fn parse_usizes(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| format!("not a vertex index: `{t}`")))
        .collect()
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_families() {
        assert_eq!(Graph::named(NamedGraph::Complete, 4).unwrap().edge_count(), 6);
        let star = Graph::named(NamedGraph::Star, 6).unwrap();
        assert_eq!(star.max_degree(), 5);
        assert_eq!(star.degree(0), 5);
        assert_eq!(Graph::named(NamedGraph::Cycle, 5).unwrap().girth(), Some(5));
        let grid = Graph::named(NamedGraph::Grid(2, 3), 6).unwrap();
        assert_eq!(grid.edge_count(), 7);
        assert_eq!(grid.girth(), Some(4));
        let kb = Graph::named(NamedGraph::CompleteBipartite(2, 3), 5).unwrap();
        assert_eq!(kb.edge_count(), 6);
        assert!(Graph::named(NamedGraph::CompleteBipartite(2, 2), 5).is_err());
        assert!(Graph::named(NamedGraph::Grid(2, 2), 5).is_err());
        assert!(Graph::named(NamedGraph::Path, 0).is_err());
    }

    #[test]
    fn gnp_extremes_and_mean() {
        assert_eq!(Graph::gnp(5, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(Graph::gnp(5, 1.0, 1).unwrap(), Graph::named(NamedGraph::Complete, 5).unwrap());
        assert!(Graph::gnp(5, 1.5, 1).is_err());
        assert!(Graph::gnp(5, -0.1, 1).is_err());
        // Binomial(4950, 0.5): mean 2475, sd ~35.2.
        let e = Graph::gnp(100, 0.5, 0xfeed).unwrap().edge_count() as f64;
        assert!((e - 2475.0).abs() <= 4.0 * (2475.0f64 * 0.5).sqrt(), "{e}");
    }

    #[test]
    fn gnp_is_reproducible() {
        let a = Graph::gnp(40, 0.3, 99).unwrap();
        let b = Graph::gnp(40, 0.3, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Graph::gnp(40, 0.3, 100).unwrap());
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = Graph::named(NamedGraph::Complete, 4).unwrap();
        assert_eq!(k4.induced_subgraph(&[0, 2, 3]).unwrap(), Graph::named(NamedGraph::Complete, 3).unwrap());
        let p4 = Graph::named(NamedGraph::Path, 4).unwrap();
        assert_eq!(p4.induced_subgraph(&[0, 2]).unwrap(), Graph::empty(2));
        let c5 = Graph::named(NamedGraph::Cycle, 5).unwrap();
        assert_eq!(c5.induced_subgraph(&[0, 1, 2]).unwrap(), Graph::named(NamedGraph::Path, 3).unwrap());
        assert!(c5.induced_subgraph(&[0, 7]).is_err());
    }

    #[test]
    fn metrics() {
        assert_eq!(Graph::named(NamedGraph::Complete, 5).unwrap().complement(), Graph::empty(5));
        assert_eq!(Graph::named(NamedGraph::Path, 7).unwrap().girth(), None);
        assert_eq!(Graph::named(NamedGraph::Cycle, 6).unwrap().distance(0, 3), Some(3));
        assert_eq!(Graph::empty(3).distance(0, 2), None);
        assert!(Graph::named(NamedGraph::Path, 6).unwrap().is_connected());
        assert!(!Graph::empty(2).is_connected());
        assert!(Graph::empty(1).is_connected());
        assert_eq!(Graph::named(NamedGraph::Complete, 4).unwrap().girth(), Some(3));
    }

    #[test]
    fn wide_graphs_cross_word_boundaries() {
        let g = Graph::named(NamedGraph::Cycle, 130).unwrap();
        assert_eq!(g.edge_count(), 130);
        assert_eq!(g.neighbors(64).collect::<Vec<_>>(), vec![63, 65]);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1, 129]);
        assert_eq!(g.girth(), Some(130));
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        let ok = "# header\n3 2\n0 1\n1 2\n";
        assert_eq!(Graph::parse_edge_list(ok).unwrap().edge_count(), 2);
        for bad in [
            "3 2\n0 1\n0 1\n",
            "3 1\n1 1\n",
            "3 1\n0 3\n",
            "3 1\n2 1\n",
            "3 2\n1 2\n0 1\n",
            "3 2\n0 1\n",
            "3\n",
            "",
        ] {
            assert!(Graph::parse_edge_list(bad).is_err(), "accepted {bad:?}");
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n, any::<u64>(), 0.0..=1.0f64).prop_map(|(n, seed, p)| Graph::gnp(n, p, seed).unwrap())
    }

    proptest! {
        #[test]
        fn complement_is_involutive(g in arb_graph(70)) {
            let c = g.complement();
            prop_assert_eq!(&c.complement(), &g);
            let n = g.n();
            prop_assert_eq!(g.edge_count() + c.edge_count(), n * (n - 1) / 2);
        }

        #[test]
        fn edge_list_round_trips(g in arb_graph(70)) {
            prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        }

        #[test]
        fn adjacency_is_symmetric(g in arb_graph(70)) {
            for u in 0..g.n() {
                prop_assert!(!g.has_edge(u, u));
                for v in g.neighbors(u) {
                    prop_assert!(g.has_edge(v, u));
                }
            }
        }
    }
}
