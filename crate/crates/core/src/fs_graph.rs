//! The friends-and-strangers graph `FS(X, Y)` as an implicit graph.
//!
//! Vertices are bijections `σ: V(X) -> V(Y)`; `σ` and `σ'` are adjacent when
//! `σ'` is `σ` with the images of some X-edge `{a, b}` swapped and
//! `{σ(a), σ(b)}` is an edge of `Y`.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::dsu::{AtomicDisjointSets, DisjointSets};
use crate::error::{param, FsError, Result};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::perm::{Permutation, FACTORIALS};

/// Default limit on `n` for exhaustive decomposition (`10! ≈ 3.6M` vertices).
pub const DEFAULT_CAP: usize = 10;
/// Component labels are `u32`, which covers `12!`.
pub const HARD_CAP: usize = 12;
/// Default node budget for bounded searches.
pub const DEFAULT_BUDGET: usize = 5_000_000;

pub(crate) const BLOCK: u64 = 5040;

/// A pair `(X, Y)` on a shared vertex count.
#[derive(Debug, Clone)]
pub struct FsInstance {
    x: Graph,
    y: Graph,
    x_edges: Vec<(usize, usize)>,
}

impl FsInstance {
    pub fn new(x: Graph, y: Graph) -> Result<Self> {
        if x.n() != y.n() {
            return param(format!("|V(X)| = {} but |V(Y)| = {}", x.n(), y.n()));
        }
        let x_edges = x.edges();
        Ok(FsInstance { x, y, x_edges })
    }

    pub fn x(&self) -> &Graph {
        &self.x
    }

    pub fn y(&self) -> &Graph {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// `(Y, X)`, isomorphic to `self` via `σ ↦ σ⁻¹`.
    pub fn transposed(&self) -> FsInstance {
        FsInstance::new(self.y.clone(), self.x.clone()).unwrap()
    }

    fn check_perm(&self, sigma: &Permutation) -> Result<()> {
        if sigma.len() != self.n() {
            return param(format!("permutation has length {}, instance has n = {}", sigma.len(), self.n()));
        }
        Ok(())
    }

    /// Neighbors of `σ`, one per friendly X-edge, in lexicographic X-edge order.
    pub fn fs_neighbors(&self, sigma: &Permutation) -> Result<Vec<Permutation>> {
        self.check_perm(sigma)?;
        Ok(self
            .x_edges
            .iter()
            .filter(|&&(a, b)| self.y.has_edge(sigma[a], sigma[b]))
            .map(|&(a, b)| sigma.swap_positions(a, b))
            .collect())
    }

    /// Number of friendly swaps available at `σ`.
    pub fn fs_degree(&self, sigma: &Permutation) -> Result<usize> {
        self.check_perm(sigma)?;
        Ok(self
            .x_edges
            .iter()
            .filter(|&&(a, b)| self.y.has_edge(sigma[a], sigma[b]))
            .count())
    }

    /// True if `to` is reachable from `from` by exactly one friendly swap.
    pub fn is_friendly_step(&self, from: &Permutation, to: &Permutation) -> bool {
        if from.len() != self.n() || to.len() != self.n() {
            return false;
        }
        let diff: Vec<usize> = (0..self.n()).filter(|&i| from[i] != to[i]).collect();
        match diff[..] {
            [a, b] => {
                from[a] == to[b]
                    && from[b] == to[a]
                    && self.x.has_edge(a, b)
                    && self.y.has_edge(from[a], from[b])
            }
            _ => false,
        }
    }

    /// True if `path` is nonempty and every consecutive pair is a friendly swap.
    pub fn is_valid_path(&self, path: &[Permutation]) -> bool {
        !path.is_empty() && path.windows(2).all(|w| self.is_friendly_step(&w[0], &w[1]))
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        let cap = cap.min(HARD_CAP);
        if self.n() > cap {
            return Err(FsError::Size { n: self.n(), cap });
        }
        Ok(())
    }

    /// Component label of every ranked bijection.
    pub fn component_table(&self, cap: usize, exec: Execution) -> Result<ComponentTable> {
        self.check_cap(cap)?;
        let n = self.n();
        let total = FACTORIALS[n];
        let blocks = total.div_ceil(BLOCK) as usize;
        let scan = RankScan::new(self);
        let labels = if exec.is_parallel() {
            let dsu = AtomicDisjointSets::new(total as usize);
            exec.for_each_index(blocks, |blk| {
                scan.scan_block(blk as u64, true, |r, s| dsu.union(r as u32, s as u32));
            });
            dsu.roots()
        } else {
            let mut dsu = DisjointSets::new(total as usize);
            for blk in 0..blocks as u64 {
                scan.scan_block(blk, true, |r, s| {
                    dsu.union(r as u32, s as u32);
                });
            }
            dsu.roots()
        };
        Ok(ComponentTable { n, labels })
    }

    /// Exact component structure of `FS(X, Y)`; requires `n <= cap`.
    pub fn decompose(&self, cap: usize) -> Result<ComponentSummary> {
        self.decompose_with(cap, Execution::default())
    }

    pub fn decompose_with(&self, cap: usize, exec: Execution) -> Result<ComponentSummary> {
        Ok(self.component_table(cap, exec)?.summary())
    }

    pub fn is_fs_connected(&self, cap: usize) -> Result<bool> {
        Ok(self.decompose(cap)?.component_count == 1)
    }

    /// Bidirectional breadth-first search from `from` to `to`.
    ///
    /// `budget` bounds the number of distinct bijections stored across both
    /// sides. Running out yields [`PathSearch::Indeterminate`], which says
    /// nothing about connectivity. If either side exhausts its whole component
    /// first, the answer is a proven [`PathSearch::Unreachable`].
    pub fn find_path(&self, from: &Permutation, to: &Permutation, budget: usize) -> Result<PathSearch> {
        if budget == 0 {
            return param("node budget must be positive");
        }
        self.check_perm(from)?;
        self.check_perm(to)?;
        if self.n() > 256 {
            return Err(FsError::Size { n: self.n(), cap: 256 });
        }
        if from == to {
            return Ok(PathSearch::Found { path: vec![from.clone()], explored: 1 });
        }
        let mut sides = [SearchSide::new(from), SearchSide::new(to)];
        loop {
            let explored = sides[0].len() + sides[1].len();
            let pick = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
            let (this, other) = if pick == 0 {
                let (a, b) = sides.split_at_mut(1);
                (&mut a[0], &b[0])
            } else {
                let (a, b) = sides.split_at_mut(1);
                (&mut b[0], &a[0])
            };
            if this.frontier.is_empty() {
                return Ok(PathSearch::Unreachable { explored });
            }
            match this.expand_level(self, other, budget - other.len())? {
                Expansion::Met(here, there) => {
                    let mut path = this.chain(here);
                    let mut tail = other.chain(there);
                    // both chains start at the meeting node
                    if pick == 0 {
                        path.reverse();
                        path.extend(tail.into_iter().skip(1));
                    } else {
                        tail.reverse();
                        tail.extend(path.into_iter().skip(1));
                        path = tail;
                    }
                    let explored = sides[0].len() + sides[1].len();
                    return Ok(PathSearch::Found { path, explored });
                }
                Expansion::OutOfBudget => {
                    return Ok(PathSearch::Indeterminate {
                        explored: sides[0].len() + sides[1].len(),
                    })
                }
                Expansion::Continue => {}
            }
        }
    }
}

/// Result of [`FsInstance::find_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSearch {
    /// Consecutive entries differ by one friendly swap.
    Found { path: Vec<Permutation>, explored: usize },
    /// One endpoint's component was exhausted without meeting the other.
    Unreachable { explored: usize },
    /// Budget exhausted; no conclusion.
    Indeterminate { explored: usize },
}

impl PathSearch {
    pub fn explored(&self) -> usize {
        match self {
            PathSearch::Found { explored, .. }
            | PathSearch::Unreachable { explored }
            | PathSearch::Indeterminate { explored } => *explored,
        }
    }

    pub fn path(&self) -> Option<&[Permutation]> {
        match self {
            PathSearch::Found { path, .. } => Some(path),
            _ => None,
        }
    }
}

enum Expansion {
    Met(u32, u32),
    OutOfBudget,
    Continue,
}

struct SearchSide {
    keys: Vec<Rc<[u8]>>,
    parent: Vec<u32>,
    index: HashMap<Rc<[u8]>, u32>,
    frontier: Vec<u32>,
}

impl SearchSide {
    fn new(root: &Permutation) -> Self {
        let key: Rc<[u8]> = root.as_slice().iter().map(|&x| x as u8).collect();
        let mut index = HashMap::new();
        index.insert(key.clone(), 0);
        SearchSide { keys: vec![key], parent: vec![u32::MAX], index, frontier: vec![0] }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn expand_level(&mut self, inst: &FsInstance, other: &SearchSide, room: usize) -> Result<Expansion> {
        let frontier = std::mem::take(&mut self.frontier);
        let mut buf = vec![0u8; inst.n()];
        for id in frontier {
            for &(a, b) in &inst.x_edges {
                let cur = &self.keys[id as usize];
                if !inst.y.has_edge(cur[a] as usize, cur[b] as usize) {
                    continue;
                }
                buf.copy_from_slice(cur);
                buf.swap(a, b);
                if self.index.contains_key(&buf[..]) {
                    continue;
                }
                if self.len() >= room {
                    return Ok(Expansion::OutOfBudget);
                }
                let key: Rc<[u8]> = Rc::from(&buf[..]);
                let new_id = self.keys.len() as u32;
                self.keys.push(key.clone());
                self.parent.push(id);
                self.index.insert(key, new_id);
                self.frontier.push(new_id);
                if let Some(&there) = other.index.get(&buf[..]) {
                    return Ok(Expansion::Met(new_id, there));
                }
            }
        }
        Ok(Expansion::Continue)
    }

    /// Node, its parent, ..., root.
    fn chain(&self, mut id: u32) -> Vec<Permutation> {
        let mut out = Vec::new();
        loop {
            let map = self.keys[id as usize].iter().map(|&x| x as usize).collect();
            out.push(Permutation::from_vec_unchecked(map));
            if self.parent[id as usize] == u32::MAX {
                return out;
            }
            id = self.parent[id as usize];
        }
    }
}

/// Shape of `FS(X, Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub component_count: u64,
    /// Component size -> number of components of that size.
    pub sizes: BTreeMap<u64, u64>,
    pub isolated_count: u64,
}

impl ComponentSummary {
    pub fn total_vertices(&self) -> u64 {
        self.sizes.iter().map(|(s, c)| s * c).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }
}

/// Component label for every rank in `0..n!`.
#[derive(Debug, Clone)]
pub struct ComponentTable {
    n: usize,
    labels: Vec<u32>,
}

impl ComponentTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label_of_rank(&self, r: u64) -> u32 {
        self.labels[r as usize]
    }

    pub fn label(&self, sigma: &Permutation) -> Result<u32> {
        if sigma.len() != self.n {
            return param("permutation length does not match the table");
        }
        Ok(self.labels[sigma.rank()? as usize])
    }

    pub fn same_component(&self, a: &Permutation, b: &Permutation) -> Result<bool> {
        Ok(self.label(a)? == self.label(b)?)
    }

    pub fn summary(&self) -> ComponentSummary {
        let mut counts = vec![0u32; self.labels.len()];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        let mut sizes = BTreeMap::new();
        for &c in counts.iter().filter(|&&c| c > 0) {
            *sizes.entry(c as u64).or_insert(0) += 1;
        }
        ComponentSummary {
            component_count: sizes.values().sum(),
            isolated_count: sizes.get(&1).copied().unwrap_or(0),
            sizes,
        }
    }
}

/// Enumerates FS edges `(r, r')` with `r < r'` over ranked bijections,
/// walking each block in lexicographic order and computing neighbor ranks
/// incrementally from the Lehmer code.
pub(crate) struct RankScan {
    n: usize,
    x_edges: Vec<(u8, u8)>,
    y_rows: Vec<u16>,
    weights: [u64; HARD_CAP],
}

impl RankScan {
    pub(crate) fn new(inst: &FsInstance) -> Self {
        let n = inst.n();
        assert!(n <= HARD_CAP);
        let mut weights = [0u64; HARD_CAP];
        for (i, w) in weights.iter_mut().enumerate().take(n) {
            *w = FACTORIALS[n - 1 - i];
        }
        RankScan {
            n,
            x_edges: inst.x_edges.iter().map(|&(a, b)| (a as u8, b as u8)).collect(),
            y_rows: (0..n)
                .map(|u| inst.y.neighbors(u).fold(0u16, |m, v| m | 1 << v))
                .collect(),
            weights,
        }
    }

    /// Rank of `p` with positions `a < b` swapped, given `rank(p) = r` and
    /// `p[a] < p[b]`.
    #[inline]
    pub(crate) fn swapped_rank(&self, p: &[u8], r: u64, a: usize, b: usize) -> u64 {
        let (lo, hi) = (p[a], p[b]);
        debug_assert!(lo < hi);
        let mut delta = self.weights[a];
        for (&v, &w) in p[a + 1..b].iter().zip(&self.weights[a + 1..b]) {
            if lo < v && v < hi {
                delta += self.weights[a] + w;
            }
        }
        let after = p[b + 1..self.n].iter().filter(|&&v| lo < v && v < hi).count() as u64;
        delta += after * (self.weights[a] - self.weights[b]);
        r + delta
    }

    /// Visits every `(rank(σ), rank(σ ∘ τ_ab))` with `σ(a) < σ(b)` for X-edges
    /// `{a, b}` in block `blk`; with `friendly_only`, only friendly swaps.
    pub(crate) fn scan_block(&self, blk: u64, friendly_only: bool, mut emit: impl FnMut(u64, u64)) {
        let n = self.n;
        let total = FACTORIALS[n];
        let start = blk * BLOCK;
        let end = (start + BLOCK).min(total);
        let first = Permutation::unrank(start, n).unwrap();
        let mut p = [0u8; HARD_CAP];
        for (slot, &v) in p.iter_mut().zip(first.as_slice()) {
            *slot = v as u8;
        }
        let p = &mut p[..n];
        for r in start..end {
            for &(a, b) in &self.x_edges {
                let (a, b) = (a as usize, b as usize);
                let (va, vb) = (p[a], p[b]);
                if va < vb && (!friendly_only || self.y_rows[va as usize] >> vb & 1 == 1) {
                    emit(r, self.swapped_rank(p, r, a, b));
                }
            }
            next_permutation(p);
        }
    }
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
