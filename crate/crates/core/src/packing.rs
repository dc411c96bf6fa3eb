//! Packings: bijections sending every edge of X to a non-edge of Y. Such a
//! bijection admits no friendly swap, so it is an isolated vertex of
//! `FS(X, Y)` and certifies disconnection whenever `n >= 2`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{param, FsError, Result};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::perm::Permutation;
use crate::seed::{derive_seed, rng_from_seed, FsRng};

/// Largest `n` the exact search accepts (vertex sets are `u64` masks).
pub const EXACT_HARD_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMode {
    /// Exhaustive backtracking; requires `n <= cap`.
    Exact { cap: usize },
    /// Swap-based descent on the number of conflicting edges.
    LocalSearch { max_steps: u64, seed: u64, restarts: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PackingStatus {
    Found(Permutation),
    NoneExists,
    /// Local search ran out of steps.
    Indeterminate,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackingStats {
    /// Search-tree nodes (exact mode).
    pub nodes: u64,
    /// Moves made, summed over restarts (local search).
    pub steps: u64,
    /// Restarts started (local search).
    pub restarts: usize,
    /// Fewest conflicting edges seen at any point.
    pub best_conflicts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingResult {
    pub status: PackingStatus,
    pub stats: PackingStats,
}

/// Number of X-edges `{a, b}` with `{σ(a), σ(b)}` an edge of Y.
pub fn conflicts(x: &Graph, y: &Graph, sigma: &Permutation) -> usize {
    x.edges().into_iter().filter(|&(a, b)| y.has_edge(sigma[a], sigma[b])).count()
}

pub fn is_packing(x: &Graph, y: &Graph, sigma: &Permutation) -> bool {
    sigma.len() == x.n() && conflicts(x, y, sigma) == 0
}

pub fn find_packing(x: &Graph, y: &Graph, mode: PackingMode) -> Result<PackingResult> {
    find_packing_with(x, y, mode, Execution::default())
}

pub fn find_packing_with(x: &Graph, y: &Graph, mode: PackingMode, exec: Execution) -> Result<PackingResult> {
    let n = x.n();
    if y.n() != n {
        return param(format!("X has {n} vertices but Y has {}", y.n()));
    }
    let result = match mode {
        PackingMode::Exact { cap } => {
            let cap = cap.min(EXACT_HARD_CAP);
            if n > cap {
                return Err(FsError::Size { n, cap });
            }
            exact(x, y)
        }
        PackingMode::LocalSearch { max_steps, seed, restarts } => {
            if restarts == 0 {
                return param("local search needs at least one restart");
            }
            local_search(x, y, max_steps, seed, restarts, exec)
        }
    };
    if let PackingStatus::Found(sigma) = &result.status {
        assert!(is_packing(x, y, sigma), "search returned a conflicting bijection");
    }
    Ok(result)
}

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|i| g.neighbors(i).fold(0, |acc, j| acc | 1 << j)).collect()
}

struct Exact<'a> {
    x: &'a Graph,
    y_adj: Vec<u64>,
    order: Vec<usize>,
    image: Vec<usize>,
    /// Y-vertices ruled out for each X-vertex by its placed neighbours.
    forbidden: Vec<u64>,
    nodes: u64,
}

impl Exact<'_> {
    fn search(&mut self, depth: usize, unused: u64) -> bool {
        self.nodes += 1;
        let Some(&a) = self.order.get(depth) else { return true };
        let mut options = unused & !self.forbidden[a];
        while options != 0 {
            let v = options.trailing_zeros() as usize;
            options &= options - 1;
            let rest = unused & !(1 << v);
            let mut saved = Vec::new();
            let mut dead = false;
            for c in self.x.neighbors(a) {
                if self.image[c] != usize::MAX {
                    continue;
                }
                saved.push((c, self.forbidden[c]));
                self.forbidden[c] |= self.y_adj[v];
                if rest & !self.forbidden[c] == 0 {
                    dead = true;
                    break;
                }
            }
            if !dead {
                self.image[a] = v;
                if self.search(depth + 1, rest) {
                    return true;
                }
                self.image[a] = usize::MAX;
            }
            for (c, f) in saved.into_iter().rev() {
                self.forbidden[c] = f;
            }
        }
        false
    }
}

fn exact(x: &Graph, y: &Graph) -> PackingResult {
    let n = x.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(x.degree(a)));
    let mut s = Exact { x, y_adj: masks(y), order, image: vec![usize::MAX; n], forbidden: vec![0; n], nodes: 0 };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let found = s.search(0, all);
    let status = if found {
        PackingStatus::Found(Permutation::from_vec(s.image).expect("search assigns a bijection"))
    } else {
        PackingStatus::NoneExists
    };
    let best_conflicts = if found { 0 } else { 1 };
    PackingResult { status, stats: PackingStats { nodes: s.nodes, best_conflicts, ..Default::default() } }
}

/// Conflicting X-edges at `a` if `a` were mapped to `v`, ignoring position `skip`.
fn local_cost(x: &Graph, y: &Graph, p: &[usize], a: usize, v: usize, skip: usize) -> usize {
    x.neighbors(a).filter(|&b| b != skip && y.has_edge(v, p[b])).count()
}

struct Descent {
    sigma: Option<Permutation>,
    steps: u64,
    best: usize,
}

fn descend(x: &Graph, y: &Graph, max_steps: u64, rng: &mut FsRng) -> Descent {
    let n = x.n();
    let mut p = Permutation::random(n, rng).into_vec();
    let edges = x.edges();
    let mut cost = edges.iter().filter(|&&(a, b)| y.has_edge(p[a], p[b])).count();
    let mut best = cost;
    let plateau_limit = 4 * n as u64 + 16;
    let mut plateau = 0;
    let mut steps = 0;
    while cost > 0 && steps < max_steps {
        steps += 1;
        let bad: Vec<usize> = edges
            .iter()
            .filter(|&&(a, b)| y.has_edge(p[a], p[b]))
            .flat_map(|&(a, b)| [a, b])
            .collect();
        let a = *bad.choose(rng).expect("cost > 0");
        // Best swap partner for a; the X-edge {a, c} itself, if any, keeps
        // its image pair, so it is left out of both sides.
        let mut best_delta = i64::MAX;
        let mut choices = Vec::new();
        for c in (0..n).filter(|&c| c != a) {
            let before = local_cost(x, y, &p, a, p[a], c) + local_cost(x, y, &p, c, p[c], a);
            let after = local_cost(x, y, &p, a, p[c], c) + local_cost(x, y, &p, c, p[a], a);
            let delta = after as i64 - before as i64;
            if delta < best_delta {
                best_delta = delta;
                choices.clear();
            }
            if delta == best_delta {
                choices.push(c);
            }
        }
        let c = if best_delta < 0 || (best_delta == 0 && plateau < plateau_limit) {
            plateau = if best_delta < 0 { 0 } else { plateau + 1 };
            *choices.choose(rng).unwrap()
        } else {
            // Stuck: a random kick.
            plateau = 0;
            let mut c = rng.gen_range(0..n - 1);
            if c >= a {
                c += 1;
            }
            c
        };
        p.swap(a, c);
        cost = edges.iter().filter(|&&(a, b)| y.has_edge(p[a], p[b])).count();
        best = best.min(cost);
    }
    let sigma = (cost == 0).then(|| Permutation::from_vec(p).unwrap());
    Descent { sigma, steps, best }
}

fn local_search(x: &Graph, y: &Graph, max_steps: u64, seed: u64, restarts: usize, exec: Execution) -> PackingResult {
    let n = x.n();
    if n < 2 || x.edge_count() == 0 {
        let sigma = Permutation::identity(n);
        return PackingResult { status: PackingStatus::Found(sigma), stats: PackingStats { restarts: 1, ..Default::default() } };
    }
    let run = |r: usize| descend(x, y, max_steps, &mut rng_from_seed(derive_seed(seed, &[r as u64])));
    if let Some((r, d)) = exec.find_first(restarts, |r| {
        let d = run(r);
        d.sigma.is_some().then_some(d)
    }) {
        // Statistics cover the restarts up to and including the winner, so
        // they do not depend on scheduling.
        let earlier: Vec<Descent> = (0..r).map(run).collect();
        let steps = earlier.iter().map(|d| d.steps).sum::<u64>() + d.steps;
        let stats = PackingStats { nodes: 0, steps, restarts: r + 1, best_conflicts: 0 };
        return PackingResult { status: PackingStatus::Found(d.sigma.unwrap()), stats };
    }
    let all = exec.map_indexed(restarts, run);
    let stats = PackingStats {
        nodes: 0,
        steps: all.iter().map(|d| d.steps).sum(),
        restarts,
        best_conflicts: all.iter().map(|d| d.best).min().unwrap_or(0),
    };
    PackingResult { status: PackingStatus::Indeterminate, stats }
}

/// One-sided disconnection certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisconnectionCertificate {
    /// `σ` has no friendly swap, and `FS(X, Y)` has other vertices.
    Isolated(Permutation),
    /// No packing was found; says nothing about connectivity.
    Unknown,
}

pub fn certify_disconnected(x: &Graph, y: &Graph, mode: PackingMode) -> Result<DisconnectionCertificate> {
    let r = find_packing(x, y, mode)?;
    Ok(match r.status {
        PackingStatus::Found(sigma) if x.n() >= 2 => DisconnectionCertificate::Isolated(sigma),
        _ => DisconnectionCertificate::Unknown,
    })
}
