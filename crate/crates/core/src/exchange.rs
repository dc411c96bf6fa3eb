//! Exchangeable pairs and the two ways they certify connectivity: checking
//! every X-adjacent pair directly, and transferring a known exchangeable
//! pair of a small graph pair through a pair of embeddings.

use crate::error::{param, FsError, Result};
use crate::exec::Execution;
use crate::fs_graph::{ComponentTable, FsInstance, PathSearch, RankScan, BLOCK};
use crate::graph::Graph;
use crate::perm::{Permutation, FACTORIALS};

/// How an exchangeability question is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeMode {
    /// Decompose `FS(X, Y)` completely; requires `n <= cap`. Never indeterminate.
    Exact { cap: usize },
    /// Bidirectional search limited to `budget` stored nodes.
    Bounded { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExchangeStatus {
    /// Witness path from `σ` to `τ_uv ∘ σ`.
    Exchangeable(Vec<Permutation>),
    NotExchangeable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeVerdict {
    pub status: ExchangeStatus,
    /// Nodes touched: `n!` in exact mode, search size in bounded mode.
    pub explored: u64,
}

impl ExchangeVerdict {
    pub fn is_exchangeable(&self) -> bool {
        matches!(self.status, ExchangeStatus::Exchangeable(_))
    }
}

fn check_pair(inst: &FsInstance, u: usize, v: usize) -> Result<()> {
    let n = inst.n();
    if u == v || u >= n || v >= n {
        return param(format!("exchange pair ({u}, {v}) invalid for n = {n}"));
    }
    Ok(())
}

/// Are `u` and `v` (vertices of Y) exchangeable from `σ` in `FS(X, Y)`?
pub fn exchangeable(
    inst: &FsInstance,
    sigma: &Permutation,
    u: usize,
    v: usize,
    mode: ExchangeMode,
) -> Result<ExchangeVerdict> {
    check_pair(inst, u, v)?;
    match mode {
        ExchangeMode::Exact { cap } => {
            let table = inst.component_table(cap, Execution::default())?;
            exchangeable_in_table(inst, &table, sigma, u, v)
        }
        ExchangeMode::Bounded { budget } => {
            let target = sigma.apply_transposition(u, v)?;
            let (status, explored) = match inst.find_path(sigma, &target, budget)? {
                PathSearch::Found { path, explored } => (ExchangeStatus::Exchangeable(path), explored),
                PathSearch::Unreachable { explored } => (ExchangeStatus::NotExchangeable, explored),
                PathSearch::Indeterminate { explored } => (ExchangeStatus::Indeterminate, explored),
            };
            Ok(ExchangeVerdict { status, explored: explored as u64 })
        }
    }
}

/// Exact-mode query against a precomputed component table, so many queries
/// on one instance share a single decomposition.
pub fn exchangeable_in_table(
    inst: &FsInstance,
    table: &ComponentTable,
    sigma: &Permutation,
    u: usize,
    v: usize,
) -> Result<ExchangeVerdict> {
    check_pair(inst, u, v)?;
    let target = sigma.apply_transposition(u, v)?;
    let explored = FACTORIALS[inst.n()];
    if !table.same_component(sigma, &target)? {
        return Ok(ExchangeVerdict { status: ExchangeStatus::NotExchangeable, explored });
    }
    // Same component, so an unlimited search must succeed.
    match inst.find_path(sigma, &target, explored as usize + 1)? {
        PathSearch::Found { path, .. } => Ok(ExchangeVerdict {
            status: ExchangeStatus::Exchangeable(path),
            explored,
        }),
        other => unreachable!("component table and search disagree: {other:?}"),
    }
}

/// Outcome of [`connectivity_by_exchange`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExchangeConnectivity {
    /// Every X-adjacent pair is exchangeable and X is connected.
    Connected { pairs_checked: u64 },
    Undecided(UndecidedReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UndecidedReason {
    XDisconnected,
    /// The first (by rank of `σ`) pair that is not exchangeable.
    PairNotExchangeable { sigma: Permutation, u: usize, v: usize },
}

/// Checks the local exchange condition for connectivity: X connected, and for
/// every `σ` and every X-edge `{a, b}`, the images `σ(a), σ(b)` are
/// exchangeable from `σ`. Passing certifies that `FS(X, Y)` is connected.
pub fn connectivity_by_exchange(inst: &FsInstance, cap: usize) -> Result<ExchangeConnectivity> {
    connectivity_by_exchange_with(inst, cap, Execution::default())
}

pub fn connectivity_by_exchange_with(
    inst: &FsInstance,
    cap: usize,
    exec: Execution,
) -> Result<ExchangeConnectivity> {
    if !inst.x().is_connected() {
        return Ok(ExchangeConnectivity::Undecided(UndecidedReason::XDisconnected));
    }
    let table = inst.component_table(cap, exec)?;
    let n = inst.n();
    let blocks = FACTORIALS[n].div_ceil(BLOCK) as usize;
    let scan = RankScan::new(inst);
    // τ_uv ∘ σ with u = σ(a), v = σ(b) is σ with positions a, b swapped, so
    // each unordered pair is seen once from the side with σ(a) < σ(b).
    let failure = exec.find_first(blocks, |blk| {
        let mut first = None;
        scan.scan_block(blk as u64, false, |r, s| {
            if first.is_none() && table.label_of_rank(r) != table.label_of_rank(s) {
                first = Some(r);
            }
        });
        first
    });
    match failure {
        None => {
            let pairs = FACTORIALS[n] * inst.x().edge_count() as u64 / 2;
            Ok(ExchangeConnectivity::Connected { pairs_checked: pairs })
        }
        Some((_, r)) => {
            let sigma = Permutation::unrank(r, n)?;
            let (a, b) = inst
                .x()
                .edges()
                .into_iter()
                .find(|&(a, b)| {
                    sigma[a] < sigma[b]
                        && table.label_of_rank(r) != table.label(&sigma.swap_positions(a, b)).unwrap()
                })
                .expect("failing edge recorded by the scan");
            let (u, v) = (sigma[a], sigma[b]);
            Ok(ExchangeConnectivity::Undecided(UndecidedReason::PairNotExchangeable { sigma, u, v }))
        }
    }
}

/// Whether the base exchangeability of the small pair is checked or taken on trust.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseHypothesis {
    /// Decide it exactly on the small pair (requires `m + 2 <= cap`).
    Verify { cap: usize },
    Assume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Verified,
    Assumed,
}

/// Record of a successful transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferCertificate {
    /// `(ψ(m+1), ψ(m+2))`, exchangeable in `(X, Y)` from `σ`.
    pub pair: (usize, usize),
    pub checks: Vec<(&'static str, CheckStatus)>,
}

impl TransferCertificate {
    pub fn fully_verified(&self) -> bool {
        self.checks.iter().all(|(_, s)| *s == CheckStatus::Verified)
    }
}

fn check_embedding(small: &Graph, big: &Graph, map: &[usize], name: &str) -> Result<()> {
    let hyp = |msg: String| Err(FsError::Hypothesis(msg));
    if map.len() != small.n() {
        return hyp(format!("{name} has {} entries, expected {}", map.len(), small.n()));
    }
    let mut used = vec![false; big.n()];
    for (i, &t) in map.iter().enumerate() {
        if t >= big.n() {
            return hyp(format!("{name}({i}) = {t} is out of range"));
        }
        if std::mem::replace(&mut used[t], true) {
            return hyp(format!("{name} is not injective: vertex {t} is hit twice"));
        }
    }
    for (i, j) in small.edges() {
        if !big.has_edge(map[i], map[j]) {
            return hyp(format!(
                "{name} is not edge-preserving: edge {{{i},{j}}} maps to non-edge {{{},{}}}",
                map[i], map[j]
            ));
        }
    }
    Ok(())
}

/// Transfers exchangeability of the last two vertices of `(G, H)` (on `m+2`
/// vertices, from the identity) to `(X, Y)` along embeddings `φ: G -> X` and
/// `ψ: H -> Y` with `σ ∘ φ = ψ`.
#[allow(clippy::too_many_arguments)]
pub fn transfer_exchangeability(
    g: &Graph,
    h: &Graph,
    x: &Graph,
    y: &Graph,
    phi: &[usize],
    psi: &[usize],
    sigma: &Permutation,
    base: BaseHypothesis,
) -> Result<TransferCertificate> {
    let k = g.n();
    if h.n() != k || k < 2 {
        return param(format!("G and H must share a vertex set of size >= 2 (got {} and {})", k, h.n()));
    }
    if x.n() != y.n() || sigma.len() != x.n() {
        return param("X, Y and σ must share one vertex count");
    }
    check_embedding(g, x, phi, "φ")?;
    check_embedding(h, y, psi, "ψ")?;
    for i in 0..k {
        if sigma[phi[i]] != psi[i] {
            return Err(FsError::Hypothesis(format!(
                "σ ∘ φ ≠ ψ at vertex {i}: σ(φ({i})) = {} but ψ({i}) = {}",
                sigma[phi[i]], psi[i]
            )));
        }
    }
    let mut checks = vec![
        ("φ is an embedding of G into X", CheckStatus::Verified),
        ("ψ is an embedding of H into Y", CheckStatus::Verified),
        ("σ ∘ φ = ψ", CheckStatus::Verified),
    ];
    let base_status = match base {
        BaseHypothesis::Assume => CheckStatus::Assumed,
        BaseHypothesis::Verify { cap } => {
            let small = FsInstance::new(g.clone(), h.clone())?;
            let verdict = exchangeable(&small, &Permutation::identity(k), k - 2, k - 1, ExchangeMode::Exact { cap })?;
            if !verdict.is_exchangeable() {
                return Err(FsError::Hypothesis(format!(
                    "vertices {} and {} are not (G, H)-exchangeable from the identity",
                    k - 2,
                    k - 1
                )));
            }
            CheckStatus::Verified
        }
    };
    checks.push(("last two vertices exchangeable in (G, H) from the identity", base_status));
    Ok(TransferCertificate { pair: (psi[k - 2], psi[k - 1]), checks })
}
