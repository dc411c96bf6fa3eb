//! Embedding a small pair `(G, H)` on `0..m` into a large pair `(X, Y)`
//! along target sets `V_0 .. V_{m-1}` and a bijection `σ`, plus the
//! probabilistic hypothesis that makes such embeddings likely in random
//! graphs and the target-set sizes used with the gadget pair.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;

use crate::error::{param, FsError, Result};
use crate::exec::Execution;
use crate::gadgets::GadgetLabels;
use crate::graph::Graph;
use crate::perm::Permutation;
use crate::seed::{derive_seed, rng_from_seed};

/// One embedding question. `sets[i]` holds the allowed images (vertices of
/// Y) of vertex `i` of the small pair.
#[derive(Debug, Clone, Copy)]
pub struct EmbedRequest<'a> {
    pub g: &'a Graph,
    pub h: &'a Graph,
    pub x: &'a Graph,
    pub y: &'a Graph,
    pub sets: &'a [Vec<usize>],
    pub sigma: &'a Permutation,
}

impl EmbedRequest<'_> {
    fn validate(&self) -> Result<()> {
        let m = self.g.n();
        let n = self.x.n();
        if self.h.n() != m || self.sets.len() != m {
            return param(format!(
                "G, H and the set list must agree on m (got {}, {}, {})",
                m,
                self.h.n(),
                self.sets.len()
            ));
        }
        if self.y.n() != n || self.sigma.len() != n {
            return param("X, Y and σ must agree on n");
        }
        let mut owner = vec![usize::MAX; n];
        for (i, set) in self.sets.iter().enumerate() {
            for &v in set {
                if v >= n {
                    return param(format!("set {i} contains vertex {v}, out of range for n = {n}"));
                }
                if owner[v] != usize::MAX {
                    return param(format!("sets {} and {i} overlap at vertex {v}", owner[v]));
                }
                owner[v] = i;
            }
        }
        Ok(())
    }

    /// Whether `witness[i] ∈ V_i` for all `i` satisfies both edge implications.
    pub fn is_witness(&self, witness: &[usize]) -> bool {
        let inv = self.sigma.inverse();
        witness.len() == self.sets.len()
            && witness.iter().zip(self.sets).all(|(v, s)| s.contains(v))
            && self.h.edges().into_iter().all(|(i, j)| self.y.has_edge(witness[i], witness[j]))
            && self.g.edges().into_iter().all(|(i, j)| self.x.has_edge(inv[witness[i]], inv[witness[j]]))
    }
}

/// Finds `v_i ∈ V_i` with `{i,j} ∈ E(H) ⇒ {v_i,v_j} ∈ E(Y)` and
/// `{i,j} ∈ E(G) ⇒ {σ⁻¹(v_i),σ⁻¹(v_j)} ∈ E(X)`. The search is exhaustive,
/// so `None` means no such tuple exists.
pub fn find_embedding(req: &EmbedRequest) -> Result<Option<Vec<usize>>> {
    req.validate()?;
    let m = req.g.n();
    let inv = req.sigma.inverse();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(req.g.degree(i) + req.h.degree(i)));
    let mut domains: Vec<Vec<usize>> = req.sets.to_vec();
    let mut assign = vec![usize::MAX; m];
    let compatible = |i: usize, a: usize, j: usize, b: usize| {
        (!req.h.has_edge(i, j) || req.y.has_edge(a, b)) && (!req.g.has_edge(i, j) || req.x.has_edge(inv[a], inv[b]))
    };
    fn search(
        depth: usize,
        order: &[usize],
        domains: &mut Vec<Vec<usize>>,
        assign: &mut Vec<usize>,
        compatible: &dyn Fn(usize, usize, usize, usize) -> bool,
    ) -> bool {
        let Some(&i) = order.get(depth) else { return true };
        let candidates = domains[i].clone();
        'next: for a in candidates {
            assign[i] = a;
            let mut saved = Vec::new();
            for &j in &order[depth + 1..] {
                let kept: Vec<usize> = domains[j].iter().copied().filter(|&b| compatible(i, a, j, b)).collect();
                if kept.len() != domains[j].len() {
                    let empty = kept.is_empty();
                    saved.push((j, std::mem::replace(&mut domains[j], kept)));
                    if empty {
                        for (j, d) in saved.into_iter().rev() {
                            domains[j] = d;
                        }
                        continue 'next;
                    }
                }
            }
            if search(depth + 1, order, domains, assign, compatible) {
                return true;
            }
            for (j, d) in saved.into_iter().rev() {
                domains[j] = d;
            }
        }
        assign[i] = usize::MAX;
        false
    }
    Ok(search(0, &order, &mut domains, &mut assign, &compatible).then_some(assign))
}

/// Target-set sizes `q_i` together with the index set they were built around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QVector {
    pub q: Vec<usize>,
    pub gamma: Vec<usize>,
}

impl QVector {
    pub fn uniform(m: usize, q: usize) -> Self {
        QVector { q: vec![q; m], gamma: Vec::new() }
    }

    pub fn total(&self) -> usize {
        self.q.iter().sum()
    }
}

/// Outcome of sampling set-lists and bijections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QEmbedOutcome {
    /// Every sampled instance embedded. Evidence only.
    NoCounterexample { trials: usize },
    /// A sampled instance with no embedding: a genuine certificate that the
    /// pair is not `q`-embeddable.
    Counterexample(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub sets: Vec<Vec<usize>>,
    pub sigma: Permutation,
    /// A minimal set of indices whose sets and constraints alone already
    /// admit no embedding.
    pub core: Vec<usize>,
}

/// The set-list and bijection sampled for `trial` under `seed`.
pub fn sample_trial(n: usize, q: &QVector, seed: u64, trial: usize) -> (Vec<Vec<usize>>, Permutation) {
    let mut rng = rng_from_seed(derive_seed(seed, &[trial as u64]));
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(&mut rng);
    let mut rest = pool.as_slice();
    let sets = q
        .q
        .iter()
        .map(|&k| {
            let (head, tail) = rest.split_at(k);
            rest = tail;
            head.to_vec()
        })
        .collect();
    (sets, Permutation::random(n, &mut rng))
}

/// Samples `trials` set-lists with `|V_i| = q_i` and bijections, and looks
/// for one that admits no embedding. The lowest failing trial is reported,
/// independent of scheduling.
#[allow(clippy::too_many_arguments)]
pub fn check_q_embeddable(
    g: &Graph,
    h: &Graph,
    x: &Graph,
    y: &Graph,
    q: &QVector,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<QEmbedOutcome> {
    let n = x.n();
    if q.q.len() != g.n() {
        return param(format!("q-vector has {} entries but G has {} vertices", q.q.len(), g.n()));
    }
    if q.total() > n {
        return param(format!("Σq = {} exceeds n = {n}", q.total()));
    }
    // Validate shapes once up front so trials cannot error.
    let (sets, sigma) = sample_trial(n, q, seed, 0);
    EmbedRequest { g, h, x, y, sets: &sets, sigma: &sigma }.validate()?;
    let failure = exec.find_first(trials, |t| {
        let (sets, sigma) = sample_trial(n, q, seed, t);
        let req = EmbedRequest { g, h, x, y, sets: &sets, sigma: &sigma };
        match find_embedding(&req).expect("validated shapes") {
            Some(_) => None,
            None => Some((sets, sigma)),
        }
    });
    Ok(match failure {
        None => QEmbedOutcome::NoCounterexample { trials },
        Some((trial, (sets, sigma))) => {
            let core = failing_core(g, h, x, y, &sets, &sigma);
            QEmbedOutcome::Counterexample(Counterexample { trial, sets, sigma, core })
        }
    })
}

/// Greedily drops indices (each with its set and incident constraints)
/// while the remaining instance still has no embedding.
fn failing_core(g: &Graph, h: &Graph, x: &Graph, y: &Graph, sets: &[Vec<usize>], sigma: &Permutation) -> Vec<usize> {
    let fails = |keep: &[usize]| {
        let (gs, hs) = (g.induced_subgraph(keep).unwrap(), h.induced_subgraph(keep).unwrap());
        let sub: Vec<Vec<usize>> = keep.iter().map(|&i| sets[i].clone()).collect();
        find_embedding(&EmbedRequest { g: &gs, h: &hs, x, y, sets: &sub, sigma })
            .unwrap()
            .is_none()
    };
    let mut keep: Vec<usize> = (0..sets.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if fails(&trial) {
            keep = trial;
        } else {
            i += 1;
        }
    }
    keep
}

/// Largest `m` for which every subset is scanned.
pub const JANSON_FULL_MAX_M: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct JansonRow {
    /// The subset `J`, ascending.
    pub members: Vec<usize>,
    pub edges_g: usize,
    pub edges_h: usize,
    /// `ln(p1^{e_G} p2^{e_H} Π_{j∈J} q_j)`.
    pub lhs_log: f64,
    /// `ln(3 · 2^{m+1} · Q · ln n)`.
    pub rhs_log: f64,
}

impl JansonRow {
    /// `J` as a hexadecimal bitmask, bit `i` set iff `i ∈ J`.
    pub fn mask_hex(&self) -> String {
        let top = self.members.last().map_or(0, |&i| i / 4 + 1);
        let mut nibbles = vec![0u8; top.max(1)];
        for &i in &self.members {
            nibbles[i / 4] |= 1 << (i % 4);
        }
        let digits: String = nibbles.iter().rev().map(|&d| char::from_digit(d as u32, 16).unwrap()).collect();
        format!("0x{digits}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JansonReport {
    pub m: usize,
    pub n: f64,
    pub q_total: usize,
    /// `Q > n`: outside the range where the inequality means anything, but
    /// still evaluated.
    pub q_exceeds_n: bool,
    /// Always `"natural"`: `log n` is read as `ln n`.
    pub log_base: &'static str,
    /// Subsets with at least one edge that were evaluated.
    pub subsets_checked: u64,
    /// Largest subset size scanned, when the scan was size-limited.
    pub max_subset: Option<usize>,
    /// Failing subsets, ordered by their bitmask.
    pub failing: Vec<JansonRow>,
    /// `1 − n^{−Q}`, the embeddability probability bound, when every subset
    /// was scanned and passed.
    pub conclusion_lower_bound: Option<f64>,
}

impl JansonReport {
    pub fn pass(&self) -> bool {
        self.failing.is_empty()
    }
}

struct JansonSetup<'a> {
    g: &'a Graph,
    h: &'a Graph,
    ln_q: Vec<f64>,
    ln_p1: f64,
    ln_p2: f64,
    rhs: f64,
}

impl<'a> JansonSetup<'a> {
    fn new(g: &'a Graph, h: &'a Graph, q: &QVector, p1: f64, p2: f64, n: f64) -> Result<Self> {
        let m = g.n();
        if h.n() != m || q.q.len() != m {
            return param("G, H and the q-vector must agree on m");
        }
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return param(format!("{name} = {p} is not a probability"));
            }
        }
        if n.is_nan() || n <= 1.0 {
            return param(format!("n = {n} must exceed 1 so that log n > 0"));
        }
        let total = q.total() as f64;
        let rhs = 3f64.ln() + (m as f64 + 1.0) * 2f64.ln() + total.ln() + n.ln().ln();
        Ok(JansonSetup {
            g,
            h,
            ln_q: q.q.iter().map(|&k| (k as f64).ln()).collect(),
            ln_p1: p1.ln(),
            ln_p2: p2.ln(),
            rhs,
        })
    }

    /// The row for `J`, if `J` spans an edge and fails.
    fn failing_row(&self, eg: usize, eh: usize, lq: f64, members: impl FnOnce() -> Vec<usize>) -> Option<JansonRow> {
        // 0^0 = 1, so a zero probability only counts when it has edges.
        let term = |e: usize, lp: f64| if e == 0 { 0.0 } else { e as f64 * lp };
        let lhs = term(eg, self.ln_p1) + term(eh, self.ln_p2) + lq;
        (lhs < self.rhs).then(|| JansonRow { members: members(), edges_g: eg, edges_h: eh, lhs_log: lhs, rhs_log: self.rhs })
    }
}

fn finish(m: usize, n: f64, q: &QVector, checked: u64, max_subset: Option<usize>, failing: Vec<JansonRow>) -> JansonReport {
    let q_total = q.total();
    let complete = max_subset.is_none_or(|k| k >= m);
    let conclusion_lower_bound = (failing.is_empty() && complete).then(|| -(-(q_total as f64) * n.ln()).exp_m1());
    JansonReport {
        m,
        n,
        q_total,
        q_exceeds_n: q_total as f64 > n,
        log_base: "natural",
        subsets_checked: checked,
        max_subset,
        failing,
        conclusion_lower_bound,
    }
}

/// Evaluates `p1^{|E(G|_J)|} p2^{|E(H|_J)|} Π_{j∈J} q_j ≥ 3 · 2^{m+1} · Q · ln n`
/// in log space for every `J ⊆ 0..m` spanning at least one edge of G or H.
pub fn janson_hypothesis(g: &Graph, h: &Graph, q: &QVector, p1: f64, p2: f64, n: f64) -> Result<JansonReport> {
    janson_hypothesis_with(g, h, q, p1, p2, n, Execution::default())
}

pub fn janson_hypothesis_with(
    g: &Graph,
    h: &Graph,
    q: &QVector,
    p1: f64,
    p2: f64,
    n: f64,
    exec: Execution,
) -> Result<JansonReport> {
    let m = g.n();
    if m > JANSON_FULL_MAX_M {
        return Err(FsError::Size { n: m, cap: JANSON_FULL_MAX_M });
    }
    let setup = JansonSetup::new(g, h, q, p1, p2, n)?;
    let adj = |gr: &Graph| -> Vec<u32> { (0..m).map(|i| gr.neighbors(i).fold(0, |acc, j| acc | 1 << j)).collect() };
    let (adj_g, adj_h) = (adj(g), adj(h));
    // Chunks of 2^12 masks keep the parallel overhead negligible.
    let chunk_bits = m.min(12);
    let chunks = 1usize << (m - chunk_bits);
    let checked = AtomicU64::new(0);
    let rows: Vec<Vec<JansonRow>> = exec.map_indexed(chunks, |c| {
        let mut out = Vec::new();
        let mut count = 0;
        for low in 0..1u32 << chunk_bits {
            let mask = (c as u32) << chunk_bits | low;
            let (mut eg, mut eh, mut lq) = (0, 0, 0.0);
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                eg += (adj_g[i] & rest).count_ones() as usize;
                eh += (adj_h[i] & rest).count_ones() as usize;
                lq += setup.ln_q[i];
            }
            if eg + eh == 0 {
                continue;
            }
            count += 1;
            let members = || (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            out.extend(setup.failing_row(eg, eh, lq, members));
        }
        checked.fetch_add(count, Ordering::Relaxed);
        out
    });
    Ok(finish(m, n, q, checked.into_inner(), None, rows.into_iter().flatten().collect()))
}

/// The same inequality restricted to subsets of at most `max_subset`
/// vertices, for `m` too large to scan every subset. Unless every subset
/// was covered, passing says nothing about larger ones and no conclusion
/// bound is reported.
pub fn janson_hypothesis_bounded(
    g: &Graph,
    h: &Graph,
    q: &QVector,
    p1: f64,
    p2: f64,
    n: f64,
    max_subset: usize,
) -> Result<JansonReport> {
    let m = g.n();
    let setup = JansonSetup::new(g, h, q, p1, p2, n)?;
    struct Walk<'s, 'a> {
        setup: &'s JansonSetup<'a>,
        max: usize,
        members: Vec<usize>,
        checked: u64,
        failing: Vec<JansonRow>,
    }
    impl Walk<'_, '_> {
        fn visit(&mut self, start: usize, eg: usize, eh: usize, lq: f64) {
            if eg + eh > 0 {
                self.checked += 1;
                let members = &self.members;
                self.failing.extend(self.setup.failing_row(eg, eh, lq, || members.clone()));
            }
            if self.members.len() == self.max {
                return;
            }
            for i in start..self.setup.g.n() {
                let dg = self.members.iter().filter(|&&j| self.setup.g.has_edge(i, j)).count();
                let dh = self.members.iter().filter(|&&j| self.setup.h.has_edge(i, j)).count();
                self.members.push(i);
                self.visit(i + 1, eg + dg, eh + dh, lq + self.setup.ln_q[i]);
                self.members.pop();
            }
        }
    }
    let mut walk = Walk { setup: &setup, max: max_subset.min(m), members: Vec::new(), checked: 0, failing: Vec::new() };
    walk.visit(0, 0, 0, 0.0);
    let mut failing = walk.failing;
    // Order by bitmask: compare the largest differing member.
    failing.sort_by(|a, b| a.members.iter().rev().cmp(b.members.iter().rev()));
    Ok(finish(m, n, q, walk.checked, Some(max_subset), failing))
}

/// `exp(2 (ln n)^{2/3}) / √n`.
pub fn p0(n: f64) -> f64 {
    (2.0 * n.ln().powf(2.0 / 3.0)).exp() / n.sqrt()
}

/// Target-set sizes for the gadget pair at `n` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct QVectorReport {
    pub qvec: QVector,
    pub n: usize,
    pub p0: f64,
    pub q_gamma: usize,
    pub q_other: usize,
    pub q_total: usize,
    /// `Q >= n/3`.
    pub lower_ok: bool,
    /// `Q <= n`.
    pub upper_ok: bool,
}

impl QVectorReport {
    pub fn flagged(&self) -> bool {
        !(self.lower_ok && self.upper_ok)
    }
}

/// `q_i = ⌊p0·n/(5ℓ)⌋` on Γ and `⌊n/(2m)⌋` elsewhere, with the range of `Q`
/// checked rather than assumed.
pub fn gadget_qvector(n: usize, labels: &GadgetLabels) -> Result<QVectorReport> {
    let (m, ell) = (labels.m, labels.ell);
    if labels.z_count() < 12 {
        return param(format!("m = {m} has no z_12; need m >= 2ℓ+13"));
    }
    let p0 = p0(n as f64);
    let q_gamma = (p0 * n as f64 / (5.0 * ell as f64)).floor() as usize;
    let q_other = n / (2 * m);
    let gamma = labels.gamma();
    let mut q = vec![q_other; m];
    for &i in &gamma {
        q[i] = q_gamma;
    }
    let qvec = QVector { q, gamma };
    let q_total = qvec.total();
    Ok(QVectorReport {
        qvec,
        n,
        p0,
        q_gamma,
        q_other,
        q_total,
        lower_ok: 3 * q_total >= n,
        upper_ok: q_total <= n,
    })
}

/// Finds disjoint sets `V_i ⊆ V(Y) ∖ {u, v}` with `|V_i| = q_i` such that
/// `σ⁻¹(V_{z3}), σ⁻¹(V_{z11}) ⊆ N_X(σ⁻¹(u))`, `σ⁻¹(V_{z5}), σ⁻¹(V_{z9}) ⊆
/// N_X(σ⁻¹(v))`, every `V_{x_i} ⊆ N_Y(u)` and every `V_{y_j} ⊆ N_Y(v)`.
/// Constrained indices are filled first, smallest pool first.
#[allow(clippy::too_many_arguments)]
pub fn select_witness_sets(
    x: &Graph,
    y: &Graph,
    sigma: &Permutation,
    u: usize,
    v: usize,
    labels: &GadgetLabels,
    q: &QVector,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    let n = x.n();
    let m = labels.m;
    if y.n() != n || sigma.len() != n || u >= n || v >= n || u == v {
        return param("X, Y, σ, u, v are inconsistent");
    }
    if q.q.len() != m {
        return param(format!("q-vector has {} entries, expected m = {m}", q.q.len()));
    }
    let inv = sigma.inverse();
    if !x.has_edge(inv[u], inv[v]) {
        return param(format!("σ⁻¹({u}) and σ⁻¹({v}) are not adjacent in X"));
    }
    let pools = witness_pools(x, y, &inv, u, v, labels);
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    order.sort_by_key(|&i| pools[i].as_ref().map_or(usize::MAX, |p| p.len()));
    let mut used = vec![false; n];
    used[u] = true;
    used[v] = true;
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let mut sets = vec![Vec::new(); m];
    for i in order {
        let pool = pools[i].as_deref().unwrap_or(&all);
        let mut picked: Vec<usize> = pool.iter().copied().filter(|&c| !used[c]).take(q.q[i]).collect();
        if picked.len() < q.q[i] {
            return Err(FsError::Infeasible(format!(
                "only {} unused eligible vertices for index {i}, need {}",
                picked.len(),
                q.q[i]
            )));
        }
        picked.sort_unstable();
        for &c in &picked {
            used[c] = true;
        }
        sets[i] = picked;
    }
    Ok(sets)
}

/// Eligible images per index, or `None` when any vertex will do.
fn witness_pools(x: &Graph, y: &Graph, inv: &Permutation, u: usize, v: usize, l: &GadgetLabels) -> Vec<Option<Vec<usize>>> {
    let n = x.n();
    let via_x = |anchor: usize| -> Vec<usize> { (0..n).filter(|&c| x.has_edge(inv[c], inv[anchor])).collect() };
    let via_y = |anchor: usize| -> Vec<usize> { y.neighbors(anchor).collect() };
    let mut pools: Vec<Option<Vec<usize>>> = vec![None; l.m];
    for k in [3, 11] {
        pools[l.z(k)] = Some(via_x(u));
    }
    for k in [5, 9] {
        pools[l.z(k)] = Some(via_x(v));
    }
    for i in 1..=l.ell {
        pools[l.x(i)] = Some(via_y(u));
        pools[l.y(i)] = Some(via_y(v));
    }
    pools
}

/// Independent check of everything [`select_witness_sets`] promises.
#[allow(clippy::too_many_arguments)]
pub fn witness_sets_ok(
    x: &Graph,
    y: &Graph,
    sigma: &Permutation,
    u: usize,
    v: usize,
    labels: &GadgetLabels,
    q: &QVector,
    sets: &[Vec<usize>],
) -> bool {
    let inv = sigma.inverse();
    let mut seen = vec![false; x.n()];
    let disjoint = sets
        .iter()
        .flatten()
        .all(|&c| c < x.n() && c != u && c != v && !std::mem::replace(&mut seen[c], true));
    let sizes = sets.len() == labels.m && sets.iter().zip(&q.q).all(|(s, &k)| s.len() == k);
    if !(disjoint && sizes) {
        return false;
    }
    let in_nx = |set: &[usize], anchor: usize| set.iter().all(|&c| x.has_edge(inv[c], inv[anchor]));
    let in_ny = |set: &[usize], anchor: usize| set.iter().all(|&c| y.has_edge(c, anchor));
    in_nx(&sets[labels.z(3)], u)
        && in_nx(&sets[labels.z(11)], u)
        && in_nx(&sets[labels.z(5)], v)
        && in_nx(&sets[labels.z(9)], v)
        && (1..=labels.ell).all(|i| in_ny(&sets[labels.x(i)], u) && in_ny(&sets[labels.y(i)], v))
}
