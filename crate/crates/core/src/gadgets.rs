//! The sparse gadget pair `(G*, H*)` on `m + 2` vertices and its
//! chordless-core versions `(G**, H**)` on `m` vertices.
//!
//! Vertex labels are fixed by `m` alone: `w = 0`, `x_i = i`, `y_j = ℓ + j`,
//! `z_k = 2ℓ + k`, and the two extra vertices are `m` and `m + 1`. Only the
//! order in which `G**` arranges them along its cycle is searched for.
//! "Anticlockwise" means increasing cycle position modulo `m`.

use std::sync::Mutex;

use crate::error::{param, FsError, Result};
use crate::exchange::{exchangeable, ExchangeMode, ExchangeStatus};
use crate::exec::Execution;
use crate::fs_graph::FsInstance;
use crate::graph::Graph;
use crate::perm::Permutation;

/// `⌊√m / 2⌋`.
pub fn ell_for(m: usize) -> usize {
    let mut l = 0;
    while 4 * (l + 1) * (l + 1) <= m {
        l += 1;
    }
    l
}

/// `⌊(ln n)^{2/3}⌋`, the gadget size used for `n`-vertex random graphs.
pub fn m_for_n(n: f64) -> usize {
    if n <= 1.0 {
        return 0;
    }
    n.ln().powf(2.0 / 3.0).floor() as usize
}

/// Smallest `m` for which the `z_1 .. z_12` all exist.
pub fn min_m_for_z12(m: usize) -> usize {
    2 * ell_for(m) + 13
}

/// Label assignment shared by every gadget of size `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetLabels {
    pub m: usize,
    pub ell: usize,
}

impl GadgetLabels {
    pub fn new(m: usize) -> Result<Self> {
        let ell = ell_for(m);
        if ell == 0 {
            return param(format!("gadget size m = {m} too small: need m >= 4 so that ℓ >= 1"));
        }
        Ok(GadgetLabels { m, ell })
    }

    pub fn w(&self) -> usize {
        0
    }

    /// `x_i` for `i` in `1..=ℓ`.
    pub fn x(&self, i: usize) -> usize {
        assert!((1..=self.ell).contains(&i));
        i
    }

    /// `y_j` for `j` in `1..=ℓ`.
    pub fn y(&self, j: usize) -> usize {
        assert!((1..=self.ell).contains(&j));
        self.ell + j
    }

    pub fn z_count(&self) -> usize {
        self.m - 2 * self.ell - 1
    }

    /// `z_k` for `k` in `1..=m−2ℓ−1`.
    pub fn z(&self, k: usize) -> usize {
        assert!((1..=self.z_count()).contains(&k));
        2 * self.ell + k
    }

    /// The vertex written `m + 1`.
    pub fn first_extra(&self) -> usize {
        self.m
    }

    /// The vertex written `m + 2`.
    pub fn second_extra(&self) -> usize {
        self.m + 1
    }

    /// `w, x_1..x_ℓ, y_1..y_ℓ`: the vertices that must be spread out.
    pub fn spread_set(&self) -> Vec<usize> {
        (0..=2 * self.ell).collect()
    }

    /// `x_1..x_ℓ, y_1..y_ℓ, z_3, z_5, z_9, z_11`.
    pub fn gamma(&self) -> Vec<usize> {
        let mut g: Vec<usize> = (1..=2 * self.ell).collect();
        g.extend([3, 5, 9, 11].map(|k| self.z(k)));
        g
    }

    pub fn chords(&self) -> [(usize, usize); 4] {
        [(1, 6), (2, 4), (7, 12), (8, 10)].map(|(a, b)| (self.z(a), self.z(b)))
    }
}

/// The placement of `G**`: which vertex sits at each cycle position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSpec {
    pub labels: GadgetLabels,
    /// `cycle[pos]` is the vertex at position `pos`.
    pub cycle: Vec<usize>,
    pub chords: [(usize, usize); 4],
}

impl GadgetSpec {
    /// Position of every vertex on the cycle.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.cycle.len()];
        for (p, &v) in self.cycle.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    /// Anticlockwise distance from `u` to `v` along the cycle.
    pub fn arc(&self, u: usize, v: usize) -> usize {
        let pos = self.positions();
        (pos[v] + self.labels.m - pos[u]) % self.labels.m
    }
}

/// All four gadget graphs together with the placement they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetBundle {
    pub spec: GadgetSpec,
    pub g_star_star: Graph,
    pub g_star: Graph,
    pub h_star_star: Graph,
    pub h_star: Graph,
}

impl GadgetBundle {
    /// Builds the graphs described by a placement. The placement itself is
    /// not checked; see [`validate_gadget`].
    pub fn from_spec(spec: GadgetSpec) -> Result<Self> {
        let l = spec.labels;
        let m = l.m;
        let mut seen = vec![false; m];
        if spec.cycle.len() != m || spec.cycle.iter().any(|&v| v >= m || std::mem::replace(&mut seen[v], true)) {
            return param(format!("cycle order must list each of the {m} vertices once"));
        }
        let mut gss = Graph::empty(m);
        for p in 0..m {
            gss.add_edge(spec.cycle[p], spec.cycle[(p + 1) % m]);
        }
        for &(a, b) in &spec.chords {
            gss.add_edge(a, b);
        }
        let mut gs = grow(&gss, 2);
        let (e1, e2) = (l.first_extra(), l.second_extra());
        gs.add_edge(e1, e2);
        gs.add_edge(e1, l.z(3));
        gs.add_edge(e1, l.z(11));
        gs.add_edge(e2, l.z(5));
        gs.add_edge(e2, l.z(9));
        let (h_star_star, h_star) = build_h(m)?;
        Ok(GadgetBundle { spec, g_star_star: gss, g_star: gs, h_star_star, h_star })
    }
}

fn grow(g: &Graph, extra: usize) -> Graph {
    let mut out = Graph::empty(g.n() + extra);
    for (u, v) in g.edges() {
        out.add_edge(u, v);
    }
    out
}

/// `H**`, the star on `0..m` centred at `w`, and `H*`, which adds `m` joined
/// to every `x_i` and `m + 1` joined to every `y_j`.
pub fn build_h(m: usize) -> Result<(Graph, Graph)> {
    let l = GadgetLabels::new(m)?;
    let mut hss = Graph::empty(m);
    for v in 1..m {
        hss.add_edge(l.w(), v);
    }
    let mut hs = grow(&hss, 2);
    for i in 1..=l.ell {
        hs.add_edge(l.first_extra(), l.x(i));
        hs.add_edge(l.second_extra(), l.y(i));
    }
    Ok((hss, hs))
}

/// Arc lengths of one layout: `z_1→z_2`, `z_2→z_3`, `z_6→z_7` in the first
/// half and `z_7→z_8`, `z_8→z_9`, `z_12→z_1` in the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Arcs {
    a: [usize; 2],
    b: [usize; 2],
    g: [usize; 2],
}

/// `3ℓ·d ≥ m`, i.e. `d ≥ m/(3ℓ)` without rounding.
fn far_enough(d: usize, l: &GadgetLabels) -> bool {
    3 * l.ell * d >= l.m
}

/// `6·c ≥ m`.
fn long_enough(c: usize, m: usize) -> bool {
    6 * c >= m
}

impl Arcs {
    /// Positions of `z_1 .. z_12` (index 0 unused).
    fn z_positions(&self, ell: usize) -> [usize; 13] {
        let mut z = [0usize; 13];
        for half in 0..2 {
            let o = half * 6;
            z[o + 2] = z[o + 1] + self.a[half];
            z[o + 3] = z[o + 2] + self.b[half];
            z[o + 4] = z[o + 3] + ell - 2;
            z[o + 5] = z[o + 4] + 1;
            z[o + 6] = z[o + 5] + 1;
            if half == 0 {
                z[7] = z[6] + self.g[0];
            }
        }
        z
    }

    fn total(&self, ell: usize) -> usize {
        self.a.iter().chain(&self.b).chain(&self.g).sum::<usize>() + 2 * ell
    }

    /// Lengths of the short cycles the chords create.
    fn short_cycles(&self, ell: usize) -> [usize; 5] {
        [
            self.a[0] + 4,
            self.b[0] + ell - 1,
            self.a[1] + 4,
            self.b[1] + ell - 1,
            self.g[0] + self.g[1] + 2,
        ]
    }
}

/// Why the last layout considered was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Rejection {
    Girth(usize),
    Parity,
    Spread { placed: usize },
}

fn skeleton(l: &GadgetLabels, z: &[usize; 13]) -> Graph {
    let m = l.m;
    let mut g = Graph::empty(m);
    for p in 0..m {
        g.add_edge(p, (p + 1) % m);
    }
    for (a, b) in [(1, 6), (2, 4), (7, 12), (8, 10)] {
        g.add_edge(z[a], z[b]);
    }
    g
}

/// Greedy placement of the spread set on a skeleton (vertices are cycle
/// positions). Scans positions anticlockwise from `start`.
fn place_spread(l: &GadgetLabels, sk: &Graph, z: &[usize; 13], start: usize) -> Vec<usize> {
    let m = l.m;
    let want = 2 * l.ell + 1;
    let mut taken = vec![false; m];
    let mut dmin = vec![usize::MAX; m];
    for k in 1..=12 {
        taken[z[k]] = true;
    }
    for k in [3, 5, 9, 11] {
        for (p, d) in sk.bfs_distances(z[k]).into_iter().enumerate() {
            dmin[p] = dmin[p].min(d.unwrap_or(usize::MAX));
        }
    }
    let mut placed = Vec::with_capacity(want);
    for step in 0..m {
        let p = (start + step) % m;
        if taken[p] || !far_enough(dmin[p], l) {
            continue;
        }
        placed.push(p);
        if placed.len() == want {
            break;
        }
        for (q, d) in sk.bfs_distances(p).into_iter().enumerate() {
            dmin[q] = dmin[q].min(d.unwrap_or(usize::MAX));
        }
    }
    placed
}

fn try_arcs(l: &GadgetLabels, arcs: &Arcs) -> std::result::Result<GadgetSpec, Rejection> {
    let (m, ell) = (l.m, l.ell);
    debug_assert_eq!(arcs.total(ell), m);
    if let Some(&c) = arcs.short_cycles(ell).iter().find(|&&c| !long_enough(c, m)) {
        return Err(Rejection::Girth(c));
    }
    // z_2 → z_4 is b + ℓ − 2.
    if !(arcs.b[0] + ell - 2).is_multiple_of(2) {
        return Err(Rejection::Parity);
    }
    let z = arcs.z_positions(ell);
    let sk = skeleton(l, &z);
    let mut best: Vec<usize> = Vec::new();
    for k in 1..=12 {
        let placed = place_spread(l, &sk, &z, (z[k] + 1) % m);
        if placed.len() > best.len() {
            best = placed;
        }
        if best.len() == 2 * ell + 1 {
            break;
        }
    }
    if best.len() < 2 * ell + 1 {
        return Err(Rejection::Spread { placed: best.len() });
    }
    best.sort_unstable();
    let mut cycle = vec![usize::MAX; m];
    for k in 1..=12 {
        cycle[z[k]] = l.z(k);
    }
    for (i, &p) in best.iter().enumerate() {
        cycle[p] = i; // w, x_1.., y_1.. in cycle order
    }
    let mut filler = 13..;
    for slot in cycle.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = l.z(filler.next().unwrap());
    }
    Ok(GadgetSpec { labels: *l, cycle, chords: l.chords() })
}

/// Candidate layouts in search order: symmetric halves, every arc as short
/// as its cycle allows, then progressively longer.
fn candidate_arcs(l: &GadgetLabels) -> Vec<Arcs> {
    let (m, ell) = (l.m, l.ell);
    let girth = m.div_ceil(6);
    let d = m.div_ceil(3 * ell);
    let a_lo = girth.saturating_sub(4).max(1);
    let mut b_lo = girth.saturating_sub(ell - 1).max(1);
    if (b_lo + ell) % 2 != 0 {
        b_lo += 1;
    }
    let mut out = Vec::new();
    for a in a_lo..=a_lo + 3 * d {
        for b in (b_lo..=b_lo + 3 * d).step_by(2) {
            let fixed = 2 * (a + b + ell);
            if fixed + 2 > m {
                continue;
            }
            let gsum = m - fixed;
            let half = gsum / 2;
            for shift in 0..=d.min(half - 1) {
                for (g0, g1) in [(half - shift, gsum - half + shift), (gsum - half + shift, half - shift)] {
                    let arcs = Arcs { a: [a, a], b: [b, b], g: [g0, g1] };
                    if !out.contains(&arcs) {
                        out.push(arcs);
                    }
                }
            }
        }
    }
    out
}

/// Builds `G**` and `G*` for gadget size `m`, searching for a placement
/// that satisfies every constraint.
pub fn build_g(m: usize) -> Result<GadgetBundle> {
    build_g_with(m, Execution::default())
}

pub fn build_g_with(m: usize, exec: Execution) -> Result<GadgetBundle> {
    let l = GadgetLabels::new(m)?;
    if l.ell < 3 {
        return Err(FsError::Infeasible(format!(
            "m = {m} gives ℓ = {}; z_3 must sit strictly between z_2 and z_4 at distance ℓ−1 from z_5, which needs ℓ >= 3 (m >= 36)",
            l.ell
        )));
    }
    if m < min_m_for_z12(m) {
        return param(format!("m = {m} too small: z_1..z_12 need m >= 2ℓ+13 = {}", min_m_for_z12(m)));
    }
    let cands = candidate_arcs(&l);
    // On failure, report the rejection that got furthest (a layout that
    // could not spread its vertices beats one that failed on girth), ties
    // going to the earliest candidate.
    let furthest: Mutex<Option<(usize, std::cmp::Reverse<usize>, String)>> = Mutex::new(None);
    let note = |rank: usize, i: usize, msg: String| {
        let mut f = furthest.lock().unwrap();
        let key = (rank, std::cmp::Reverse(i));
        if f.as_ref().is_none_or(|(r, j, _)| key > (*r, *j)) {
            *f = Some((rank, key.1, msg));
        }
    };
    let found = exec.find_first(cands.len(), |i| match try_arcs(&l, &cands[i]) {
        Ok(spec) => {
            let bundle = GadgetBundle::from_spec(spec).expect("layout lists every vertex once");
            let report = validate_gadget(&bundle);
            if report.all_pass() {
                return Some(bundle);
            }
            let names: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
            note(usize::MAX, i, format!("exact validation of the greedy layout ({})", names.join(", ")));
            None
        }
        Err(Rejection::Girth(c)) => {
            note(0, i, format!("girth >= m/6: a chord cycle of length {c} is too short"));
            None
        }
        Err(Rejection::Parity) => {
            note(1, i, "even anticlockwise distance z_2 → z_4".into());
            None
        }
        Err(Rejection::Spread { placed }) => {
            let want = 2 * l.ell + 1;
            note(2 + placed, i, format!("distance >= m/(3ℓ): at most {placed} of the {want} spread vertices could be placed"));
            None
        }
    });
    if let Some((_, bundle)) = found {
        return Ok(bundle);
    }
    let last = furthest.into_inner().unwrap();
    Err(FsError::Infeasible(format!(
        "no placement for m = {m} (ℓ = {}); last failed constraint: {}",
        l.ell,
        last.map_or_else(|| "cycle too short for the chord arcs".into(), |(_, _, msg)| msg)
    )))
}

/// Smallest gadget size the layout search accepts.
pub const SMALLEST_FEASIBLE_M: usize = 208;

/// Smallest `m` in `lo..=hi` accepted by [`build_g`].
pub fn min_feasible_m(lo: usize, hi: usize, exec: Execution) -> Option<usize> {
    (lo.max(4)..=hi).find(|&m| build_g_with(m, exec).is_ok())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    pub m: usize,
    pub ell: usize,
    pub checks: Vec<ConstraintCheck>,
}

impl GadgetReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn check(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_CYCLE_EDGES: &str = "cycle_edges";
pub const CHECK_ARCS: &str = "arc_lengths";
pub const CHECK_PARITY: &str = "even_z2_z4";
pub const CHECK_SPREAD: &str = "spread_distance";
pub const CHECK_GIRTH: &str = "girth";
pub const CHECK_STRUCTURE: &str = "cycle_plus_chords";
pub const CHECK_ORDER: &str = "z_order";
pub const CHECK_GAMMA: &str = "gamma_independent";
pub const CHECK_EDGE_COUNTS: &str = "edge_counts";
pub const CHECK_RESTRICTION: &str = "restriction";

/// Checks a bundle against every placement constraint plus the structural
/// facts the other graphs must satisfy. Never fails; failures are reported.
pub fn validate_gadget(bundle: &GadgetBundle) -> GadgetReport {
    let spec = &bundle.spec;
    let l = spec.labels;
    let (m, ell) = (l.m, l.ell);
    let g = &bundle.g_star_star;
    let mut checks = Vec::new();
    let mut push = |name, pass, detail: String| checks.push(ConstraintCheck { name, pass, detail });

    let cycle_ok = spec.cycle.len() == m && {
        let mut seen = vec![false; m];
        spec.cycle.iter().all(|&v| v < m && !std::mem::replace(&mut seen[v], true))
    };
    if !cycle_ok || g.n() != m || l.z_count() < 12 {
        push(CHECK_STRUCTURE, false, "cycle order is not a permutation of the m vertices, or z_12 is missing".into());
        return GadgetReport { m, ell, checks };
    }
    let z = |k| l.z(k);
    let arc = |u, v| spec.arc(u, v);

    let on_cycle = |u: usize, v: usize| arc(u, v) == 1 || arc(v, u) == 1;
    let need = [(4, 5), (5, 6), (10, 11), (11, 12)];
    let missing: Vec<String> = need
        .iter()
        .filter(|&&(a, b)| !(on_cycle(z(a), z(b)) && g.has_edge(z(a), z(b))))
        .map(|(a, b)| format!("{{z{a},z{b}}}"))
        .collect();
    push(CHECK_CYCLE_EDGES, missing.is_empty(), if missing.is_empty() { "present".into() } else { format!("missing {}", missing.join(" ")) });

    let (d35, d911) = (arc(z(3), z(5)), arc(z(9), z(11)));
    push(
        CHECK_ARCS,
        d35 + 1 == ell && d911 + 1 == ell,
        format!("z3→z5 = {d35}, z9→z11 = {d911}, required ℓ−1 = {}", ell - 1),
    );

    let d24 = arc(z(2), z(4));
    push(CHECK_PARITY, d24 % 2 == 0, format!("z2→z4 = {d24}"));

    let spread = l.spread_set();
    let targets = [3, 5, 9, 11].map(z);
    let mut worst: Option<(usize, usize, usize)> = None;
    for (i, &s) in spread.iter().enumerate() {
        let dist = g.bfs_distances(s);
        for &t in spread[i + 1..].iter().chain(&targets) {
            let d = dist[t].unwrap_or(usize::MAX);
            if worst.is_none_or(|(wd, _, _)| d < wd) {
                worst = Some((d, s, t));
            }
        }
    }
    let (wd, ws, wt) = worst.expect("spread set is non-empty");
    push(
        CHECK_SPREAD,
        far_enough(wd, &l),
        format!("closest pair {ws}–{wt} at distance {wd}, required >= {m}/{}", 3 * ell),
    );

    let girth = g.girth();
    push(
        CHECK_GIRTH,
        girth.is_none_or(|c| long_enough(c, m)),
        format!("girth {}, required >= {m}/6", girth.map_or("∞".into(), |c| c.to_string())),
    );

    let mut expected = Graph::empty(m);
    for p in 0..m {
        expected.add_edge(spec.cycle[p], spec.cycle[(p + 1) % m]);
    }
    for (a, b) in l.chords() {
        expected.add_edge(a, b);
    }
    push(
        CHECK_STRUCTURE,
        &expected == g && spec.chords == l.chords(),
        format!("{} edges, expected cycle plus chords {{z1,z6}} {{z2,z4}} {{z7,z12}} {{z8,z10}}", g.edge_count()),
    );

    let pos = spec.positions();
    let rel: Vec<usize> = (1..=12).map(|k| (pos[z(k)] + m - pos[z(1)]) % m).collect();
    push(CHECK_ORDER, rel.windows(2).all(|w| w[0] < w[1]), format!("offsets from z1: {rel:?}"));

    let gamma = l.gamma();
    push(CHECK_GAMMA, g.is_independent(&gamma), format!("{} vertices", gamma.len()));

    let counts = [
        bundle.h_star_star.edge_count(),
        bundle.h_star.edge_count(),
        g.edge_count(),
        bundle.g_star.edge_count(),
    ];
    let want = [m - 1, m - 1 + 2 * ell, m + 4, m + 9];
    push(CHECK_EDGE_COUNTS, counts == want, format!("H** H* G** G* = {counts:?}, expected {want:?}"));

    let base: Vec<usize> = (0..m).collect();
    let restricts = |big: &Graph, small: &Graph| big.n() == m + 2 && big.induced_subgraph(&base).ok().as_ref() == Some(small);
    push(
        CHECK_RESTRICTION,
        restricts(&bundle.g_star, g) && restricts(&bundle.h_star, &bundle.h_star_star),
        "G* and H* restricted to the first m vertices".into(),
    );

    GadgetReport { m, ell, checks }
}

/// Outcome of a bounded exchange search on a pair of small graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairVerification {
    /// A witness path of this many friendly swaps was found and replayed.
    Verified { swaps: usize, path: Vec<Permutation> },
    /// The budget ran out; nothing is refuted.
    Indeterminate { explored: u64 },
}

/// Searches `FS(g, h)` for a path from the identity to the identity with
/// the images `u`, `v` swapped.
pub fn verify_exchange_pair(g: &Graph, h: &Graph, u: usize, v: usize, budget: usize) -> Result<PairVerification> {
    if budget == 0 {
        return param("search budget must be positive");
    }
    let inst = FsInstance::new(g.clone(), h.clone())?;
    let id = Permutation::identity(g.n());
    let verdict = exchangeable(&inst, &id, u, v, ExchangeMode::Bounded { budget })?;
    match verdict.status {
        ExchangeStatus::Exchangeable(path) => {
            let target = id.apply_transposition(u, v)?;
            assert!(inst.is_valid_path(&path) && path.last() == Some(&target));
            Ok(PairVerification::Verified { swaps: path.len() - 1, path })
        }
        ExchangeStatus::Indeterminate => Ok(PairVerification::Indeterminate { explored: verdict.explored }),
        ExchangeStatus::NotExchangeable => Err(FsError::Hypothesis(format!(
            "search exhausted the component of the identity without reaching the swap of {u} and {v}"
        ))),
    }
}

/// Bounded search for the exchange of the two extra vertices of the gadget
/// pair of size `m` from the identity.
pub fn verify_gadget_exchange(m: usize, budget: usize) -> Result<PairVerification> {
    if budget == 0 {
        return param("search budget must be positive");
    }
    let b = build_g(m)?;
    let l = b.spec.labels;
    verify_exchange_pair(&b.g_star, &b.h_star, l.first_extra(), l.second_extra(), budget)
}
