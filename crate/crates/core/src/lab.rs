//! Monte Carlo sweeps of `Pr[FS(X, Y) connected]` for `X ~ G(n, p1)`,
//! `Y ~ G(n, p2)`, and the reference curves of the threshold regimes.

use std::fmt::Write as _;

use crate::error::{param, FsError, Result};
use crate::exchange::{connectivity_by_exchange_with, ExchangeConnectivity};
use crate::exec::Execution;
use crate::fs_graph::FsInstance;
use crate::gadgets::{ell_for, m_for_n};
use crate::graph::Graph;
use crate::packing::{find_packing, PackingMode, PackingStatus};
use crate::seed::derive_seed;

/// How each sampled pair is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Full decomposition; requires `n <= cap`.
    Exact { cap: usize },
    /// One-sided certificates only; anything uncertified is unknown.
    Certificates(CertBudgets),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertBudgets {
    pub packing_steps: u64,
    pub packing_restarts: usize,
    /// Largest `n` for which the all-pairs exchange check is attempted.
    pub exchange_cap: usize,
}

impl Default for CertBudgets {
    fn default() -> Self {
        CertBudgets { packing_steps: 2_000, packing_restarts: 4, exchange_cap: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub grid: Vec<(f64, f64)>,
    pub trials: usize,
    pub seed: u64,
    pub mode: SweepMode,
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return param("sweeps need n >= 1");
        }
        if self.trials == 0 {
            return param("sweeps need at least one trial per cell");
        }
        if let Some(&(p1, p2)) = self.grid.iter().find(|&&(a, b)| !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b)) {
            return param(format!("grid cell ({p1}, {p2}) is not a pair of probabilities"));
        }
        if let SweepMode::Exact { cap } = self.mode {
            let cap = cap.min(crate::fs_graph::HARD_CAP);
            if self.n > cap {
                return Err(FsError::Size { n: self.n, cap });
            }
        }
        Ok(())
    }
}

/// Classification of one sampled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Connected,
    /// X or Y is disconnected, which already disconnects `FS(X, Y)`.
    XyDisconnected,
    /// A packing was found: an isolated vertex.
    Isolated,
    /// Decomposition found more than one component.
    Disconnected,
    Unknown,
}

impl Decision {
    pub fn is_disconnected(self) -> bool {
        matches!(self, Decision::XyDisconnected | Decision::Isolated | Decision::Disconnected)
    }
}

/// Seeds for one trial. Keyed by the cell's probabilities rather than its
/// position, so a cell gives the same samples in any grid.
pub fn trial_seeds(master: u64, p1: f64, p2: f64, trial: usize) -> [u64; 3] {
    let base = [p1.to_bits(), p2.to_bits(), trial as u64];
    [0, 1, 2].map(|k| derive_seed(master, &[base[0], base[1], base[2], k]))
}

/// Classifies one pair. The exact mode never answers unknown.
pub fn decide(x: &Graph, y: &Graph, mode: SweepMode, packing_seed: u64) -> Result<Decision> {
    let n = x.n();
    if n >= 2 && (!x.is_connected() || !y.is_connected()) {
        return Ok(Decision::XyDisconnected);
    }
    let inst = FsInstance::new(x.clone(), y.clone())?;
    match mode {
        SweepMode::Exact { cap } => {
            let summary = inst.decompose_with(cap, Execution::Sequential)?;
            Ok(if summary.is_connected() { Decision::Connected } else { Decision::Disconnected })
        }
        SweepMode::Certificates(b) => {
            if n < 2 {
                return Ok(Decision::Connected);
            }
            // With one side complete, connectivity of the other decides it.
            let complete = n * (n - 1) / 2;
            if x.edge_count() == complete || y.edge_count() == complete {
                return Ok(Decision::Connected);
            }
            let mode = PackingMode::LocalSearch { max_steps: b.packing_steps, seed: packing_seed, restarts: b.packing_restarts };
            if let PackingStatus::Found(_) = find_packing(x, y, mode)?.status {
                return Ok(Decision::Isolated);
            }
            if n <= b.exchange_cap.min(crate::fs_graph::HARD_CAP) {
                if let ExchangeConnectivity::Connected { .. } = connectivity_by_exchange_with(&inst, n, Execution::Sequential)? {
                    return Ok(Decision::Connected);
                }
            }
            Ok(Decision::Unknown)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub p1: f64,
    pub p2: f64,
    pub trials: usize,
    pub connected: usize,
    pub disconnected: usize,
    pub unknown: usize,
    /// Disconnections certified by an isolated vertex.
    pub iso_cert: usize,
    /// Disconnections explained by X or Y being disconnected.
    pub xy_disc: usize,
}

impl SweepRow {
    pub fn frac_connected(&self) -> f64 {
        self.connected as f64 / self.trials as f64
    }

    /// Binomial standard error `√(f(1−f)/trials)` of the connected fraction.
    pub fn stderr(&self) -> f64 {
        let f = self.frac_connected();
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    run_sweep_with(cfg, Execution::default())
}

pub fn run_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let t = cfg.trials;
    let decisions = exec.map_indexed(cfg.grid.len() * t, |i| {
        let (p1, p2) = cfg.grid[i / t];
        let [sx, sy, sp] = trial_seeds(cfg.seed, p1, p2, i % t);
        let x = Graph::gnp(cfg.n, p1, sx)?;
        let y = Graph::gnp(cfg.n, p2, sy)?;
        decide(&x, &y, cfg.mode, sp)
    });
    let decisions: Vec<Decision> = decisions.into_iter().collect::<Result<_>>()?;
    Ok(cfg
        .grid
        .iter()
        .zip(decisions.chunks(t))
        .map(|(&(p1, p2), ds)| {
            let count = |f: fn(&Decision) -> bool| ds.iter().filter(|d| f(d)).count();
            SweepRow {
                n: cfg.n,
                p1,
                p2,
                trials: t,
                connected: count(|d| *d == Decision::Connected),
                disconnected: count(|d| d.is_disconnected()),
                unknown: count(|d| *d == Decision::Unknown),
                iso_cert: count(|d| *d == Decision::Isolated),
                xy_disc: count(|d| *d == Decision::XyDisconnected),
            }
        })
        .collect())
}

pub const SWEEP_CSV_HEADER: &str = "n,p1,p2,trials,connected,disconnected,unknown,iso_cert,xy_disc,frac_connected,stderr";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.6},{:.6}",
            r.n,
            r.p1,
            r.p2,
            r.trials,
            r.connected,
            r.disconnected,
            r.unknown,
            r.iso_cert,
            r.xy_disc,
            r.frac_connected(),
            r.stderr()
        );
    }
    out
}

/// `steps` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => param("a range needs at least one step"),
        1 => Ok(vec![a]),
        _ => Ok((0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect()),
    }
}

/// Parses `a:b:steps`.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || FsError::Parameter(format!("range `{s}` is not of the form a:b:steps"));
    let [a, b, k] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    linspace(a, b, k)
}

/// Holds `p1·p2 = product` and varies `p1/p2` over `ratios`.
pub fn asymmetry_grid(product: f64, ratios: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(0.0..=1.0).contains(&product) {
        return param(format!("product {product} is not in [0, 1]"));
    }
    ratios
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r.is_finite()) {
                return param(format!("ratio {r} must be positive"));
            }
            let (p1, p2) = ((product * r).sqrt(), (product / r).sqrt());
            if p1 > 1.0 || p2 > 1.0 {
                return param(format!("ratio {r} gives p1 = {p1}, p2 = {p2}, outside [0, 1]"));
            }
            Ok((p1, p2))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn asymmetry_slice(
    n: usize,
    product: f64,
    ratios: &[f64],
    trials: usize,
    seed: u64,
    mode: SweepMode,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let grid = asymmetry_grid(product, ratios)?;
    run_sweep_with(&SweepConfig { n, grid, trials, seed, mode }, exec)
}

/// The reference values of the threshold regimes at a given `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeMarkers {
    pub n: f64,
    pub epsilon: f64,
    /// `exp(2 (ln n)^{2/3}) / √n`.
    pub p0: f64,
    /// `(1 − ε) / (2n)`: below this product, disconnected w.h.p.
    pub disconnection_product: f64,
    /// `p0²`: above this product (with the floor), connected w.h.p.
    pub connectivity_product: f64,
    /// `ln n / n`: the connectivity floor of each random graph.
    pub graph_floor: f64,
    /// `2 p0 / (ln n)^{1/3}`, i.e. `p0 / ℓ` with `ℓ = (ln n)^{1/3} / 2`.
    pub lower_line: f64,
    /// `p0 / ℓ` with `ℓ = ⌊⌊(ln n)^{2/3}⌋^{1/2} / 2⌋`; absent when that `ℓ` is 0.
    pub lower_line_floored: Option<f64>,
    /// `p0 >= 1`: the regimes say nothing at this `n`.
    pub vacuous: bool,
}

pub const DEFAULT_EPSILON: f64 = 0.1;

pub fn regime_markers(n: f64, epsilon: f64) -> Result<RegimeMarkers> {
    if !(n >= 3.0 && n.is_finite()) {
        return param(format!("markers need n >= 3, got {n}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return param(format!("ε = {epsilon} is not in (0, 1)"));
    }
    let ln = n.ln();
    let p0 = crate::embed::p0(n);
    let ell = ell_for(m_for_n(n));
    Ok(RegimeMarkers {
        n,
        epsilon,
        p0,
        disconnection_product: (1.0 - epsilon) / (2.0 * n),
        connectivity_product: p0 * p0,
        graph_floor: ln / n,
        lower_line: 2.0 * p0 / ln.cbrt(),
        lower_line_floored: (ell > 0).then(|| p0 / ell as f64),
        vacuous: p0 >= 1.0,
    })
}

/// `ln n` at which `p0` falls to 1, found by bisection.
pub fn p0_crossover_ln_n() -> f64 {
    // ln p0 = 2 L^{2/3} − L/2 with L = ln n: positive below the root.
    let f = |l: f64| 2.0 * l.powf(2.0 / 3.0) - l / 2.0;
    let (mut lo, mut hi) = (1.0, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Points `(p1, p2)` along each marker curve, for overlay plots.
pub fn marker_csv(m: &RegimeMarkers, points: usize) -> String {
    let mut out = String::from("marker,p1,p2\n");
    let mut curve = |name: &str, product: f64| {
        if !(product > 0.0 && product <= 1.0) {
            return;
        }
        // Log-spaced p1 from product to 1 keeps p2 = product / p1 in range.
        for i in 0..points {
            let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            let p1 = product.powf(1.0 - t);
            let _ = writeln!(out, "{name},{p1:e},{:e}", product / p1);
        }
    };
    curve("disconnection_product", m.disconnection_product);
    curve("connectivity_product", m.connectivity_product);
    let mut floor = |name: &str, v: f64| {
        if v > 0.0 && v <= 1.0 {
            for (a, b) in [(v, 1.0), (v, v), (1.0, v)] {
                let _ = writeln!(out, "{name},{a:e},{b:e}");
            }
        }
    };
    floor("graph_floor", m.graph_floor);
    floor("lower_line", m.lower_line);
    if let Some(v) = m.lower_line_floored {
        floor("lower_line_floored", v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact() -> SweepMode {
        SweepMode::Exact { cap: 10 }
    }

    fn cfg(n: usize, grid: Vec<(f64, f64)>, trials: usize, mode: SweepMode) -> SweepConfig {
        SweepConfig { n, grid, trials, seed: 42, mode }
    }

    #[test]
    fn corner_cells() {
        let rows = run_sweep(&cfg(5, vec![(1.0, 1.0), (0.7, 0.0), (0.0, 0.0)], 20, exact())).unwrap();
        assert_eq!(rows[0].frac_connected(), 1.0);
        assert_eq!(rows[1].disconnected, 20);
        assert_eq!(rows[1].xy_disc, 20);
        assert_eq!(rows[2].connected, 0);
        for r in &rows {
            assert_eq!(r.connected + r.disconnected + r.unknown, r.trials);
        }
    }

    #[test]
    fn config_guards() {
        assert!(run_sweep(&cfg(5, vec![(1.2, 0.5)], 1, exact())).is_err());
        assert!(run_sweep(&cfg(5, vec![(0.5, 0.5)], 0, exact())).is_err());
        assert!(matches!(run_sweep(&cfg(11, vec![(0.5, 0.5)], 1, exact())), Err(FsError::Size { .. })));
    }

    #[test]
    fn deterministic_and_schedule_independent() {
        let c = cfg(6, vec![(0.5, 0.6), (0.8, 0.8)], 30, exact());
        let a = run_sweep_with(&c, Execution::Sequential).unwrap();
        let b = run_sweep_with(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(sweep_csv(&a), sweep_csv(&run_sweep(&c).unwrap()));
        // A cell gives the same counts wherever it sits in the grid.
        let alone = run_sweep(&cfg(6, vec![(0.8, 0.8)], 30, exact())).unwrap();
        assert_eq!(alone[0], a[1]);
    }

    #[test]
    fn certificates_agree_with_exact() {
        for n in 4..=7 {
            let grid: Vec<(f64, f64)> = [0.3, 0.5, 0.7, 0.9].iter().flat_map(|&a| [(a, 0.6), (0.6, a)]).collect();
            let mut seeds_checked = 0;
            for (p1, p2) in grid {
                for t in 0..15 {
                    let [sx, sy, sp] = trial_seeds(7, p1, p2, t);
                    let (x, y) = (Graph::gnp(n, p1, sx).unwrap(), Graph::gnp(n, p2, sy).unwrap());
                    let truth = decide(&x, &y, exact(), sp).unwrap();
                    let cert = decide(&x, &y, SweepMode::Certificates(CertBudgets::default()), sp).unwrap();
                    assert_ne!(truth, Decision::Unknown);
                    match cert {
                        Decision::Unknown => {}
                        Decision::Connected => assert_eq!(truth, Decision::Connected),
                        d => assert!(d.is_disconnected() && truth.is_disconnected()),
                    }
                    seeds_checked += 1;
                }
            }
            assert_eq!(seeds_checked, 120);
        }
    }

    #[test]
    fn adding_edges_never_disconnects() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from_seed(5);
        for t in 0..60u64 {
            let mut x = Graph::gnp(6, 0.5, t).unwrap();
            let mut y = Graph::gnp(6, 0.5, t + 500).unwrap();
            let before = decide(&x, &y, exact(), 0).unwrap();
            let target = if rng.gen_bool(0.5) { &mut x } else { &mut y };
            let (u, v) = (rng.gen_range(0..6), rng.gen_range(0..6));
            if u != v {
                target.add_edge(u, v);
            }
            let after = decide(&x, &y, exact(), 0).unwrap();
            assert!(!(before == Decision::Connected && after.is_disconnected()));
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_range("0.3:0.9:1").unwrap(), vec![0.3]);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("a:1:3").is_err());
    }

    #[test]
    fn asymmetry() {
        let g = asymmetry_grid(0.25, &[1.0, 4.0]).unwrap();
        assert_eq!(g[0], (0.5, 0.5));
        assert_eq!(g[1], (1.0, 0.25));
        assert!(asymmetry_grid(0.25, &[5.0]).is_err());
        assert_eq!(asymmetry_grid(1.0, &[1.0]).unwrap(), vec![(1.0, 1.0)]);
        assert!(asymmetry_grid(1.0, &[1.5]).is_err());
        assert!(asymmetry_grid(1.0, &[0.5]).is_err());
        let slice = asymmetry_slice(6, 0.36, &[1.0], 25, 42, exact(), Execution::default()).unwrap();
        let diagonal = run_sweep(&cfg(6, vec![(0.6, 0.6)], 25, exact())).unwrap();
        assert_eq!(slice, diagonal);
    }

    #[test]
    fn markers() {
        let m = regime_markers(1000.0, 0.1).unwrap();
        assert!(m.vacuous);
        assert!((m.disconnection_product - 0.9 / 2000.0).abs() < 1e-15);
        let m2 = regime_markers(2000.0, 0.1).unwrap();
        assert_eq!(m2.disconnection_product * 2.0, m.disconnection_product);
        assert!((m.lower_line - 2.0 * m.p0 / 1000f64.ln().cbrt()).abs() < 1e-9);
        assert!(regime_markers(1000.0, 1.0).is_err());
        assert!(regime_markers(1000.0, 0.0).is_err());
        assert!(regime_markers(2.0, 0.5).is_err());
        // At n = 1000, ⌊(ln n)^{2/3}⌋ = 3, so the floored ℓ is 0.
        assert_eq!(m.lower_line_floored, None);
        let big = regime_markers(1e30, 0.1).unwrap();
        assert!(!big.vacuous);
        assert!(big.lower_line_floored.is_some());
        let csv = marker_csv(&big, 5);
        assert!(csv.starts_with("marker,p1,p2\n"));
        assert_eq!(csv.lines().filter(|l| l.starts_with("connectivity_product")).count(), 5);
    }

    #[test]
    fn crossover() {
        let l = p0_crossover_ln_n();
        assert!((l - 64.0).abs() < 1e-9, "{l}");
        assert!(regime_markers((l - 0.5).exp(), 0.1).unwrap().vacuous);
        assert!(!regime_markers((l + 0.5).exp(), 0.1).unwrap().vacuous);
    }
}
