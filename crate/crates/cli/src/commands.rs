use std::fmt::Write as _;

use fs_core::embed::{
    check_q_embeddable, find_embedding, gadget_qvector, janson_hypothesis_bounded, janson_hypothesis_with,
    EmbedRequest, JansonReport, QEmbedOutcome, QVector, JANSON_FULL_MAX_M,
};
use fs_core::exchange::exchangeable;
use fs_core::gadgets::{
    build_g_with, min_feasible_m, validate_gadget, verify_gadget_exchange, GadgetBundle, GadgetLabels,
    PairVerification,
};
use fs_core::lab::{
    asymmetry_grid, marker_csv, parse_range, regime_markers, run_sweep_with, sweep_csv, CertBudgets, SweepConfig,
    SweepMode,
};
use fs_core::packing::{find_packing_with, PackingMode, PackingStatus};
use fs_core::{ExchangeMode, ExchangeStatus, Execution, FsInstance, Graph, NamedGraph, PathSearch};

use crate::args::*;
use crate::io::*;

/// What a subcommand produced, before it is written out.
pub struct Report {
    pub seed: Option<u64>,
    /// Appended to the header line.
    pub summary: String,
    pub body: String,
    pub exit: u8,
}

impl Report {
    fn new(body: String) -> Self {
        Report { seed: None, summary: String::new(), body, exit: 0 }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn summary(mut self, s: String) -> Self {
        self.summary = s;
        self
    }
}

pub fn run(cmd: &Command, exec: Execution) -> CliResult<Report> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Components(a) => components(a, exec),
        Command::Path(a) => path(a),
        Command::Exchange(a) => exchange(a),
        Command::Gadget(a) => gadget(a, exec),
        Command::Embed(a) => embed(a, exec),
        Command::Janson(a) => janson(a, exec),
        Command::Pack(a) => pack(a, exec),
        Command::Sweep(a) => sweep(a, exec),
        Command::Markers(a) => markers(a),
    }
}

pub fn output_of(cmd: &Command) -> Option<&std::path::Path> {
    let o = match cmd {
        Command::Gen(a) => &a.output,
        Command::Components(a) => &a.output,
        Command::Path(a) => &a.output,
        Command::Exchange(a) => &a.output,
        Command::Gadget(a) => &a.output,
        Command::Embed(a) => &a.output,
        Command::Janson(a) => &a.output,
        Command::Pack(a) => &a.output,
        Command::Sweep(a) => &a.output,
        Command::Markers(a) => &a.output,
    };
    o.out.as_deref()
}

fn instance(pair: &Pair) -> CliResult<FsInstance> {
    Ok(FsInstance::new(read_graph(&pair.x)?, read_graph(&pair.y)?)?)
}

fn gen(a: &GenArgs) -> CliResult<Report> {
    let need_rows = || a.rows.ok_or_else(|| CliError::Usage("--rows is required for this kind".into()));
    let g = match a.kind {
        GraphKind::Gnp => Graph::gnp(a.n, a.p, a.seed)?,
        GraphKind::Complete => Graph::named(NamedGraph::Complete, a.n)?,
        GraphKind::Empty => Graph::named(NamedGraph::Empty, a.n)?,
        GraphKind::Star => Graph::named(NamedGraph::Star, a.n)?,
        GraphKind::Path => Graph::named(NamedGraph::Path, a.n)?,
        GraphKind::Cycle => Graph::named(NamedGraph::Cycle, a.n)?,
        GraphKind::Grid => {
            let r = need_rows()?;
            if r == 0 || !a.n.is_multiple_of(r) {
                return Err(CliError::Usage(format!("--rows {r} does not divide n = {}", a.n)));
            }
            Graph::named(NamedGraph::Grid(r, a.n / r), a.n)?
        }
        GraphKind::Bipartite => {
            let s = need_rows()?;
            if s > a.n {
                return Err(CliError::Usage(format!("part size {s} exceeds n = {}", a.n)));
            }
            Graph::named(NamedGraph::CompleteBipartite(s, a.n - s), a.n)?
        }
    };
    let report = Report::new(g.to_edge_list());
    Ok(match a.kind {
        GraphKind::Gnp => report.seeded(a.seed),
        _ => report,
    })
}

fn components(a: &ComponentsArgs, exec: Execution) -> CliResult<Report> {
    let inst = instance(&a.pair)?;
    let s = inst.decompose_with(a.cap, exec)?;
    let hist = s.sizes.iter().map(|(size, count)| format!("{size}:{count}")).collect::<Vec<_>>().join(";");
    let mut body = String::from("n,component_count,isolated_count,size_histogram\n");
    let _ = writeln!(body, "{},{},{},{}", inst.n(), s.component_count, s.isolated_count, hist);
    let mut r = Report::new(body);
    if a.fail_on_disconnected && !s.is_connected() {
        r.exit = 1;
    }
    Ok(r)
}

const WALK_HEADER: &str = "status,explored,steps,path\n";

fn walk_row(status: &str, explored: u64, path: Option<&[fs_core::Permutation]>) -> String {
    let (steps, joined) = match path {
        Some(p) => ((p.len() - 1).to_string(), join_path(p)),
        None => (String::new(), String::new()),
    };
    format!("{WALK_HEADER}{status},{explored},{steps},{joined}\n")
}

fn path(a: &PathArgs) -> CliResult<Report> {
    let inst = instance(&a.pair)?;
    let from = parse_perm(&a.from)?;
    let to = parse_perm(&a.to)?;
    let res = inst.find_path(&from, &to, a.budget)?;
    let status = match res {
        PathSearch::Found { .. } => "found",
        PathSearch::Unreachable { .. } => "unreachable",
        PathSearch::Indeterminate { .. } => "indeterminate",
    };
    Ok(Report::new(walk_row(status, res.explored() as u64, res.path())))
}

fn exchange(a: &ExchangeArgs) -> CliResult<Report> {
    let inst = instance(&a.pair)?;
    let sigma = parse_perm(&a.sigma)?;
    let mode = match a.mode {
        DecideMode::Exact => ExchangeMode::Exact { cap: a.cap },
        DecideMode::Bounded => ExchangeMode::Bounded { budget: a.budget },
    };
    let v = exchangeable(&inst, &sigma, a.u, a.v, mode)?;
    let body = match &v.status {
        ExchangeStatus::Exchangeable(p) => walk_row("exchangeable", v.explored, Some(p)),
        ExchangeStatus::NotExchangeable => walk_row("not_exchangeable", v.explored, None),
        ExchangeStatus::Indeterminate => walk_row("indeterminate", v.explored, None),
    };
    Ok(Report::new(body))
}

fn vertex_name(l: &GadgetLabels, v: usize) -> String {
    let ell = l.ell;
    match v {
        0 => "w".into(),
        _ if v <= ell => format!("x{v}"),
        _ if v <= 2 * ell => format!("y{}", v - ell),
        _ if v < l.m => format!("z{}", v - 2 * ell),
        _ => format!("extra{}", v - l.m + 1),
    }
}

fn gadget(a: &GadgetArgs, exec: Execution) -> CliResult<Report> {
    if a.find_min {
        let found = min_feasible_m(4, a.m, exec);
        let body = format!(
            "search_lo,search_hi,smallest_feasible_m\n4,{},{}\n",
            a.m,
            found.map_or_else(|| "none".into(), |m| m.to_string())
        );
        return Ok(Report::new(body));
    }
    let b: GadgetBundle = build_g_with(a.m, exec)?;
    let l = b.spec.labels;
    let summary = format!("m={} ell={}", l.m, l.ell);
    let body = match a.emit {
        GadgetEmit::GStar => b.g_star.to_edge_list(),
        GadgetEmit::GStarStar => b.g_star_star.to_edge_list(),
        GadgetEmit::HStar => b.h_star.to_edge_list(),
        GadgetEmit::HStarStar => b.h_star_star.to_edge_list(),
        GadgetEmit::Layout => {
            let mut s = String::from("position,vertex,label\n");
            for (p, &v) in b.spec.cycle.iter().enumerate() {
                let _ = writeln!(s, "{p},{v},{}", vertex_name(&l, v));
            }
            s
        }
        GadgetEmit::Report => {
            let rep = validate_gadget(&b);
            let mut s = String::from("check,status,detail\n");
            for c in &rep.checks {
                let _ = writeln!(s, "{},{},{}", c.name, if c.pass { "pass" } else { "fail" }, csv_field(&c.detail));
            }
            if let Some(budget) = a.verify_budget {
                let (status, detail) = match verify_gadget_exchange(a.m, budget)? {
                    PairVerification::Verified { swaps, .. } => ("pass", format!("{swaps} friendly swaps")),
                    PairVerification::Indeterminate { explored } => {
                        ("indeterminate", format!("budget exhausted after {explored} nodes"))
                    }
                };
                let _ = writeln!(s, "exchange_search,{status},{}", csv_field(&detail));
            }
            s
        }
    };
    Ok(Report::new(body).summary(summary))
}

fn qvector(s: &str, m: usize) -> CliResult<QVector> {
    let q: Vec<usize> = parse_list(s, "--q")?;
    match q.len() {
        1 => Ok(QVector::uniform(m, q[0])),
        k if k == m => Ok(QVector { q, gamma: Vec::new() }),
        k => Err(CliError::Usage(format!("--q has {k} entries; expected 1 or {m}"))),
    }
}

fn embed(a: &EmbedArgs, exec: Execution) -> CliResult<Report> {
    let g = read_graph(&a.g)?;
    let h = read_graph(&a.h)?;
    let x = read_graph(&a.pair.x)?;
    let y = read_graph(&a.pair.y)?;
    if let (Some(sets), Some(sigma)) = (&a.sets, &a.sigma) {
        let sets = parse_sets(sets)?;
        let sigma = parse_perm(sigma)?;
        let req = EmbedRequest { g: &g, h: &h, x: &x, y: &y, sets: &sets, sigma: &sigma };
        let mut body = String::from("status,witness\n");
        match find_embedding(&req)? {
            Some(w) => {
                let w = w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
                let _ = writeln!(body, "embedded,{w}");
            }
            None => body.push_str("not_embedded,\n"),
        }
        return Ok(Report::new(body));
    }
    let q = qvector(&a.q, g.n())?;
    let outcome = check_q_embeddable(&g, &h, &x, &y, &q, a.trials, a.seed, exec)?;
    let mut body = String::from("status,trials,failing_trial,core,sigma,sets\n");
    match outcome {
        QEmbedOutcome::NoCounterexample { trials } => {
            let _ = writeln!(body, "no_counterexample,{trials},,,,");
        }
        QEmbedOutcome::Counterexample(c) => {
            let core = c.core.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            let sets = c
                .sets
                .iter()
                .map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(body, "counterexample,{},{},{core},{},{sets}", c.trial + 1, c.trial, c.sigma);
        }
    }
    Ok(Report::new(body).seeded(a.seed))
}

fn janson(a: &JansonArgs, exec: Execution) -> CliResult<Report> {
    let (g, h, q, mut summary) = if a.gadget {
        let m = a.m.expect("clap enforces --m with --gadget");
        let b = build_g_with(m, exec)?;
        if !(a.n >= 1.0 && a.n < usize::MAX as f64) {
            return Err(CliError::Usage(format!("--n {} is not a vertex count", a.n)));
        }
        let qr = gadget_qvector(a.n as usize, &b.spec.labels)?;
        let s = format!(
            "q_gamma={} q_other={} q_range_ok={}",
            qr.q_gamma,
            qr.q_other,
            !qr.flagged()
        );
        (b.g_star_star, b.h_star_star, qr.qvec, s)
    } else {
        let (Some(gp), Some(hp)) = (&a.g, &a.h) else {
            return Err(CliError::Usage("janson needs --gadget or both --g and --h".into()));
        };
        let g = read_graph(gp)?;
        let h = read_graph(hp)?;
        if let Some(m) = a.m {
            if m != g.n() {
                return Err(CliError::Usage(format!("--m {m} but G has {} vertices", g.n())));
            }
        }
        let q = qvector(&a.q, g.n())?;
        (g, h, q, String::new())
    };
    let m = g.n();
    let rep: JansonReport = match a.max_subset {
        Some(k) => janson_hypothesis_bounded(&g, &h, &q, a.p1, a.p2, a.n, k)?,
        None if m <= JANSON_FULL_MAX_M => janson_hypothesis_with(&g, &h, &q, a.p1, a.p2, a.n, exec)?,
        None => {
            return Err(CliError::Usage(format!(
                "m = {m} is too large to scan every subset (limit {JANSON_FULL_MAX_M}); pass --max-subset"
            )))
        }
    };
    if !summary.is_empty() {
        summary.push(' ');
    }
    let _ = write!(
        summary,
        "m={} Q={} q_exceeds_n={} log=natural subsets_checked={} max_subset={} pass={} conclusion_lower_bound={}",
        rep.m,
        rep.q_total,
        rep.q_exceeds_n,
        rep.subsets_checked,
        rep.max_subset.map_or_else(|| "all".into(), |k| k.to_string()),
        rep.pass(),
        rep.conclusion_lower_bound.map_or_else(|| "none".into(), |b| format!("{b:e}"))
    );
    let mut body = String::from("mask,edges_g,edges_h,lhs_log,rhs_log\n");
    for r in &rep.failing {
        let _ = writeln!(body, "{},{},{},{:.9},{:.9}", r.mask_hex(), r.edges_g, r.edges_h, r.lhs_log, r.rhs_log);
    }
    Ok(Report::new(body).summary(summary))
}

fn pack(a: &PackArgs, exec: Execution) -> CliResult<Report> {
    let x = read_graph(&a.pair.x)?;
    let y = read_graph(&a.pair.y)?;
    let mode = match a.mode {
        PackMode::Exact => PackingMode::Exact { cap: a.cap },
        PackMode::Local => PackingMode::LocalSearch { max_steps: a.max_steps, seed: a.seed, restarts: a.restarts },
    };
    let res = find_packing_with(&x, &y, mode, exec)?;
    let (status, sigma) = match &res.status {
        PackingStatus::Found(s) => ("found", s.to_string()),
        PackingStatus::NoneExists => ("none_exists", String::new()),
        PackingStatus::Indeterminate => ("indeterminate", String::new()),
    };
    let st = &res.stats;
    let body = format!(
        "status,nodes,steps,restarts,best_conflicts,sigma\n{status},{},{},{},{},{sigma}\n",
        st.nodes, st.steps, st.restarts, st.best_conflicts
    );
    let r = Report::new(body);
    Ok(match a.mode {
        PackMode::Local => r.seeded(a.seed),
        PackMode::Exact => r,
    })
}

fn sweep(a: &SweepArgs, exec: Execution) -> CliResult<Report> {
    let grid: Vec<(f64, f64)> = if let Some(product) = a.product {
        let ratios: Vec<f64> = parse_list(a.ratios.as_deref().unwrap_or_default(), "--ratios")?;
        asymmetry_grid(product, &ratios)?
    } else {
        let p1 = parse_range(&a.p1_grid)?;
        if a.diagonal {
            p1.iter().map(|&p| (p, p)).collect()
        } else {
            let p2 = parse_range(&a.p2_grid)?;
            p1.iter().flat_map(|&x| p2.iter().map(move |&y| (x, y))).collect()
        }
    };
    let mode = match a.mode {
        SweepModeArg::Exact => SweepMode::Exact { cap: a.cap },
        SweepModeArg::Cert => SweepMode::Certificates(CertBudgets {
            packing_steps: a.packing_steps,
            ..CertBudgets::default()
        }),
    };
    let cfg = SweepConfig { n: a.n, grid, trials: a.trials, seed: a.seed, mode };
    let rows = run_sweep_with(&cfg, exec)?;
    Ok(Report::new(sweep_csv(&rows)).seeded(a.seed))
}

fn markers(a: &MarkersArgs) -> CliResult<Report> {
    let m = regime_markers(a.n, a.epsilon)?;
    let summary = format!(
        "p0={:e} disconnection_product={:e} connectivity_product={:e} graph_floor={:e} vacuous={}",
        m.p0, m.disconnection_product, m.connectivity_product, m.graph_floor, m.vacuous
    );
    Ok(Report::new(marker_csv(&m, a.points)).summary(summary))
}
