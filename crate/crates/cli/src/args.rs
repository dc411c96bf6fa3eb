use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fs_core::fs_graph::{DEFAULT_BUDGET, DEFAULT_CAP};

pub const FORMAT_VERSION: u32 = 1;

pub fn version() -> &'static str {
    concat!(env!("CARGO_PKG_VERSION"), " (output format 1)")
}

#[derive(Debug, Parser)]
#[command(name = "fs", version = version(), about = "Friends-and-strangers graph toolkit")]
pub struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// Edge-list file for X (positions).
    #[arg(long)]
    pub x: PathBuf,
    /// Edge-list file for Y (people).
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph in edge-list format.
    Gen(GenArgs),
    /// Decompose FS(X, Y) into connected components.
    Components(ComponentsArgs),
    /// Search for a path between two bijections.
    Path(PathArgs),
    /// Decide whether two vertices of Y are exchangeable from a bijection.
    Exchange(ExchangeArgs),
    /// Build, validate and emit the gadget graphs.
    Gadget(GadgetArgs),
    /// Embed a small pair into a large pair along target sets.
    Embed(EmbedArgs),
    /// Evaluate the subset inequality behind random embeddability.
    Janson(JansonArgs),
    /// Search for a packing (an isolated bijection).
    Pack(PackArgs),
    /// Monte Carlo connectivity sweep over G(n, p1) x G(n, p2).
    Sweep(SweepArgs),
    /// Reference curves of the threshold regimes.
    Markers(MarkersArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphKind {
    Gnp,
    Complete,
    Empty,
    Star,
    Path,
    Cycle,
    Grid,
    Bipartite,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "gnp")]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    /// Edge probability for `gnp`.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Rows for `grid` (columns are n / rows); left part size for `bipartite`.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ComponentsArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Exit with status 1 when FS(X, Y) is disconnected.
    #[arg(long)]
    pub fail_on_disconnected: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub pair: Pair,
    /// Start bijection in one-line form, e.g. "2 0 1" or 2,0,1.
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecideMode {
    Exact,
    Bounded,
}

#[derive(Debug, Args)]
pub struct ExchangeArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long)]
    pub sigma: String,
    #[arg(long)]
    pub u: usize,
    #[arg(long)]
    pub v: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: DecideMode,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GadgetEmit {
    Report,
    GStar,
    GStarStar,
    HStar,
    HStarStar,
    Layout,
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "report")]
    pub emit: GadgetEmit,
    /// Also search FS(G*, H*) for the exchange of the two extra vertices.
    #[arg(long)]
    pub verify_budget: Option<usize>,
    /// Instead of building at m, report the smallest feasible size up to m.
    #[arg(long)]
    pub find_min: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Small pair, on 0..m.
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long)]
    pub h: PathBuf,
    #[command(flatten)]
    pub pair: Pair,
    /// Explicit target sets, e.g. "0,1;2;5,6". Decides that single instance.
    #[arg(long, requires = "sigma")]
    pub sets: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Set sizes for sampling: one value for all, or a comma list.
    #[arg(long, default_value = "1")]
    pub q: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct JansonArgs {
    /// Use the gadget pair of this size with its q-vector at n.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: f64,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub p2: f64,
    /// Take G** and H** (and their q-vector) from the gadget of size --m.
    #[arg(long, requires = "m")]
    pub gadget: bool,
    #[arg(long, conflicts_with = "gadget")]
    pub g: Option<PathBuf>,
    #[arg(long, conflicts_with = "gadget")]
    pub h: Option<PathBuf>,
    /// Set sizes: one value for all, or a comma list. Ignored with --gadget.
    #[arg(long, default_value = "1")]
    pub q: String,
    /// Only scan subsets of at most this many vertices.
    #[arg(long)]
    pub max_subset: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PackMode {
    Exact,
    Local,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    #[command(flatten)]
    pub pair: Pair,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: PackMode,
    #[arg(long, default_value_t = 16)]
    pub cap: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepModeArg {
    Exact,
    Cert,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    /// Values of p1 as a:b:steps.
    #[arg(long, default_value = "0:1:11")]
    pub p1_grid: String,
    /// Values of p2 as a:b:steps (ignored with --diagonal).
    #[arg(long, default_value = "0:1:11")]
    pub p2_grid: String,
    /// Only the cells p1 = p2, taken from --p1-grid.
    #[arg(long)]
    pub diagonal: bool,
    /// Hold p1·p2 at this value and vary the ratio instead of a grid.
    #[arg(long, requires = "ratios")]
    pub product: Option<f64>,
    /// Comma list of p1/p2 ratios for --product.
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: SweepModeArg,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = 2_000)]
    pub packing_steps: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MarkersArgs {
    #[arg(long)]
    pub n: f64,
    #[arg(long, default_value_t = fs_core::lab::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Points per product curve.
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}
