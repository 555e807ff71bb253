use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "sepprof", version, about = "Separation and isoperimetric profiles of graph windows")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Cap on enumerated sets; overrides SEPPROF_BUDGET.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Soft wall-clock cap in seconds for enumerations.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
pub enum Command {
    /// Generate a graph window and write it in sepprof-graph format.
    Gen(GenArgs),
    /// Isoperimetric profile Λ(n).
    Iso(ProfileArgs),
    /// Separation profile Sep(n), exact or as a certified lower envelope.
    Sep(SepArgs),
    /// Local separation profile around a vertex.
    LocalSep(ProfileArgs),
    /// Cheeger constant of a graph or of the subgraph induced on a subset.
    Cheeger(CheegerArgs),
    /// Run a verification suite and emit a JSON report.
    Check(CheckArgs),
    /// Fit a bound form to a profile CSV.
    Fit(FitArgs),
    /// Percolation cluster statistics over several seeds.
    Percolate(PercolateArgs),
    /// Plot-ready CSV from a profile CSV, with bound overlays.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Family {
    Lattice,
    Cayley,
    Carpet,
    Percolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Group {
    FreeAbelian,
    Heisenberg,
    Lamplighter,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub out: PathBuf,
    /// Dimension (lattice, free abelian group, carpet, percolation).
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long, value_enum)]
    pub group: Option<Group>,
    /// Carpet level.
    #[arg(long)]
    pub level: Option<u32>,
    /// Bond probability for percolation.
    #[arg(long)]
    pub p: Option<f64>,
    /// Half-width L of the percolation box [−L, L]^d.
    #[arg(long = "box")]
    pub box_half_width: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub nmax: usize,
    /// Centre vertex for local profiles; defaults to the window origin.
    #[arg(long)]
    pub vertex: Option<u32>,
    /// Output file; `.json` gives JSON, anything else CSV. Defaults to CSV on stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SepMode {
    /// Exact when n fits under the exact threshold, envelope otherwise.
    Auto,
    Exact,
    Envelope,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SepArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value_t = SepMode::Auto)]
    pub mode: SepMode,
    /// Candidate families for the envelope, comma separated (balls, boxes, optimal-sets,
    /// sweep-refined).
    #[arg(long, value_delimiter = ',')]
    pub families: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CheegerMode {
    Exact,
    Sweep,
    Shell,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheegerArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// File of whitespace-separated vertex ids.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CheegerMode::Exact)]
    pub mode: CheegerMode,
    /// Largest graph handled by the exact mode.
    #[arg(long, default_value_t = 24)]
    pub threshold: usize,
    /// Centre for the shell cutter (id in the full graph); defaults to the origin.
    #[arg(long)]
    pub vertex: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Suite {
    LemmaOptimal,
    Chain,
    Decay,
    GrowthUpper,
    LocalPoly,
    Percolation,
    Jv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Policy {
    /// p(k) = 2k.
    Doubling,
    /// p(k) = r·k with r the largest measured ratio between consecutive optimal integers.
    MeasuredRatio,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    /// ε values for the chain suite, comma separated rationals.
    #[arg(long, value_delimiter = ',', default_values_t = ["1/4".to_string(), "1/2".to_string(), "3/4".to_string()])]
    pub epsilon: Vec<String>,
    #[arg(long, value_enum, default_value_t = Policy::Doubling)]
    pub policy: Policy,
    /// Largest n for the exact Sep table used in chain audits.
    #[arg(long, default_value_t = 10)]
    pub sep_nmax: usize,
    /// Bound parameters `k=v,...` for fitting suites.
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long)]
    pub vertex: Option<u32>,
    /// Subset file for the jv suite.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    /// Constant K for the jv suite.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Kind {
    Iso,
    Sep,
    LocalSep,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub form: String,
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long, value_enum, default_value_t = Kind::Sep)]
    pub kind: Kind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PercolateArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long = "box")]
    pub box_half_width: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [0u64])]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_enum, default_value_t = Kind::Sep)]
    pub kind: Kind,
    /// Overlay `form` or `form:k=v,...`; repeatable.
    #[arg(long)]
    pub overlay: Vec<String>,
    /// Fit each overlay's constant to the table before evaluating it.
    #[arg(long)]
    pub fit: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
