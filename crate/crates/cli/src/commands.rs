use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use sepprof_core::bounds::{fit_and_compare, BoundExpr, BoundForm, ConstantStatus};
use sepprof_core::budget::{BudgetConfig, DEFAULT_SET_CAP};
use sepprof_core::cuts::{ball_shell_cut, cheeger_exact_with, cheeger_sweep};
use sepprof_core::generators::{
    cayley_ball, lattice_window, percolation_cluster, sierpinski_carpet, CarpetPattern, GroupSpec,
    PercolationConfig,
};
use sepprof_core::graph::io::{read_graph, write_graph};
use sepprof_core::graph::{induced_subgraph, Graph, VertexSet};
use sepprof_core::profiles::{
    candidate_lower_bound, iso_profile_with, local_sep_with, sep_exact_with, sep_lower_envelope, CandidateFamily, EnvelopeOptions,
    IsoOptions, LocalOptions, ProfileError, ProfileKind, ProfileTable, SepOptions, DEFAULT_SEP_THRESHOLD,
};
use sepprof_core::rational;

use crate::args::*;
use crate::table_io::{emit_plot_data, read_profile_csv, write_profile_csv};
use crate::{check, CliError, BUDGET_ENV};

/// Everything a command writes, collected so the manifest can hash it.
#[derive(Default)]
pub(crate) struct Outputs {
    inputs: BTreeMap<String, String>,
    written: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Outputs {
    pub(crate) fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    pub(crate) fn write(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.written.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(())
    }

    /// Writes to `path`, or to stdout when there is none.
    pub(crate) fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<(), CliError> {
        match path {
            Some(p) => self.write(p, text),
            None => {
                stdout(text);
                Ok(())
            }
        }
    }
}

/// Prints to stdout, ignoring a closed pipe.
pub(crate) fn stdout(text: &str) {
    use std::io::Write;
    let mut lock = std::io::stdout().lock();
    let _ = lock.write_all(text.as_bytes()).and_then(|()| lock.flush());
}

pub(crate) struct Ctx {
    pub budget: BudgetConfig,
}

fn budget_config(g: &GlobalArgs) -> Result<BudgetConfig, CliError> {
    let cap = match g.budget {
        Some(c) => c,
        None => match std::env::var(BUDGET_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{BUDGET_ENV} must be an integer, got '{v}'")))?,
            Err(_) => DEFAULT_SET_CAP,
        },
    };
    let wall_clock = match g.time_limit {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(CliError::Usage(format!("--time-limit must be positive, got {s}"))),
        None => None,
    };
    Ok(BudgetConfig { max_sets: cap, wall_clock })
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn primary_output(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Gen(a) => Some(&a.out),
        Command::Iso(a) | Command::LocalSep(a) => a.out.as_deref(),
        Command::Sep(a) => a.profile.out.as_deref(),
        Command::Check(a) => a.out.as_deref(),
        Command::Fit(a) => a.out.as_deref(),
        Command::Percolate(a) => a.out.as_deref(),
        Command::Report(a) => a.out.as_deref(),
        Command::Cheeger(_) => None,
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx { budget: budget_config(&cli.global)? };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cli.global.threads)))?;
    let mut out = Outputs::default();
    let result = pool.install(|| dispatch(cli, &ctx, &mut out));
    // The manifest is written for partial results too.
    if let Some(path) = primary_output(&cli.command) {
        if !out.written.is_empty() {
            let manifest = json!({
                "tool": "sepprof",
                "version": env!("CARGO_PKG_VERSION"),
                "config": cli,
                "budget": { "max_sets": ctx.budget.max_sets, "wall_clock_s": ctx.budget.wall_clock.map(|d| d.as_secs_f64()) },
                "inputs": out.inputs,
                "outputs": out.written,
                "status": match &result { Ok(()) => "ok".to_string(), Err(e) => e.to_string() },
            });
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            fs::write(manifest_path(path), text).map_err(|e| CliError::Usage(format!("cannot write manifest: {e}")))?;
        }
    }
    result
}

fn dispatch(cli: &Cli, ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Iso(a) => iso(a, ctx, out),
        Command::Sep(a) => sep(a, ctx, out),
        Command::LocalSep(a) => local(a, ctx, out),
        Command::Cheeger(a) => cheeger(a, out),
        Command::Check(a) => check::run(a, ctx, out),
        Command::Fit(a) => fit(a, out),
        Command::Percolate(a) => percolate(a, out),
        Command::Report(a) => report(a, out),
    }
}

pub(crate) fn load_graph(path: &Path, out: &mut Outputs) -> Result<Graph, CliError> {
    let text = out.read_input(path)?;
    read_graph(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub(crate) fn json_text<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for the {family} family")))
}

fn gen(a: &GenArgs, out: &mut Outputs) -> Result<(), CliError> {
    let mut summary = serde_json::Map::new();
    let g = match a.family {
        Family::Lattice => lattice_window(a.d, need(a.radius, "radius", "lattice")?)?,
        Family::Cayley => {
            let spec = match need(a.group, "group", "cayley")? {
                Group::FreeAbelian => GroupSpec::FreeAbelian(a.d),
                Group::Heisenberg => GroupSpec::Heisenberg3,
                Group::Lamplighter => GroupSpec::LamplighterZ2overZ,
            };
            cayley_ball(spec, need(a.radius, "radius", "cayley")?)?
        }
        Family::Carpet => {
            let pattern = CarpetPattern::standard(a.d);
            summary.insert("pattern".into(), serde_json::to_value(pattern.info()).expect("serializes"));
            sierpinski_carpet(&pattern, need(a.level, "level", "carpet")?)?
        }
        Family::Percolation => {
            let cfg = PercolationConfig {
                dimension: a.d,
                box_half_width: need(a.box_half_width, "box", "percolation")?,
                p: need(a.p, "p", "percolation")?,
                seed: a.seed,
            };
            let (g, stats) = percolation_cluster(&cfg)?;
            summary.insert("percolation".into(), serde_json::to_value(stats).expect("serializes"));
            g
        }
    };
    out.write(&a.out, &write_graph(&g))?;
    summary.insert("label".into(), g.label().into());
    summary.insert("vertices".into(), g.vertex_count().into());
    summary.insert("edges".into(), g.edge_count().into());
    summary.insert("max_degree".into(), g.max_degree().into());
    stdout(&format!("{}\n", serde_json::Value::Object(summary)));
    Ok(())
}

fn emit_table(table: &ProfileTable, path: Option<&Path>, out: &mut Outputs) -> Result<(), CliError> {
    let json = path.is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")));
    let text = if json { json_text(table) } else { write_profile_csv(table) };
    out.emit(path, &text)
}

fn iso(a: &ProfileArgs, ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let g = load_graph(&a.graph, out)?;
    let opts = IsoOptions { budget: ctx.budget, ..IsoOptions::default() };
    let res = iso_profile_with(&g, a.nmax, &opts)?;
    emit_table(&res.table, a.out.as_deref(), out)?;
    match res.budget_cap {
        Some(cap) => Err(CliError::Budget(format!(
            "enumeration stopped at {cap} sets; rows above n = {} are not exact",
            res.table.certified_through()
        ))),
        None => Ok(()),
    }
}

pub(crate) fn parse_families(names: &[String]) -> Result<Vec<CandidateFamily>, CliError> {
    if names.is_empty() {
        return Ok(EnvelopeOptions::default().families);
    }
    names.iter().map(|s| s.parse().map_err(|e: ProfileError| CliError::Usage(e.to_string()))).collect()
}

fn sep(a: &SepArgs, ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let p = &a.profile;
    let g = load_graph(&p.graph, out)?;
    let env_opts = EnvelopeOptions { families: parse_families(&a.families)?, ..EnvelopeOptions::default() };
    let exact = match a.mode {
        SepMode::Exact => true,
        SepMode::Envelope => false,
        SepMode::Auto => p.nmax <= DEFAULT_SEP_THRESHOLD.min(16),
    };
    if !exact {
        let t = sep_lower_envelope(&g, p.nmax, &env_opts)?;
        return emit_table(&t, p.out.as_deref(), out);
    }
    let opts = SepOptions { budget: ctx.budget, ..SepOptions::default() };
    match sep_exact_with(&g, p.nmax, &opts) {
        Ok(t) => emit_table(&t, p.out.as_deref(), out),
        Err(ProfileError::BudgetExceeded { cap }) => {
            // Fall back to certified lower bounds, flagged inexact.
            let t = sep_lower_envelope(&g, p.nmax, &env_opts)?;
            emit_table(&t, p.out.as_deref(), out)?;
            Err(CliError::Budget(format!("exact search stopped at {cap} sets; wrote the lower envelope instead")))
        }
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn pick_vertex(g: &Graph, v: Option<u32>) -> Result<u32, CliError> {
    match v {
        Some(v) if (v as usize) < g.vertex_count() => Ok(v),
        Some(v) => Err(CliError::Usage(format!("vertex {v} is not in the graph"))),
        None => Ok(g.center()),
    }
}

fn local(a: &ProfileArgs, ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let g = load_graph(&a.graph, out)?;
    let v = pick_vertex(&g, a.vertex)?;
    let opts = LocalOptions { budget: ctx.budget, ..LocalOptions::default() };
    let t = local_sep_with(&g, v, a.nmax, &opts)?;
    emit_table(&t, a.out.as_deref(), out)
}

pub(crate) fn load_subset(g: &Graph, path: &Path, out: &mut Outputs) -> Result<VertexSet, CliError> {
    let text = out.read_input(path)?;
    let ids: Result<Vec<u32>, _> = text.split_whitespace().map(str::parse).collect();
    let ids = ids.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    VertexSet::new(g.vertex_count(), ids).map_err(|e| CliError::Usage(e.to_string()))
}

fn cheeger(a: &CheegerArgs, out: &mut Outputs) -> Result<(), CliError> {
    let g = load_graph(&a.graph, out)?;
    let members: Vec<u32> = match &a.subset {
        Some(p) => load_subset(&g, p, out)?.members().to_vec(),
        None => g.vertices().collect(),
    };
    let f = match &a.subset {
        Some(_) => induced_subgraph(&g, &VertexSet::new(g.vertex_count(), members.iter().copied())?)?,
        None => g.clone(),
    };
    let to_global = |set: &VertexSet| -> Vec<u32> { set.iter().map(|v| members[v as usize]).collect() };
    let report = match a.mode {
        CheegerMode::Exact | CheegerMode::Sweep => {
            let c = if a.mode == CheegerMode::Exact { cheeger_exact_with(&f, a.threshold)? } else { cheeger_sweep(&f)? };
            json!({
                "lo": rational::format(&c.lo),
                "hi": rational::format(&c.hi),
                "witness": to_global(&c.witness.part),
                "boundary_edges": c.witness.boundary_edges,
                "method": c.method,
                "lo_source": c.lo_source,
                "flags": c.flags,
            })
        }
        CheegerMode::Shell => {
            let x = match a.vertex {
                Some(v) => members
                    .binary_search(&v)
                    .map(|i| i as u32)
                    .map_err(|_| CliError::Usage(format!("vertex {v} is not in the subset")))?,
                None => f.center(),
            };
            let s = ball_shell_cut(&f, x)?;
            let (lo, lo_source) = candidate_lower_bound(&f)?;
            json!({
                "lo": rational::format(&lo),
                "hi": rational::format(&s.cut.ratio),
                "witness": to_global(&s.cut.part),
                "boundary_edges": s.cut.boundary_edges,
                "method": "BallShell",
                "lo_source": lo_source,
                "flags": s.flags,
                "radius": s.radius,
                "n0": s.n0,
                "guarantee": s.guarantee,
                "within_guarantee": s.within_guarantee,
            })
        }
    };
    stdout(&json_text(&report));
    Ok(())
}

pub(crate) fn kind_of(k: Kind) -> ProfileKind {
    match k {
        Kind::Iso => ProfileKind::Iso,
        Kind::Sep => ProfileKind::Sep,
        Kind::LocalSep => ProfileKind::LocalSep,
    }
}

fn load_table(path: &Path, kind: Kind, out: &mut Outputs) -> Result<ProfileTable, CliError> {
    let text = out.read_input(path)?;
    Ok(read_profile_csv(&text, kind_of(kind), &path.display().to_string())?)
}

fn parse_form(name: &str) -> Result<BoundForm, CliError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = BoundForm::ALL.iter().map(|f| f.name()).collect();
        CliError::Usage(format!("unknown form '{name}'; known forms: {}", known.join(", ")))
    })
}

fn fit(a: &FitArgs, out: &mut Outputs) -> Result<(), CliError> {
    let table = load_table(&a.profile, a.kind, out)?;
    let b = BoundExpr::parse(parse_form(&a.form)?, &a.params)?;
    let r = fit_and_compare(&table, &b)?;
    out.emit(a.out.as_deref(), &json_text(&r))
}

fn percolate(a: &PercolateArgs, out: &mut Outputs) -> Result<(), CliError> {
    let mut runs = Vec::new();
    for &seed in &a.seeds {
        let cfg = PercolationConfig { dimension: a.d, box_half_width: a.box_half_width, p: a.p, seed };
        let (_, stats) = percolation_cluster(&cfg)?;
        runs.push(json!({ "seed": seed, "stats": stats }));
    }
    let densities: Vec<f64> = runs.iter().map(|r| r["stats"]["density"].as_f64().unwrap_or(0.0)).collect();
    let mean = densities.iter().sum::<f64>() / densities.len().max(1) as f64;
    let report = json!({
        "d": a.d, "p": a.p, "box": a.box_half_width,
        "runs": runs,
        "density_mean": mean,
        "density_min": densities.iter().copied().fold(f64::INFINITY, f64::min),
        "density_max": densities.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    out.emit(a.out.as_deref(), &json_text(&report))
}

fn report(a: &ReportArgs, out: &mut Outputs) -> Result<(), CliError> {
    let table = load_table(&a.profile, a.kind, out)?;
    let mut overlays = Vec::new();
    for spec in &a.overlay {
        let (name, params) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
        let mut b = BoundExpr::parse(parse_form(name)?, params)?;
        if a.fit && b.constant().status == ConstantStatus::Fitted {
            b = fit_and_compare(&table, &b)?.bound;
        }
        overlays.push(b);
    }
    let csv = emit_plot_data(&table, &overlays)?;
    out.emit(a.out.as_deref(), &csv)
}
