//! Verification suites behind `sepprof check`.

use serde_json::{json, Value};

use sepprof_core::bounds::{
    audit_chain, chain_lower_bound, chain_lower_bound_symmetric, decay_lower_bound, fit_and_compare,
    graph_distortion, jv_consistency, BoundError, BoundExpr, BoundForm, ChainWitness,
};
use sepprof_core::cuts::ball_shell_cut;
use sepprof_core::graph::{ball, induced_subgraph, Graph};
use sepprof_core::profiles::{
    iso_profile_with, lemma_audit, local_sep_with, optimal_integers, sep_exact_with, sep_lower_envelope,
    EnvelopeOptions, IsoOptions, IsoResult, LocalOptions, ProfileTable, SepOptions,
};
use sepprof_core::rational::{self, Rational};

use crate::args::{CheckArgs, Policy, Suite};
use crate::commands::{json_text, load_graph, load_subset, pick_vertex, Ctx, Outputs};
use crate::CliError;

pub(crate) fn run(a: &CheckArgs, ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let g = load_graph(&a.graph, out)?;
    let (entries, summary) = match a.suite {
        Suite::LemmaOptimal => lemma(&g, a, ctx)?,
        Suite::Chain => chain(&g, a, ctx, false)?,
        Suite::Decay => chain(&g, a, ctx, true)?,
        Suite::GrowthUpper => growth_upper(&g, a)?,
        Suite::LocalPoly => local_fits(&g, a, ctx, &[BoundForm::LocalPolyLowerA, BoundForm::LocalPolyLowerB])?,
        Suite::Percolation => local_fits(&g, a, ctx, &[BoundForm::PercolationLower])?,
        Suite::Jv => jv(&g, a, out)?,
    };
    let report = json!({
        "suite": a.suite,
        "graph": g.label(),
        "vertices": g.vertex_count(),
        "summary": summary,
        "entries": entries,
    });
    out.emit(a.out.as_deref(), &json_text(&report))
}

fn iso(g: &Graph, a: &CheckArgs, ctx: &Ctx) -> Result<IsoResult, CliError> {
    let res = iso_profile_with(g, a.nmax, &IsoOptions { budget: ctx.budget, ..IsoOptions::default() })?;
    if let Some(cap) = res.budget_cap {
        return Err(CliError::Budget(format!("isoperimetric enumeration stopped at {cap} sets")));
    }
    Ok(res)
}

fn lemma(g: &Graph, a: &CheckArgs, ctx: &Ctx) -> Result<(Value, Value), CliError> {
    let checks = lemma_audit(g, &iso(g, a, ctx)?)?;
    let violations = checks.iter().filter(|c| !c.holds).count();
    Ok((json!(checks), json!({ "checked": checks.len(), "violations": violations })))
}

fn measured_ratio(iso: &ProfileTable) -> Result<u64, CliError> {
    let through = iso.certified_through();
    let opt: Vec<u64> = optimal_integers(iso)?.into_iter().filter(|&k| k <= through).collect();
    Ok(opt.windows(2).map(|w| w[1].div_ceil(w[0])).max().unwrap_or(2).max(2))
}

/// Least m ≥ n with Λ(m) ≤ (1 − ε)Λ(n) and p(m) inside the certified table.
fn first_m(iso: &ProfileTable, eps: Rational, n: u64, p: &dyn Fn(u64) -> u64) -> Option<u64> {
    let through = iso.certified_through();
    let target = (Rational::from_integer(1) - eps) * iso.value(n)?;
    (n..=through).take_while(|&m| p(m) <= through).find(|&m| iso.value(m).is_some_and(|v| v <= target))
}

fn chain(g: &Graph, a: &CheckArgs, ctx: &Ctx, decay: bool) -> Result<(Value, Value), CliError> {
    let res = iso(g, a, ctx)?;
    let table = &res.table;
    let through = table.certified_through();
    let envelope = sep_lower_envelope(g, through.max(1) as usize, &EnvelopeOptions::default())?;
    let sep_n = (a.sep_nmax as u64).min(through).max(1) as usize;
    let exact = sep_exact_with(g, sep_n, &SepOptions::default()).ok();
    let mut entries = Vec::new();
    let (mut skipped, mut violations) = (0usize, 0usize);
    let mut record = |w: Result<ChainWitness, BoundError>| -> Result<(), CliError> {
        match w {
            Ok(w) => {
                let audit = audit_chain(g, table, &w, Some(&envelope), exact.as_ref())?;
                violations += usize::from(!audit.holds);
                entries.push(json!({ "witness": w, "audit": audit }));
            }
            Err(BoundError::PreconditionGap(_) | BoundError::NotCertified(_) | BoundError::Unreachable) => {
                skipped += 1;
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    };
    if decay {
        for n in 2..=through {
            record(decay_lower_bound(table, n))?;
        }
    } else {
        let ratio = measured_ratio(table)?;
        let p: Box<dyn Fn(u64) -> u64> = match a.policy {
            Policy::Doubling => Box::new(|k| 2 * k),
            Policy::MeasuredRatio => Box::new(move |k| ratio * k),
        };
        for e in &a.epsilon {
            let eps = rational::parse(e).map_err(|err| CliError::Usage(format!("--epsilon: {err}")))?;
            for n in 2..=through {
                let Some(m) = first_m(table, eps, n, &*p) else { continue };
                let w = match a.policy {
                    Policy::Doubling => chain_lower_bound_symmetric(table, eps, n, m),
                    Policy::MeasuredRatio => chain_lower_bound(table, &*p, eps, n, m),
                };
                record(w)?;
            }
        }
    }
    let checked = entries.len();
    Ok((
        json!(entries),
        json!({ "certified_through": through, "witnesses": checked, "skipped": skipped, "violations": violations }),
    ))
}

fn with_default_dimension(g: &Graph, params: &str, key: &str) -> String {
    if params.split(',').any(|kv| kv.trim().split('=').next() == Some(key)) || g.coord_dim() == 0 {
        params.to_string()
    } else if params.trim().is_empty() {
        format!("{key}={}", g.coord_dim())
    } else {
        format!("{params},{key}={}", g.coord_dim())
    }
}

fn fit_value(table: &ProfileTable, b: &BoundExpr) -> Result<Value, CliError> {
    match fit_and_compare(table, b) {
        Ok(r) => Ok(json!(r)),
        Err(e @ BoundError::TooFewPoints { .. }) => Ok(json!({ "form": b.form.name(), "error": e.to_string() })),
        Err(e) => Err(e.into()),
    }
}

fn growth_upper(g: &Graph, a: &CheckArgs) -> Result<(Value, Value), CliError> {
    let envelope = sep_lower_envelope(g, a.nmax, &EnvelopeOptions::default())?;
    let b = BoundExpr::parse(BoundForm::GrowthUpperPolynomial, &with_default_dimension(g, &a.params, "d"))?;
    let fit = fit_value(&envelope, &b)?;
    let o = pick_vertex(g, a.vertex)?;
    let mut shells = Vec::new();
    for r in 1.. {
        let bl = ball(g, o, r);
        if bl.len() > a.nmax || bl.len() == g.vertex_count() {
            break;
        }
        let sub = induced_subgraph(g, &bl)?;
        let centre = bl.members().binary_search(&o).expect("centre lies in its ball") as u32;
        let s = ball_shell_cut(&sub, centre)?;
        shells.push(json!({ "radius": r, "size": bl.len(), "ratio": rational::format(&s.cut.ratio), "guarantee": s.guarantee, "within_guarantee": s.within_guarantee }));
    }
    let shell_failures = shells.iter().filter(|s| s["within_guarantee"] == json!(false)).count();
    let verdict = fit.get("verdict").cloned().unwrap_or(Value::Null);
    Ok((
        json!({ "fit": fit, "shells": shells }),
        json!({ "fit_verdict": verdict, "balls": shells.len(), "shell_failures": shell_failures }),
    ))
}

fn local_fits(g: &Graph, a: &CheckArgs, ctx: &Ctx, forms: &[BoundForm]) -> Result<(Value, Value), CliError> {
    let v = pick_vertex(g, a.vertex)?;
    let table = local_sep_with(g, v, a.nmax, &LocalOptions { budget: ctx.budget, ..LocalOptions::default() })?;
    let mut fits = Vec::new();
    for &form in forms {
        let params = if form == BoundForm::PercolationLower { with_default_dimension(g, &a.params, "d") } else { a.params.clone() };
        fits.push(fit_value(&table, &BoundExpr::parse(form, &params)?)?);
    }
    let summary: Vec<Value> = forms
        .iter()
        .zip(&fits)
        .map(|(f, r)| json!({ "form": f.name(), "verdict": r.get("verdict").cloned().unwrap_or(Value::Null) }))
        .collect();
    Ok((json!({ "vertex": v, "profile": table, "fits": fits }), json!(summary)))
}

fn jv(g: &Graph, a: &CheckArgs, out: &mut Outputs) -> Result<(Value, Value), CliError> {
    let f = match &a.subset {
        Some(p) => induced_subgraph(g, &load_subset(g, p, out)?)?,
        None => g.clone(),
    };
    if f.coord_dim() == 0 {
        return Err(CliError::Precondition("the jv suite embeds by coordinates; the graph has none".into()));
    }
    let emb: Vec<Vec<f64>> =
        f.vertices().map(|v| f.coords(v).expect("coordinates").iter().map(|&c| c as f64).collect()).collect();
    let d = graph_distortion(&f, &emb, 2.0)?;
    let r = jv_consistency(&f, d.distortion, a.k)?;
    let consistent = r.consistent;
    Ok((json!({ "distortion": d, "check": r }), json!({ "consistent": consistent })))
}
