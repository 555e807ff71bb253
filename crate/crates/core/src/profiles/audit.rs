use serde::Serialize;

use super::{optimal_integers, IsoResult, ProfileError, ProfileKind, ProfileTable};
use crate::cuts::{cheeger_exact_with, cheeger_sweep};
use crate::graph::{edge_boundary, growth_table, induced_subgraph, Graph, VertexId, VertexSet};
use crate::rational::{to_f64, Rational};

/// One instance of 2·h(F) ≥ Λ(⌊|F|/2⌋) − Λ(|F|).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub n: u64,
    /// 2·h(F), or 2·Sep_lower(n)/n for the corollary.
    #[serde(with = "crate::rational::serde_str")]
    pub lhs: Rational,
    /// Λ(⌊n/2⌋) − Λ(n).
    #[serde(with = "crate::rational::serde_str")]
    pub rhs: Rational,
    pub holds: bool,
}

fn exact_h(g: &Graph, set: &VertexSet) -> Result<Rational, ProfileError> {
    let sub = induced_subgraph(g, set)?;
    Ok(cheeger_exact_with(&sub, set.len().clamp(24, 64))?.hi)
}

fn lambda_gap(table: &ProfileTable, n: u64) -> Option<Rational> {
    Some(table.value(n / 2)? - table.value(n)?)
}

/// Checks 2·h(F) ≥ Λ(⌊|F|/2⌋) − Λ(|F|) exactly for every recorded optimal set of size at
/// least 2 within the certified part of the table.
pub fn lemma_audit(g: &Graph, iso: &IsoResult) -> Result<Vec<LemmaCheck>, ProfileError> {
    if iso.budget_cap.is_some() {
        return Err(ProfileError::InexactInput);
    }
    let through = iso.table.certified_through();
    let mut out = Vec::new();
    for rec in iso.records.iter().filter(|r| r.n >= 2 && r.n <= through && r.is_optimal_integer) {
        let Some(rhs) = lambda_gap(&iso.table, rec.n) else { continue };
        let lhs = exact_h(g, &rec.set)? * Rational::from_integer(2);
        out.push(LemmaCheck { n: rec.n, lhs, rhs, holds: lhs >= rhs });
    }
    Ok(out)
}

/// Checks 2·Sep_lower(n)/n ≥ Λ(⌊n/2⌋) − Λ(n) at every optimal integer n ≥ 2, where
/// Sep_lower(n) is the larger of n·h(F) for the optimal witness F and the envelope value.
pub fn corollary_audit(
    g: &Graph,
    iso: &IsoResult,
    envelope: Option<&ProfileTable>,
) -> Result<Vec<LemmaCheck>, ProfileError> {
    let through = iso.table.certified_through();
    let mut out = Vec::new();
    for n in optimal_integers(&iso.table)?.into_iter().filter(|&n| n >= 2 && n <= through) {
        let Some(rhs) = lambda_gap(&iso.table, n) else { continue };
        let w = iso.table.get(n).and_then(|p| p.witness.clone()).expect("optimal points carry witnesses");
        let nn = Rational::from_integer(n as i128);
        let mut sep = exact_h(g, &w)? * nn;
        if let Some(v) = envelope.and_then(|e| e.value(n)) {
            sep = sep.max(v);
        }
        let lhs = sep * Rational::from_integer(2) / nn;
        out.push(LemmaCheck { n, lhs, rhs, holds: lhs >= rhs });
    }
    Ok(out)
}

/// Re-derives each witness's value independently of how the table was built and returns
/// the n whose witness does not support the stated value. Isoperimetric witnesses must
/// reproduce the ratio exactly; exact separation points must equal |F|·h(F); lower-bound
/// points must not exceed |F|·h(F) (or |F| times a sweep cut ratio for large F).
pub fn audit_witnesses(g: &Graph, table: &ProfileTable) -> Result<Vec<u64>, ProfileError> {
    let mut bad = Vec::new();
    for p in &table.points {
        let Some(w) = &p.witness else { continue };
        let size = Rational::from_integer(w.len() as i128);
        let ok = if w.len() as u64 > p.n {
            false
        } else {
            match table.kind {
                ProfileKind::Iso => Rational::new(edge_boundary(g, w).edges as i128, w.len() as i128) == p.value,
                ProfileKind::Growth => true,
                ProfileKind::Sep | ProfileKind::LocalSep => {
                    if w.len() <= 24 {
                        let v = exact_h(g, w)? * size;
                        if p.exact {
                            v == p.value
                        } else {
                            p.value <= v
                        }
                    } else {
                        let hi = cheeger_sweep(&induced_subgraph(g, w)?)?.hi;
                        !p.exact && p.value <= hi * size
                    }
                }
            }
        };
        if !ok {
            bad.push(p.n);
        }
    }
    Ok(bad)
}

/// Ball growth predicted by isoperimetry: with g = min Λ(n)·n^{1/d} over the certified
/// table and D the degree bound, |B(v,r)| ≥ b′·g^d·r^d where b′ = 1/(d^d·D^{2d−1}).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthConsistency {
    pub d: u32,
    pub b_prime: f64,
    pub g: f64,
    /// (r, |B(v,r)|, predicted lower bound, holds) for radii whose inner ball is interior
    /// and within the table's range.
    pub checks: Vec<(u32, u64, f64, bool)>,
    pub all_hold: bool,
}

pub fn growth_iso_consistency(
    g: &Graph,
    v: VertexId,
    iso: &ProfileTable,
    d: u32,
) -> Result<GrowthConsistency, ProfileError> {
    if iso.kind != ProfileKind::Iso || d == 0 {
        return Err(ProfileError::InvalidInput("needs an isoperimetric table and d ≥ 1".into()));
    }
    if v as usize >= g.vertex_count() {
        return Err(ProfileError::InvalidInput(format!("vertex {v} out of range")));
    }
    let through = iso.certified_through();
    if through == 0 {
        return Err(ProfileError::InexactInput);
    }
    let df = d as f64;
    let gmin = iso
        .points
        .iter()
        .take(through as usize)
        .map(|p| to_f64(&p.value) * (p.n as f64).powf(1.0 / df))
        .fold(f64::INFINITY, f64::min);
    let degree = g.ambient_degree().unwrap_or(g.max_degree()) as f64;
    let b_prime = 1.0 / (df.powf(df) * degree.powf(2.0 * df - 1.0));
    let growth = growth_table(g, v);
    let mut checks = Vec::new();
    if let Some(e) = growth.exact_up_to {
        for r in 1..=e + 1 {
            if growth.size_at(r - 1) > through {
                break;
            }
            let size = growth.size_at(r);
            let bound = b_prime * gmin.powf(df) * (r as f64).powf(df);
            checks.push((r, size, bound, size as f64 >= bound));
        }
    }
    let all_hold = checks.iter().all(|c| c.3);
    Ok(GrowthConsistency { d, b_prime, g: gmin, checks, all_hold })
}
