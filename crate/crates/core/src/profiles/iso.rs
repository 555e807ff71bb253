use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{ProfileError, ProfileKind, ProfilePoint, ProfileTable};
use crate::budget::{Budget, BudgetConfig};
use crate::graph::{ConnectedSubsets, EnumOptions, Graph, VertexId, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy)]
pub struct IsoOptions {
    /// Restrict sets to interior vertices so every boundary is the ambient one.
    pub interior_only: bool,
    /// Cap on recorded minimizers per size.
    pub max_minimizers: usize,
    pub budget: BudgetConfig,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions { interior_only: true, max_minimizers: 4096, budget: BudgetConfig::default() }
    }
}

/// A set attaining Λ(|set|).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSetRecord {
    pub n: u64,
    pub set: Arc<VertexSet>,
    #[serde(with = "crate::rational::serde_str")]
    pub ratio: Rational,
    pub is_optimal_integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoResult {
    pub table: ProfileTable,
    pub records: Vec<OptimalSetRecord>,
    /// Least ratio among connected sets of each exact size (index = size).
    #[serde(skip)]
    pub size_minima: Vec<Option<Rational>>,
    pub sets_seen: u64,
    /// Set when the enumeration budget ran out; the table is then an upper bound.
    pub budget_cap: Option<u64>,
}

#[derive(Default, Clone)]
struct SizeBest {
    boundary: u64,
    sets: Vec<Vec<VertexId>>,
    truncated: bool,
}

fn merge_into(acc: &mut [Option<SizeBest>], part: Vec<Option<SizeBest>>, cap: usize) {
    for (a, p) in acc.iter_mut().zip(part) {
        let Some(p) = p else { continue };
        match a {
            None => *a = Some(p),
            Some(a) if p.boundary < a.boundary => *a = p,
            Some(a) if p.boundary == a.boundary => {
                let room = cap.saturating_sub(a.sets.len());
                a.truncated |= p.truncated || p.sets.len() > room;
                a.sets.extend(p.sets.into_iter().take(room));
            }
            _ => {}
        }
    }
}

pub fn iso_profile(g: &Graph, n_max: usize) -> Result<IsoResult, ProfileError> {
    iso_profile_with(g, n_max, &IsoOptions::default())
}

/// Λ(n) for n ≤ `n_max` over connected sets (a minimizer may always be replaced by one of
/// its components). The witness for Λ(n) is the least-ratio set of the largest size ≤ n,
/// lexicographically least among those, so n is optimal exactly when the witness has size n.
pub fn iso_profile_with(g: &Graph, n_max: usize, opts: &IsoOptions) -> Result<IsoResult, ProfileError> {
    if n_max == 0 {
        return Err(ProfileError::InvalidInput("n_max must be at least 1".into()));
    }
    let budget: Budget = opts.budget.start();
    let mut eo = EnumOptions::new(n_max);
    if opts.interior_only {
        eo = eo.allowed(g.interior_mask());
    }
    let roots = eo.root_list(g);
    let parts: Vec<(Vec<Option<SizeBest>>, u64)> = roots
        .par_iter()
        .map(|&r| {
            let mut best: Vec<Option<SizeBest>> = vec![None; n_max + 1];
            let mut it = ConnectedSubsets::with_roots(g, eo, vec![r]);
            let mut seen = 0u64;
            while let Some((set, b)) = it.advance() {
                if !budget.charge(1) {
                    break;
                }
                seen += 1;
                let slot = &mut best[set.len()];
                let keep = match slot {
                    None => true,
                    Some(s) => b <= s.boundary,
                };
                if !keep {
                    continue;
                }
                let mut sorted = set.to_vec();
                sorted.sort_unstable();
                match slot {
                    Some(s) if s.boundary == b => {
                        if s.sets.len() < opts.max_minimizers {
                            s.sets.push(sorted);
                        } else {
                            s.truncated = true;
                        }
                    }
                    _ => *slot = Some(SizeBest { boundary: b, sets: vec![sorted], truncated: false }),
                }
            }
            (best, seen)
        })
        .collect();
    let mut acc: Vec<Option<SizeBest>> = vec![None; n_max + 1];
    let mut sets_seen = 0;
    for (p, seen) in parts {
        sets_seen += seen;
        merge_into(&mut acc, p, opts.max_minimizers);
    }
    let complete = !budget.exhausted();
    let nv = g.vertex_count();
    let size_minima: Vec<Option<Rational>> = acc
        .iter()
        .enumerate()
        .map(|(s, b)| b.as_ref().map(|b| Rational::new(b.boundary as i128, s as i128)))
        .collect();
    let mut table = ProfileTable::new(ProfileKind::Iso, format!("iso:{}", g.label()));
    let mut records = Vec::new();
    let mut current: Option<(Rational, usize)> = None;
    for n in 1..=n_max {
        if let Some(r) = size_minima[n] {
            // Ties go to the larger size.
            if current.map_or(true, |(c, _)| r <= c) {
                current = Some((r, n));
            }
        }
        let Some((value, size)) = current else { break };
        let sb = acc[size].as_ref().unwrap();
        let lex_least = sb.sets.iter().min().unwrap();
        let witness = Arc::new(VertexSet::new(nv, lex_least.iter().copied())?);
        let mut p = ProfilePoint::new(n as u64, value).with_witness(witness.clone());
        p.exact = complete;
        p.ambient_certified = witness.iter().all(|v| g.is_interior(v));
        table.points.push(p);
        if size == n {
            for s in &sb.sets {
                let set = if s == lex_least { witness.clone() } else { Arc::new(VertexSet::new(nv, s.iter().copied())?) };
                records.push(OptimalSetRecord { n: n as u64, set, ratio: value, is_optimal_integer: true });
            }
        }
    }
    Ok(IsoResult { table, records, size_minima, sets_seen, budget_cap: (!complete).then(|| budget.cap()) })
}

/// Integers n for which some set of size exactly n attains Λ(n).
pub fn optimal_integers(table: &ProfileTable) -> Result<Vec<u64>, ProfileError> {
    if table.kind != ProfileKind::Iso {
        return Err(ProfileError::InvalidInput("optimal integers need an isoperimetric profile".into()));
    }
    if table.points.iter().any(|p| !p.exact) {
        return Err(ProfileError::InexactInput);
    }
    Ok(table.points.iter().filter(|p| p.witness_size == Some(p.n)).map(|p| p.n).collect())
}
