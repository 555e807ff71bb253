use std::collections::HashMap;
use std::sync::Arc;

use super::envelope::{candidate_sets, connected_piece, score_candidates, two_core, Candidate};
use super::sep::best_per_size;
use super::{CandidateFamily, EnvelopeOptions, ProfileError, ProfileKind, ProfilePoint, ProfileTable};
use crate::budget::BudgetConfig;
use crate::graph::{ball, growth_table, EnumOptions, Graph, GraphError, VertexId, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct LocalOptions {
    /// Containers up to this size are searched exhaustively.
    pub exact_limit: usize,
    /// Candidate families for larger containers; `allowed` and `center` are overridden.
    pub envelope: EnvelopeOptions,
    /// Radius ρ(n) for n = 1, 2, …; must be non-decreasing. Defaults to the largest r with
    /// |B(v,r)| ≤ n.
    pub radii: Option<Vec<u32>>,
    /// Reweighting rounds for the flow certificate of the container itself.
    pub container_flow_rounds: usize,
    /// The container gets the refined certificate whenever it has grown by this factor
    /// since the last refinement (and at the last radius); the plain one otherwise.
    pub refine_growth: f64,
    /// Containers up to this size always get the full candidate pool.
    pub full_pool_below: usize,
    pub budget: BudgetConfig,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions {
            exact_limit: 14,
            envelope: EnvelopeOptions {
                families: vec![CandidateFamily::Balls, CandidateFamily::Boxes],
                max_centers: 1,
                ..EnvelopeOptions::default()
            },
            radii: None,
            container_flow_rounds: 16,
            refine_growth: 1.25,
            full_pool_below: 256,
            budget: BudgetConfig::default(),
        }
    }
}

pub fn local_sep(g: &Graph, v: VertexId, n_max: usize) -> Result<ProfileTable, ProfileError> {
    local_sep_with(g, v, n_max, &LocalOptions::default())
}

/// Separation profile localised at v: for each n, the sup of |F|·h(F) over connected F of
/// size ≤ n inside B(v, ρ(n)). Small containers are searched exhaustively (exact points);
/// larger ones contribute certified candidates. A point is window-limited when the window
/// cannot confirm the radius, i.e. B(v, ρ(n)+1) is not entirely present.
pub fn local_sep_with(g: &Graph, v: VertexId, n_max: usize, opts: &LocalOptions) -> Result<ProfileTable, ProfileError> {
    if n_max == 0 {
        return Err(ProfileError::InvalidInput("n_max must be at least 1".into()));
    }
    if v as usize >= g.vertex_count() {
        return Err(GraphError::VertexOutOfRange(v, g.vertex_count()).into());
    }
    let growth = growth_table(g, v);
    let radii: Vec<u32> = match &opts.radii {
        Some(r) => {
            if r.len() < n_max {
                return Err(ProfileError::InvalidInput(format!("radius table covers {} of {n_max} sizes", r.len())));
            }
            if r.windows(2).any(|w| w[1] < w[0]) {
                return Err(ProfileError::InvalidInput("radius table must be non-decreasing".into()));
            }
            r[..n_max].to_vec()
        }
        None => (1..=n_max as u64).map(|n| growth.radius_for(n).unwrap_or(0)).collect(),
    };
    let own_ambient = g.interior_count() == g.vertex_count();
    let confirmed = |r: u32| {
        if opts.radii.is_some() {
            r == 0 || own_ambient || growth.exact_up_to.is_some_and(|e| e + 1 >= r)
        } else {
            own_ambient || growth.exact_up_to.is_some_and(|e| e >= r)
        }
    };

    let budget = opts.budget.start();
    let mut table = ProfileTable::new(ProfileKind::LocalSep, format!("local-sep:v{v}:{}", g.label()));
    let mut best: Option<(Rational, Arc<VertexSet>)> = None;
    let mut exact = true;
    let mut scored: HashMap<Vec<VertexId>, Rational> = HashMap::new();
    let mut refined_at = 0.0f64;
    let mut start = 0;
    while start < n_max {
        let r = radii[start];
        let end = radii[start..].iter().position(|&x| x != r).map_or(n_max, |k| start + k);
        let n_hi = end; // sizes start+1..=end share the radius
        let container = ball(g, v, r);
        let mask: Vec<bool> = (0..g.vertex_count() as VertexId).map(|u| container.contains(u)).collect();
        let mut fresh: Vec<Candidate> = Vec::new();
        if exact && container.len() <= opts.exact_limit.min(64) {
            let eo = EnumOptions::new(container.len().min(n_hi)).allowed(&mask);
            let bests = best_per_size(g, eo, container.members(), &budget);
            if budget.exhausted() {
                return Err(ProfileError::BudgetExceeded { cap: budget.cap() });
            }
            fresh.extend(bests.into_iter().flatten().map(|(value, members)| Candidate { members, value }));
        } else {
            exact = false;
            let whole = container.members().to_vec();
            let scheduled = end == n_max
                || whole.len() <= opts.full_pool_below
                || whole.len() as f64 >= refined_at * opts.refine_growth;
            // The full candidate pool is regenerated only on a geometric schedule of
            // container sizes; in between, the container and its 2-core stand in.
            let env = EnvelopeOptions { allowed: Some(mask), center: Some(v), ..opts.envelope.clone() };
            let mut sets = if scheduled { candidate_sets(g, n_hi, &env)? } else { Vec::new() };
            if whole.len() <= n_hi {
                let core = connected_piece(g, &two_core(g, &whole), Some(v));
                if !core.is_empty() {
                    sets.push(core);
                }
                if scheduled {
                    refined_at = whole.len() as f64;
                    let c = score_candidates(g, vec![whole], env.exact_limit, opts.container_flow_rounds)?;
                    fresh.extend(c);
                } else {
                    sets.push(whole);
                }
            }
            let (known, unknown): (Vec<_>, Vec<_>) = sets.into_iter().partition(|s| scored.contains_key(s));
            let new = score_candidates(g, unknown, env.exact_limit, env.flow_rounds)?;
            for c in &new {
                scored.insert(c.members.clone(), c.value);
            }
            fresh.extend(new);
            fresh.extend(known.into_iter().map(|members| Candidate { value: scored[&members], members }));
        }
        fresh.sort_by_key(|c| c.members.len());
        let mut next = fresh.iter().peekable();
        for n in start + 1..=end {
            while let Some(c) = next.peek() {
                if c.members.len() > n {
                    break;
                }
                if best.as_ref().map_or(true, |(b, _)| c.value > *b) {
                    best = Some((c.value, Arc::new(VertexSet::new(g.vertex_count(), c.members.iter().copied())?)));
                }
                next.next();
            }
            let (value, w) = best.clone().expect("the center alone is a candidate");
            let mut p = ProfilePoint::new(n as u64, value).with_witness(w);
            p.exact = exact;
            p.window_limited = !confirmed(r);
            p.ambient_certified = !p.window_limited;
            p.radius = Some(r);
            table.points.push(p);
        }
        start = end;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{lattice_window, percolation_cluster, PercolationConfig};
    use crate::profiles::{sep_exact, sep_lower_envelope};
    use crate::rational::rat;

    #[test]
    fn line_local_separation() {
        let g = lattice_window(1, 30).unwrap();
        let o = g.origin().unwrap();
        let t = local_sep(&g, o, 40).unwrap();
        assert_eq!(t.value(1), Some(rat(0, 1)));
        assert_eq!(t.value(2), Some(rat(0, 1)));
        for n in 3..=40 {
            assert_eq!(t.value(n), Some(rat(3, 1)), "n = {n}");
            assert_eq!(t.get(n).unwrap().radius, Some(((n - 1) / 2) as u32));
        }
        assert!(t.points.iter().all(|p| p.ambient_certified));
        assert!(t.get(14).unwrap().exact && !t.get(15).unwrap().exact);
    }

    #[test]
    fn bounded_by_global_separation() {
        let g = lattice_window(2, 6).unwrap();
        let o = g.origin().unwrap();
        let local = local_sep(&g, o, 12).unwrap();
        let global = sep_exact(&g, 12).unwrap();
        for p in &local.points {
            assert!(p.value <= global.value(p.n).unwrap());
        }
        assert_eq!(local.monotonicity_violation(), None);
        // |B(o,2)| = 13 > 12 so the container is B(o,1), a plus shape with |F|·h = 5.
        assert_eq!(local.value(12), Some(rat(5, 1)));
    }

    #[test]
    fn large_containers_give_certified_candidates() {
        let g = lattice_window(2, 20).unwrap();
        let o = g.origin().unwrap();
        let local = local_sep(&g, o, 300).unwrap();
        let env = sep_lower_envelope(&g, 300, &EnvelopeOptions::default()).unwrap();
        assert_eq!(local.monotonicity_violation(), None);
        assert!(local.value(300).unwrap() > rat(5, 1));
        assert!(local.value(300).unwrap() <= env.value(300).unwrap() * rat(2, 1));
        for p in &local.points {
            let w = p.witness.as_ref().unwrap();
            let r = p.radius.unwrap();
            assert!(w.is_subset(&ball(&g, o, r)));
            assert!(w.len() as u64 <= p.n);
        }
    }

    #[test]
    fn window_limits_follow_the_growth_table() {
        let cfg = PercolationConfig { dimension: 2, box_half_width: 12, p: 0.7, seed: 3 };
        let (g, _) = percolation_cluster(&cfg).unwrap();
        let o = g.origin().unwrap();
        let growth = growth_table(&g, o);
        let t = local_sep(&g, o, 400).unwrap();
        for p in &t.points {
            let r = p.radius.unwrap();
            assert_eq!(Some(r), growth.radius_for(p.n));
            assert_eq!(p.window_limited, !growth.exact_up_to.is_some_and(|e| e >= r));
        }
        assert!(t.points.last().unwrap().window_limited);
    }

    #[test]
    fn custom_radii_checked() {
        let g = lattice_window(1, 10).unwrap();
        let o = g.origin().unwrap();
        let bad = LocalOptions { radii: Some(vec![2, 1, 1]), ..LocalOptions::default() };
        assert!(local_sep_with(&g, o, 3, &bad).is_err());
        let fixed = LocalOptions { radii: Some(vec![3; 5]), ..LocalOptions::default() };
        let t = local_sep_with(&g, o, 5, &fixed).unwrap();
        assert_eq!(t.value(2), Some(rat(2, 1)));
        assert_eq!(t.value(5), Some(rat(3, 1)));
    }
}
