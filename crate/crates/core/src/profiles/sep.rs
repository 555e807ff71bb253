use std::sync::Arc;

use rayon::prelude::*;

use super::{ProfileError, ProfileKind, ProfilePoint, ProfileTable};
use crate::budget::{Budget, BudgetConfig};
use crate::cuts::min_connected_cut;
use crate::graph::{growth_table, ConnectedSubsets, EnumOptions, Graph, RootMode, VertexId, VertexSet};
use crate::rational::Rational;

pub const DEFAULT_SEP_THRESHOLD: usize = 14;

/// Symmetry used to restrict the search to sets anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Lattice translations; vertex ids follow lexicographic coordinate order, so every
    /// connected set has a translate whose least vertex is the origin.
    Translations,
    /// Left multiplication in a Cayley graph: every connected set has a translate through
    /// the identity.
    LeftTranslations,
}

/// Symmetry implied by the generator tag of a window.
pub fn window_symmetry(g: &Graph) -> Symmetry {
    let label = g.label();
    if g.origin().is_none() {
        return Symmetry::None;
    }
    if label.starts_with("lattice-") || label.starts_with("cayley-Z") {
        Symmetry::Translations
    } else if label.starts_with("cayley-") {
        Symmetry::LeftTranslations
    } else {
        Symmetry::None
    }
}

#[derive(Debug, Clone)]
pub struct SepOptions {
    pub threshold: usize,
    /// `None` picks the symmetry from the window tag.
    pub symmetry: Option<Symmetry>,
    pub budget: BudgetConfig,
}

impl Default for SepOptions {
    fn default() -> Self {
        SepOptions { threshold: DEFAULT_SEP_THRESHOLD, symmetry: None, budget: BudgetConfig::default() }
    }
}

/// Best |F|·h(F) per exact size, with the witness F (sorted).
pub(crate) type SizeBests = Vec<Option<(Rational, Vec<VertexId>)>>;

/// Scratch for building the bitmask adjacency of a small set.
struct Local {
    index: Vec<u8>,
}

impl Local {
    fn masks(&mut self, g: &Graph, sorted: &[VertexId]) -> Vec<u64> {
        for (i, &v) in sorted.iter().enumerate() {
            self.index[v as usize] = i as u8;
        }
        let adj = sorted
            .iter()
            .map(|&v| {
                g.neighbors(v).iter().fold(0u64, |m, &w| {
                    let i = self.index[w as usize];
                    if i != u8::MAX && sorted.get(i as usize) == Some(&w) {
                        m | 1 << i
                    } else {
                        m
                    }
                })
            })
            .collect();
        for &v in sorted {
            self.index[v as usize] = u8::MAX;
        }
        adj
    }
}

/// Walks the connected sets produced from `roots` and keeps, per size, the largest
/// |F|·h(F). A set is skipped as soon as it provably cannot beat the current best of its
/// size: |F|·(least internal degree) bounds |F|·h(F), and the cut search stops at the
/// first part of ratio at most best/|F|.
pub(crate) fn best_per_size(g: &Graph, eo: EnumOptions<'_>, roots: &[VertexId], budget: &Budget) -> SizeBests {
    let n_max = eo.max_size;
    let per_root = |rs: Vec<VertexId>| -> SizeBests {
        let mut best: SizeBests = vec![None; n_max + 1];
        let mut local = Local { index: vec![u8::MAX; g.vertex_count()] };
        let mut it = ConnectedSubsets::with_roots(g, eo, rs);
        let mut set: Vec<VertexId> = Vec::with_capacity(n_max);
        while let Some((s, _)) = it.advance() {
            set.clear();
            set.extend_from_slice(s);
            if !budget.charge(1) {
                break;
            }
            let k = set.len();
            if k == 1 {
                if best[1].is_none() {
                    best[1] = Some((Rational::from_integer(0), set.clone()));
                }
                continue;
            }
            let member = it.membership();
            let min_deg =
                set.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| member[w as usize]).count()).min().unwrap();
            let cur = best[k].as_ref().map(|b| b.0);
            if let Some(c) = cur {
                if Rational::from_integer((k * min_deg) as i128) <= c {
                    continue;
                }
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            let adj = local.masks(g, &sorted);
            let stop = cur.map(|c| {
                let t = c / Rational::from_integer(k as i128);
                (*t.numer() as u64, *t.denom() as u64)
            });
            let (cut, stopped) = min_connected_cut(&adj, k / 2, stop);
            if stopped {
                continue;
            }
            let cut = cut.expect("connected set of size >= 2");
            let value = Rational::new((k as u64 * cut.boundary as u64) as i128, cut.size as i128);
            best[k] = Some((value, sorted));
        }
        best
    };
    let parts: Vec<SizeBests> = if roots.len() == 1 {
        vec![per_root(roots.to_vec())]
    } else {
        roots.par_iter().map(|&r| per_root(vec![r])).collect()
    };
    let mut acc: SizeBests = vec![None; n_max + 1];
    for part in parts {
        for (a, p) in acc.iter_mut().zip(part) {
            let Some(p) = p else { continue };
            let replace = match a {
                None => true,
                Some(a) => p.0 > a.0 || (p.0 == a.0 && p.1 < a.1),
            };
            if replace {
                *a = Some(p);
            }
        }
    }
    acc
}

/// Running maximum of per-size bests as a table; ties keep the smaller witness.
pub(crate) fn bests_to_table(
    g: &Graph,
    bests: &SizeBests,
    kind: ProfileKind,
    label: String,
    exact: bool,
    certified: impl Fn(u64) -> bool,
) -> Result<ProfileTable, ProfileError> {
    let mut table = ProfileTable::new(kind, label);
    let mut current: Option<(Rational, Arc<VertexSet>)> = None;
    for (n, b) in bests.iter().enumerate().skip(1) {
        if let Some((v, w)) = b {
            if current.as_ref().map_or(true, |(c, _)| v > c) {
                current = Some((*v, Arc::new(VertexSet::new(g.vertex_count(), w.iter().copied())?)));
            }
        }
        let Some((value, w)) = &current else { break };
        let mut p = ProfilePoint::new(n as u64, *value).with_witness(w.clone());
        p.exact = exact;
        p.ambient_certified = certified(n as u64);
        table.points.push(p);
    }
    Ok(table)
}

pub fn sep_exact(g: &Graph, n_max: usize) -> Result<ProfileTable, ProfileError> {
    sep_exact_with(g, n_max, &SepOptions::default())
}

/// Sep(n) = max |F|·h(F) over connected F with |F| ≤ n, for n ≤ `n_max`.
/// With a symmetry only sets anchored at the origin are searched; points are certified for
/// the ambient graph while the window contains B(origin, n−1). Without symmetry, points are
/// certified only when the window is its own ambient graph (every vertex interior).
pub fn sep_exact_with(g: &Graph, n_max: usize, opts: &SepOptions) -> Result<ProfileTable, ProfileError> {
    if n_max == 0 {
        return Err(ProfileError::InvalidInput("n_max must be at least 1".into()));
    }
    if n_max > opts.threshold.min(64) {
        return Err(ProfileError::TooLarge { n: n_max as u64, threshold: opts.threshold as u64 });
    }
    let symmetry = opts.symmetry.unwrap_or_else(|| window_symmetry(g));
    let budget = opts.budget.start();
    let origin_set;
    let mut eo = EnumOptions::new(n_max);
    let roots: Vec<VertexId>;
    let certified: Box<dyn Fn(u64) -> bool>;
    match (symmetry, g.origin()) {
        (Symmetry::None, _) | (_, None) => {
            roots = g.vertices().collect();
            let own_ambient = g.interior_count() == g.vertex_count();
            certified = Box::new(move |n| n == 1 || own_ambient);
        }
        (sym, Some(o)) => {
            origin_set = VertexSet::new(g.vertex_count(), [o])?;
            let mode = if sym == Symmetry::Translations { RootMode::Minimum } else { RootMode::Meeting };
            eo = eo.roots(&origin_set, mode);
            roots = vec![o];
            let reach = growth_table(g, o).exact_up_to.map(|e| e as u64 + 2);
            certified = Box::new(move |n| n == 1 || reach.is_some_and(|r| n <= r));
        }
    }
    let bests = best_per_size(g, eo, &roots, &budget);
    let exact = !budget.exhausted();
    let table = bests_to_table(g, &bests, ProfileKind::Sep, format!("sep:{}", g.label()), exact, certified)?;
    if !exact {
        return Err(ProfileError::BudgetExceeded { cap: budget.cap() });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::cheeger_exact;
    use crate::generators::{cayley_ball, lattice_window, GroupSpec};
    use crate::graph::{enumerate_connected_subsets, induced_subgraph};
    use crate::rational::rat;

    /// Every connected subset, exact h by the cut module.
    fn brute(g: &Graph, n_max: usize) -> Vec<Rational> {
        let mut best = vec![rat(0, 1); n_max + 1];
        for f in enumerate_connected_subsets(g, n_max, None) {
            let h = cheeger_exact(&induced_subgraph(g, &f).unwrap()).unwrap().hi;
            let v = h * rat(f.len() as i128, 1);
            let k = f.len();
            best[k] = best[k].max(v);
        }
        (1..=n_max).map(|n| *best[1..=n].iter().max().unwrap()).collect()
    }

    #[test]
    fn line_separation_is_three() {
        let g = lattice_window(1, 10).unwrap();
        let t = sep_exact(&g, 9).unwrap();
        assert_eq!(t.value(1), Some(rat(0, 1)));
        assert_eq!(t.value(2), Some(rat(2, 1)));
        for n in 3..=9 {
            let p = t.get(n).unwrap();
            assert_eq!(p.value, rat(3, 1));
            assert_eq!(p.witness_size, Some(3));
            assert!(p.exact && p.ambient_certified);
        }
    }

    #[test]
    fn symmetric_search_matches_full_search() {
        let g = lattice_window(2, 5).unwrap();
        let sym = sep_exact(&g, 8).unwrap();
        let full = sep_exact_with(&g, 8, &SepOptions { symmetry: Some(Symmetry::None), ..SepOptions::default() }).unwrap();
        let oracle = brute(&g, 8);
        for n in 1..=8u64 {
            assert_eq!(sym.value(n), Some(oracle[n as usize - 1]));
            assert_eq!(full.value(n), Some(oracle[n as usize - 1]));
        }
    }

    #[test]
    fn heisenberg_left_translations() {
        let g = cayley_ball(GroupSpec::Heisenberg3, 4).unwrap();
        assert_eq!(window_symmetry(&g), Symmetry::LeftTranslations);
        let sym = sep_exact(&g, 6).unwrap();
        let oracle = brute(&g, 6);
        for n in 1..=6u64 {
            assert_eq!(sym.value(n), Some(oracle[n as usize - 1]));
        }
    }

    #[test]
    fn certification_follows_the_window() {
        let g = lattice_window(1, 6).unwrap();
        let t = sep_exact(&g, 9).unwrap();
        // The interior reaches radius 5, so the window holds B(o, 6) and certifies n ≤ 7.
        assert_eq!(t.certified_through(), 7);
        assert_eq!(t.value(9), Some(rat(3, 1)));
    }

    #[test]
    fn threshold_enforced() {
        let g = lattice_window(1, 30).unwrap();
        assert!(matches!(sep_exact(&g, 15), Err(ProfileError::TooLarge { .. })));
    }
}
