use serde::Serialize;
use std::collections::VecDeque;

use super::{Graph, GraphError, VertexId, VertexSet};

/// Edge boundary count with its ambient-exactness flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryCount {
    pub edges: u64,
    /// False when the set touches a non-interior vertex; the count is then window-relative.
    pub ambient_exact: bool,
}

/// Number of edges of `g` with exactly one endpoint in `a`.
pub fn edge_boundary(g: &Graph, a: &VertexSet) -> BoundaryCount {
    let mut edges = 0u64;
    let mut ambient_exact = true;
    for v in a.iter() {
        ambient_exact &= g.is_interior(v);
        edges += g.neighbors(v).iter().filter(|&&w| !a.contains(w)).count() as u64;
    }
    BoundaryCount { edges, ambient_exact }
}

/// Number of edges between `a` and `f \ a`.
pub fn internal_boundary(g: &Graph, f: &VertexSet, a: &VertexSet) -> Result<u64, GraphError> {
    if !a.is_subset(f) {
        return Err(GraphError::NotSubset);
    }
    let mut count = 0u64;
    for v in a.iter() {
        count += g.neighbors(v).iter().filter(|&&w| f.contains(w) && !a.contains(w)).count() as u64;
    }
    Ok(count)
}

/// The subgraph induced on `f`, relabelled `0..|f|` in increasing order of original id.
/// Every vertex of the result is interior. Coordinates and the origin carry over.
pub fn induced_subgraph(g: &Graph, f: &VertexSet) -> Result<Graph, GraphError> {
    if f.is_empty() {
        return Err(GraphError::EmptySet);
    }
    let mut local = vec![u32::MAX; g.vertex_count()];
    for (i, v) in f.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut edges = Vec::new();
    for v in f.iter() {
        for &w in g.neighbors(v) {
            if w > v && local[w as usize] != u32::MAX {
                edges.push((local[v as usize], local[w as usize]));
            }
        }
    }
    let mut h = Graph::new(f.len(), &edges, g.max_degree(), vec![true; f.len()], format!("induced:{}", g.label()))?;
    if g.coord_dim() > 0 {
        let coords = f.iter().flat_map(|v| g.coords(v).unwrap().to_vec()).collect();
        h = h.with_coords(g.coord_dim(), coords)?;
    }
    if let Some(o) = g.origin() {
        if f.contains(o) {
            h = h.with_origin(local[o as usize])?;
        }
    }
    Ok(h)
}

/// BFS distances from `v`, `u32::MAX` for unreachable vertices.
pub fn bfs_distances(g: &Graph, v: VertexId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[v as usize] = 0;
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &w in g.neighbors(u) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS layers from `v` up to radius `max_r` (inclusive). Layer `r` lists vertices at distance `r`.
pub(crate) fn bfs_layers(g: &Graph, v: VertexId, max_r: Option<u32>) -> Vec<Vec<VertexId>> {
    let mut seen = vec![false; g.vertex_count()];
    seen[v as usize] = true;
    let mut layers = vec![vec![v]];
    loop {
        if let Some(m) = max_r {
            if layers.len() as u32 > m {
                break;
            }
        }
        let mut next = Vec::new();
        for &u in layers.last().unwrap() {
            for &w in g.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layers.push(next);
    }
    layers
}

/// The ball of radius `r` around `v`.
pub fn ball(g: &Graph, v: VertexId, r: u32) -> VertexSet {
    let members: Vec<VertexId> = bfs_layers(g, v, Some(r)).into_iter().flatten().collect();
    VertexSet::from_members(g.vertex_count(), &members)
}

/// Ball sizes around a center inside a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub center: VertexId,
    /// `sizes[r]` = |B(center, r)|, listed until the window is exhausted.
    pub sizes: Vec<u64>,
    /// Largest radius whose ball is entirely interior; `None` if the center is not interior.
    pub exact_up_to: Option<u32>,
}

impl GrowthTable {
    /// Largest radius `r` with `sizes[r] <= n` (balls stop growing once the window is exhausted).
    pub fn radius_for(&self, n: u64) -> Option<u32> {
        let idx = self.sizes.partition_point(|&s| s <= n);
        if idx == 0 {
            None
        } else {
            Some(idx as u32 - 1)
        }
    }

    /// Ball size at radius `r`, saturating at the window size.
    pub fn size_at(&self, r: u32) -> u64 {
        *self.sizes.get(r as usize).unwrap_or_else(|| self.sizes.last().unwrap())
    }

    /// True once the whole window has been reached.
    pub fn exhausted_at(&self, r: u32) -> bool {
        r as usize + 1 >= self.sizes.len()
    }
}

pub fn growth_table(g: &Graph, v: VertexId) -> GrowthTable {
    let layers = bfs_layers(g, v, None);
    let mut sizes = Vec::with_capacity(layers.len());
    let mut total = 0u64;
    let mut exact_up_to = None;
    let mut all_interior = true;
    for (r, layer) in layers.iter().enumerate() {
        total += layer.len() as u64;
        sizes.push(total);
        all_interior &= layer.iter().all(|&u| g.is_interior(u));
        if all_interior {
            exact_up_to = Some(r as u32);
        }
    }
    GrowthTable { center: v, sizes, exact_up_to }
}

/// Connected components, each sorted, ordered by smallest member.
pub fn components(g: &Graph, within: Option<&VertexSet>) -> Vec<Vec<VertexId>> {
    let n = g.vertex_count();
    let allowed = |v: VertexId| within.map_or(true, |s| s.contains(v));
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let starts: Box<dyn Iterator<Item = VertexId>> = match within {
        Some(s) => Box::new(s.iter()),
        None => Box::new(g.vertices()),
    };
    for s in starts {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &w in g.neighbors(u) {
                if !seen[w as usize] && allowed(w) {
                    seen[w as usize] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected(g: &Graph, within: Option<&VertexSet>) -> bool {
    components(g, within).len() <= 1
}

/// Largest component of the subgraph induced on `within`; ties go to the lexicographically least.
pub fn largest_component(g: &Graph, within: &VertexSet) -> VertexSet {
    let comps = components(g, Some(within));
    let best = comps
        .into_iter()
        .min_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)))
        .unwrap_or_default();
    VertexSet::from_members(g.vertex_count(), &best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: u32, h: u32) -> Graph {
        let id = |x: u32, y: u32| y * w + x;
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < h {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        Graph::new((w * h) as usize, &edges, 4, vec![true; (w * h) as usize], "grid").unwrap()
    }

    #[test]
    fn empty_set_has_zero_boundary() {
        let g = grid(3, 3);
        assert_eq!(edge_boundary(&g, &VertexSet::empty(9)).edges, 0);
    }

    #[test]
    fn internal_boundary_of_path_middle() {
        let g = Graph::new(3, &[(0, 1), (1, 2)], 2, vec![true; 3], "p").unwrap();
        let f = VertexSet::full(3);
        let a = VertexSet::new(3, [1]).unwrap();
        assert_eq!(internal_boundary(&g, &f, &a).unwrap(), 2);
        assert_eq!(internal_boundary(&g, &f, &f).unwrap(), 0);
        let outside = VertexSet::new(3, [0]).unwrap();
        let small = VertexSet::new(3, [1, 2]).unwrap();
        assert_eq!(internal_boundary(&g, &outside, &small), Err(GraphError::NotSubset));
    }

    #[test]
    fn induced_square_is_four_cycle() {
        let g = grid(3, 3);
        let f = VertexSet::new(9, [0, 1, 3, 4]).unwrap();
        let h = induced_subgraph(&g, &f).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
        assert!((0..4).all(|v| h.degree(v) == 2 && h.is_interior(v)));
        assert_eq!(induced_subgraph(&g, &VertexSet::empty(9)), Err(GraphError::EmptySet));
    }

    #[test]
    fn induced_non_adjacent_pair_has_no_edges() {
        let g = grid(3, 3);
        let h = induced_subgraph(&g, &VertexSet::new(9, [0, 8]).unwrap()).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 0));
    }

    #[test]
    fn balls_are_nested_and_match_growth() {
        let g = grid(7, 7);
        let t = growth_table(&g, 24);
        for r in 0..6 {
            let b = ball(&g, 24, r);
            assert!(b.is_subset(&ball(&g, 24, r + 1)));
            assert_eq!(b.len() as u64, t.size_at(r));
        }
        assert_eq!(&t.sizes[..4], &[1, 5, 13, 25]);
        assert_eq!(t.radius_for(12), Some(1));
        assert_eq!(t.radius_for(13), Some(2));
    }

    #[test]
    fn isolated_vertex_growth() {
        let g = Graph::new(1, &[], 0, vec![true], "pt").unwrap();
        let t = growth_table(&g, 0);
        assert_eq!(t.sizes, vec![1]);
        assert_eq!(t.exact_up_to, Some(0));
    }

    #[test]
    fn components_and_largest() {
        let g = Graph::new(5, &[(0, 1), (2, 3), (3, 4)], 2, vec![true; 5], "x").unwrap();
        assert_eq!(components(&g, None), vec![vec![0, 1], vec![2, 3, 4]]);
        assert!(!is_connected(&g, None));
        assert_eq!(largest_component(&g, &VertexSet::full(5)).members(), &[2, 3, 4]);
    }
}
