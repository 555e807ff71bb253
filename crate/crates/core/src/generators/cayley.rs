use std::collections::HashMap;

use serde::Serialize;

use super::{GenError, DEFAULT_VERTEX_CAP};
use crate::graph::{Graph, VertexId};

/// A finitely generated group with its standard symmetric generating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupSpec {
    /// Z^d with generators ±e_i.
    FreeAbelian(u32),
    /// Integer upper unitriangular 3×3 matrices, generators x = I+E₁₂, y = I+E₂₃ and inverses.
    /// An element is stored as (a, b, c) for the matrix [[1,a,c],[0,1,b],[0,0,1]].
    Heisenberg3,
    /// Z₂ ≀ Z with generators t, t⁻¹ (move the cursor) and a (toggle the lamp at the cursor).
    /// An element is stored as (cursor, sorted lit lamps).
    LamplighterZ2overZ,
}

impl GroupSpec {
    pub fn degree(&self) -> usize {
        match self {
            GroupSpec::FreeAbelian(d) => 2 * *d as usize,
            GroupSpec::Heisenberg3 => 4,
            GroupSpec::LamplighterZ2overZ => 3,
        }
    }

    pub fn identity(&self) -> Vec<i64> {
        match self {
            GroupSpec::FreeAbelian(d) => vec![0; *d as usize],
            GroupSpec::Heisenberg3 => vec![0, 0, 0],
            GroupSpec::LamplighterZ2overZ => vec![0],
        }
    }

    /// Right multiplication of `g` by generator number `s` (0-based, `s < degree`).
    pub fn mul_generator(&self, g: &[i64], s: usize) -> Vec<i64> {
        match self {
            GroupSpec::FreeAbelian(_) => {
                let mut h = g.to_vec();
                h[s / 2] += if s % 2 == 0 { 1 } else { -1 };
                h
            }
            GroupSpec::Heisenberg3 => {
                let (a, b, c) = (g[0], g[1], g[2]);
                // (a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b')
                match s {
                    0 => vec![a + 1, b, c],
                    1 => vec![a - 1, b, c],
                    2 => vec![a, b + 1, c + a],
                    _ => vec![a, b - 1, c - a],
                }
            }
            GroupSpec::LamplighterZ2overZ => {
                let cursor = g[0];
                match s {
                    0 => with_cursor(g, cursor + 1),
                    1 => with_cursor(g, cursor - 1),
                    _ => {
                        let mut lamps = g[1..].to_vec();
                        match lamps.binary_search(&cursor) {
                            Ok(i) => {
                                lamps.remove(i);
                            }
                            Err(i) => lamps.insert(i, cursor),
                        }
                        let mut h = vec![cursor];
                        h.extend(lamps);
                        h
                    }
                }
            }
        }
    }

    fn tag(&self) -> String {
        match self {
            GroupSpec::FreeAbelian(d) => format!("Z{d}"),
            GroupSpec::Heisenberg3 => "heisenberg3".into(),
            GroupSpec::LamplighterZ2overZ => "lamplighter".into(),
        }
    }
}

fn with_cursor(g: &[i64], cursor: i64) -> Vec<i64> {
    let mut h = g.to_vec();
    h[0] = cursor;
    h
}

/// Ball of radius R around the identity in the Cayley graph (right multiplication).
/// Interior is the ball of radius R−1.
pub fn cayley_ball(spec: GroupSpec, radius: u32) -> Result<Graph, GenError> {
    cayley_ball_capped(spec, radius, DEFAULT_VERTEX_CAP)
}

pub fn cayley_ball_capped(spec: GroupSpec, radius: u32, cap: u64) -> Result<Graph, GenError> {
    if radius == 0 {
        return Err(GenError::InvalidConfig("Cayley ball needs R >= 1".into()));
    }
    if let GroupSpec::FreeAbelian(0) = spec {
        return Err(GenError::InvalidConfig("FreeAbelian needs d >= 1".into()));
    }
    let deg = spec.degree();
    let mut dist: HashMap<Vec<i64>, u32> = HashMap::new();
    let id = spec.identity();
    dist.insert(id.clone(), 0);
    let mut frontier = vec![id];
    for r in 1..=radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in 0..deg {
                let h = spec.mul_generator(g, s);
                if !dist.contains_key(&h) {
                    dist.insert(h.clone(), r);
                    next.push(h);
                    if dist.len() as u64 > cap {
                        return Err(GenError::SizeOverflow { size: dist.len() as u64, cap });
                    }
                }
            }
        }
        frontier = next;
    }
    let mut elems: Vec<Vec<i64>> = dist.keys().cloned().collect();
    elems.sort();
    let index: HashMap<&Vec<i64>, VertexId> = elems.iter().enumerate().map(|(i, e)| (e, i as VertexId)).collect();
    let mut edges = Vec::new();
    for (i, g) in elems.iter().enumerate() {
        for s in 0..deg {
            if let Some(&j) = index.get(&spec.mul_generator(g, s)) {
                if (i as VertexId) < j {
                    edges.push((i as VertexId, j));
                }
            }
        }
    }
    let interior = elems.iter().map(|e| dist[e] < radius).collect();
    let origin = index[&spec.identity()];
    let mut g = Graph::new(elems.len(), &edges, deg, interior, format!("cayley-{}-R{radius}", spec.tag()))?
        .with_ambient_degree(deg)?
        .with_origin(origin)?;
    if let GroupSpec::FreeAbelian(d) = spec {
        let coords = elems.iter().flatten().copied().collect();
        g = g.with_coords(d as usize, coords)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::lattice_window;

    #[test]
    fn small_balls() {
        assert_eq!(cayley_ball(GroupSpec::FreeAbelian(1), 2).unwrap().vertex_count(), 5);
        assert_eq!(cayley_ball(GroupSpec::Heisenberg3, 1).unwrap().vertex_count(), 5);
    }

    #[test]
    fn heisenberg_ball_sizes() {
        // Independent recount: BFS over explicit 3×3 integer matrices.
        type M = [[i64; 3]; 3];
        fn mm(a: &M, b: &M) -> M {
            let mut c = [[0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            c
        }
        let e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let mut x = e;
        x[0][1] = 1;
        let mut xi = e;
        xi[0][1] = -1;
        let mut y = e;
        y[1][2] = 1;
        let mut yi = e;
        yi[1][2] = -1;
        let gens = [x, xi, y, yi];
        let mut seen = std::collections::HashSet::from([e]);
        let mut frontier = vec![e];
        let mut sizes = vec![1usize];
        for _ in 0..4 {
            let mut next = Vec::new();
            for g in &frontier {
                for s in &gens {
                    let h = mm(g, s);
                    if seen.insert(h) {
                        next.push(h);
                    }
                }
            }
            frontier = next;
            sizes.push(seen.len());
        }
        for r in 1..=4u32 {
            assert_eq!(cayley_ball(GroupSpec::Heisenberg3, r).unwrap().vertex_count(), sizes[r as usize]);
        }
    }

    #[test]
    fn lamplighter_radius_two() {
        // Hand-run state machine: e; t, t⁻¹, a; t², t⁻², ta, t⁻¹a, at, at⁻¹.
        let g = cayley_ball(GroupSpec::LamplighterZ2overZ, 2).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.interior_count(), 4);
    }

    #[test]
    fn free_abelian_matches_lattice_window() {
        for (d, r) in [(1, 4), (2, 5), (3, 3)] {
            let a = cayley_ball(GroupSpec::FreeAbelian(d), r).unwrap();
            let b = lattice_window(d, r).unwrap();
            assert_eq!(a.vertex_count(), b.vertex_count());
            assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
            assert_eq!(a.interior_mask(), b.interior_mask());
            assert!(a.vertices().all(|v| a.coords(v) == b.coords(v)));
        }
    }

    #[test]
    fn generator_relabeling_keeps_ball_sizes() {
        // Swapping the roles of x and y is an automorphism up to relabelling.
        let spec = GroupSpec::Heisenberg3;
        let sizes = |order: [usize; 4]| {
            let mut seen = std::collections::HashSet::from([spec.identity()]);
            let mut frontier = vec![spec.identity()];
            let mut out = vec![];
            for _ in 0..4 {
                let mut next = vec![];
                for g in &frontier {
                    for &s in &order {
                        let h = spec.mul_generator(g, s);
                        if seen.insert(h.clone()) {
                            next.push(h);
                        }
                    }
                }
                frontier = next;
                out.push(seen.len());
            }
            out
        };
        assert_eq!(sizes([0, 1, 2, 3]), sizes([2, 3, 1, 0]));
    }
}
