use std::collections::HashMap;

use super::{GenError, DEFAULT_VERTEX_CAP};
use crate::graph::{Graph, VertexId};

/// Number of points of Z^d with ℓ¹ norm at most `r`: Σ_k 2^k C(d,k) C(r,k).
pub fn l1_ball_size(d: u32, r: u64) -> u64 {
    let mut total: u128 = 0;
    let mut cd: u128 = 1; // C(d, k)
    let mut cr: u128 = 1; // C(r, k)
    for k in 0..=d as u128 {
        if k > 0 {
            cd = cd * (d as u128 - k + 1) / k;
            if (r as u128) < k {
                break;
            }
            cr = cr * (r as u128 - k + 1) / k;
        }
        total = total.saturating_add((1u128 << k) * cd * cr);
    }
    total.min(u64::MAX as u128) as u64
}

/// Lattice points of the ℓ¹ ball of radius `r` in lexicographic order.
pub(crate) fn l1_points(d: usize, r: i64) -> Vec<Vec<i64>> {
    fn rec(d: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for c in -budget..=budget {
            prefix.push(c);
            rec(d, budget - c.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, r, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Builds the graph on `points` (lexicographically sorted) with unit-step edges.
pub(crate) fn unit_step_graph(
    points: &[Vec<i64>],
    max_degree: usize,
    interior: Vec<bool>,
    label: String,
) -> Result<Graph, GenError> {
    let d = points.first().map_or(0, |p| p.len());
    let index: HashMap<&[i64], VertexId> =
        points.iter().enumerate().map(|(i, p)| (p.as_slice(), i as VertexId)).collect();
    let mut edges = Vec::new();
    let mut probe = vec![0i64; d];
    for (i, p) in points.iter().enumerate() {
        for axis in 0..d {
            probe.copy_from_slice(p);
            probe[axis] += 1;
            if let Some(&j) = index.get(probe.as_slice()) {
                edges.push((i as VertexId, j));
            }
        }
    }
    let coords = points.iter().flatten().copied().collect();
    let g = Graph::new(points.len(), &edges, max_degree, interior, label)?.with_coords(d, coords)?;
    Ok(g)
}

/// The ℓ¹ ball B(0, R) of Z^d. Interior is B(0, R−1); ambient degree 2d.
pub fn lattice_window(d: u32, radius: u32) -> Result<Graph, GenError> {
    lattice_window_capped(d, radius, DEFAULT_VERTEX_CAP)
}

pub fn lattice_window_capped(d: u32, radius: u32, cap: u64) -> Result<Graph, GenError> {
    if d == 0 || radius == 0 {
        return Err(GenError::InvalidConfig("lattice window needs d >= 1 and R >= 1".into()));
    }
    let size = l1_ball_size(d, radius as u64);
    if size > cap {
        return Err(GenError::SizeOverflow { size, cap });
    }
    let points = l1_points(d as usize, radius as i64);
    let interior = points.iter().map(|p| p.iter().map(|c| c.abs()).sum::<i64>() < radius as i64).collect();
    let origin = points.binary_search(&vec![0; d as usize]).unwrap() as VertexId;
    let g = unit_step_graph(&points, 2 * d as usize, interior, format!("lattice-d{d}-R{radius}"))?
        .with_ambient_degree(2 * d as usize)?
        .with_origin(origin)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, edge_boundary, VertexSet};

    #[test]
    fn line_window() {
        let g = lattice_window(1, 3).unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.interior_count(), 5);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn square_window_sizes() {
        assert_eq!(lattice_window(2, 2).unwrap().vertex_count(), 13);
        assert_eq!(lattice_window(2, 1).unwrap().interior_count(), 1);
        assert_eq!(lattice_window(2, 6).unwrap().vertex_count(), 85);
        for r in 0..8u64 {
            assert_eq!(l1_ball_size(2, r), 2 * r * r + 2 * r + 1);
        }
        assert_eq!(l1_ball_size(3, 1), 7);
        assert_eq!(l1_ball_size(1, 5), 11);
    }

    #[test]
    fn balls_match_closed_form() {
        let g = lattice_window(2, 6).unwrap();
        let o = g.origin().unwrap();
        for r in 0..=6u32 {
            let r64 = r as usize;
            assert_eq!(ball(&g, o, r).len(), 2 * r64 * r64 + 2 * r64 + 1);
        }
    }

    #[test]
    fn unit_square_boundary_is_eight() {
        let g = lattice_window(2, 4).unwrap();
        let find = |x: i64, y: i64| g.vertices().find(|&v| g.coords(v).unwrap() == [x, y]).unwrap();
        let sq = VertexSet::new(g.vertex_count(), [find(0, 0), find(1, 0), find(0, 1), find(1, 1)]).unwrap();
        let b = edge_boundary(&g, &sq);
        assert_eq!(b.edges, 8);
        assert!(b.ambient_exact);
        let single = VertexSet::new(g.vertex_count(), [find(0, 0)]).unwrap();
        assert_eq!(edge_boundary(&g, &single).edges, 4);
    }

    #[test]
    fn size_cap_enforced() {
        assert!(matches!(lattice_window_capped(3, 50, 1000), Err(GenError::SizeOverflow { .. })));
        assert!(lattice_window(0, 3).is_err());
    }
}
