use serde::Serialize;

use super::lattice::unit_step_graph;
use super::{GenError, DEFAULT_VERTEX_CAP};
use crate::graph::{Graph, VertexId};

/// Bernoulli bond percolation on the box [−L, L]^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercolationConfig {
    pub dimension: u32,
    pub box_half_width: u32,
    pub p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercolationStats {
    pub box_volume: u64,
    pub cluster_size: u64,
    pub density: f64,
    pub open_edges: u64,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Coin in [0, 1) for the edge from `min_endpoint` along `axis`. A pure function of its
/// arguments, so an edge open at p is open at every p' > p.
pub fn edge_coin(seed: u64, min_endpoint: &[i64], axis: u32) -> f64 {
    let mut h = mix64(seed);
    for &c in min_endpoint {
        h = mix64(h ^ c as u64);
    }
    h = mix64(h ^ (axis as u64).wrapping_add(0xA5A5));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Largest open cluster in the box. Interior vertices are those off the box faces.
/// The origin marker is placed on the cluster vertex nearest to 0 (Euclidean, then lexicographic).
pub fn percolation_cluster(cfg: &PercolationConfig) -> Result<(Graph, PercolationStats), GenError> {
    if cfg.dimension < 2 {
        return Err(GenError::InvalidConfig("percolation needs d >= 2".into()));
    }
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(GenError::InvalidConfig("p must lie in [0, 1]".into()));
    }
    let d = cfg.dimension as usize;
    let l = cfg.box_half_width as i64;
    let side = (2 * l + 1) as u64;
    let volume = (side as u128).pow(cfg.dimension);
    if volume > DEFAULT_VERTEX_CAP as u128 {
        return Err(GenError::SizeOverflow { size: volume.min(u64::MAX as u128) as u64, cap: DEFAULT_VERTEX_CAP });
    }
    let volume = volume as u64;
    let coord_of = |mut idx: u64, out: &mut [i64]| {
        for a in (0..d).rev() {
            out[a] = (idx % side) as i64 - l;
            idx /= side;
        }
    };
    let mut parent: Vec<u32> = (0..volume as u32).collect();
    let mut size = vec![1u32; volume as usize];
    let mut c = vec![0i64; d];
    let mut open_edges = 0u64;
    let mut stride = 1u64;
    let strides: Vec<u64> = (0..d)
        .rev()
        .map(|_| {
            let s = stride;
            stride *= side;
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    for idx in 0..volume {
        coord_of(idx, &mut c);
        for axis in 0..d {
            if c[axis] == l {
                continue;
            }
            if edge_coin(cfg.seed, &c, axis as u32) < cfg.p {
                open_edges += 1;
                let (a, b) = (find(&mut parent, idx as u32), find(&mut parent, (idx + strides[axis]) as u32));
                if a != b {
                    let (big, small) = if size[a as usize] >= size[b as usize] { (a, b) } else { (b, a) };
                    parent[small as usize] = big;
                    size[big as usize] += size[small as usize];
                }
            }
        }
    }
    // Largest cluster; ties go to the cluster with the lexicographically smallest vertex.
    let mut best_root = u32::MAX;
    let mut best_size = 0u32;
    for idx in 0..volume as u32 {
        let r = find(&mut parent, idx);
        if size[r as usize] > best_size {
            best_size = size[r as usize];
            best_root = r;
        }
    }
    if best_size <= 1 {
        return Err(GenError::EmptyCluster);
    }
    let mut points = Vec::with_capacity(best_size as usize);
    for idx in 0..volume {
        if find(&mut parent, idx as u32) == best_root {
            coord_of(idx, &mut c);
            points.push(c.clone());
        }
    }
    let interior = points.iter().map(|p| p.iter().all(|&x| x.abs() < l)).collect();
    let mut g = unit_step_graph(&points, 2 * d, interior, String::new())?;
    // unit_step_graph links every lattice-adjacent pair; keep only open edges.
    let open: Vec<(VertexId, VertexId)> = g
        .edges()
        .filter(|&(u, v)| {
            let (pu, pv) = (&points[u as usize], &points[v as usize]);
            let axis = (0..d).find(|&a| pu[a] != pv[a]).unwrap();
            edge_coin(cfg.seed, pu, axis as u32) < cfg.p
        })
        .collect();
    let n = points.len();
    let origin = (0..n)
        .min_by_key(|&i| (points[i].iter().map(|x| x * x).sum::<i64>(), points[i].clone()))
        .unwrap() as VertexId;
    let label = format!("percolation-d{}-L{}-p{}-s{}", cfg.dimension, cfg.box_half_width, cfg.p, cfg.seed);
    let coords = points.iter().flatten().copied().collect();
    let interior = g.interior_mask().to_vec();
    g = Graph::new(n, &open, 2 * d, interior, label)?.with_coords(d, coords)?.with_origin(origin)?;
    let stats = PercolationStats {
        box_volume: volume,
        cluster_size: n as u64,
        density: n as f64 / volume as f64,
        open_edges,
    };
    Ok((g, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    fn cfg(p: f64, l: u32, seed: u64) -> PercolationConfig {
        PercolationConfig { dimension: 2, box_half_width: l, p, seed }
    }

    #[test]
    fn full_box_when_all_open() {
        let (g, s) = percolation_cluster(&cfg(1.0, 2, 7)).unwrap();
        assert_eq!(g.vertex_count(), 25);
        assert_eq!(g.edge_count(), 40);
        assert_eq!(g.interior_count(), 9);
        assert_eq!(s.density, 1.0);
        assert_eq!(g.coords(g.origin().unwrap()).unwrap(), &[0, 0]);
    }

    #[test]
    fn nothing_open_is_empty_cluster() {
        assert_eq!(percolation_cluster(&cfg(0.0, 3, 1)).unwrap_err(), GenError::EmptyCluster);
    }

    #[test]
    fn reproducible_and_connected() {
        let (a, _) = percolation_cluster(&cfg(0.6, 10, 42)).unwrap();
        let (b, _) = percolation_cluster(&cfg(0.6, 10, 42)).unwrap();
        assert_eq!(a, b);
        assert!(is_connected(&a, None));
    }

    #[test]
    fn coins_are_monotone_in_p() {
        for x in -3..3 {
            for y in -3..3 {
                for axis in 0..2 {
                    let u = edge_coin(9, &[x, y], axis);
                    assert!((0.0..1.0).contains(&u));
                    // Open at p implies open at any larger p'.
                    for (p, q) in [(0.3, 0.5), (0.5, 0.9)] {
                        assert!(!(u < p) || u < q);
                    }
                }
            }
        }
    }

    #[test]
    fn open_edges_stay_open_at_higher_p() {
        let (lo, _) = percolation_cluster(&cfg(0.55, 8, 3)).unwrap();
        for (u, v) in lo.edges() {
            let (pu, pv) = (lo.coords(u).unwrap(), lo.coords(v).unwrap());
            let axis = (0..2).find(|&a| pu[a] != pv[a]).unwrap();
            assert!(edge_coin(3, pu, axis as u32) < 0.8);
        }
        let (hi, _) = percolation_cluster(&cfg(0.8, 8, 3)).unwrap();
        assert!(hi.vertex_count() >= lo.vertex_count());
    }
}
