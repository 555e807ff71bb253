use serde::Serialize;

use super::BoundError;
use crate::cuts::{cheeger_exact, cheeger_sweep};
use crate::graph::{bfs_distances, is_connected, Graph};
use crate::profiles::ProfileError;
use crate::rational::to_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    /// max d(x,y)/‖F(x) − F(y)‖ after normalisation.
    pub distortion: f64,
    /// Factor the embedding was divided by to make it 1-Lipschitz (1 when it already was).
    pub scale: f64,
    /// A pair attaining the maximum.
    pub worst_pair: (usize, usize),
}

fn lp_distance(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Distortion of `embedding` (one point of ℓ_p per row) against the finite metric `dist`.
/// The embedding is rescaled if it stretches some pair.
pub fn distortion(dist: &[Vec<f64>], embedding: &[Vec<f64>], p: f64) -> Result<DistortionReport, BoundError> {
    let n = dist.len();
    if embedding.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(BoundError::InvalidParameter("metric and embedding sizes differ".into()));
    }
    if !(p >= 1.0) {
        return Err(BoundError::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    let dim = embedding.first().map_or(0, Vec::len);
    if embedding.iter().any(|e| e.len() != dim) {
        return Err(BoundError::InvalidParameter("embedding rows differ in dimension".into()));
    }
    let mut stretch: f64 = 0.0;
    let mut worst = (0.0, (0, 0));
    for i in 0..n {
        for j in i + 1..n {
            let d = dist[i][j];
            if !(d > 0.0 && d.is_finite()) {
                return Err(BoundError::InvalidParameter(format!("distance between {i} and {j} is {d}")));
            }
            let e = lp_distance(&embedding[i], &embedding[j], p);
            if e == 0.0 {
                return Err(BoundError::DegenerateEmbedding(i, j));
            }
            stretch = stretch.max(e / d);
            if d / e > worst.0 {
                worst = (d / e, (i, j));
            }
        }
    }
    let scale = stretch.max(1.0);
    Ok(DistortionReport { distortion: worst.0 * scale, scale, worst_pair: worst.1 })
}

/// Distortion of coordinates assigned to the vertices of a connected graph, measured
/// against the graph metric.
pub fn graph_distortion(g: &Graph, embedding: &[Vec<f64>], p: f64) -> Result<DistortionReport, BoundError> {
    if !is_connected(g, None) {
        return Err(BoundError::InvalidParameter("graph must be connected".into()));
    }
    let dist: Vec<Vec<f64>> =
        g.vertices().map(|v| bfs_distances(g, v).into_iter().map(|d| d as f64).collect()).collect();
    distortion(&dist, embedding, p)
}

/// Check of c_p(X) ≥ K·ln(n)·h(X) using a measured distortion as a stand-in for c_p.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JvReport {
    pub n: usize,
    pub h_lo: f64,
    pub h_hi: f64,
    pub distortion: f64,
    pub k: f64,
    /// distortion/(ln n·h_lo): the largest K the measurement allows.
    pub k_max: f64,
    pub consistent: bool,
    pub note: String,
}

/// The measured distortion only bounds c_p from above, so a failure can come from the
/// unknown constant K and is never a refutation.
pub fn jv_consistency(f: &Graph, distortion_value: f64, k: f64) -> Result<JvReport, BoundError> {
    let n = f.vertex_count();
    if n < 2 {
        return Err(BoundError::DomainError("needs at least two vertices".into()));
    }
    let c = if n <= 20 { cheeger_exact(f) } else { cheeger_sweep(f) }.map_err(ProfileError::from)?;
    let (h_lo, h_hi) = (to_f64(&c.lo), to_f64(&c.hi));
    let rhs = k * (n as f64).ln() * h_lo;
    let consistent = distortion_value >= rhs * (1.0 - 1e-12);
    let k_max = if h_lo > 0.0 { distortion_value / ((n as f64).ln() * h_lo) } else { f64::INFINITY };
    let note = if consistent {
        "measured distortion dominates K·ln(n)·h".to_string()
    } else {
        format!("inconclusive: any K <= {k_max:.6} is consistent with the measurement")
    };
    Ok(JvReport { n, h_lo, h_hi, distortion: distortion_value, k, k_max, consistent, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::lattice_window;
    use crate::graph::{ball, induced_subgraph};

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges, 2, vec![true; n], "path").unwrap()
    }

    #[test]
    fn path_on_the_line_is_isometric() {
        let g = path(7);
        let emb: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64]).collect();
        let r = graph_distortion(&g, &emb, 2.0).unwrap();
        assert_eq!(r.distortion, 1.0);
        assert_eq!(r.scale, 1.0);
    }

    #[test]
    fn square_corners() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], 2, vec![true; 4], "c4").unwrap();
        let emb = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let r = graph_distortion(&g, &emb, 2.0).unwrap();
        assert!((r.distortion - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.worst_pair == (0, 2) || r.worst_pair == (1, 3));
        // Doubling the picture is rescaled away.
        let big: Vec<Vec<f64>> = emb.iter().map(|v| v.iter().map(|x| 2.0 * x).collect()).collect();
        let r2 = graph_distortion(&g, &big, 2.0).unwrap();
        assert_eq!(r2.scale, 2.0);
        assert!((r2.distortion - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn plane_box_by_pair_scan() {
        let g = lattice_window(2, 6).unwrap();
        let o = g.origin().unwrap();
        let b = ball(&g, o, 2);
        let sub = induced_subgraph(&g, &b).unwrap();
        let emb: Vec<Vec<f64>> = b.iter().map(|v| g.coords(v).unwrap().iter().map(|&c| c as f64).collect()).collect();
        let r = graph_distortion(&sub, &emb, 2.0).unwrap();
        // Independent scan: graph distance in the diamond is the ℓ₁ distance.
        let mut worst: f64 = 0.0;
        for a in &emb {
            for c in &emb {
                let l1: f64 = a.iter().zip(c).map(|(x, y)| (x - y).abs()).sum();
                let l2: f64 = a.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                if l2 > 0.0 {
                    worst = worst.max(l1 / l2);
                }
            }
        }
        assert!((r.distortion - worst).abs() < 1e-12);
        assert!((worst - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_rejected() {
        let g = path(3);
        let emb = vec![vec![0.0], vec![1.0], vec![0.0]];
        assert_eq!(graph_distortion(&g, &emb, 1.0).unwrap_err(), BoundError::DegenerateEmbedding(0, 2));
    }

    #[test]
    fn jv_on_an_edge() {
        let g = path(2);
        let r = jv_consistency(&g, 1.0, 1.0 / 2f64.ln()).unwrap();
        assert!(r.consistent);
        let r = jv_consistency(&g, 1.0, 2.0).unwrap();
        assert!(!r.consistent && (r.k_max - 1.0 / 2f64.ln()).abs() < 1e-12);
        assert!(matches!(jv_consistency(&path(1), 1.0, 1.0), Err(BoundError::DomainError(_))));
    }
}
