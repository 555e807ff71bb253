use serde::Serialize;

use super::{CutError, CutFlag};
use crate::graph::{bfs_layers, is_connected, CutResult, Graph, VertexId, VertexSet};
use crate::rational::{to_f64, Rational};

/// Result of cutting F along a BFS shell around a vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellReport {
    pub cut: CutResult,
    pub radius: u32,
    /// Largest radius whose ball holds at most half of F.
    pub n0: u32,
    /// Cumulative ball sizes β_r inside F.
    pub ball_sizes: Vec<u64>,
    /// 2·D·ln(β_{n0})/n0 with D the degree bound; absent when n0 = 0.
    pub guarantee: Option<f64>,
    pub within_guarantee: Option<bool>,
    pub flags: Vec<CutFlag>,
}

/// Edges between layer r and layer r+1, i.e. the boundary of the radius-r ball.
fn shell_edges(g: &Graph, layers: &[Vec<VertexId>], dist_of: &[u32], r: usize) -> u64 {
    layers.get(r + 1).map_or(0, |next| {
        next.iter()
            .map(|&w| g.neighbors(w).iter().filter(|&&u| dist_of[u as usize] == r as u32).count() as u64)
            .sum()
    })
}

fn distances(n: usize, layers: &[Vec<VertexId>]) -> Vec<u32> {
    let mut d = vec![u32::MAX; n];
    for (r, layer) in layers.iter().enumerate() {
        for &v in layer {
            d[v as usize] = r as u32;
        }
    }
    d
}

/// Cuts F (the whole graph) along the best BFS shell around `x`: with n0 the largest radius
/// whose ball holds at most half of F, radii ⌊n0/2⌋..=n0 are scanned for the least ratio.
pub fn ball_shell_cut(f: &Graph, x: VertexId) -> Result<ShellReport, CutError> {
    let n = f.vertex_count();
    if x as usize >= n {
        return Err(CutError::InvalidVertex(x));
    }
    if n < 2 {
        return Err(CutError::HypothesisFailed("a single vertex has no cut".into()));
    }
    if !is_connected(f, None) {
        return Err(CutError::Disconnected);
    }
    let layers = bfs_layers(f, x, None);
    let dist = distances(n, &layers);
    let sizes: Vec<u64> = layers
        .iter()
        .scan(0u64, |acc, l| {
            *acc += l.len() as u64;
            Some(*acc)
        })
        .collect();
    let n0 = sizes.iter().rposition(|&b| 2 * b <= n as u64).unwrap_or(0);
    let mut best: Option<(u64, usize)> = None;
    for l in n0 / 2..=n0 {
        let b = shell_edges(f, &layers, &dist, l);
        let better = best.map_or(true, |(bb, bl)| (b as u128) * (sizes[bl] as u128) < (bb as u128) * (sizes[l] as u128));
        if better {
            best = Some((b, l));
        }
    }
    let (b, l) = best.unwrap();
    let part = VertexSet::new(n, layers[..=l].iter().flatten().copied())?;
    let cut = CutResult::new(part, b);
    let mut flags = vec![];
    if n0 == 0 {
        flags.push(CutFlag::Degenerate);
    }
    let guarantee = (n0 > 0).then(|| 2.0 * f.max_degree() as f64 * (sizes[n0] as f64).ln() / n0 as f64);
    let within_guarantee = guarantee.map(|g| to_f64(&cut.ratio) <= g);
    Ok(ShellReport { cut, radius: l as u32, n0: n0 as u32, ball_sizes: sizes, guarantee, within_guarantee, flags })
}

/// Result of the doubling-shell search around a vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub cut: CutResult,
    pub radius: u32,
    /// log₂(A)/r at the returned radius.
    pub log_bound: f64,
    pub log_bound_holds: bool,
    /// D·(A^{1/m} − 1): if every shell ratio on [m, 2m) exceeded ε, then A > (1+ε)^m.
    pub growth_bound: f64,
    pub growth_bound_holds: bool,
}

/// Ball B(v, r), m ≤ r ≤ 2m, of least boundary ratio in the ambient graph, given the
/// doubling premise |B(v,2m)| ≤ A·|B(v,m)| and an interior B(v,2m).
pub fn doubling_shell_search(g: &Graph, v: VertexId, m: u32, a_ratio: Rational) -> Result<DoublingReport, CutError> {
    let n = g.vertex_count();
    if v as usize >= n {
        return Err(CutError::InvalidVertex(v));
    }
    if m == 0 {
        return Err(CutError::HypothesisFailed("m must be at least 1".into()));
    }
    let layers = bfs_layers(g, v, Some(2 * m + 1));
    if layers.len() <= 2 * m as usize || layers[..=2 * m as usize].iter().flatten().any(|&u| !g.is_interior(u)) {
        return Err(CutError::HypothesisFailed(format!("B(v,{}) is not interior", 2 * m)));
    }
    let dist = distances(n, &layers);
    let size_at = |r: usize| layers[..=r].iter().map(|l| l.len() as u64).sum::<u64>();
    let (bm, b2m) = (size_at(m as usize), size_at(2 * m as usize));
    if Rational::from_integer(b2m as i128) > a_ratio * Rational::from_integer(bm as i128) {
        return Err(CutError::HypothesisFailed(format!("|B(v,2m)| = {b2m} exceeds A·|B(v,m)| with |B(v,m)| = {bm}")));
    }
    let mut best: Option<(u64, u64, usize)> = None;
    for r in m as usize..=2 * m as usize {
        let b = shell_edges(g, &layers, &dist, r);
        let s = size_at(r);
        if best.map_or(true, |(bb, bs, _)| (b as u128) * (bs as u128) < (bb as u128) * (s as u128)) {
            best = Some((b, s, r));
        }
    }
    let (b, _, r) = best.unwrap();
    let part = VertexSet::new(n, layers[..=r].iter().flatten().copied())?;
    let cut = CutResult::new(part, b);
    let a = to_f64(&a_ratio);
    let ratio = to_f64(&cut.ratio);
    let log_bound = a.log2() / r as f64;
    let growth_bound = g.max_degree() as f64 * (a.powf(1.0 / m as f64) - 1.0);
    Ok(DoublingReport {
        cut,
        radius: r as u32,
        log_bound,
        log_bound_holds: ratio <= log_bound,
        growth_bound,
        growth_bound_holds: ratio <= growth_bound * (1.0 + 1e-12),
    })
}
