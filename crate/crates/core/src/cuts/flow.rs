use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{is_connected, Graph, VertexId};
use crate::rational::{upper_rational, Rational, ROUNDING_BITS};

const SOURCES_PER_CHUNK: usize = 32;
const FLOAT_MARGIN: f64 = 1e-9;
const REWEIGHT_STEP: f64 = 2.0;

/// Lower bound on h(F) from routing one unit between every ordered pair of vertices,
/// split evenly over shortest paths. If C is the largest edge load then for every part A
/// with |A| ≤ |F|/2, C·|∂A| ≥ 2|A|·|F∖A|, so |∂A|/|A| ≥ 2⌈|F|/2⌉/C.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowCertificate {
    /// Upper bound on the largest edge load.
    #[serde(with = "crate::rational::serde_str")]
    pub congestion: Rational,
    pub busiest_edge: (VertexId, VertexId),
    #[serde(with = "crate::rational::serde_str")]
    pub lower_bound: Rational,
}

/// Undirected edge id of every adjacency slot, plus the endpoints of each edge.
fn edge_index(g: &Graph) -> (Vec<u32>, Vec<(VertexId, VertexId)>) {
    let n = g.vertex_count();
    let slots = if n == 0 { 0 } else { g.slot_offset(n as VertexId - 1) + g.degree(n as VertexId - 1) };
    let mut of_slot = vec![0u32; slots];
    let mut edges = Vec::with_capacity(slots / 2);
    for u in g.vertices() {
        for (i, &v) in g.neighbors(u).iter().enumerate() {
            if u < v {
                let j = g.neighbors(v).binary_search(&u).unwrap();
                of_slot[g.slot_offset(u) + i] = edges.len() as u32;
                of_slot[g.slot_offset(v) + j] = edges.len() as u32;
                edges.push((u, v));
            }
        }
    }
    (of_slot, edges)
}

struct Scratch {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<VertexId>,
    wdist: Vec<f64>,
    parent_slot: Vec<usize>,
    heap: BinaryHeap<(Reverse<Key>, VertexId)>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            dist: vec![0; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            wdist: vec![0.0; n],
            parent_slot: vec![0; n],
            heap: BinaryHeap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Routes one unit from `s` to every other vertex, split evenly over shortest paths.
fn split_loads_from(g: &Graph, s: VertexId, of_slot: &[u32], loads: &mut [f64], scratch: &mut Scratch) {
    let Scratch { dist, sigma, delta, order, .. } = scratch;
    dist.fill(u32::MAX);
    sigma.fill(0.0);
    delta.fill(0.0);
    order.clear();
    dist[s as usize] = 0;
    sigma[s as usize] = 1.0;
    order.push(s);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let dv = dist[v as usize];
        for &w in g.neighbors(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dv + 1;
                order.push(w);
            }
            if dist[w as usize] == dv + 1 {
                sigma[w as usize] += sigma[v as usize];
            }
        }
    }
    for &w in order.iter().rev() {
        let dw = dist[w as usize];
        if dw == 0 {
            continue;
        }
        let carried = (1.0 + delta[w as usize]) / sigma[w as usize];
        let base = g.slot_offset(w);
        for (i, &v) in g.neighbors(w).iter().enumerate() {
            if dist[v as usize] + 1 == dw {
                let c = sigma[v as usize] * carried;
                loads[of_slot[base + i] as usize] += c;
                delta[v as usize] += c;
            }
        }
    }
}

/// Routes one unit from `s` to every other vertex along a tree of shortest paths for the
/// edge lengths `len`.
fn tree_loads_from(g: &Graph, s: VertexId, of_slot: &[u32], len: &[f64], loads: &mut [f64], scratch: &mut Scratch) {
    let Scratch { wdist, parent_slot, order, heap, delta, dist: parent, .. } = scratch;
    wdist.fill(f64::INFINITY);
    order.clear();
    heap.clear();
    wdist[s as usize] = 0.0;
    parent_slot[s as usize] = usize::MAX;
    heap.push((Reverse(Key(0.0)), s));
    while let Some((Reverse(Key(d)), v)) = heap.pop() {
        if d > wdist[v as usize] {
            continue;
        }
        order.push(v);
        let base = g.slot_offset(v);
        for (i, &w) in g.neighbors(v).iter().enumerate() {
            let nd = d + len[of_slot[base + i] as usize];
            if nd < wdist[w as usize] {
                wdist[w as usize] = nd;
                parent_slot[w as usize] = base + i;
                parent[w as usize] = v;
                heap.push((Reverse(Key(nd)), w));
            }
        }
    }
    // Each vertex is settled once: stale heap entries carry a larger key than its final one.
    for &v in order.iter() {
        delta[v as usize] = 1.0;
    }
    for &v in order.iter().rev() {
        let slot = parent_slot[v as usize];
        if slot == usize::MAX {
            continue;
        }
        let w = delta[v as usize];
        loads[of_slot[slot] as usize] += w;
        delta[parent[v as usize] as usize] += w;
    }
}

/// Sums per-source loads over fixed chunks of sources in chunk order, so the result does
/// not depend on the thread count.
fn all_sources<F>(g: &Graph, edges: usize, per_source: F) -> Vec<f64>
where
    F: Fn(VertexId, &mut [f64], &mut Scratch) + Sync,
{
    let n = g.vertex_count();
    let chunks: Vec<Vec<f64>> = (0..n as VertexId)
        .collect::<Vec<_>>()
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut loads = vec![0.0; edges];
            let mut scratch = Scratch::new(n);
            for &s in chunk {
                per_source(s, &mut loads, &mut scratch);
            }
            loads
        })
        .collect();
    let mut total = vec![0.0; edges];
    for c in &chunks {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    total
}

fn certificate(n: usize, loads: &[f64], edges: &[(VertexId, VertexId)]) -> Option<FlowCertificate> {
    let (i, &top) = loads.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?;
    let congestion = upper_rational(top, FLOAT_MARGIN)?;
    let crossing = 2 * n.div_ceil(2) as i128;
    // Floor crossing/congestion onto the dyadic grid.
    let scale = 1i128 << ROUNDING_BITS;
    let q = (crossing * congestion.denom() * scale).div_euclid(*congestion.numer());
    Some(FlowCertificate { congestion, busiest_edge: edges[i], lower_bound: Rational::new(q, scale) })
}

/// Flow certificate for a connected graph with at least two vertices; `None` otherwise.
pub fn flow_lower_bound(g: &Graph) -> Option<FlowCertificate> {
    flow_lower_bound_refined(g, 0)
}

/// Starts from the equal-split shortest-path routing and adds `rounds` routings along
/// shortest-path trees for multiplicatively reweighted edge lengths, which steer traffic
/// away from congested edges. Any average of routings is again a routing, so every
/// running average yields a certificate; the best one is returned.
pub fn flow_lower_bound_refined(g: &Graph, rounds: usize) -> Option<FlowCertificate> {
    let n = g.vertex_count();
    if n < 2 || !is_connected(g, None) {
        return None;
    }
    let (of_slot, edges) = edge_index(g);
    let m = edges.len();
    let mut last = all_sources(g, m, |s, loads, scratch| split_loads_from(g, s, &of_slot, loads, scratch));
    let mut avg = last.clone();
    let mut best = certificate(n, &avg, &edges)?;
    let mut len = vec![1.0f64; m];
    for round in 1..=rounds {
        let top = last.iter().copied().fold(0.0, f64::max);
        for (l, x) in len.iter_mut().zip(&last) {
            *l *= (REWEIGHT_STEP * x / top).exp();
        }
        let lmax = len.iter().copied().fold(0.0, f64::max);
        len.iter_mut().for_each(|l| *l /= lmax);
        last = all_sources(g, m, |s, loads, scratch| tree_loads_from(g, s, &of_slot, &len, loads, scratch));
        let w = 1.0 / (round + 1) as f64;
        for (a, x) in avg.iter_mut().zip(&last) {
            *a += w * (x - *a);
        }
        let c = certificate(n, &avg, &edges)?;
        if c.lower_bound > best.lower_bound {
            best = c;
        }
    }
    Some(best)
}
