//! Immutable graph windows, vertex sets, boundaries, balls and connected-subset enumeration.

mod enumerate;
pub mod io;
mod ops;

pub use enumerate::{
    enumerate_connected_subsets, visit_connected_subsets, ConnectedSubsets, EnumOptions, RootMode,
};
pub use ops::{
    ball, bfs_distances, components, edge_boundary, growth_table, induced_subgraph,
    internal_boundary, is_connected, largest_component, BoundaryCount, GrowthTable,
};
pub(crate) use ops::bfs_layers;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::rational::Rational;

pub type VertexId = u32;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {0} out of range (vertex count {1})")]
    VertexOutOfRange(VertexId, usize),
    #[error("vertex {vertex} has degree {degree} above the bound {bound}")]
    DegreeExceeded { vertex: VertexId, degree: usize, bound: usize },
    #[error("interior vertex {vertex} has degree {degree}, expected ambient degree {ambient}")]
    InteriorDegreeMismatch { vertex: VertexId, degree: usize, ambient: usize },
    #[error("interior mask has length {0}, expected {1}")]
    MaskLength(usize, usize),
    #[error("coordinate table has length {0}, expected {1}")]
    CoordLength(usize, usize),
    #[error("subset is not contained in the host set")]
    NotSubset,
    #[error("empty vertex set")]
    EmptySet,
    #[error("enumeration budget of {cap} sets exceeded")]
    BudgetExceeded { cap: u64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Finite window of an ambient graph in compressed adjacency form.
///
/// Neighbor lists are sorted. `interior[v]` is true when every ambient neighbor of `v`
/// is present, so boundaries of interior-only sets agree with the ambient graph.
/// Optional lattice coordinates and an origin vertex are carried for generators that
/// have them; they are used by box candidates and ball centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    max_degree: usize,
    interior: Vec<bool>,
    label: String,
    ambient_degree: Option<usize>,
    coord_dim: usize,
    coords: Vec<i64>,
    origin: Option<VertexId>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Rejects self-loops, repeated edges
    /// (in either orientation) and degrees above `max_degree`.
    pub fn new(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
        max_degree: usize,
        interior: Vec<bool>,
        label: impl Into<String>,
    ) -> Result<Graph, GraphError> {
        if interior.len() != vertex_count {
            return Err(GraphError::MaskLength(interior.len(), vertex_count));
        }
        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= vertex_count {
                    return Err(GraphError::VertexOutOfRange(w, vertex_count));
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0 as VertexId; offsets[vertex_count]];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..vertex_count {
            let list = &mut neighbors[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v as VertexId, w[0]);
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
            if list.len() > max_degree {
                return Err(GraphError::DegreeExceeded {
                    vertex: v as VertexId,
                    degree: list.len(),
                    bound: max_degree,
                });
            }
        }
        Ok(Graph {
            offsets,
            neighbors,
            max_degree,
            interior,
            label: label.into(),
            ambient_degree: None,
            coord_dim: 0,
            coords: Vec::new(),
            origin: None,
        })
    }

    /// Declares the ambient degree and checks it against every interior vertex.
    pub fn with_ambient_degree(mut self, ambient: usize) -> Result<Graph, GraphError> {
        for v in 0..self.vertex_count() {
            if self.interior[v] && self.degree(v as VertexId) != ambient {
                return Err(GraphError::InteriorDegreeMismatch {
                    vertex: v as VertexId,
                    degree: self.degree(v as VertexId),
                    ambient,
                });
            }
        }
        self.ambient_degree = Some(ambient);
        Ok(self)
    }

    /// Attaches integer coordinates (row-major, `dim` entries per vertex).
    pub fn with_coords(mut self, dim: usize, coords: Vec<i64>) -> Result<Graph, GraphError> {
        if coords.len() != dim * self.vertex_count() {
            return Err(GraphError::CoordLength(coords.len(), dim * self.vertex_count()));
        }
        self.coord_dim = dim;
        self.coords = coords;
        Ok(self)
    }

    pub fn with_origin(mut self, origin: VertexId) -> Result<Graph, GraphError> {
        if origin as usize >= self.vertex_count() {
            return Err(GraphError::VertexOutOfRange(origin, self.vertex_count()));
        }
        self.origin = Some(origin);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.interior.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Index of the first adjacency slot of `v`; slots are numbered globally.
    #[inline]
    pub fn slot_offset(&self, v: VertexId) -> usize {
        self.offsets[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn is_interior(&self, v: VertexId) -> bool {
        self.interior[v as usize]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior_count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_degree(&self) -> Option<usize> {
        self.ambient_degree
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn coords(&self, v: VertexId) -> Option<&[i64]> {
        if self.coord_dim == 0 {
            return None;
        }
        let d = self.coord_dim;
        Some(&self.coords[v as usize * d..(v as usize + 1) * d])
    }

    pub fn origin(&self) -> Option<VertexId> {
        self.origin
    }

    /// Origin if declared, otherwise vertex 0.
    pub fn center(&self) -> VertexId {
        self.origin.unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as pairs `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count() as VertexId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertex_count() as VertexId
    }
}

/// Subset of the vertices of a host graph: sorted members plus a membership bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<VertexId>,
    mask: FixedBitSet,
}

impl VertexSet {
    pub fn new(universe: usize, items: impl IntoIterator<Item = VertexId>) -> Result<VertexSet, GraphError> {
        let mut mask = FixedBitSet::with_capacity(universe);
        for v in items {
            if v as usize >= universe {
                return Err(GraphError::VertexOutOfRange(v, universe));
            }
            mask.insert(v as usize);
        }
        let members = mask.ones().map(|v| v as VertexId).collect();
        Ok(VertexSet { members, mask })
    }

    pub fn empty(universe: usize) -> VertexSet {
        VertexSet { members: Vec::new(), mask: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> VertexSet {
        let mut mask = FixedBitSet::with_capacity(universe);
        mask.insert_range(..);
        VertexSet { members: (0..universe as VertexId).collect(), mask }
    }

    /// Builds from members already known to be valid; sorts and deduplicates.
    pub(crate) fn from_members(universe: usize, members: &[VertexId]) -> VertexSet {
        let mut mask = FixedBitSet::with_capacity(universe);
        for &v in members {
            mask.insert(v as usize);
        }
        let members = mask.ones().map(|v| v as VertexId).collect();
        VertexSet { members, mask }
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.mask.contains(v as usize)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| other.contains(v))
    }

    pub fn complement_in(&self, host: &VertexSet) -> VertexSet {
        let items: Vec<VertexId> = host.iter().filter(|&v| !self.contains(v)).collect();
        VertexSet::from_members(host.universe(), &items)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let items: Vec<VertexId> = self.iter().filter(|&v| other.contains(v)).collect();
        VertexSet::from_members(self.universe(), &items)
    }

    /// Lexicographic order on the sorted member lists (the canonical tie-break).
    pub fn lex_cmp(&self, other: &VertexSet) -> Ordering {
        self.members.cmp(&other.members)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

/// A cut `A` of a host set with its boundary count and exact ratio.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    pub part: VertexSet,
    pub boundary_edges: u64,
    #[serde(with = "crate::rational::serde_str")]
    pub ratio: Rational,
}

impl CutResult {
    pub fn new(part: VertexSet, boundary_edges: u64) -> CutResult {
        let ratio = if part.is_empty() {
            Rational::from_integer(0)
        } else {
            Rational::new(boundary_edges as i128, part.len() as i128)
        };
        CutResult { part, boundary_edges, ratio }
    }
}
