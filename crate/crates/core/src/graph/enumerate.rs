//! Canonical enumeration of connected vertex subsets.
//!
//! Each connected set is produced exactly once, grown from a canonical root by
//! exclusive-neighbourhood extension: a vertex may join only if it was not adjacent to
//! the set before the previous addition. The order is a deterministic function of the
//! graph and options.

use std::ops::ControlFlow;

use super::{Graph, GraphError, VertexId, VertexSet};
use crate::budget::Budget;

/// How a root restriction selects sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMode {
    /// Sets whose smallest vertex id lies in the restriction.
    Minimum,
    /// Sets that meet the restriction (each produced at its smallest restricted member).
    Meeting,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumOptions<'a> {
    pub max_size: usize,
    pub roots: Option<&'a VertexSet>,
    pub root_mode: RootMode,
    /// Only vertices with `allowed[v]` may appear (for example the interior mask).
    pub allowed: Option<&'a [bool]>,
}

impl<'a> EnumOptions<'a> {
    pub fn new(max_size: usize) -> Self {
        EnumOptions { max_size, roots: None, root_mode: RootMode::Meeting, allowed: None }
    }

    pub fn roots(mut self, roots: &'a VertexSet, mode: RootMode) -> Self {
        self.roots = Some(roots);
        self.root_mode = mode;
        self
    }

    pub fn allowed(mut self, allowed: &'a [bool]) -> Self {
        self.allowed = Some(allowed);
        self
    }

    fn is_allowed(&self, v: VertexId) -> bool {
        self.allowed.map_or(true, |a| a[v as usize])
    }

    /// Roots in increasing order.
    pub fn root_list(&self, g: &Graph) -> Vec<VertexId> {
        let all: Box<dyn Iterator<Item = VertexId>> = match self.roots {
            Some(r) => Box::new(r.iter()),
            None => Box::new(g.vertices()),
        };
        all.filter(|&v| self.is_allowed(v)).collect()
    }
}

struct Frame {
    ext: Vec<VertexId>,
    pos: usize,
}

/// Lending iterator over connected subsets; see [`ConnectedSubsets::advance`].
pub struct ConnectedSubsets<'g, 'o> {
    g: &'g Graph,
    opts: EnumOptions<'o>,
    roots: Vec<VertexId>,
    next_root: usize,
    root: VertexId,
    set: Vec<VertexId>,
    in_set: Vec<bool>,
    mark: Vec<u32>,
    boundary: u64,
    frames: Vec<Frame>,
}

impl<'g, 'o> ConnectedSubsets<'g, 'o> {
    pub fn new(g: &'g Graph, opts: EnumOptions<'o>) -> Self {
        let roots = opts.root_list(g);
        Self::with_roots(g, opts, roots)
    }

    /// Restricts the walk to the given roots (a subsequence of `opts.root_list`), which
    /// lets callers split the enumeration across workers.
    pub fn with_roots(g: &'g Graph, opts: EnumOptions<'o>, roots: Vec<VertexId>) -> Self {
        let n = g.vertex_count();
        ConnectedSubsets {
            g,
            opts,
            roots,
            next_root: 0,
            root: 0,
            set: Vec::with_capacity(opts.max_size),
            in_set: vec![false; n],
            mark: vec![0; n],
            boundary: 0,
            frames: Vec::with_capacity(opts.max_size + 1),
        }
    }

    #[inline]
    fn may_join(&self, u: VertexId) -> bool {
        if !self.opts.is_allowed(u) {
            return false;
        }
        match (self.opts.roots, self.opts.root_mode) {
            (Some(r), RootMode::Meeting) => !(u < self.root && r.contains(u)),
            _ => u > self.root,
        }
    }

    fn push_vertex(&mut self, w: VertexId) {
        let g = self.g;
        let inside = g.neighbors(w).iter().filter(|&&u| self.in_set[u as usize]).count() as u64;
        self.boundary = self.boundary + g.degree(w) as u64 - 2 * inside;
        self.in_set[w as usize] = true;
        self.mark[w as usize] += 1;
        for &u in g.neighbors(w) {
            self.mark[u as usize] += 1;
        }
        self.set.push(w);
    }

    fn pop_vertex(&mut self) {
        let g = self.g;
        let w = self.set.pop().expect("pop on empty set");
        self.in_set[w as usize] = false;
        self.mark[w as usize] -= 1;
        for &u in g.neighbors(w) {
            self.mark[u as usize] -= 1;
        }
        let inside = g.neighbors(w).iter().filter(|&&u| self.in_set[u as usize]).count() as u64;
        self.boundary = self.boundary + 2 * inside - g.degree(w) as u64;
    }

    /// Produces the next set together with its edge boundary in the host graph.
    pub fn advance(&mut self) -> Option<(&[VertexId], u64)> {
        loop {
            if self.frames.is_empty() {
                // Start the next root.
                if self.next_root >= self.roots.len() {
                    return None;
                }
                let r = self.roots[self.next_root];
                self.next_root += 1;
                if !self.set.is_empty() {
                    self.pop_vertex();
                }
                self.root = r;
                self.push_vertex(r);
                let ext = if self.opts.max_size > 1 {
                    self.g.neighbors(r).iter().copied().filter(|&u| self.may_join(u)).collect()
                } else {
                    Vec::new()
                };
                self.frames.push(Frame { ext, pos: 0 });
                return Some((&self.set, self.boundary));
            }
            let depth = self.frames.len();
            let top = self.frames.last_mut().unwrap();
            if top.pos >= top.ext.len() {
                self.frames.pop();
                if !self.frames.is_empty() {
                    self.pop_vertex();
                }
                continue;
            }
            let w = top.ext[top.pos];
            top.pos += 1;
            let mut ext = Vec::new();
            if depth + 1 < self.opts.max_size {
                ext.extend_from_slice(&top.ext[top.pos..]);
                for &u in self.g.neighbors(w) {
                    if self.mark[u as usize] == 0 && self.may_join(u) {
                        ext.push(u);
                    }
                }
            }
            self.push_vertex(w);
            self.frames.push(Frame { ext, pos: 0 });
            return Some((&self.set, self.boundary));
        }
    }

    /// Membership flags of the current set.
    pub fn membership(&self) -> &[bool] {
        &self.in_set
    }
}

impl Iterator for ConnectedSubsets<'_, '_> {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        let n = self.g.vertex_count();
        self.advance().map(|(s, _)| VertexSet::from_members(n, s))
    }
}

/// Streams every connected subset of size ≤ `max_size` (see [`EnumOptions`]).
pub fn enumerate_connected_subsets<'g, 'o>(
    g: &'g Graph,
    max_size: usize,
    root_restriction: Option<&'o VertexSet>,
) -> ConnectedSubsets<'g, 'o> {
    let mut opts = EnumOptions::new(max_size.max(1));
    opts.roots = root_restriction;
    ConnectedSubsets::new(g, opts)
}

/// Calls `visitor(set, boundary)` for each connected subset. Returns the number of sets
/// visited, or `BudgetExceeded` if the budget trips first.
pub fn visit_connected_subsets<F>(
    g: &Graph,
    opts: EnumOptions<'_>,
    budget: Option<&Budget>,
    mut visitor: F,
) -> Result<u64, GraphError>
where
    F: FnMut(&[VertexId], u64) -> ControlFlow<()>,
{
    let mut it = ConnectedSubsets::new(g, opts);
    let mut count = 0u64;
    while let Some((set, boundary)) = it.advance() {
        if let Some(b) = budget {
            if !b.charge(1) {
                return Err(GraphError::BudgetExceeded { cap: b.cap() });
            }
        }
        count += 1;
        if visitor(set, boundary).is_break() {
            break;
        }
    }
    Ok(count)
}
