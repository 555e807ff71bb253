use super::{CheegerInterval, CutError, CutFlag, CutMethod, LowerSource};
use crate::graph::{components, CutResult, Graph, VertexSet};
use crate::rational::Rational;

pub const DEFAULT_EXACT_THRESHOLD: usize = 24;
/// Up to this size every subset is scanned; above it only connected parts are.
pub const GRAY_CODE_LIMIT: usize = 20;
const MASK_BITS: usize = 64;

/// A part given as a bitmask over at most 64 vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct MaskCut {
    pub boundary: u32,
    pub size: u32,
    pub mask: u64,
}

impl MaskCut {
    /// `self` has a smaller ratio, or the same ratio and a lexicographically smaller part.
    fn beats(&self, other: &MaskCut) -> bool {
        let l = self.boundary as u64 * other.size as u64;
        let r = other.boundary as u64 * self.size as u64;
        l < r || (l == r && lex_less(self.mask, other.mask))
    }

    fn at_most(&self, p: u64, q: u64) -> bool {
        self.boundary as u64 * q <= p * self.size as u64
    }
}

/// Lexicographic order of the sorted member lists of two masks.
pub(crate) fn lex_less(mut a: u64, mut b: u64) -> bool {
    loop {
        if a == 0 {
            return b != 0;
        }
        if b == 0 {
            return false;
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x < y;
        }
        a &= a - 1;
        b &= b - 1;
    }
}

pub(crate) fn adjacency_masks(f: &Graph) -> Vec<u64> {
    assert!(f.vertex_count() <= MASK_BITS);
    f.vertices().map(|v| f.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect()
}

struct Esu<'a> {
    adj: &'a [u64],
    max_part: usize,
    stop_at: Option<(u64, u64)>,
    best: Option<MaskCut>,
    stopped: bool,
}

impl Esu<'_> {
    fn rec(&mut self, set: u64, size: usize, boundary: u32, ext: u64, nbhd: u64, higher: u64) {
        let cand = MaskCut { boundary, size: size as u32, mask: set };
        if self.best.map_or(true, |b| cand.beats(&b)) {
            self.best = Some(cand);
            if let Some((p, q)) = self.stop_at {
                if cand.at_most(p, q) {
                    self.stopped = true;
                    return;
                }
            }
        }
        if size == self.max_part {
            return;
        }
        let mut ext = ext;
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let aw = self.adj[w];
            let nb = boundary + aw.count_ones() - 2 * (aw & set).count_ones();
            let new_ext = ext | (aw & !nbhd & higher);
            self.rec(set | 1 << w, size + 1, nb, new_ext, nbhd | aw, higher);
            if self.stopped {
                return;
            }
        }
    }
}

/// Minimum of |∂A|/|A| over connected parts A with |A| ≤ `max_part`, lexicographically
/// least among minimizers. With `stop_at = Some((p, q))` the search ends at the first part
/// of ratio ≤ p/q; the flag reports whether that happened.
pub(crate) fn min_connected_cut(adj: &[u64], max_part: usize, stop_at: Option<(u64, u64)>) -> (Option<MaskCut>, bool) {
    let n = adj.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut esu = Esu { adj, max_part, stop_at, best: None, stopped: false };
    if max_part == 0 {
        return (None, false);
    }
    for v in 0..n {
        let higher = full & !((2u64 << v).wrapping_sub(1));
        let av = adj[v];
        esu.rec(1 << v, 1, av.count_ones(), av & higher, av | 1 << v, higher);
        if esu.stopped {
            break;
        }
    }
    (esu.best, esu.stopped)
}

/// Minimum over all parts with 1 ≤ |A| ≤ n/2 by a Gray-code walk.
fn min_cut_gray(adj: &[u64]) -> MaskCut {
    let n = adj.len();
    let half = (n / 2) as u32;
    let mut mask = 0u64;
    let mut size = 0u32;
    let mut boundary = 0u32;
    let mut best: Option<MaskCut> = None;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let av = adj[v];
        if mask >> v & 1 == 0 {
            boundary = boundary + av.count_ones() - 2 * (av & mask).count_ones();
            mask |= 1 << v;
            size += 1;
        } else {
            mask &= !(1 << v);
            boundary = boundary + 2 * (av & mask).count_ones() - av.count_ones();
            size -= 1;
        }
        if size >= 1 && size <= half {
            let cand = MaskCut { boundary, size, mask };
            if best.map_or(true, |b| cand.beats(&b)) {
                best = Some(cand);
            }
        }
    }
    best.expect("n >= 2")
}

/// Exact h(F) with the default size threshold.
pub fn cheeger_exact(f: &Graph) -> Result<CheegerInterval, CutError> {
    cheeger_exact_with(f, DEFAULT_EXACT_THRESHOLD)
}

/// Exact h(F) for |F| ≤ `threshold` (at most 64). Up to 20 vertices the witness is the
/// lexicographically least minimizer over all parts; above that, the least connected one
/// (a minimizer can always be taken connected, so the value is unaffected).
pub fn cheeger_exact_with(f: &Graph, threshold: usize) -> Result<CheegerInterval, CutError> {
    let n = f.vertex_count();
    if n == 0 {
        return Err(CutError::Empty);
    }
    let threshold = threshold.min(MASK_BITS);
    if n > threshold {
        return Err(CutError::TooLarge { size: n, threshold });
    }
    let zero = Rational::from_integer(0);
    let degenerate = |witness: CutResult, flag| CheegerInterval {
        lo: zero,
        hi: zero,
        witness,
        method: CutMethod::Exact,
        lo_source: LowerSource::Zero,
        flags: vec![flag],
    };
    if n == 1 {
        return Ok(degenerate(CutResult::new(VertexSet::empty(1), 0), CutFlag::SingleVertex));
    }
    let comps = components(f, None);
    if comps.len() > 1 {
        let smallest = comps.iter().min_by_key(|c| (c.len(), c[0])).unwrap();
        let part = VertexSet::new(n, smallest.iter().copied())?;
        return Ok(degenerate(CutResult::new(part, 0), CutFlag::Disconnected));
    }
    let adj = adjacency_masks(f);
    let best = if n <= GRAY_CODE_LIMIT { min_cut_gray(&adj) } else { min_connected_cut(&adj, n / 2, None).0.unwrap() };
    let part = VertexSet::new(n, (0..n as u32).filter(|&v| best.mask >> v & 1 == 1))?;
    let witness = CutResult::new(part, best.boundary as u64);
    Ok(CheegerInterval {
        lo: witness.ratio,
        hi: witness.ratio,
        witness,
        method: CutMethod::Exact,
        lo_source: LowerSource::Exact,
        flags: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::lattice_window;
    use crate::graph::{induced_subgraph, internal_boundary};
    use crate::rational::rat;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges, 2, vec![true; n], "path").unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (1..n as u32).map(|i| (i - 1, i)).collect();
        edges.push((0, n as u32 - 1));
        Graph::new(n, &edges, 2, vec![true; n], "cycle").unwrap()
    }

    /// Plain scan of every subset with explicit boundary recount.
    fn brute(f: &Graph) -> Rational {
        let n = f.vertex_count();
        let full = VertexSet::full(n);
        let mut best: Option<Rational> = None;
        for m in 1u64..(1 << n) {
            let members: Vec<u32> = (0..n as u32).filter(|&v| m >> v & 1 == 1).collect();
            if members.len() * 2 > n {
                continue;
            }
            let a = VertexSet::new(n, members.iter().copied()).unwrap();
            let r = rat(internal_boundary(f, &full, &a).unwrap() as i128, members.len() as i128);
            best = Some(best.map_or(r, |b: Rational| b.min(r)));
        }
        best.unwrap()
    }

    #[test]
    fn small_examples() {
        let p2 = cheeger_exact(&path(2)).unwrap();
        assert_eq!(p2.hi, rat(1, 1));
        assert_eq!(p2.witness.part.members(), &[0]);
        assert_eq!(cheeger_exact(&cycle(4)).unwrap().hi, rat(1, 1));
        let p5 = cheeger_exact(&path(5)).unwrap();
        assert_eq!(p5.hi, rat(1, 2));
        assert_eq!(p5.witness.part.members(), &[0, 1]);
    }

    #[test]
    fn single_vertex_and_disconnected() {
        let one = cheeger_exact(&path(1)).unwrap();
        assert_eq!(one.hi, rat(0, 1));
        assert_eq!(one.flags, vec![CutFlag::SingleVertex]);
        let g = Graph::new(5, &[(0, 1), (2, 3), (3, 4)], 2, vec![true; 5], "two").unwrap();
        let c = cheeger_exact(&g).unwrap();
        assert_eq!(c.hi, rat(0, 1));
        assert_eq!(c.witness.part.members(), &[0, 1]);
        assert_eq!(c.flags, vec![CutFlag::Disconnected]);
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(cheeger_exact(&path(30)), Err(CutError::TooLarge { .. })));
        assert_eq!(cheeger_exact_with(&path(40), 64).unwrap().hi, rat(1, 20));
    }

    #[test]
    fn matches_brute_force_on_lattice_pieces() {
        let w = lattice_window(2, 4).unwrap();
        for k in [3usize, 6, 9, 12] {
            let f = VertexSet::new(w.vertex_count(), (0..k as u32).map(|i| i * 3 % w.vertex_count() as u32)).unwrap();
            let sub = induced_subgraph(&w, &f).unwrap();
            let got = cheeger_exact(&sub).unwrap();
            assert_eq!(got.hi, brute(&sub));
        }
    }

    #[test]
    fn connected_search_agrees_with_gray_code() {
        let w = lattice_window(2, 3).unwrap();
        let f = VertexSet::new(w.vertex_count(), 0..18).unwrap();
        let sub = induced_subgraph(&w, &f).unwrap();
        let adj = adjacency_masks(&sub);
        let gray = min_cut_gray(&adj);
        let conn = min_connected_cut(&adj, sub.vertex_count() / 2, None).0.unwrap();
        assert_eq!(gray.boundary as u64 * conn.size as u64, conn.boundary as u64 * gray.size as u64);
    }

    #[test]
    fn lex_order_on_masks() {
        assert!(lex_less(0b01, 0b11));
        assert!(lex_less(0b011, 0b101));
        assert!(!lex_less(0b101, 0b101));
        assert!(lex_less(0, 1));
        assert!(lex_less(0b1000, 0b0100) == false);
    }

    #[test]
    fn early_stop_finds_cheap_part() {
        let adj = adjacency_masks(&cycle(10));
        let (cut, stopped) = min_connected_cut(&adj, 5, Some((2, 1)));
        assert!(stopped);
        assert!(cut.unwrap().at_most(2, 1));
    }
}
