use serde::Serialize;
use std::collections::HashSet;

use super::lattice::unit_step_graph;
use super::{GenError, DEFAULT_VERTEX_CAP};
use crate::graph::{components, Graph, VertexSet};

/// Substitution pattern: an m^k block of cells with some cells removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarpetPattern {
    pub side: u32,
    pub dimension: u32,
    pub removed: Vec<Vec<u32>>,
}

/// Quantities derived from a pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarpetInfo {
    /// Retained cells per block (m_F).
    pub retained: u64,
    /// Columns (cells sharing the first coordinate) containing at least one removed cell.
    pub removed_columns: u64,
    /// Fewest retained cells in any column.
    pub sparsest_column: u64,
    /// Exponent e with Λ(n) ≍ n^e: ln(sparsest_column)/ln(retained) − 1.
    pub iso_exponent: f64,
    /// ln(removed_columns)/ln(retained), the column-count ratio.
    pub removed_column_ratio: f64,
}

impl CarpetPattern {
    /// The standard carpet: side 3, centre cell removed.
    pub fn standard(dimension: u32) -> CarpetPattern {
        CarpetPattern { side: 3, dimension, removed: vec![vec![1; dimension as usize]] }
    }

    fn cells(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..self.dimension {
            out = out
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..self.side).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidConfig(m.into()));
        if self.side < 2 || self.dimension == 0 {
            return bad("carpet pattern needs side >= 2 and dimension >= 1");
        }
        let removed: HashSet<&Vec<u32>> = self.removed.iter().collect();
        if self.removed.iter().any(|c| c.len() != self.dimension as usize || c.iter().any(|&x| x >= self.side)) {
            return bad("removed cell outside the pattern");
        }
        let cells = self.cells();
        let kept: Vec<Vec<i64>> = cells
            .iter()
            .filter(|c| !removed.contains(c))
            .map(|c| c.iter().map(|&x| x as i64).collect())
            .collect();
        if kept.is_empty() || removed.is_empty() {
            return bad("pattern must remove some but not all cells");
        }
        let n = kept.len();
        let g = unit_step_graph(&kept, 2 * self.dimension as usize, vec![true; n], String::new())?;
        if components(&g, Some(&VertexSet::full(n))).len() != 1 {
            return bad("retained cells are not face-connected");
        }
        Ok(())
    }

    pub fn info(&self) -> CarpetInfo {
        let removed: HashSet<&Vec<u32>> = self.removed.iter().collect();
        let cells = self.cells();
        let retained = cells.iter().filter(|c| !removed.contains(c)).count() as u64;
        let mut per_column = vec![0u64; self.side as usize];
        let mut removed_in = vec![false; self.side as usize];
        for c in &cells {
            if removed.contains(c) {
                removed_in[c[0] as usize] = true;
            } else {
                per_column[c[0] as usize] += 1;
            }
        }
        let removed_columns = removed_in.iter().filter(|&&b| b).count() as u64;
        let sparsest_column = *per_column.iter().min().unwrap();
        let lr = (retained as f64).ln();
        CarpetInfo {
            retained,
            removed_columns,
            sparsest_column,
            iso_exponent: (sparsest_column as f64).ln() / lr - 1.0,
            removed_column_ratio: (removed_columns as f64).ln() / lr,
        }
    }
}

/// Level-k pre-fractal: one vertex per retained cell of the k-fold substitution, edges
/// between face-sharing cells. All vertices are interior.
pub fn sierpinski_carpet(pattern: &CarpetPattern, level: u32) -> Result<Graph, GenError> {
    pattern.validate()?;
    if level == 0 {
        return Err(GenError::InvalidConfig("carpet level must be >= 1".into()));
    }
    let info = pattern.info();
    let size = (info.retained as u128).checked_pow(level).unwrap_or(u128::MAX);
    if size > DEFAULT_VERTEX_CAP as u128 {
        return Err(GenError::SizeOverflow { size: size.min(u64::MAX as u128) as u64, cap: DEFAULT_VERTEX_CAP });
    }
    let removed: HashSet<Vec<u32>> = pattern.removed.iter().cloned().collect();
    let d = pattern.dimension as usize;
    let m = pattern.side as u64;
    let full = m.pow(level);
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut coord = vec![0u64; d];
    'outer: loop {
        let mut keep = true;
        let mut scale = 1u64;
        for _ in 0..level {
            let digit: Vec<u32> = coord.iter().map(|&c| ((c / scale) % m) as u32).collect();
            if removed.contains(&digit) {
                keep = false;
                break;
            }
            scale *= m;
        }
        if keep {
            points.push(coord.iter().map(|&c| c as i64).collect());
        }
        // Odometer in lexicographic order (last axis fastest).
        let mut axis = d;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            coord[axis] += 1;
            if coord[axis] < full {
                break;
            }
            coord[axis] = 0;
        }
    }
    let n = points.len();
    let g = unit_step_graph(&points, 2 * d, vec![true; n], format!("carpet-m{}-d{}-L{level}", pattern.side, d))?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    #[test]
    fn standard_level_one_is_ring() {
        let g = sierpinski_carpet(&CarpetPattern::standard(2), 1).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 8);
        assert!(g.vertices().all(|v| g.degree(v) == 2 && g.is_interior(v)));
    }

    #[test]
    fn level_counts_are_powers() {
        let p = CarpetPattern::standard(2);
        let g = sierpinski_carpet(&p, 2).unwrap();
        assert_eq!(g.vertex_count(), 64);
        assert!(g.max_degree() == 4 && is_connected(&g, None));
        assert_eq!(sierpinski_carpet(&p, 3).unwrap().vertex_count(), 512);
        assert_eq!(sierpinski_carpet(&CarpetPattern::standard(3), 2).unwrap().vertex_count(), 26 * 26);
    }

    #[test]
    fn level_two_edges_by_face_sharing() {
        // Oracle: count adjacent retained pairs on the 9×9 grid directly.
        let kept = |x: u32, y: u32| !((x % 3 == 1 && y % 3 == 1) || (x / 3 == 1 && y / 3 == 1));
        let mut e = 0;
        for x in 0..9 {
            for y in 0..9 {
                if kept(x, y) {
                    if x + 1 < 9 && kept(x + 1, y) {
                        e += 1;
                    }
                    if y + 1 < 9 && kept(x, y + 1) {
                        e += 1;
                    }
                }
            }
        }
        assert_eq!(sierpinski_carpet(&CarpetPattern::standard(2), 2).unwrap().edge_count(), e);
    }

    #[test]
    fn standard_exponents() {
        let i2 = CarpetPattern::standard(2).info();
        assert_eq!((i2.retained, i2.removed_columns, i2.sparsest_column), (8, 1, 2));
        assert!((i2.iso_exponent - (2f64.ln() / 8f64.ln() - 1.0)).abs() < 1e-12);
        for n in 2..=4u32 {
            let i = CarpetPattern::standard(n).info();
            let a = (3f64.powi(n as i32) - 1.0).ln();
            let b = (3f64.powi(n as i32 - 1) - 1.0).ln();
            assert!((i.iso_exponent + (a - b) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_patterns() {
        let everything = CarpetPattern { side: 2, dimension: 1, removed: vec![vec![0], vec![1]] };
        assert!(everything.validate().is_err());
        let split = CarpetPattern { side: 3, dimension: 1, removed: vec![vec![1]] };
        assert!(split.validate().is_err());
        assert!(sierpinski_carpet(&CarpetPattern::standard(2), 0).is_err());
    }
}
