use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{
    better_lower, flow_lower_bound, trivial_lower_bound, CheegerInterval, CutError, CutFlag, CutMethod, LowerSource,
};
use crate::graph::{components, CutResult, Graph, VertexId, VertexSet};
use crate::rational::{floor_dyadic, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    /// Largest graph for which λ₂ is certified by exact minors.
    pub certify_up_to: usize,
    /// Largest graph handled by the dense eigensolver.
    pub dense_limit: usize,
    /// Iterations of the power method above `dense_limit`.
    pub power_iterations: usize,
    /// Largest graph for which the flow certificate is computed.
    pub flow_limit: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { certify_up_to: 48, dense_limit: 1200, power_iterations: 4000, flow_limit: 40_000 }
    }
}

/// Estimate of λ₂ of the combinatorial Laplacian and an associated vector. The flag is
/// true when the vector comes from a capped power iteration rather than a full solve.
pub fn fiedler_vector(f: &Graph, cfg: &SweepConfig) -> (f64, Vec<f64>, bool) {
    let n = f.vertex_count();
    if n <= cfg.dense_limit {
        let mut l = DMatrix::<f64>::zeros(n, n);
        for v in f.vertices() {
            l[(v as usize, v as usize)] = f.degree(v) as f64;
            for &w in f.neighbors(v) {
                l[(v as usize, w as usize)] = -1.0;
            }
        }
        let eig = SymmetricEigen::new(l);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
        let k = idx[1.min(n - 1)];
        let vec = eig.eigenvectors.column(k).iter().copied().collect();
        return (eig.eigenvalues[k], vec, false);
    }
    // Power method on c·I − L, kept orthogonal to the constant vector.
    let c = 2.0 * f.max_degree() as f64;
    let mut x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.618_033_988_75).fract() - 0.5).collect();
    let mut y = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..cfg.power_iterations {
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|t| *t -= mean);
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        x.iter_mut().for_each(|t| *t /= norm);
        for v in f.vertices() {
            let lx = f.degree(v) as f64 * x[v as usize] - f.neighbors(v).iter().map(|&w| x[w as usize]).sum::<f64>();
            y[v as usize] = c * x[v as usize] - lx;
        }
        rayleigh = c - x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        std::mem::swap(&mut x, &mut y);
    }
    (rayleigh, x, true)
}

/// True when λ₂(L) > μ is proved: with μ = p/q, the matrix n·q·L − p·(n·I − J) has the
/// constant vector in its kernel, so it is positive definite on the complement exactly when
/// its first n−1 leading principal minors are positive. Minors come from fraction-free
/// elimination in exact integers.
pub fn certify_lambda2_above(f: &Graph, mu: Rational) -> bool {
    let n = f.vertex_count();
    if n < 2 {
        return false;
    }
    if mu.is_negative() {
        return components(f, None).len() == 1;
    }
    let (p, q) = (BigInt::from(*mu.numer()), BigInt::from(*mu.denom()));
    let nq = BigInt::from(n) * &q;
    let m = n - 1;
    let mut a: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        &nq * f.degree(i as VertexId) - &p * (n - 1)
                    } else if f.has_edge(i as VertexId, j as VertexId) {
                        -&nq + &p
                    } else {
                        p.clone()
                    }
                })
                .collect()
        })
        .collect();
    let mut prev = BigInt::from(1);
    for k in 0..m {
        let pivot = a[k][k].clone();
        if !pivot.is_positive() {
            return false;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let t = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    true
}

/// Best prefix cut of the vertices ordered by `values` (ties by id). Each prefix is
/// scored on its smaller side; on equal sizes the lexicographically smaller side is used.
pub fn sweep_cut(f: &Graph, values: &[f64]) -> CutResult {
    let n = f.vertex_count();
    let mut order: Vec<VertexId> = f.vertices().collect();
    order.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
    let mut inside = vec![false; n];
    let mut boundary = 0i64;
    let side = |k: usize| -> VertexSet {
        let prefix = VertexSet::new(n, order[..k].iter().copied()).unwrap();
        let suffix = VertexSet::new(n, order[k..].iter().copied()).unwrap();
        match (2 * k).cmp(&n) {
            std::cmp::Ordering::Less => prefix,
            std::cmp::Ordering::Greater => suffix,
            std::cmp::Ordering::Equal => {
                if prefix.lex_cmp(&suffix).is_le() {
                    prefix
                } else {
                    suffix
                }
            }
        }
    };
    let mut best: Option<(u64, usize, usize)> = None; // (boundary, small side size, k)
    for k in 1..n {
        let v = order[k - 1];
        let into = f.neighbors(v).iter().filter(|&&w| inside[w as usize]).count() as i64;
        boundary += f.degree(v) as i64 - 2 * into;
        inside[v as usize] = true;
        let s = k.min(n - k);
        let b = boundary as u64;
        let better = match best {
            None => true,
            Some((bb, bs, bk)) => {
                let (l, r) = (b * bs as u64, bb * s as u64);
                l < r || (l == r && side(k).lex_cmp(&side(bk)).is_lt())
            }
        };
        if better {
            best = Some((b, s, k));
        }
    }
    let (b, _, k) = best.expect("n >= 2");
    CutResult::new(side(k), b)
}

pub fn cheeger_sweep(f: &Graph) -> Result<CheegerInterval, CutError> {
    cheeger_sweep_with(f, &SweepConfig::default())
}

/// Interval with hi from the Fiedler sweep and lo the best of the certified spectral,
/// flow and trivial bounds.
pub fn cheeger_sweep_with(f: &Graph, cfg: &SweepConfig) -> Result<CheegerInterval, CutError> {
    let n = f.vertex_count();
    if n == 0 {
        return Err(CutError::Empty);
    }
    let zero = Rational::from_integer(0);
    let degenerate = |witness: CutResult, flag| CheegerInterval {
        lo: zero,
        hi: zero,
        witness,
        method: CutMethod::SpectralSweep,
        lo_source: LowerSource::Zero,
        flags: vec![flag],
    };
    if n == 1 {
        return Ok(degenerate(CutResult::new(VertexSet::empty(1), 0), CutFlag::SingleVertex));
    }
    let comps = components(f, None);
    if comps.len() > 1 {
        let smallest = comps.iter().min_by_key(|c| (c.len(), c[0])).unwrap();
        return Ok(degenerate(CutResult::new(VertexSet::new(n, smallest.iter().copied())?, 0), CutFlag::Disconnected));
    }
    let (lambda, vec, approximate) = fiedler_vector(f, cfg);
    let witness = sweep_cut(f, &vec);
    let mut lo = (trivial_lower_bound(n), LowerSource::Trivial);
    if n <= cfg.flow_limit {
        if let Some(c) = flow_lower_bound(f) {
            lo = better_lower(lo, (c.lower_bound, LowerSource::Flow));
        }
    }
    if n <= cfg.certify_up_to && lambda > 0.0 {
        for shrink in [1e-6, 1e-3] {
            if let Some(mu) = floor_dyadic(lambda * (1.0 - shrink), 16) {
                if mu.is_positive() && certify_lambda2_above(f, mu) {
                    lo = better_lower(lo, (mu / 2, LowerSource::Spectral));
                    break;
                }
            }
        }
    }
    debug_assert!(lo.0 <= witness.ratio);
    Ok(CheegerInterval {
        lo: lo.0,
        hi: witness.ratio,
        witness,
        method: CutMethod::SpectralSweep,
        lo_source: lo.1,
        flags: if approximate { vec![CutFlag::EigenApproximate] } else { vec![] },
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

    #[test]
    fn single_edge() {
        let c = cheeger_sweep(&path(2)).unwrap();
        assert_eq!(c.hi, rat(1, 1));
        assert!(c.lo <= rat(1, 1) && c.lo > rat(0, 1));
    }

    #[test]
    fn four_cycle_sweep_is_exact() {
        let c = cheeger_sweep(&cycle(4)).unwrap();
        assert_eq!(c.hi, rat(1, 1));
        assert_eq!(c.witness.part.len(), 2);
    }

    #[test]
    fn certificate_brackets_known_eigenvalues() {
        // λ₂(C_n) = 2 − 2cos(2π/n); λ₂(P_n) = 2 − 2cos(π/n).
        for n in [5usize, 8, 12] {
            let l = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
            assert!(certify_lambda2_above(&cycle(n), floor_dyadic(l * 0.999, 16).unwrap()));
            assert!(!certify_lambda2_above(&cycle(n), floor_dyadic(l * 1.001, 16).unwrap() + rat(1, 1 << 16)));
            let l = 2.0 - 2.0 * (std::f64::consts::PI / n as f64).cos();
            assert!(certify_lambda2_above(&path(n), floor_dyadic(l * 0.999, 16).unwrap()));
            assert!(!certify_lambda2_above(&path(n), floor_dyadic(l * 1.001, 16).unwrap() + rat(1, 1 << 16)));
        }
    }

    #[test]
    fn sweep_witness_audits() {
        let w = lattice_window(2, 4).unwrap();
        let f = crate::graph::ball(&w, w.center(), 3);
        let sub = induced_subgraph(&w, &f).unwrap();
        let c = cheeger_sweep(&sub).unwrap();
        let full = VertexSet::full(sub.vertex_count());
        assert_eq!(internal_boundary(&sub, &full, &c.witness.part).unwrap(), c.witness.boundary_edges);
        assert!(c.witness.part.len() * 2 <= sub.vertex_count());
        let exact = crate::cuts::cheeger_exact_with(&sub, 32).unwrap().hi;
        assert!(c.lo <= exact && exact <= c.hi);
    }

    #[test]
    fn power_iteration_still_gives_valid_cut() {
        let cfg = SweepConfig { dense_limit: 4, power_iterations: 500, ..SweepConfig::default() };
        let g = path(20);
        let c = cheeger_sweep_with(&g, &cfg).unwrap();
        assert!(c.flags.contains(&CutFlag::EigenApproximate));
        assert!(c.lo <= rat(1, 10) && rat(1, 10) <= c.hi);
    }
}
