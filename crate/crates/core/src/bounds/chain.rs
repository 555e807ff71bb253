use num_traits::Zero;
use serde::Serialize;

use super::BoundError;
use crate::cuts::cheeger_exact_with;
use crate::graph::{induced_subgraph, Graph};
use crate::profiles::{candidate_lower_bound, optimal_integers, ProfileKind, ProfileTable};
use crate::rational::{upper_rational, Rational};

/// A sequence of optimal integers n₀ < n₁ < … < n_{i_max} built from a certified
/// isoperimetric table, with the index N where the optimal-set lemma gives the best
/// lower bound on Sep(N)/N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainWitness {
    pub n: u64,
    pub m: u64,
    /// p(m): the end of the range in which N is guaranteed.
    pub p_m: u64,
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub sequence: Vec<u64>,
    pub chosen_n: u64,
    /// Certified lower bound on Sep(N)/N: ε·Λ(n)/(4·log₂(p(m)/n) + 4), rounded down when the
    /// logarithm is irrational.
    #[serde(with = "crate::rational::serde_str")]
    pub bound_value: Rational,
    /// (Λ(⌊N/2⌋) − Λ(N))/2, the bound on Sep(N)/N that the optimal set of size N gives.
    #[serde(with = "crate::rational::serde_str")]
    pub lemma_value: Rational,
    /// Optimal k in the certified range with no optimal integer in (k, 2k]; only filled by
    /// the symmetric variant, where each one is a window artifact.
    pub window_artifacts: Vec<u64>,
}

impl ChainWitness {
    /// The bound expressed on Sep(N) rather than Sep(N)/N.
    pub fn sep_bound(&self) -> Rational {
        self.bound_value * Rational::from_integer(self.chosen_n as i128)
    }
}

fn unit_interval(eps: Rational) -> Result<(), BoundError> {
    if !(eps > Rational::zero() && eps < Rational::from_integer(1)) {
        return Err(BoundError::PreconditionGap(format!("epsilon must lie in (0,1), got {eps}")));
    }
    Ok(())
}

fn certified_optimal(iso: &ProfileTable) -> Result<(Vec<u64>, u64), BoundError> {
    if iso.kind != ProfileKind::Iso {
        return Err(BoundError::NotCertified("an isoperimetric table is required".into()));
    }
    let through = iso.certified_through();
    if through == 0 {
        return Err(BoundError::NotCertified("no certified points".into()));
    }
    let truncated = ProfileTable { points: iso.points[..through as usize].to_vec(), ..iso.clone() };
    Ok((optimal_integers(&truncated)?, through))
}

fn lambda(iso: &ProfileTable, n: u64) -> Result<Rational, BoundError> {
    iso.value(n).ok_or_else(|| BoundError::NotCertified(format!("no value at n = {n}")))
}

/// ε·Λ(n)/(4·log₂(P/n) + 4), exact when P/n is a power of two, otherwise with the
/// denominator rounded up to a dyadic rational.
fn closed_form_bound(eps: Rational, lambda_n: Rational, n: u64, p: u64) -> Rational {
    let four = Rational::from_integer(4);
    let denom = if p % n == 0 && (p / n).is_power_of_two() {
        four * Rational::from_integer((p / n).trailing_zeros() as i128) + four
    } else {
        let x = 4.0 * (p as f64 / n as f64).log2() + 4.0;
        upper_rational(x, 1e-12).expect("finite logarithm")
    };
    eps * lambda_n / denom
}

/// n₀ = least optimal integer ≥ n; then n_{i+1} is the largest optimal integer in
/// (nᵢ, 2nᵢ] when there is one and the least optimal integer above 2nᵢ otherwise, until
/// some nᵢ ≥ m. `step_cap(k)` bounds the fallback step from k.
fn build_sequence(
    optimal: &[u64],
    n: u64,
    m: u64,
    step_cap: impl Fn(u64) -> u64,
) -> Result<Vec<u64>, BoundError> {
    let first_at_least = |k: u64| optimal.iter().copied().find(|&x| x >= k);
    let n0 = first_at_least(n)
        .ok_or_else(|| BoundError::NotCertified(format!("no certified optimal integer at or above {n}")))?;
    let mut seq = vec![n0];
    while *seq.last().unwrap() < m {
        let cur = *seq.last().unwrap();
        let next = match optimal.iter().copied().filter(|&x| x > cur && x <= 2 * cur).max() {
            Some(k) => k,
            None => {
                let k = first_at_least(2 * cur + 1).ok_or_else(|| {
                    BoundError::NotCertified(format!("no certified optimal integer above {}", 2 * cur))
                })?;
                if k > step_cap(cur) {
                    return Err(BoundError::PreconditionGap(format!(
                        "no optimal integer in ({cur}, {}]; the step function is too small",
                        step_cap(cur)
                    )));
                }
                k
            }
        };
        seq.push(next);
    }
    Ok(seq)
}

fn assemble(
    iso: &ProfileTable,
    seq: Vec<u64>,
    eps: Rational,
    n: u64,
    m: u64,
    p_m: u64,
) -> Result<ChainWitness, BoundError> {
    let mut best: Option<(Rational, u64)> = None;
    for &k in &seq {
        let gap = lambda(iso, k / 2)? - lambda(iso, k)?;
        if best.map_or(true, |(b, _)| gap > b) {
            best = Some((gap, k));
        }
    }
    let (gap, chosen_n) = best.expect("non-empty sequence");
    let bound_value = closed_form_bound(eps, lambda(iso, n)?, n, p_m);
    Ok(ChainWitness {
        n,
        m,
        p_m,
        epsilon: eps,
        sequence: seq,
        chosen_n,
        bound_value,
        lemma_value: gap / Rational::from_integer(2),
        window_artifacts: Vec::new(),
    })
}

fn check_common(iso: &ProfileTable, eps: Rational, n: u64, m: u64) -> Result<(), BoundError> {
    unit_interval(eps)?;
    if n < 2 {
        return Err(BoundError::PreconditionGap("n must be at least 2".into()));
    }
    if m < n {
        return Err(BoundError::PreconditionGap(format!("m = {m} is below n = {n}")));
    }
    let (ln, lm) = (lambda(iso, n)?, lambda(iso, m)?);
    if lm > (Rational::from_integer(1) - eps) * ln {
        return Err(BoundError::PreconditionGap(format!("Λ({m}) = {lm} exceeds (1 - {eps})·Λ({n})")));
    }
    Ok(())
}

/// Lower bound on Sep(N)/N for some N ∈ [n, p(m)], for graphs where every (k, p(k)]
/// contains an optimal integer. `p` must be increasing with p(k) > k.
pub fn chain_lower_bound(
    iso: &ProfileTable,
    p: impl Fn(u64) -> u64,
    epsilon: Rational,
    n: u64,
    m: u64,
) -> Result<ChainWitness, BoundError> {
    let (optimal, through) = certified_optimal(iso)?;
    check_common(iso, epsilon, n, m)?;
    let p_m = p(m);
    if p_m < m {
        return Err(BoundError::PreconditionGap(format!("p({m}) = {p_m} is below m")));
    }
    if through < p_m {
        return Err(BoundError::NotCertified(format!("table certified through {through}, need p(m) = {p_m}")));
    }
    let seq = build_sequence(&optimal, n, m, &p)?;
    let last = *seq.last().unwrap();
    if last > p_m {
        return Err(BoundError::PreconditionGap(format!("chain ends at {last} beyond p(m) = {p_m}")));
    }
    assemble(iso, seq, epsilon, n, m, p_m)
}

/// The variant for graphs with partial self-isomorphisms: p(k) = 2k, so N ∈ [n, 2m]. Every
/// optimal k with 2k certified is checked for an optimal integer in (k, 2k]; failures are
/// reported as window artifacts.
pub fn chain_lower_bound_symmetric(
    iso: &ProfileTable,
    epsilon: Rational,
    n: u64,
    m: u64,
) -> Result<ChainWitness, BoundError> {
    unit_interval(epsilon)?;
    let (optimal, through) = certified_optimal(iso)?;
    let artifacts: Vec<u64> = optimal
        .iter()
        .copied()
        .filter(|&k| 2 * k <= through && !optimal.iter().any(|&x| x > k && x <= 2 * k))
        .collect();
    let mut w = chain_lower_bound(iso, |k| 2 * k, epsilon, n, m)?;
    w.window_artifacts = artifacts;
    Ok(w)
}

/// Least x′ with value(x′) ≤ δ·value(x) for the piecewise-affine extension of the table,
/// rounded up to an integer.
pub fn geometric_decay(profile: &ProfileTable, delta: Rational, x: u64) -> Result<u64, BoundError> {
    unit_interval(delta).map_err(|_| BoundError::InvalidParameter(format!("delta must lie in (0,1), got {delta}")))?;
    let pts = &profile.points;
    if pts.windows(2).any(|w| w[1].value > w[0].value) {
        return Err(BoundError::InvalidParameter("profile must be non-increasing".into()));
    }
    let start = pts.iter().position(|p| p.n >= x).ok_or(BoundError::Unreachable)?;
    let fx = if pts[start].n == x {
        pts[start].value
    } else if start == 0 {
        return Err(BoundError::InvalidParameter(format!("{x} is before the first tabulated point")));
    } else {
        let (a, b) = (&pts[start - 1], &pts[start]);
        let t = Rational::new((x - a.n) as i128, (b.n - a.n) as i128);
        a.value + (b.value - a.value) * t
    };
    let target = delta * fx;
    let k = pts.iter().position(|p| p.value <= target).ok_or(BoundError::Unreachable)?;
    if k == 0 {
        return Ok(pts[0].n);
    }
    let (a, b) = (&pts[k - 1], &pts[k]);
    let frac = (a.value - target) / (a.value - b.value);
    let cross = Rational::from_integer(a.n as i128) + frac * Rational::from_integer((b.n - a.n) as i128);
    Ok(cross.ceil().to_integer() as u64)
}

/// The chain bound with ε = 1/2, m = p^{1/2}(n) and p(m) = p^{1/4}(n) from the geometric
/// decay of the table itself. If the chain overshoots p^{1/4}(n) the range is widened to
/// its last element, which keeps the bound valid (only weaker).
pub fn decay_lower_bound(iso: &ProfileTable, n: u64) -> Result<ChainWitness, BoundError> {
    let (optimal, through) = certified_optimal(iso)?;
    let certified = ProfileTable { points: iso.points[..through as usize].to_vec(), ..iso.clone() };
    let half = Rational::new(1, 2);
    let decay = |d: Rational| {
        geometric_decay(&certified, d, n).map_err(|e| match e {
            BoundError::Unreachable => BoundError::NotCertified(format!("Λ does not decay by {d} within the certified table")),
            other => other,
        })
    };
    let m = decay(half)?;
    let quarter = decay(Rational::new(1, 4))?;
    check_common(iso, half, n, m)?;
    let seq = build_sequence(&optimal, n, m, |_| u64::MAX)?;
    let p_m = quarter.max(*seq.last().unwrap());
    assemble(iso, seq, half, n, m, p_m)
}

/// A chain bound compared with what the window certifies at N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAudit {
    pub chosen_n: u64,
    /// The bound on Sep(N).
    #[serde(with = "crate::rational::serde_str")]
    pub claimed: Rational,
    /// N·h(F) for the optimal set F of size N (certified lower value of h when F is large).
    #[serde(with = "crate::rational::serde_opt_str")]
    pub witness_value: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub envelope_value: Option<Rational>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub exact_value: Option<Rational>,
    pub holds: bool,
}

/// Compares the claimed Sep(N) with the optimal witness at N and, when given, a Sep lower
/// envelope and an exact Sep table.
pub fn audit_chain(
    g: &Graph,
    iso: &ProfileTable,
    w: &ChainWitness,
    envelope: Option<&ProfileTable>,
    exact: Option<&ProfileTable>,
) -> Result<ChainAudit, BoundError> {
    let big_n = w.chosen_n;
    let nn = Rational::from_integer(big_n as i128);
    let claimed = w.sep_bound();
    let witness_value = match iso.get(big_n).and_then(|p| p.witness.clone()) {
        Some(f) if f.len() as u64 == big_n && big_n >= 2 => {
            let sub = induced_subgraph(g, &f).map_err(crate::profiles::ProfileError::from)?;
            let h = if f.len() <= 24 {
                cheeger_exact_with(&sub, 24).map_err(crate::profiles::ProfileError::from)?.lo
            } else {
                candidate_lower_bound(&sub).map_err(crate::profiles::ProfileError::from)?.0
            };
            Some(h * nn)
        }
        _ => None,
    };
    let envelope_value = envelope.and_then(|t| t.value(big_n));
    let exact_value = exact.and_then(|t| t.value(big_n));
    let holds = [witness_value, envelope_value, exact_value].iter().flatten().all(|v| claimed <= *v);
    Ok(ChainAudit { chosen_n: big_n, claimed, witness_value, envelope_value, exact_value, holds })
}
