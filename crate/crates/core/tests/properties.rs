use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sepprof_core::bounds::{
    chain_lower_bound_symmetric, distortion, fit_and_compare, geometric_decay, BoundExpr, BoundForm, Verdict,
};
use sepprof_core::cuts::{cheeger_exact, cheeger_sweep};
use sepprof_core::generators::{
    cayley_ball, edge_coin, lattice_window, sierpinski_carpet, CarpetPattern, GroupSpec,
};
use sepprof_core::graph::io::{read_graph, write_graph};
use sepprof_core::graph::{induced_subgraph, is_connected, Graph, VertexSet};
use sepprof_core::profiles::{iso_profile, sep_exact, ProfileKind, ProfilePoint, ProfileTable};
use sepprof_core::rational::{self, rat, Rational};

/// Random connected subset of `size` vertices grown from `start`.
fn grow(g: &Graph, start: u32, size: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    let mut inside = vec![start];
    let mut frontier: Vec<u32> = g.neighbors(start).to_vec();
    while inside.len() < size && !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(i);
        if inside.contains(&v) {
            continue;
        }
        inside.push(v);
        frontier.extend(g.neighbors(v).iter().filter(|w| !inside.contains(w)));
    }
    VertexSet::new(g.vertex_count(), inside).unwrap()
}

fn check_graph_invariants(g: &Graph, degree: usize) {
    for v in g.vertices() {
        assert!(g.degree(v) <= degree);
        for &w in g.neighbors(v) {
            assert!(g.has_edge(w, v), "asymmetric edge {v}-{w}");
            assert_ne!(v, w);
        }
    }
}

#[test]
fn generators_respect_degree_bounds() {
    for d in 1..=3 {
        check_graph_invariants(&lattice_window(d, 4).unwrap(), 2 * d as usize);
    }
    check_graph_invariants(&cayley_ball(GroupSpec::Heisenberg3, 4).unwrap(), 4);
    check_graph_invariants(&cayley_ball(GroupSpec::LamplighterZ2overZ, 5).unwrap(), 3);
    check_graph_invariants(&sierpinski_carpet(&CarpetPattern::standard(2), 2).unwrap(), 4);
}

#[test]
fn free_abelian_balls_are_lattice_windows() {
    for d in 1..=3 {
        for r in 1..=4 {
            let a = cayley_ball(GroupSpec::FreeAbelian(d), r).unwrap();
            let b = lattice_window(d, r).unwrap();
            assert_eq!(a.vertex_count(), b.vertex_count());
            for v in a.vertices() {
                assert_eq!(a.coords(v), b.coords(v));
                assert_eq!(a.neighbors(v), b.neighbors(v));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_print_and_parse(num in -10_000i128..10_000, den in 1i128..10_000) {
        let r = rat(num, den);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn graph_files_round_trip(d in 1u32..=3, r in 1u32..=4) {
        let g = lattice_window(d, r).unwrap();
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        prop_assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn percolation_coupling_is_monotone(seed in any::<u64>(), x in -50i64..50, y in -50i64..50, axis in 0u32..2, p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let c = edge_coin(seed, &[x, y], axis);
        prop_assert!((0.0..1.0).contains(&c));
        if c < lo {
            prop_assert!(c < hi);
        }
    }

    #[test]
    fn cheeger_sweep_brackets_the_exact_value(seed in any::<u64>(), size in 8usize..=14, carpet in any::<bool>()) {
        let g = if carpet { sierpinski_carpet(&CarpetPattern::standard(2), 2).unwrap() } else { lattice_window(2, 6).unwrap() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = *g.vertices().collect::<Vec<_>>().choose(&mut rng).unwrap();
        let f = grow(&g, start, size, &mut rng);
        let sub = induced_subgraph(&g, &f).unwrap();
        prop_assert!(is_connected(&sub, None));
        let exact = cheeger_exact(&sub).unwrap();
        let sweep = cheeger_sweep(&sub).unwrap();
        prop_assert_eq!(exact.lo, exact.hi);
        prop_assert!(sweep.lo <= exact.hi && exact.hi <= sweep.hi);
        prop_assert!(exact.hi > Rational::from_integer(0));
    }

    #[test]
    fn distortion_once_expanding_is_stretch_times_compression(seed in any::<u64>(), n in 2usize..8, factor in 1.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]).collect();
        let dist: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| (a[0] - b[0]).abs() + (a[1] - b[1]).abs()).collect())
            .collect();
        let (mut stretch, mut compress) = (0.0f64, 0.0f64);
        for i in 0..n {
            for j in i + 1..n {
                let e = ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt();
                stretch = stretch.max(e / dist[i][j]);
                compress = compress.max(dist[i][j] / e);
            }
        }
        let r = distortion(&dist, &pts, 2.0).unwrap();
        prop_assert!(r.distortion >= 1.0 - 1e-12 && r.distortion >= stretch * compress * (1.0 - 1e-12));
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * factor / stretch).collect()).collect();
        let s = distortion(&dist, &scaled, 2.0).unwrap();
        prop_assert!((s.distortion - stretch * compress).abs() <= 1e-9 * s.distortion);
        prop_assert!(s.distortion <= 2f64.sqrt() + 1e-9);
    }

    #[test]
    fn decay_of_power_laws(c in 1i128..20, x in 1u64..50) {
        let mut t = ProfileTable::new(ProfileKind::Iso, "power");
        for n in 1..=400u64 {
            let mut p = ProfilePoint::new(n, rat(c, n as i128));
            p.exact = true;
            p.ambient_certified = true;
            t.points.push(p);
        }
        prop_assert_eq!(geometric_decay(&t, rat(1, 2), x).unwrap(), 2 * x);
        prop_assert_eq!(geometric_decay(&t, rat(1, 4), x).unwrap(), 4 * x);
    }

    #[test]
    fn fitted_lower_forms_never_cross_the_data(beta_num in 1i128..4, noise_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        let beta = rat(beta_num, 4);
        let mut t = ProfileTable::new(ProfileKind::Iso, "noisy");
        for n in 1..=60u64 {
            let v = (n as f64).powf(-rational::to_f64(&beta)) * rng.gen_range(1.0..2.0);
            let mut p = ProfilePoint::new(n, rational::lower_rational(v, 1e-9).unwrap());
            p.exact = true;
            p.ambient_certified = true;
            t.points.push(p);
        }
        let b = BoundExpr::new(BoundForm::PolyLower, [("beta", beta)]).unwrap();
        let r = fit_and_compare(&t, &b).unwrap();
        prop_assert_ne!(r.verdict, Verdict::Violated);
        for p in &t.points[1..] {
            prop_assert!(r.bound.evaluate_at(p.n as f64).unwrap() <= rational::to_f64(&p.value) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn isoperimetric_profiles_decrease_and_separation_increases() {
    for g in [lattice_window(1, 20).unwrap(), lattice_window(2, 5).unwrap(), cayley_ball(GroupSpec::Heisenberg3, 3).unwrap()] {
        let iso = iso_profile(&g, 8).unwrap();
        assert_eq!(iso.table.monotonicity_violation(), None, "{}", g.label());
        let sep = sep_exact(&g, 8).unwrap();
        assert_eq!(sep.monotonicity_violation(), None, "{}", g.label());
    }
}

#[test]
fn chain_bounds_never_exceed_the_lemma_value() {
    let g = lattice_window(1, 40).unwrap();
    let iso = iso_profile(&g, 32).unwrap().table;
    let mut found = 0;
    for eps in [rat(1, 4), rat(1, 2), rat(3, 4)] {
        for n in 2..16u64 {
            for m in n..=16 {
                if let Ok(w) = chain_lower_bound_symmetric(&iso, eps, n, m) {
                    found += 1;
                    assert!(w.lemma_value >= w.bound_value);
                    assert!(w.chosen_n >= n && w.chosen_n <= w.p_m);
                    assert!(w.sequence.windows(2).all(|s| s[1] > s[0]));
                }
            }
        }
    }
    assert!(found > 10);
}
