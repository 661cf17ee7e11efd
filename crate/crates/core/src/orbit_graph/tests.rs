use super::*;
use crate::lowprec::{ArithmeticMode, FloatFormat, MapId};

#[test]
fn identity_graph() {
    let g = build_graph(FloatFormat::E3M4, MapId::Identity).unwrap();
    assert!(g.successors.iter().enumerate().all(|(j, &s)| s == j));
    let d = decompose(&g);
    assert_eq!(d.cycles.len(), 49);
    assert!(d.transient.iter().all(|&t| t == 0));
}

#[test]
fn constant_map_decomposition() {
    let mut g = build_graph(FloatFormat::E3M4, MapId::Identity).unwrap();
    g.successors = vec![7; g.len()];
    let d = decompose(&g);
    assert_eq!(d.cycles, vec![vec![7]]);
    assert!(d.transient.iter().all(|&t| t <= 1));
    assert_eq!(d.component_sizes, vec![49]);
}

#[test]
fn gauss_one_maps_to_zero() {
    for f in [FloatFormat::E3M4, FloatFormat::BINARY16] {
        let g = build_graph(f, MapId::Gauss).unwrap();
        assert_eq!(g.successors[0], g.len() - 1);
        assert_eq!(g.successors[g.len() - 1], g.len() - 1);
    }
}

#[test]
fn binary16_gauss_boundaries() {
    let g = build_graph(FloatFormat::BINARY16, MapId::Gauss).unwrap();
    let zero = g.len() - 1;
    let last_nonzero = (0..zero).rev().find(|&j| g.successors[j] != zero && !g.was_redirected(j)).unwrap();
    assert_eq!(last_nonzero + 1, 10224);
    assert!((g.values[last_nonzero] - 0.000993).abs() < 5e-7);
    assert_eq!(g.redirected.first().map(|j| j + 1), Some(15105));
    assert!(g.redirected.iter().all(|&j| g.successors[j] == 0));
}

fn check_invariants(g: &FunctionalGraph, d: &OrbitDecomposition) {
    let n = g.len();
    assert!(g.successors.iter().all(|&s| s < n));
    assert_eq!(d.component_sizes.iter().sum::<usize>(), n);
    for v in 0..n {
        let mut u = v;
        for _ in 0..d.transient[v] {
            u = g.successors[u];
        }
        assert!(d.cycles[d.component[v]].contains(&u));
        if d.transient[v] == 0 {
            assert!(d.cycles[d.component[v]].contains(&v));
        }
    }
    let mut seen = vec![false; n];
    for c in &d.cycles {
        assert_eq!(c[0], *c.iter().min().unwrap());
        for w in c.windows(2) {
            assert_eq!(g.successors[w[0]], w[1]);
        }
        assert_eq!(g.successors[*c.last().unwrap()], c[0]);
        for &u in c {
            assert!(!seen[u]);
            seen[u] = true;
        }
    }
}

#[test]
fn decomposition_invariants_across_formats() {
    for f in [FloatFormat::E3M4, FloatFormat::E4M3, FloatFormat::E5M2, FloatFormat::BINARY16] {
        for map in [MapId::Gauss, MapId::Logistic, MapId::Bernoulli] {
            for nan_policy in [NanPolicy::FirstNode, NanPolicy::Sink] {
                let g = build_graph_with(f, map, GraphOptions { nan_policy, ..Default::default() }).unwrap();
                let d = decompose(&g);
                check_invariants(&g, &d);
                assert_eq!(decompose(&g), d);
            }
        }
    }
}

#[test]
fn e3m4_gauss_cycles_by_convention() {
    let step = decompose(&build_graph(FloatFormat::E3M4, MapId::Gauss).unwrap());
    assert_eq!(step.cycle_lengths(), vec![1, 1]);
    let opts = GraphOptions { mode: ArithmeticMode::SingleRounding, ..Default::default() };
    let single = decompose(&build_graph_with(FloatFormat::E3M4, MapId::Gauss, opts).unwrap());
    assert_eq!(single.cycle_lengths(), vec![1, 2, 2, 3]);
}

#[test]
fn scaling_fit() {
    let ns = [49usize, 225, 15361, 1 << 20];
    let ls: Vec<usize> = [7usize, 15, 124, 1024].to_vec();
    let exact: Vec<f64> = ns.iter().map(|&n| (n as f64).sqrt()).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = exact.iter().map(|v| v.ln()).collect();
    let (m, _) = crate::stats::least_squares_fit(&xs, &ys).unwrap();
    assert!((m - 0.5).abs() < 1e-9);
    assert!(fit_length_scaling(&ns, &ls).is_ok());
    assert!(scaling_report(MapId::Gauss, &[FloatFormat::E3M4], GraphOptions::default()).is_err());
}

#[test]
fn gauss_scaling_slope() {
    let formats = [FloatFormat::E3M4, FloatFormat::E4M3, FloatFormat::E5M2, FloatFormat::E4M5, FloatFormat::BINARY16];
    let r = scaling_report(MapId::Gauss, &formats, GraphOptions::default()).unwrap();
    assert!(r.slope >= 0.25 && r.slope <= 0.75, "{r:?}");
}

#[test]
fn ks_distance_properties() {
    let grid: Vec<(f64, f64)> = (0..=1000).map(|i| (i as f64 / 1000.0, 1.0)).collect();
    let (d, _) = ks_distance(&grid, MeasureId::Lebesgue).unwrap();
    assert!(d <= 1.0 / 1001.0 + 1e-12);
    let (d, _) = ks_distance(&[(0.0, 1.0)], MeasureId::Gauss).unwrap();
    assert_eq!(d, 1.0);
    let g = build_graph(FloatFormat::BINARY16, MapId::Gauss).unwrap();
    let dec = decompose(&g);
    for m in [MeasureId::Gauss, MeasureId::Lebesgue] {
        let r = measure_compare(&dec, &g, m).unwrap();
        assert!((0.0..=1.0).contains(&r.ks_distance));
    }
}

/// A long binary64 orbit samples the Gauss measure closely; the KS distance
/// of its empirical distribution is the yardstick for low-precision graphs.
#[test]
fn binary64_long_orbit_oracle() {
    let mut x: f64 = 0.1234567;
    let gauss = |x: f64| if x == 0.0 { 0.0 } else { (1.0 / x).fract() };
    for _ in 0..1000 {
        x = gauss(x);
    }
    let mut atoms = Vec::with_capacity(1_000_000);
    for _ in 0..1_000_000 {
        x = gauss(x);
        atoms.push((x, 1.0));
    }
    let (d_gauss, _) = ks_distance(&atoms, MeasureId::Gauss).unwrap();
    let (d_leb, _) = ks_distance(&atoms, MeasureId::Lebesgue).unwrap();
    assert!(d_gauss < 5e-3, "{d_gauss}");
    assert!(d_leb > 0.05, "{d_leb}");
}

#[test]
fn shadow_of_exact_fixed_point_is_exact() {
    // x = 0.5 is not a fixed point, but any orbit whose points are exact
    // preimages has zero defect; build one by hand in binary64.
    let mut g = build_graph(FloatFormat::E3M4, MapId::Gauss).unwrap();
    g.format = FloatFormat::BINARY64;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    g.values = vec![phi, phi];
    g.successors = vec![1, 0];
    g.redirected.clear();
    let r = shadow_refine_gauss(&g, 0, 10).unwrap();
    assert!(r.max_distance < 1e-15);
}

#[test]
fn shadow_e3m4_exhaustive() {
    let g = build_graph(FloatFormat::E3M4, MapId::Gauss).unwrap();
    let mut shadowed = 0;
    for start in 0..g.len() {
        match shadow_refine_gauss(&g, start, 20) {
            Ok(r) => {
                shadowed += 1;
                assert!(r.contraction_holds, "start {start}");
                assert!(r.recurrence_residuals.iter().all(|&e| e <= SHADOW_RESIDUAL_BOUND));
                assert!(r.distances.iter().all(|&d| d >= 0.0));
            }
            Err(crate::Error::InsufficientData(_)) | Err(crate::Error::Unshadowable(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(shadowed > 0);
}

#[test]
fn edge_table_layout() {
    let g = build_graph(FloatFormat::E3M4, MapId::Gauss).unwrap();
    let mut buf = Vec::new();
    write_edges(&g, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 50);
    assert_eq!(lines[0], "Column1");
    assert_eq!(lines[1], "49");
    assert!(to_dot(&g).unwrap().starts_with("digraph"));
    let big = build_graph(FloatFormat::BINARY16, MapId::Gauss).unwrap();
    assert!(to_dot(&big).is_err());
}
