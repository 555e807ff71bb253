use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

use sepprof_core::graph::io::{read_graph, write_graph};

fn sepprof(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepprof"))
        .args(args)
        .current_dir(dir)
        .env_remove("SEPPROF_BUDGET")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sepprof(dir, args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn gen_lattice_has_the_diamond_size() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "6", "--out", "g.txt"]);
    let text = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert!(text.starts_with("#sepprof-graph 1 85 "));
    let g = read_graph(&text).unwrap();
    // Independent count of lattice points with |x| + |y| ≤ 6.
    let count = (-6i32..=6).flat_map(|x| (-6i32..=6).map(move |y| (x, y))).filter(|(x, y)| x.abs() + y.abs() <= 6).count();
    assert_eq!(g.vertex_count(), count);
    assert_eq!(count, 2 * 36 + 2 * 6 + 1);
}

#[test]
fn iso_on_the_plane_window() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "6", "--out", "g.txt"]);
    let csv = ok(dir.path(), &["iso", "--graph", "g.txt", "--nmax", "8"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,value_num,value_den,value_f64,exact,ambient_certified,witness_size,trivial");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(&rows[0][..3], ["1", "4", "1"]);
    assert_eq!(&rows[3][..3], ["4", "2", "1"]);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepprof(dir.path(), &["iso", "--graph", "g.txt", "--nmax", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(sepprof(dir.path(), &["transmogrify"]).status.code(), Some(1));
    // A missing input file is also the caller's mistake.
    assert_eq!(sepprof(dir.path(), &["iso", "--graph", "nope.txt", "--nmax", "3"]).status.code(), Some(1));
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["gen", "--family", "lattice", "--d", "3", "--radius", "3", "--out", "a.txt"],
        &["gen", "--family", "cayley", "--group", "heisenberg", "--radius", "3", "--out", "b.txt"],
        &["gen", "--family", "cayley", "--group", "lamplighter", "--radius", "4", "--out", "c.txt"],
        &["gen", "--family", "carpet", "--level", "2", "--out", "d.txt"],
        &["gen", "--family", "percolation", "--p", "0.7", "--box", "8", "--seed", "5", "--out", "e.txt"],
    ];
    for args in cases {
        let summary = json(&ok(dir.path(), args));
        let file = dir.path().join(args.last().unwrap());
        let text = fs::read_to_string(&file).unwrap();
        let g = read_graph(&text).unwrap();
        assert_eq!(write_graph(&g), text, "{args:?}");
        assert_eq!(summary["vertices"], g.vertex_count());
        let manifest = json(&fs::read_to_string(format!("{}.manifest.json", file.display())).unwrap());
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        assert_eq!(manifest["outputs"][file.file_name().unwrap().to_str().unwrap()], digest);
    }
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "6", "--out", "g.txt"]);
    for cmd in ["iso", "sep"] {
        ok(dir.path(), &["--threads", "1", cmd, "--graph", "g.txt", "--nmax", "8", "--out", "one.csv"]);
        ok(dir.path(), &["--threads", "3", cmd, "--graph", "g.txt", "--nmax", "8", "--out", "three.csv"]);
        ok(dir.path(), &["--threads", "1", cmd, "--graph", "g.txt", "--nmax", "8", "--out", "again.csv"]);
        let one = fs::read(dir.path().join("one.csv")).unwrap();
        assert_eq!(one, fs::read(dir.path().join("three.csv")).unwrap(), "{cmd}");
        assert_eq!(one, fs::read(dir.path().join("again.csv")).unwrap(), "{cmd}");
    }
}

#[test]
fn budget_exhaustion_writes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "6", "--out", "g.txt"]);
    let out = sepprof(dir.path(), &["--budget", "50", "iso", "--graph", "g.txt", "--nmax", "8", "--out", "p.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let csv = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(csv.lines().skip(1).any(|l| l.contains(",false,")), "some rows must be flagged inexact");
    let manifest = json(&fs::read_to_string(dir.path().join("p.csv.manifest.json")).unwrap());
    assert!(manifest["status"].as_str().unwrap().contains("budget"));
    assert_eq!(manifest["budget"]["max_sets"], 50);

    let env = Command::new(env!("CARGO_BIN_EXE_sepprof"))
        .args(["iso", "--graph", "g.txt", "--nmax", "8"])
        .current_dir(dir.path())
        .env("SEPPROF_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn precondition_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "6", "--out", "g.txt"]);
    let out = sepprof(dir.path(), &["cheeger", "--graph", "g.txt", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(dir.path().join("empty.csv"), "n,value_num,value_den,value_f64,exact,ambient_certified,witness_size,trivial\n")
        .unwrap();
    let out = sepprof(dir.path(), &["report", "--profile", "empty.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no rows"));
}

#[test]
fn cheeger_on_a_subset() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "1", "--radius", "10", "--out", "z.txt"]);
    // Vertices 3..=8 form a path of six vertices: h = 1/3.
    fs::write(dir.path().join("f.txt"), "3 4 5 6 7 8\n").unwrap();
    for mode in ["exact", "sweep", "shell"] {
        let r = json(&ok(dir.path(), &["cheeger", "--graph", "z.txt", "--subset", "f.txt", "--mode", mode]));
        if mode != "shell" {
            assert_eq!(r["hi"], "1/3", "{mode}");
        }
        let w: Vec<u64> = r["witness"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert!(w.iter().all(|v| (3..=8).contains(v)));
    }
    let r = json(&ok(dir.path(), &["cheeger", "--graph", "z.txt", "--subset", "f.txt", "--mode", "exact"]));
    assert_eq!(r["lo"], "1/3");
    assert_eq!(r["witness"], serde_json::json!([3, 4, 5]));
}

#[test]
fn fit_and_report_on_the_line() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "1", "--radius", "40", "--out", "z.txt"]);
    ok(dir.path(), &["iso", "--graph", "z.txt", "--nmax", "30", "--out", "iso.csv"]);
    let r = json(&ok(dir.path(), &["fit", "--profile", "iso.csv", "--kind", "iso", "--form", "poly-lower", "--params", "beta=1"]));
    assert_eq!(r["verdict"], "Consistent");
    assert!((r["slope"].as_f64().unwrap() + 1.0).abs() < 0.01);

    ok(dir.path(), &["sep", "--graph", "z.txt", "--nmax", "9", "--out", "sep.csv"]);
    ok(dir.path(), &["report", "--profile", "sep.csv", "--overlay", "poly-lower:beta=1", "--fit", "--out", "plot.csv"]);
    let plot = fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    let mut lines = plot.lines();
    assert_eq!(lines.next().unwrap(), "n,log2_n,value,log2_value,poly-lower");
    for l in lines.skip(2) {
        assert_eq!(l.split(',').nth(2), Some("3"));
    }
}

#[test]
fn check_suites_run() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "lattice", "--d", "1", "--radius", "40", "--out", "z.txt"]);
    let chain = json(&ok(dir.path(), &["check", "--suite", "chain", "--graph", "z.txt", "--nmax", "32"]));
    assert!(chain["summary"]["witnesses"].as_u64().unwrap() > 0);
    assert_eq!(chain["summary"]["violations"], 0);
    let decay = json(&ok(dir.path(), &["check", "--suite", "decay", "--graph", "z.txt", "--nmax", "32"]));
    assert_eq!(decay["summary"]["violations"], 0);
    let lemma = json(&ok(dir.path(), &["check", "--suite", "lemma-optimal", "--graph", "z.txt", "--nmax", "20"]));
    assert_eq!(lemma["summary"]["violations"], 0);
    let jv = json(&ok(dir.path(), &["check", "--suite", "jv", "--graph", "z.txt"]));
    assert_eq!(jv["entries"]["distortion"]["distortion"], 1.0);

    ok(dir.path(), &["gen", "--family", "lattice", "--d", "2", "--radius", "10", "--out", "p.txt"]);
    let growth = json(&ok(dir.path(), &["check", "--suite", "growth-upper", "--graph", "p.txt", "--nmax", "100"]));
    assert_eq!(growth["summary"]["fit_verdict"], "Consistent");
    assert_eq!(growth["summary"]["shell_failures"], 0);
    let local = json(&ok(
        dir.path(),
        &["check", "--suite", "local-poly", "--graph", "p.txt", "--nmax", "60", "--params", "d1=2,d2=2,eta=1/2"],
    ));
    assert_eq!(local["summary"].as_array().unwrap().len(), 2);
}

#[test]
fn percolate_reports_each_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&ok(dir.path(), &["percolate", "--p", "0.7", "--box", "10", "--seeds", "1,2,3"]));
    assert_eq!(r["runs"].as_array().unwrap().len(), 3);
    let d = r["density_mean"].as_f64().unwrap();
    assert!(d > 0.5 && d <= 1.0);
}
