//! End-to-end runs of the `entangle` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entangle_cli::io::{read_states, write_states, StateRecord, Table};
use entangle_core::states::{make_state, sample_ensemble, EnsembleMeasure, EnsembleSpec, Field, StateSpec};
use entangle_core::DensityMatrix;
use tempfile::TempDir;

fn entangle(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangle"))
        .current_dir(dir)
        .env_remove("ENTANGLE_BENCH_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = entangle(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    entangle(dir, args).status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

fn states_file(dir: &Path, name: &str, states: &[DensityMatrix]) -> PathBuf {
    let path = dir.join(name);
    let recs: Vec<_> = states
        .iter()
        .enumerate()
        .map(|(k, s)| StateRecord::from_state(k as u64, s))
        .collect();
    write_states(&path, &recs).unwrap();
    path
}

fn cell(t: &Table, row: usize, col: &str) -> f64 {
    t.number(row, t.column(col).unwrap()).unwrap().unwrap()
}

#[test]
fn sample_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "20", "--seed", "5", "--out", "a.jsonl"]);
    ok(d, &["sample", "--count", "20", "--seed", "5", "--jobs", "3", "--out", "b.jsonl"]);
    assert_eq!(read(d, "a.jsonl"), read(d, "b.jsonl"));
    ok(d, &["sample", "--count", "20", "--seed", "6", "--out", "c.jsonl"]);
    assert_ne!(read(d, "a.jsonl"), read(d, "c.jsonl"));

    let parsed = read_states(&d.join("a.jsonl")).unwrap();
    let spec = EnsembleSpec {
        count: 20,
        seed: 5,
        field: Field::Complex,
        measure: EnsembleMeasure::HilbertSchmidt,
        dims: (2, 2),
    };
    for ((id, rho), (k, want)) in parsed.iter().zip(sample_ensemble(spec).enumerate()) {
        assert_eq!(*id, k as u64);
        assert_eq!(rho, &want.unwrap());
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "3", "--seed", "9", "--out", "flag.jsonl"]);
    let out = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .current_dir(d)
        .env("ENTANGLE_BENCH_SEED", "9")
        .args(["sample", "--count", "3", "--out", "env.jsonl"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(d, "flag.jsonl"), read(d, "env.jsonl"));
}

#[test]
fn empty_and_qutrit_samples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "0", "--out", "none.jsonl"]);
    assert!(read(d, "none.jsonl").is_empty());
    ok(d, &["sample", "--dims", "2x3", "--field", "real", "--count", "4", "--out", "q.jsonl"]);
    let states = read_states(&d.join("q.jsonl")).unwrap();
    assert_eq!(states.len(), 4);
    assert!(states.iter().all(|(_, s)| s.dims() == (2, 3)));
    assert!(states
        .iter()
        .all(|(_, s)| s.matrix().as_slice().iter().all(|z| z.im == 0.0)));
}

#[test]
fn measure_bell_and_product() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let bell = make_state(&StateSpec::Bell(1)).unwrap();
    let product = make_state(&StateSpec::SchmidtPure(1.0)).unwrap();
    states_file(d, "s.jsonl", &[bell, product]);
    ok(d, &["measure", "--in", "s.jsonl", "--out", "m.csv"]);
    let text = String::from_utf8(read(d, "m.csv")).unwrap();
    assert!(text.starts_with("id,concurrence,c_max,negativity,log_negativity,neg_eig,eof,ree,ree_gap\n"));
    assert!(!text.contains('\r'));
    let t = Table::read(&d.join("m.csv")).unwrap();
    for col in ["concurrence", "negativity", "eof"] {
        assert!((cell(&t, 0, col) - 1.0).abs() < 1e-12);
        assert_eq!(cell(&t, 1, col), 0.0);
    }
    assert!((cell(&t, 0, "ree") - 1.0).abs() < 1e-3);
    assert!(cell(&t, 1, "ree") < 1e-4);
}

#[test]
fn measure_subset_and_qutrit_columns() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--dims", "2x3", "--count", "2", "--out", "q.jsonl"]);
    ok(d, &["measure", "--in", "q.jsonl", "--measures", "negativity", "--out", "m.csv"]);
    let t = Table::read(&d.join("m.csv")).unwrap();
    assert_eq!(t.rows.len(), 2);
    let neg = t.column("negativity").unwrap();
    for row in &t.rows {
        for (k, c) in row.iter().enumerate().skip(1) {
            assert_eq!(c.is_empty(), k != neg, "column {k}");
        }
    }
}

#[test]
fn usage_io_and_data_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["frobnicate"]), 2);
    assert_eq!(code(d, &["sweep", "--state", "ghz9x", "--channel", "pdc", "--out", "x.csv"]), 2);
    assert_eq!(code(d, &["sweep", "--state", "ghz3", "--channel", "nope", "--out", "x.csv"]), 2);
    assert_eq!(code(d, &["superposition-scan", "--n", "6", "--out", "x.csv"]), 2);
    assert_eq!(code(d, &["sample", "--dims", "3x3x", "--count", "1", "--out", "x.jsonl"]), 2);
    assert_eq!(code(d, &["optimize", "--in", "missing.jsonl", "--out", "x.csv"]), 3);
    assert_eq!(code(d, &["measure", "--in", "missing.jsonl", "--out", "x.csv"]), 3);

    let bell = make_state(&StateSpec::Bell(1)).unwrap();
    let path = states_file(d, "bad.jsonl", &[bell]);
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"id\": 1, \"dim_a\": 2, \"dim_b\": 2, \"entries\": []}\n");
    std::fs::write(&path, text).unwrap();
    let out = entangle(d, &["measure", "--in", "bad.jsonl", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.jsonl:2:"));
}

#[test]
fn non_convergence_still_writes_output() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "3", "--out", "s.jsonl"]);
    let args = [
        "measure", "--in", "s.jsonl", "--ree-tol", "1e-15", "--ree-max-iter", "1", "--out", "m.csv",
    ];
    assert_eq!(code(d, &args), 5);
    assert_eq!(Table::read(&d.join("m.csv")).unwrap().rows.len(), 3);
    assert!(d.join("m.csv.manifest.json").exists());
}

#[test]
fn optimize_bell_reaches_grid_extrema() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let bell = make_state(&StateSpec::Bell(1)).unwrap();
    let white = DensityMatrix::maximally_mixed(2, 2);
    states_file(d, "s.jsonl", &[bell, white]);
    ok(d, &["optimize", "--in", "s.jsonl", "--step", "pi/2", "--refine", "pi/3", "--out", "q.csv"]);
    let t = Table::read(&d.join("q.csv")).unwrap();
    assert!((cell(&t, 0, "mqfi_max") - 2.0).abs() < 1e-12);
    assert!(cell(&t, 0, "mqfi_min").abs() < 1e-12);
    assert!(cell(&t, 1, "mqfi_max").abs() < 1e-12);
}

#[test]
fn sweep_and_scan_rows() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sweep", "--state", "ghz3", "--channel", "adc", "--p-steps", "11", "--out", "s.csv"]);
    let t = Table::read(&d.join("s.csv")).unwrap();
    assert_eq!(t.header, ["p", "value"]);
    assert_eq!(t.rows.len(), 11);
    assert_eq!(cell(&t, 10, "p"), 1.0);
    assert!((cell(&t, 0, "value") - 3.0).abs() < 1e-9);
    assert!((cell(&t, 10, "value") - 1.0).abs() < 1e-9);

    ok(d, &["superposition-scan", "--n", "3", "--alpha-steps", "5", "--out", "scan.csv"]);
    let t = Table::read(&d.join("scan.csv")).unwrap();
    assert_eq!(t.header, ["alpha", "mean_qfi"]);
    assert!((cell(&t, 0, "mean_qfi") - 3.0).abs() < 1e-9);
    assert!((cell(&t, 4, "mean_qfi") - 7.0 / 3.0).abs() < 1e-9);
}

#[test]
fn census_counts_every_pair() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "12", "--seed", "3", "--out", "s.jsonl"]);
    ok(d, &["measure", "--in", "s.jsonl", "--out", "m.csv"]);
    ok(d, &["optimize", "--in", "s.jsonl", "--out", "q.csv"]);
    ok(d, &["census", "--in", "m.csv", "--mqfi", "q.csv", "--measures", "C,N,F", "--out", "c.csv"]);
    let t = Table::read(&d.join("c.csv")).unwrap();
    assert_eq!(t.header, ["pattern", "count", "frequency"]);
    let total: f64 = (0..t.rows.len()).map(|k| cell(&t, k, "count")).sum();
    assert_eq!(total, 66.0);

    ok(d, &["census", "--in", "m.csv", "--mqfi", "q.csv", "--measures", "F,C", "--mode", "state", "--out", "st.csv"]);
    let t = Table::read(&d.join("st.csv")).unwrap();
    assert_eq!(t.rows.len(), 6);
    let total: f64 = (0..6).map(|k| cell(&t, k, "count")).sum();
    assert_eq!(total, 12.0);

    // Optimizer output for a different state file cannot be joined.
    ok(d, &["sample", "--count", "5", "--out", "other.jsonl"]);
    ok(d, &["optimize", "--in", "other.jsonl", "--out", "other.csv"]);
    assert_eq!(code(d, &["census", "--in", "m.csv", "--mqfi", "other.csv", "--out", "x.csv"]), 4);
}

#[test]
fn scatter_draws_one_circle_per_row() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let states = [
        make_state(&StateSpec::Bell(1)).unwrap(),
        make_state(&StateSpec::SchmidtPure(1.0)).unwrap(),
        make_state(&StateSpec::Werner(0.5)).unwrap(),
    ];
    states_file(d, "s.jsonl", &states);
    ok(d, &["measure", "--in", "s.jsonl", "--measures", "concurrence,negativity", "--out", "m.csv"]);
    ok(d, &["scatter", "--in", "m.csv", "--x", "concurrence", "--y", "negativity", "--out", "p.svg"]);
    let svg = String::from_utf8(read(d, "p.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 3);
    assert!(svg.contains("negativity vs concurrence"));
    for (x, y) in [(1.0, 1.0), (0.0, 0.0), (0.25, 0.25)] {
        let found = svg.split("<circle").skip(1).any(|c| {
            let attr = |name: &str| -> f64 {
                let start = c.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
                c[start..].split('"').next().unwrap().parse().unwrap()
            };
            (attr("data-x") - x).abs() < 1e-9 && (attr("data-y") - y).abs() < 1e-9
        });
        assert!(found, "no point at ({x}, {y})");
    }
    assert_eq!(code(d, &["scatter", "--in", "m.csv", "--x", "ree", "--y", "nope", "--out", "x.svg"]), 4);

    std::fs::write(d.join("empty.csv"), "id,concurrence,negativity\n").unwrap();
    ok(d, &["scatter", "--in", "empty.csv", "--x", "concurrence", "--y", "negativity", "--out", "e.svg"]);
    let svg = String::from_utf8(read(d, "e.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 0);
    assert!(svg.contains("<line"));
}

#[test]
fn replay_reproduces_and_detects_changes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "6", "--seed", "2", "--out", "s.jsonl"]);
    ok(d, &["measure", "--in", "s.jsonl", "--out", "m.csv"]);
    ok(d, &["scatter", "--in", "m.csv", "--x", "c_max", "--y", "ree", "--out", "p.svg"]);
    for m in ["s.jsonl.manifest.json", "m.csv.manifest.json", "p.svg.manifest.json"] {
        ok(d, &["replay", "--manifest", m]);
    }
    assert!(!d.join("m.csv.replay").exists());
    ok(d, &["replay", "--manifest", "m.csv.manifest.json", "--keep"]);
    assert_eq!(read(d, "m.csv"), read(d, "m.csv.replay"));

    let manifest: serde_json::Value = serde_json::from_slice(&read(d, "m.csv.manifest.json")).unwrap();
    assert_eq!(manifest["command"], "measure");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);

    // A modified input invalidates the recorded run.
    let mut text = std::fs::read_to_string(d.join("s.jsonl")).unwrap();
    text.push('\n');
    std::fs::write(d.join("s.jsonl"), text).unwrap();
    assert_eq!(code(d, &["replay", "--manifest", "m.csv.manifest.json"]), 4);
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--count", "24", "--seed", "8", "--out", "s.jsonl"]);
    for jobs in ["1", "4"] {
        ok(d, &["--jobs", jobs, "measure", "--in", "s.jsonl", "--out", &format!("m{jobs}.csv")]);
        ok(d, &["--jobs", jobs, "optimize", "--in", "s.jsonl", "--out", &format!("q{jobs}.csv")]);
        ok(d, &["--jobs", jobs, "sweep", "--state", "w3", "--channel", "dpc", "--p-steps", "21", "--out", &format!("w{jobs}.csv")]);
    }
    for stem in ["m", "q", "w"] {
        assert_eq!(read(d, &format!("{stem}1.csv")), read(d, &format!("{stem}4.csv")));
    }
}
