use std::path::Path;
use std::process::Command;

use revlab::runner::config::{Experiment, Manifest};
use revlab::runner::{execute, parse_manifest, run};
use revlab::Error;

fn revlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_revlab"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let h = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect();
    (h, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const REVERSE: &str = r#"{
  "experiment": {
    "kind": "reverse",
    "model": {"model": "transverse_ising", "n": 8, "params": {"J": 1, "h": 2}},
    "q": [2, 4, 6, 8],
    "disturbance": {"type": "projector", "sites": [0, 1, 2, 3]}
  },
  "seed": 3,
  "output": {"dir": "out", "stem": "reverse"}
}"#;

#[test]
fn reverse_sweep_writes_four_bounded_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let w = run(&parse_manifest(REVERSE).unwrap(), tmp.path()).unwrap();
    let (h, rows) = read_csv(&w.csv);
    assert_eq!(rows.len(), 4);
    let (res, rhs, q) = (col(&h, "residual"), col(&h, "rhs_bound"), col(&h, "q"));
    for (r, want_q) in rows.iter().zip([2, 4, 6, 8]) {
        assert_eq!(r[q], want_q.to_string());
        let (a, b): (f64, f64) = (r[res].parse().unwrap(), r[rhs].parse().unwrap());
        assert!(a <= b, "{a} > {b}");
    }
    let echo: serde_json::Value = serde_json::from_slice(&std::fs::read(&w.echo).unwrap()).unwrap();
    assert_eq!(echo["kind"], "reverse");
    assert_eq!(echo["summary"]["violations"], 0);
    // resolved defaults are echoed
    assert_eq!(echo["manifest"]["experiment"]["methods"][0], "chebyshev");
    assert!(echo["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{
      "experiment": {
        "kind": "reverse",
        "model": {"model": "random_two_local", "n": 7, "params": {"bonds": 9, "seed": 11}},
        "q": [1, 2, 3],
        "methods": ["chebyshev", "optimal"],
        "disturbance": {"type": "pauli", "sites": [2, 3]}
      },
      "output": {"dir": "a", "stem": "det"}
    }"#;
    let cfg = write(tmp.path(), "det.json", text);
    let mut outputs = Vec::new();
    for (threads, dir) in [("1", "t1"), ("3", "t3")] {
        let base = tmp.path().join(dir);
        std::fs::create_dir_all(&base).unwrap();
        let st = revlab()
            .args(["run", cfg.to_str().unwrap(), "--base", base.to_str().unwrap()])
            .env("REVLAB_THREADS", threads)
            .status()
            .unwrap();
        assert!(st.success());
        outputs.push(std::fs::read(base.join("a/det.csv")).unwrap());
    }
    let again = execute(&parse_manifest(text).unwrap()).unwrap().table.to_csv().unwrap();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], again);
}

#[test]
fn unknown_model_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"experiment": {"kind": "tail", "model": {"model": "heisenberg", "n": 6},
            "disturbance": {"type": "pauli", "sites": [0]}}, "output": {"dir": "out"}}"#,
    );
    let out = revlab()
        .args(["run", cfg.to_str().unwrap(), "--base", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("heisenberg"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_key_is_named_and_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.json",
        r#"{"experiment": {"kind": "lmg_scaling", "n_list": [8, 16], "lamda": 1},
            "output": {"dir": "out"}}"#,
    );
    let out = revlab().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn solver_errors_carry_coordinates() {
    // the torus is four-fold degenerate: no unique state to reverse
    let m = parse_manifest(
        r#"{"experiment": {"kind": "reverse", "model": {"model": "toric_code", "params": {"Lx": 2, "Ly": 2}},
            "q": [1], "disturbance": {"type": "pauli", "sites": [0]}}, "output": {"dir": "x"}}"#,
    )
    .unwrap();
    let tmp = tempfile::tempdir().unwrap();
    match run(&m, tmp.path()) {
        Err(Error::Experiment { at, source }) => {
            assert!(at.contains("reverse"), "{at}");
            assert!(matches!(*source, Error::DegenerateGroundState(4)));
        }
        other => panic!("{other:?}"),
    }
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn stem_cannot_escape_the_output_dir() {
    let text = REVERSE.replace(r#""stem": "reverse""#, r#""stem": "../escape""#);
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(run(&parse_manifest(&text).unwrap(), tmp.path()), Err(Error::Config(_))));
}

#[test]
fn filter_profile_tracks_its_bounds() {
    let m = parse_manifest(
        r#"{"experiment": {"kind": "filter_profile", "model": {"model": "transverse_ising", "n": 10,
            "params": {"h": 2}}, "q": 6, "l_size": 4, "points": 801}, "output": {"dir": "x"}}"#,
    )
    .unwrap();
    let out = execute(&m).unwrap();
    let t = &out.table;
    assert_eq!(t.header, ["x", "F_R", "bound"]);
    let first: f64 = t.rows[0][1].parse().unwrap();
    assert!((first - 1.0).abs() < 1e-10);
    let mut bounded = 0;
    for r in &t.rows {
        let (f, b): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        if b.is_finite() {
            assert!(f.abs() <= b * (1.0 + 1e-12), "x={} |F|={f} > {b}", r[0]);
            bounded += 1;
        }
    }
    assert!(bounded > 600);
}

#[test]
fn every_kind_runs() {
    let manifests = [
        r#"{"experiment": {"kind": "tail", "model": {"model": "transverse_ising", "n": 6, "params": {"h": 1.5}},
            "disturbance": {"type": "operator", "text": "0.5 * X0 Z1\n1 * I", "region": [0, 1]}}, "output": {"dir": "x"}}"#,
        r#"{"experiment": {"kind": "fluctuation", "state": {"type": "ground",
            "model": {"model": "transverse_ising", "n": 8, "params": {"h": 2}}}}, "output": {"dir": "x"}}"#,
        r#"{"experiment": {"kind": "lmg_scaling", "n_list": [32, 64, 128]}, "output": {"dir": "x"}}"#,
        r#"{"experiment": {"kind": "meanfield", "state": {"type": "special", "state": "ghz", "n": 6}},
            "output": {"dir": "x"}}"#,
        r#"{"experiment": {"kind": "macroscopicity", "state": {"type": "special", "state": "ghz", "n": 6},
            "projector": {"type": "projector", "sites": [0, 1, 2, 3, 4, 5], "bits": [0, 0, 0, 0, 0, 0]},
            "q": [1, 3, 6]}, "output": {"dir": "x"}}"#,
        r#"{"experiment": {"kind": "fluctuation", "state": {"type": "random", "n": 5},
            "additive": {"letter": "X", "sites": [0, 2, 4]}}, "seed": 5, "output": {"dir": "x"}}"#,
    ];
    for text in manifests {
        let m: Manifest = parse_manifest(text).unwrap();
        let out = execute(&m).unwrap_or_else(|e| panic!("{}: {e}", m.experiment.kind()));
        assert!(!out.table.rows.is_empty(), "{}", out.kind);
        match &m.experiment {
            Experiment::Tail { .. } => assert_eq!(out.summary["violations"], 0),
            Experiment::Meanfield { .. } => {
                assert!((out.summary["sum"].as_f64().unwrap() - 1.25).abs() < 1e-12)
            }
            Experiment::Macroscopicity { .. } => {
                let last = out.table.rows.last().unwrap();
                assert!(last[4].parse::<f64>().unwrap() < 1e-10);
                let first: f64 = out.table.rows[0][4].parse().unwrap();
                assert!((first - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
            }
            Experiment::Fluctuation { .. } => {
                let total: f64 = out.table.rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-9);
                assert!(out.summary["fisher"]["neff_lower"].as_f64().unwrap() <= out.summary["fisher"]["neff_upper"].as_f64().unwrap() + 1e-9);
            }
            _ => {}
        }
    }
}

#[test]
fn model_spectrum_command() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "m.json",
        r#"{"model": "toric_code", "params": {"Lx": 2, "Ly": 2}, "boundary": "torus"}"#,
    );
    let out = revlab().args(["model", "spectrum", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degeneracy"], 4);
    let bad = write(tmp.path(), "b.json", r#"{"model": "toric_code", "params": {"Lz": 2}}"#);
    let out = revlab().args(["model", "spectrum", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let out = revlab()
        .args(["verify", "--level", "quick"])
        .env("REVLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mutated_window_is_caught_by_verify() {
    let out = revlab().args(["verify", "--level", "quick", "--mutate-ec"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("broken: C1")), "{text}");
}
