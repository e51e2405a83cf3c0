use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tscv::report::RunReport;

fn tscv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tscv"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

const EX32: &str = r#""scale": {"kind": "harmonic", "n_max": 50}, "t0": 0, "t1": 1, "lagrangian": "r^2 - r^4", "alpha": 0, "beta": 0"#;
const INTEGERS: &str = r#""scale": {"kind": "uniform", "start": 0, "end": 4, "step": 1}, "t0": 0, "t1": 4, "lagrangian": "r^2", "alpha": 0, "beta": 4"#;

#[test]
fn inspect_small_harmonic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "h.json",
        r#"{"scale": {"kind": "harmonic", "n_max": 4}, "t0": 0, "t1": 1, "lagrangian": "r^2", "alpha": 0, "beta": 0}"#,
    );
    let out = tscv(&["inspect", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).take(5).collect();
    assert!(rows[0].contains('—'));
    assert!(rows[1].trim_start().starts_with("0.25 ") && rows[1].contains("0.0833333333"));
    assert!(rows[2].contains("0.1666666667"));
    assert!(
        rows[3].trim_start().starts_with("0.5 ") && rows[3].trim_end().ends_with("left-scattered")
    );
    assert!(rows[4].contains("maximum"));
}

#[test]
fn inspect_integers_has_unit_graininess() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "z.json", &format!("{{{INTEGERS}}}"));
    let report = dir.path().join("r.json");
    let out = tscv(&[
        "inspect",
        f.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = RunReport::from_json(&std::fs::read_to_string(report).unwrap()).unwrap();
    let mus: Vec<f64> = r.scale_table.unwrap().iter().map(|row| row.mu).collect();
    assert_eq!(mus, vec![1.0, 1.0, 1.0, 1.0, 0.0]);
}

#[test]
fn eval_example_and_spike() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(
        dir.path(),
        "z.json",
        &format!(r#"{{{EX32}, "trajectory": {{"kind": "expr", "formula": "0"}}}}"#),
    );
    let out = tscv(&["eval", zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("functional      0\n"));

    let spike = write(
        dir.path(),
        "s.json",
        &format!(
            r#"{{{EX32}, "trajectory": {{"kind": "samples", "points": [0, 0.3333333333333333, 0.5, 1], "values": [0, 0, 1, 0]}}}}"#
        ),
    );
    let report = dir.path().join("r.json");
    let out = tscv(&[
        "eval",
        spike.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = RunReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!((r.functional_value.unwrap() + 216.0).abs() < 1e-9);
    assert_eq!(r.norm_strong, Some(1.0));

    let missing = write(dir.path(), "m.json", &format!("{{{EX32}}}"));
    let out = tscv(&["eval", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing trajectory"));
}

#[test]
fn solve_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "z.json",
        &format!(r#"{{{INTEGERS}, "trajectory": {{"kind": "expr", "formula": "t^2/4"}}}}"#),
    );
    let report = dir.path().join("r.json");
    let out = tscv(&[
        "solve",
        f.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("converged in 1 iterations"));
    let sol = RunReport::from_json(&std::fs::read_to_string(report).unwrap())
        .unwrap()
        .solution
        .unwrap();
    for (t, x) in sol.t.iter().zip(&sol.x) {
        assert!((t - x).abs() < 1e-12);
    }

    let harmonic = write(
        dir.path(),
        "h.json",
        r#"{"scale": {"kind": "harmonic", "n_max": 30}, "t0": 0, "t1": 1, "lagrangian": "r^2", "alpha": 0, "beta": 1}"#,
    );
    let report = dir.path().join("h-r.json");
    let out = tscv(&[
        "solve",
        harmonic.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sol = RunReport::from_json(&std::fs::read_to_string(report).unwrap())
        .unwrap()
        .solution
        .unwrap();
    for (t, x) in sol.t.iter().zip(&sol.x) {
        assert!((t - x).abs() < 1e-10);
    }
}

#[test]
fn solve_failures() {
    let dir = tempfile::tempdir().unwrap();
    let dense = write(
        dir.path(),
        "d.json",
        r#"{"scale": {"kind": "dense", "lo": 0, "hi": 1}, "t0": 0, "t1": 1, "lagrangian": "r^2", "alpha": 0, "beta": 1}"#,
    );
    let out = tscv(&["solve", dense.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("discrete scales only"));

    let hard = write(
        dir.path(),
        "n.json",
        r#"{"scale": {"kind": "uniform", "start": 0, "end": 6, "step": 1}, "t0": 0, "t1": 6, "lagrangian": "r^4 + exp(x)", "alpha": 0, "beta": 3}"#,
    );
    let report = dir.path().join("r.json");
    let out = tscv(&[
        "solve",
        hard.to_str().unwrap(),
        "--max-iter",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("did not converge"));
    let r = RunReport::from_json(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert!(!r.solution.unwrap().converged);
}

#[test]
fn analyze_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // solved integer quadratic: consistent
    let z = write(dir.path(), "z.json", &format!("{{{INTEGERS}}}"));
    assert_eq!(
        tscv(&[
            "analyze",
            z.to_str().unwrap(),
            "--q-min=-10",
            "--q-max",
            "10"
        ])
        .status
        .code(),
        Some(0)
    );

    // zero trajectory on the harmonic scale: hypothesis fails, violations listed
    let ex = write(
        dir.path(),
        "e.json",
        &format!(r#"{{{EX32}, "trajectory": {{"kind": "expr", "formula": "0"}}}}"#),
    );
    let report = dir.path().join("r.json");
    let out = tscv(&[
        "analyze",
        ex.to_str().unwrap(),
        "--q-min=-2",
        "--q-max",
        "2",
        "--q-count",
        "5",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let r = RunReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let v = r.weierstrass_violations.unwrap();
    assert!(!v.is_empty());
    assert!(v
        .iter()
        .all(|s| (s.e - (s.q * s.q - s.q.powi(4))).abs() < 1e-12));
    assert_eq!(r.convexity_ok, Some(false));

    // convex at the scattered points, not on the dense part: violation under
    // a satisfied hypothesis
    let mixed = write(
        dir.path(),
        "m.json",
        r#"{"scale": [{"kind": "dense", "lo": 0, "hi": 1, "resolution": 50}, {"kind": "uniform", "start": 2, "end": 4, "step": 1}],
            "t0": 0, "t1": 4, "lagrangian": "r^2 + (t - 1)*r^4", "alpha": 0, "beta": 0,
            "trajectory": {"kind": "expr", "formula": "0"}, "scan": {"q_min": -3, "q_max": 3, "q_count": 7}}"#,
    );
    let out = tscv(&["analyze", mixed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert!(stdout(&out).contains("necessary-condition-violated"));

    // non-extremal trajectory shows up in the EL residual
    let bent = write(
        dir.path(),
        "b.json",
        &format!(r#"{{{INTEGERS}, "trajectory": {{"kind": "expr", "formula": "t^2/4"}}}}"#),
    );
    let report = dir.path().join("b-r.json");
    tscv(&[
        "analyze",
        bent.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let r = RunReport::from_json(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert!(r.el_max_residual.unwrap() > 0.1);
}

#[test]
fn report_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ex = write(
        dir.path(),
        "e.json",
        &format!(r#"{{{EX32}, "trajectory": {{"kind": "expr", "formula": "t*(1-t)/7"}}}}"#),
    );
    let report = dir.path().join("r.json");
    tscv(&[
        "analyze",
        ex.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(report).unwrap();
    let again = RunReport::from_json(&text).unwrap().to_json().unwrap() + "\n";
    assert_eq!(text, again);
    for field in [
        "functional_value",
        "norm_strong",
        "norm_weak",
        "el_max_residual",
        "convexity_ok",
        "convexity_counterexample",
        "weierstrass_violations",
        "verdict",
        "provenance",
    ] {
        assert!(text.contains(&format!("\"{field}\"")), "{field}");
    }
}

#[test]
fn load_errors_name_fields() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "b.json",
        r#"{"scale": {"kind": "uniform", "start": 0, "end": 4, "step": 1}, "t0": 0, "t1": 4.5, "lagrangian": "r^2", "alpha": 0, "beta": 0}"#,
    );
    let out = tscv(&["eval", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: t1:"), "{}", stderr(&out));

    let typo = write(
        dir.path(),
        "t.json",
        r#"{"scale": {"kind": "harmonic", "n_max": 4}, "t0": 0, "t1": 1, "lagrangain": "r"}"#,
    );
    let out = tscv(&["inspect", typo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("lagrangain"));

    let out = tscv(&["inspect", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn repro_commands() {
    for id in ["example-3.2", "discrete-z", "q-scale"] {
        let out = tscv(&["repro", id]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(
            stdout(&out)
                .lines()
                .filter(|l| l.starts_with("PASS"))
                .count()
                >= 2
        );
    }
    let out = tscv(&["repro", "example-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown example id"));
}

#[test]
fn bundled_problems_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = tscv(&["inspect", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            stderr(&out)
        );
        seen += 1;
    }
    assert!(seen >= 5);
}
