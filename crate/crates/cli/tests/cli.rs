use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn emint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn fixtures(dir: &Path) {
    fs::write(
        dir.join("space.json"),
        r#"{"weights": ["1/5", "3/10", "1/2"]}"#,
    )
    .unwrap();
    fs::write(
        dir.join("indicator.json"),
        r#"{"arity": 1, "values": ["-3/10", "7/10", "-3/10"]}"#,
    )
    .unwrap();
    fs::write(
        dir.join("zero.json"),
        r#"{"arity": 2, "values": [0, 0, 0, 0, 0, 0, 0, 0, 0]}"#,
    )
    .unwrap();
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn verify_desk_scale_passes() {
    let out = emint(&["verify", "--seed", "11"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    let codes: Vec<i64> = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["code"].as_i64().unwrap())
        .collect();
    assert_eq!(codes, vec![10, 11, 12, 13, 14, 15]);
}

#[test]
fn corrupted_coefficient_fails_diagram_suite() {
    let out = emint(&[
        "verify",
        "--scale",
        "quick",
        "--inject-fault",
        "diagram-coefficient",
    ]);
    assert_eq!(code(&out), 10);
}

#[test]
fn float_mode_verify_is_a_configuration_error() {
    assert_eq!(code(&emint(&["verify", "--mode", "float"])), 2);
}

#[test]
fn verify_report_written_to_out_dir() {
    let dir = TempDir::new().unwrap();
    let out = emint(&["verify", "--scale", "quick", "--out", &path(&dir, "r")]);
    assert_eq!(code(&out), 0);
    let written = fs::read(dir.path().join("r/verify_report.json")).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn tails_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    fixtures(dir.path());
    let run = |sub: &str| {
        let out = emint(&[
            "tails",
            "--space",
            &path(&dir, "space.json"),
            "--kernel",
            &path(&dir, "indicator.json"),
            "--n",
            "50",
            "--replicates",
            "5000",
            "--seed",
            "9",
            "--out",
            &path(&dir, sub),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("a");
    run("b");
    for f in [
        "tails.csv",
        "manifest.json",
        "constants.json",
        "self_check.csv",
    ] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["replicates"], 5000);
    assert_eq!(manifest["n"], 50);
    assert_eq!(manifest["kernel_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn indicator_self_check_agrees_with_binomial() {
    let dir = TempDir::new().unwrap();
    fixtures(dir.path());
    let out = emint(&[
        "tails",
        "--space",
        &path(&dir, "space.json"),
        "--kernel",
        &path(&dir, "indicator.json"),
        "--n",
        "100",
        "--replicates",
        "20000",
        "--x-grid",
        "0.513,1.013,1.513",
        "--mode",
        "float",
        "--out",
        &path(&dir, "o"),
    ]);
    assert_eq!(code(&out), 0);
    let check = fs::read_to_string(dir.path().join("o/self_check.csv")).unwrap();
    let rows: Vec<&str> = check.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let z: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(z <= 4.0, "{row}");
    }
}

#[test]
fn zero_kernel_gives_all_zero_tails() {
    let dir = TempDir::new().unwrap();
    fixtures(dir.path());
    let out = emint(&[
        "tails",
        "--space",
        &path(&dir, "space.json"),
        "--kernel",
        &path(&dir, "zero.json"),
        "--n",
        "10",
        "--replicates",
        "500",
        "--out",
        &path(&dir, "z"),
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("z/tails.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        assert!(cols.iter().all(|&c| c == 0.0), "{row}");
    }
}

#[test]
fn tails_missing_inputs_are_configuration_errors() {
    let dir = TempDir::new().unwrap();
    fixtures(dir.path());
    let missing = emint(&[
        "tails",
        "--space",
        &path(&dir, "nope.json"),
        "--kernel",
        &path(&dir, "zero.json"),
        "--n",
        "3",
    ]);
    assert_eq!(code(&missing), 2);
    let no_n = emint(&[
        "tails",
        "--space",
        &path(&dir, "space.json"),
        "--kernel",
        &path(&dir, "zero.json"),
    ]);
    assert_eq!(code(&no_n), 2);
    fs::write(
        dir.path().join("bad.json"),
        r#"{"arity": 1, "values": [1, 2]}"#,
    )
    .unwrap();
    let bad = emint(&[
        "tails",
        "--space",
        &path(&dir, "space.json"),
        "--kernel",
        &path(&dir, "bad.json"),
        "--n",
        "3",
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn constants_tables() {
    let dir = TempDir::new().unwrap();
    let out = emint(&["constants", "--out", &path(&dir, "c")]);
    assert_eq!(code(&out), 0);
    let b = fs::read_to_string(dir.path().join("c/b_nk.csv")).unwrap();
    assert_eq!(b.lines().next().unwrap(), "n,k,B_nk,r_descaled,B_nk_f64");
    for n in 1..=30 {
        assert!(b.lines().any(|l| l.starts_with(&format!("{n},1,0,"))));
        assert!(b.lines().any(|l| l.starts_with(&format!("{n},2,-1/2,"))));
    }
    let c = fs::read_to_string(dir.path().join("c/lemma5_constants.csv")).unwrap();
    assert_eq!(c.lines().next().unwrap(), "k,m,D,Cbar");
    let zero_rows: Vec<&str> = c
        .lines()
        .filter(|l| l.split(',').nth(1) == Some("0"))
        .collect();
    assert_eq!(zero_rows.len(), 9);
    assert!(zero_rows.iter().all(|l| l.ends_with(",1")));
    assert_eq!(code(&emint(&["constants", "--k-max", "13"])), 2);
    assert_eq!(code(&emint(&["constants", "--m-max", "65"])), 2);
}

#[test]
fn bounds_csv_and_config_file() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("consts.json"),
        r#"{"c": 2.0, "alpha": 0.5}"#,
    )
    .unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"k": 2, "sigma": 0.3, "n": 100, "x_grid": [0.5, 1.0, 4.0], "constants_file": "consts.json", "out": "b"}"#,
    )
    .unwrap();
    let out = emint(&["bounds", "--config", &path(&dir, "run.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("b/bounds.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,bound13,bound16,active_branch,log_ratio");
    assert_eq!(lines.len(), 4);
    // x = 0.5 is below the crossover n σ³ = 2.7, x = 4 above it.
    assert!(lines[1].contains(",sigma,"));
    assert!(lines[3].contains(",n,"));
    let b13: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    let expected = 2.0 * (-0.5 * (0.5f64 / 0.3)).exp();
    assert!((b13 - expected).abs() < 1e-12);
    assert_eq!(
        code(&emint(&[
            "bounds", "--k", "2", "--sigma", "1.5", "--n", "10"
        ])),
        2
    );
    assert_eq!(code(&emint(&["bounds", "--sigma", "0.5", "--n", "10"])), 2);
}
