use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn excalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_excalc"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = dir.join(file);
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend(["--output", out_str]);
    let o = excalc(&full);
    (
        o.status.code().unwrap(),
        std::fs::read(&out).unwrap_or_default(),
    )
}

#[test]
fn golden_reports_match_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "sphere_check.json",
            [
                "check",
                "--scenario",
                "scenarios/sphere.json",
                "--samples",
                "4",
            ],
        ),
        (
            "shear_deform.json",
            [
                "deform",
                "--scenario",
                "scenarios/shear.json",
                "--samples",
                "3",
            ],
        ),
    ];
    for (golden, args) in cases {
        let (code, bytes) = run_to(dir.path(), golden, &args);
        assert_eq!(code, 0, "{golden}");
        let expected = std::fs::read(root().join("tests/golden").join(golden)).unwrap();
        assert!(bytes == expected, "{golden} differs from the golden file");
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "check",
        "--scenario",
        "scenarios/polynomial.json",
        "--seed",
        "9",
        "--samples",
        "5",
    ];
    let (_, a) = run_to(dir.path(), "a.json", &args);
    let (_, b) = run_to(dir.path(), "b.json", &args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let stdout = excalc(&args).stdout;
    assert_eq!(stdout, a);
}

#[test]
fn exit_codes_follow_outcome() {
    let pass = excalc(&["check", "--scenario", "scenarios/flat.json"]);
    assert_eq!(pass.status.code(), Some(0));
    let fail = excalc(&["check", "--scenario", "scenarios/failing.json"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("ricci_scalar"));
    let report: serde_json::Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(report["pass"], false);
    let parse = excalc(&["check", "--scenario", "scenarios/parse_error.json"]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("metric[1][1]: 1:7"));
    assert!(parse.stdout.is_empty());
    let missing = excalc(&["check", "--scenario", "scenarios/nope.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_flag = excalc(&[
        "check",
        "--scenario",
        "scenarios/flat.json",
        "--dd-mode",
        "xx",
    ]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn tolerance_and_mode_flags_reach_the_report() {
    let o = excalc(&[
        "check",
        "--scenario",
        "scenarios/sphere.json",
        "--samples",
        "2",
        "--dd-mode",
        "fd",
        "--fd-step",
        "1e-4",
        "--tol",
        "1e-2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["environment"]["dd_mode"], "fd");
    assert_eq!(r["environment"]["fd_step"], 1e-4);
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["tolerance"] == 1e-2));
}

#[test]
fn curvature_and_parse_subcommands() {
    let o = excalc(&[
        "curvature",
        "--scenario",
        "scenarios/conformal.json",
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["checks"].as_array().unwrap().is_empty());
    assert_eq!(r["curvature"].as_array().unwrap().len(), 3);

    let o = excalc(&["parse", "--dim", "2", "x1 + -2 * (x2)^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "x1 + -2 * x2^2");
    let o = excalc(&["parse", "--dim", "2", "x3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = excalc(&["parse", "--scenario", "scenarios/sphere.json"]);
    let exprs: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(exprs["metric[1][1]"], "r^2 * sin(x1)^2");
    assert_eq!(exprs["expected_ricci_scalar"], "2 / r^2");
}

#[test]
fn deform_without_a_gauge_is_a_configuration_error() {
    let o = excalc(&["deform", "--scenario", "scenarios/sphere.json"]);
    assert_eq!(o.status.code(), Some(2));
}
