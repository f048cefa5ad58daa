//! End-to-end CLI tests: the exit-code contract and the determinism
//! acceptance criterion.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn crown(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crown"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn criterion_9_cli_determinism() {
    // selftest all exits 0 and repeated runs are byte-identical.
    let first = crown(&["selftest", "all", "--seed", "7"]);
    assert_eq!(first.status.code(), Some(0), "selftest must pass");
    let second = crown(&["selftest", "all", "--seed", "7"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "selftest output must be byte-identical"
    );

    // The SVG figure is byte-stable across runs.
    let svg1 = crown(&["cell", "--group", "sl3", "--emit", "svg"]);
    let svg2 = crown(&["cell", "--group", "sl3", "--emit", "svg"]);
    assert_eq!(svg1.status.code(), Some(0));
    assert_eq!(svg1.stdout, svg2.stdout, "svg bytes must be stable");
    assert!(String::from_utf8_lossy(&svg1.stdout).contains("<polygon"));
    println!(
        "PASS criterion 9 (cli determinism): selftest exit 0, byte-identical reruns, stable svg"
    );
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();

    // Parse failure -> 2.
    let garbage = write_file(&dir, "garbage.json", "{ not json");
    let out = crown(&["iwasawa", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Usage failure -> 2 (clap default).
    let out = crown(&["cell", "--group", "sl9", "--emit", "svg"]);
    assert_eq!(out.status.code(), Some(2));

    // Invalid element -> 3.
    let scaled = write_file(
        &dir,
        "scaled.json",
        r#"{"n": 3, "entries": [[2, 0, 0], [0, 2, 0], [0, 0, 2]]}"#,
    );
    let out = crown(&["iwasawa", scaled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // Elliptic obstruction -> 4.
    let rotation = write_file(
        &dir,
        "rotation.json",
        r#"{"n": 3, "entries": [[0, -1, 0], [1, 0, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["conj-na", rotation.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("elliptic obstruction"));

    // Tube extraction outside the domain -> 4.
    let non_member = write_file(
        &dir,
        "nonmember.json",
        r#"{"n": 3, "entries": [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["tube", "extract", non_member.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tube_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let coords = write_file(
        &dir,
        "coords.json",
        r#"{"alpha": [0.25, -0.5], "beta": [0.1, 0.3], "gamma": [-0.7, 0.2],
            "zeta": [[1.2, 0.2], [0.8, -0.1], [1.0187110187110187, -0.041580041580041617]]}"#,
    );
    let embed = crown(&["tube", "embed", coords.to_str().unwrap()]);
    assert_eq!(embed.status.code(), Some(0), "{:?}", embed);
    let matrix_json = String::from_utf8(embed.stdout).unwrap();
    let matrix = write_file(&dir, "matrix.json", &matrix_json);

    let member = crown(&["tube", "member", matrix.to_str().unwrap()]);
    assert_eq!(member.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&member.stdout).contains("member: true"));

    let extract = crown(&["tube", "extract", matrix.to_str().unwrap()]);
    assert_eq!(extract.status.code(), Some(0));
    let text = String::from_utf8(extract.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let alpha = parsed["alpha"].as_array().unwrap();
    assert!((alpha[0].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((alpha[1].as_f64().unwrap() + 0.5).abs() < 1e-9);
}

#[test]
fn nilpotent_command_reports_series() {
    let dir = tempfile::tempdir().unwrap();
    let e12 = write_file(
        &dir,
        "e12.json",
        r#"{"n": 3, "entries": [[1, 1, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let e23 = write_file(
        &dir,
        "e23.json",
        r#"{"n": 3, "entries": [[1, 0, 0], [0, 1, 1], [0, 0, 1]]}"#,
    );
    let d = write_file(
        &dir,
        "d.json",
        r#"{"n": 3, "entries": [[2, 0, 0], [0, 1, 0], [0, 0, 0.5]]}"#,
    );

    let out = crown(&["nilpotent", e12.to_str().unwrap(), e23.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("closure dimension: 3"));
    assert!(text.contains("[3, 1, 0]"));
    assert!(text.contains("verdict: nilpotent; quotient Stein by criterion"));

    let out = crown(&["nilpotent", e12.to_str().unwrap(), d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("verdict: not nilpotent; quotient not Stein by criterion"));
}

#[test]
fn classify_and_cell_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let u = write_file(
        &dir,
        "u.json",
        r#"{"n": 3, "entries": [[1, 1, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["classify", u.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "unipotent");

    let out = crown(&["cell", "--group", "sl3", "--emit", "vertices"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.contains(&"1/6 1/6"));

    let out = crown(&["cell", "--group", "sl2", "--emit", "vertices"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines, vec!["-1/4", "1/4"]);

    // --out writes the same bytes to a file.
    let target = dir.path().join("cell.svg");
    let out = crown(&[
        "cell",
        "--group",
        "sl3",
        "--emit",
        "svg",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let direct = crown(&["cell", "--group", "sl3", "--emit", "svg"]);
    assert_eq!(std::fs::read(&target).unwrap(), direct.stdout);
}

#[test]
fn iwasawa_identity_document() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_file(
        &dir,
        "id.json",
        r#"{"n": 3, "entries": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["iwasawa", id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("residual: 0.00000000000e0"));
    // All three factors print as identity matrices.
    assert_eq!(
        text.matches("[1.00000000000e0, 0.00000000000e0, 0.00000000000e0]")
            .count(),
        3
    );
}

#[test]
fn jordan_on_diagonal_document() {
    let dir = tempfile::tempdir().unwrap();
    let d = write_file(
        &dir,
        "d.json",
        r#"{"n": 3, "entries": [[2, 0, 0], [0, 1, 0], [0, 0, 0.5]]}"#,
    );
    let out = crown(&["jordan", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("unipotent:"));
    assert!(text.contains("hyperbolic:"));
    assert!(text.contains("elliptic:"));
    // The hyperbolic factor carries the diagonal.
    assert!(text.contains("[2.00000000000e0, "));
}

#[test]
fn tube_member_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_file(
        &dir,
        "id.json",
        r#"{"n": 3, "entries": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["tube", "member", id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("member: true"));
    assert!(text.contains("arguments: [0.00000000000e0, 0.00000000000e0, 0.00000000000e0]"));
    assert!(text.contains("failed condition groups: []"));
}

#[test]
fn tolerance_flags_are_threaded() {
    let dir = tempfile::tempdir().unwrap();
    // Determinant 1.001: rejected at the default residual tolerance,
    // accepted when loosened.
    let near = write_file(
        &dir,
        "near.json",
        r#"{"n": 3, "entries": [[1.001, 0, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&["iwasawa", near.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = crown(&["iwasawa", near.to_str().unwrap(), "--tol-residual", "1e-2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn orbit_check_escapes() {
    let dir = tempfile::tempdir().unwrap();
    let gamma = write_file(
        &dir,
        "gamma.json",
        r#"{"n": 3, "entries": [[2, 0, 0], [0, 1, 0], [0, 0, 0.5]]}"#,
    );
    let out = crown(&[
        "orbit-check",
        "--gamma",
        gamma.to_str().unwrap(),
        "--radius",
        "10",
        "--kmax",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("escaped: true"));

    let id = write_file(
        &dir,
        "id.json",
        r#"{"n": 3, "entries": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#,
    );
    let out = crown(&[
        "orbit-check",
        "--gamma",
        id.to_str().unwrap(),
        "--radius",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn atlas_commands() {
    let out = crown(&["atlas", "lookup", "SL(3,R)/SO(3)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("rigid"));

    let out = crown(&["atlas", "lookup", "SL(2,R)/SO(2)"]);
    assert_eq!(out.status.code(), Some(4));

    let out = crown(&["atlas", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert_eq!(text.lines().count(), 16);
}
