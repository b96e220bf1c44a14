use std::path::PathBuf;
use std::process::{Command, Output};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plap-bounds"))
}

fn domain(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../domains").join(format!("{name}.toml"))
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bound_csv_is_deterministic() {
    let file = domain("l-shape-mixed");
    let args = ["bound", file.to_str().unwrap(), "--grid-h", "1/16", "--angles", "90", "--csv"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,detail,applicable,value,parameters,witness_x,witness_y,reason"
    );
    // Inapplicable bounds are listed too.
    assert!(text.contains(",false,"));
}

#[test]
fn verify_exit_codes() {
    let file = domain("square-neumann-west");
    let f = file.to_str().unwrap();
    let ok = run(&["verify", f, "--grid-h", "1/32", "--csv"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).lines().next().unwrap().ends_with(",within"));
    let bad = run(&["verify", f, "--grid-h", "1/32", "--corrupt-factor", "10"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(run(&["bound"]).status.code(), Some(1));
    assert_eq!(run(&["bound", f, "--grid-h", "0"]).status.code(), Some(1));
}

#[test]
fn out_file_and_eigenfunction() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("oracle.txt");
    let eig = dir.path().join("u.csv");
    let file = domain("square-dirichlet-p3");
    let o = run(&[
        "oracle",
        file.to_str().unwrap(),
        "--grid-h",
        "1/16",
        "--out",
        table.to_str().unwrap(),
        "--eigenfunction",
        eig.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&table).unwrap().contains("rayleigh"));
    let rows = std::fs::read_to_string(&eig).unwrap();
    assert!(rows.lines().count() > 100);
}

#[test]
fn annulus_command() {
    let o = run(&["annulus", "--r-inner", "0.5", "--r-outer", "1", "--p", "2", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let alpha: f64 = row[5].parse().unwrap();
    assert!((alpha - 12.8739).abs() < 1e-3, "{alpha}");

    let o = run(&["annulus", "--r-inner", "0.5", "--r-outer", "1", "--p", "3", "--sweep", "1:2:3", "--csv"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = run(&["annulus", "--r-inner", "1", "--r-outer", "0.5", "--p", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
