use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lieqs::cli::{format_matrix, parse_matrix};
use lieqs::symplectic::{seeded_rng, symplectic_defect, SymplecticSpace};
use lieqs::williamson::random_semisimple;
use lieqs::DMatrix;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lieqs"));
    c.env_remove("LIEQS_OUTPUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(o: &Output, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(|v| v.parse().expect("number")))
        .unwrap_or_else(|| panic!("no {key} in {}", stdout(o)))
}

fn write_matrix(dir: &Path, name: &str, rows: usize, data: &[f64]) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, format_matrix(&DMatrix::from_row_slice(rows, rows, data))).unwrap();
    p
}

#[test]
fn eval_rotation_with_dim2_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_matrix(dir.path(), "rot.mat", 2, &[0.0, -1.0, 1.0, 0.0]);
    let o = run(&["eval", f.to_str().unwrap(), "--method", "dim2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("value: 1\n"), "{}", stdout(&o));
}

#[test]
fn eval_zero_matrix_is_zero_for_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_matrix(dir.path(), "zero.mat", 2, &[0.0; 4]);
    for method in ["auto", "limit", "spectral", "dim2"] {
        let o = run(&["eval", f.to_str().unwrap(), "--method", method, "--t-max", "100"]);
        assert_eq!(o.status.code(), Some(0), "{method}");
        assert_eq!(field(&o, "value"), 0.0, "{method}");
    }
}

#[test]
fn limit_and_spectral_agree_within_printed_error_bars() {
    let dir = tempfile::tempdir().unwrap();
    let s = SymplecticSpace::new(3).unwrap();
    let b = random_semisimple(s, &mut seeded_rng(11, 0)).unwrap().element;
    let f = dir.path().join("b.mat");
    fs::write(&f, format_matrix(b.matrix())).unwrap();
    let lim = run(&["eval", f.to_str().unwrap(), "--method", "limit"]);
    let spec = run(&["eval", f.to_str().unwrap(), "--method", "spectral"]);
    assert_eq!(lim.status.code(), Some(0));
    assert_eq!(spec.status.code(), Some(0));
    let gap = (field(&lim, "value") - field(&spec, "value")).abs();
    assert!(gap <= field(&lim, "error_bar") + field(&spec, "error_bar"), "gap {gap}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let garbage = d.join("garbage.mat");
    fs::write(&garbage, "dim 2\n1 2\n").unwrap();
    assert_eq!(run(&["eval", garbage.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["eval", d.join("missing.mat").to_str().unwrap()]).status.code(), Some(2));

    let identity = write_matrix(d, "id.mat", 2, &[1.0, 0.0, 0.0, 1.0]);
    assert_eq!(run(&["eval", identity.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["decompose", identity.to_str().unwrap()]).status.code(), Some(3));

    let zero4 = write_matrix(d, "zero4.mat", 4, &[0.0; 16]);
    assert_eq!(run(&["eval", zero4.to_str().unwrap(), "--method", "dim2"]).status.code(), Some(4));

    let jordan = write_matrix(d, "jordan.mat", 2, &[0.0, 1.0, 0.0, 0.0]);
    assert_eq!(run(&["eval", jordan.to_str().unwrap(), "--method", "spectral"]).status.code(), Some(4));
    let out = d.join("frame.mat");
    let o = run(&["decompose", jordan.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn decompose_writes_a_symplectic_frame() {
    let dir = tempfile::tempdir().unwrap();
    let s = SymplecticSpace::new(2).unwrap();
    let b = random_semisimple(s, &mut seeded_rng(12, 0)).unwrap().element;
    let f = dir.path().join("b.mat");
    fs::write(&f, format_matrix(b.matrix())).unwrap();
    let o = bin().args(["decompose", f.to_str().unwrap()]).env("LIEQS_OUTPUT_DIR", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("blocks:"));
    assert!(field(&o, "reconstruction_residual") <= 1e-6 * b.norm());
    let frame = parse_matrix(&fs::read_to_string(dir.path().join("frame.mat")).unwrap()).unwrap();
    assert!(symplectic_defect(&frame).unwrap() <= 1e-8);
}

fn read_trace(path: &Path) -> (String, Vec<[f64; 3]>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    (header, rows)
}

#[test]
fn trace_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rot = write_matrix(d, "rot.mat", 2, &[0.0, -1.0, 1.0, 0.0]);
    let out = d.join("rot.csv");
    let o = run(&["trace", rot.to_str().unwrap(), "--t-max", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_trace(&out);
    assert_eq!(header, "t,theta,theta_over_t");
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!(rows.iter().skip(5).all(|r| (r[2] - 1.0).abs() <= 1e-6));

    let hyp = write_matrix(d, "hyp.mat", 2, &[1.0, 0.3, 0.2, -1.0]);
    let out = d.join("hyp.csv");
    let o = run(&["trace", hyp.to_str().unwrap(), "--t-max", "400", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_trace(&out);
    let last = rows.last().unwrap();
    assert!(last[2].abs() <= 1e-2);
    let eval = run(&["eval", hyp.to_str().unwrap(), "--method", "limit", "--t-max", "400"]);
    assert_eq!(field(&eval, "value"), last[2]);
    assert_eq!(last[0], 400.0);
}

#[test]
fn verify_negative_control_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("neg.txt");
    let o = run(&[
        "verify", "--suite", "quasi-linearity", "--n", "2", "--trials", "10", "--negative-control", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL"));
    assert!(out.exists());
}

#[test]
fn verify_is_deterministic_and_honours_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<String> = (0..2)
        .map(|k| {
            let sub = dir.path().join(format!("run{k}"));
            let o = bin()
                .args(["verify", "--suite", "all", "--n", "3", "--seed", "5", "--trials", "20"])
                .env("LIEQS_OUTPUT_DIR", &sub)
                .output()
                .unwrap();
            assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
            assert_eq!(stdout(&o).lines().last().unwrap(), "PASS 14/14");
            fs::read_to_string(sub.join("report.txt")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let parsed = lieqs::verify::SuiteReport::from_text(&runs[0]).unwrap();
    assert_eq!(parsed.to_text().unwrap(), runs[0]);
}

#[test]
fn verify_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&["verify", "--suite", "ad-invariance", "--n", "1", "--trials", "5", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("check_name,record,key,value\n"));
    assert!(text.contains("ad-invariance,summary,status,PASS"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--trials", "0"]).status.code(), Some(4));
}
