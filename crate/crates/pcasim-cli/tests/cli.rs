//! End-to-end CLI behavior: exit codes, output formats, schema round-trips.

use std::path::Path;
use std::process::{Command, Output};

use pcasim::rng::Rng;
use pcasim::{ColumnStats, DataMatrix, PreprocessMode};
use pcasim_cli::output::CompareReport;

const BIN: &str = env!("CARGO_BIN_EXE_pcasim");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn pcasim")
}

fn write_csv(path: &Path, data: &DataMatrix) {
    let mut s = data.col_names().join(",");
    s.push('\n');
    for r in 0..data.n_rows() {
        let row: Vec<String> = data.row(r).iter().map(|v| format!("{v}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

/// Correlated synthetic data with a dominant first component.
fn factor_data(n: usize, d: usize, seed: u64) -> DataMatrix {
    let mut rng = Rng::from_seed(seed);
    let mut columns = vec![Vec::with_capacity(n); d];
    for _ in 0..n {
        let f = rng.next_normal();
        for (j, col) in columns.iter_mut().enumerate() {
            let weight = 1.0 + j as f64 / d as f64;
            col.push(weight * f + 0.5 * rng.next_normal());
        }
    }
    let names = (0..d).map(|c| format!("c{c}")).collect();
    DataMatrix::from_columns(names, columns).unwrap()
}

fn noisy_copy(data: &DataMatrix, eta: f64, seed: u64) -> DataMatrix {
    let stats = ColumnStats::fit(data, PreprocessMode::Center);
    let mut rng = Rng::from_seed(seed);
    let columns: Vec<Vec<f64>> = (0..data.n_cols())
        .map(|c| {
            let sigma = stats.stds()[c];
            data.column(c)
                .iter()
                .map(|&x| x + eta * sigma * rng.next_normal())
                .collect()
        })
        .collect();
    DataMatrix::from_columns(data.col_names().to_vec(), columns).unwrap()
}

#[test]
fn comparing_a_file_with_itself_reports_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    write_csv(&path, &factor_data(60, 4, 5));
    let out = run(&[
        "compare",
        path.to_str().unwrap(),
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: CompareReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.metrics.delta_lambda, 0.0);
    assert_eq!(report.metrics.delta_theta, 0.0);
    assert_eq!(report.inputs.n_a, 60);
    assert_eq!(report.config.preprocess, "zscore");
}

#[test]
fn mismatched_headers_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "x,y\n1,2\n3,4\n").unwrap();
    std::fs::write(&b, "x,z\n1,2\n3,4\n").unwrap();
    let out = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("schema mismatch"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_exits_with_code_2() {
    let out = run(&["compare", "/nonexistent/a.csv", "/nonexistent/b.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constant_data_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    std::fs::write(&path, "x,y\n1,1\n1,1\n1,1\n").unwrap();
    let out = run(&["compare", path.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("degenerate"), "stderr: {stderr}");
}

#[test]
fn unknown_flags_exit_with_code_2() {
    let out = run(&["compare", "a.csv", "b.csv", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_reserialize_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let data = factor_data(200, 6, 9);
    write_csv(&a, &data);
    write_csv(&b, &noisy_copy(&data, 0.2, 10));
    let out = run(&[
        "compare",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: CompareReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.to_json(), text);
}

#[test]
fn noisy_copy_scores_as_nearly_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("real.csv");
    let b = dir.path().join("noisy.csv");
    let data = factor_data(1000, 10, 77);
    write_csv(&a, &data);
    write_csv(&b, &noisy_copy(&data, 0.1, 78));
    let out = run(&[
        "compare",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--preprocess",
        "center",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: CompareReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.metrics.delta_lambda < 0.01, "{:?}", report.metrics);
    assert!(report.metrics.delta_theta < 0.02, "{:?}", report.metrics);
}

#[test]
fn aad_rejects_full_and_out_of_range_selections() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&path, &factor_data(50, 3, 3));
    let all = run(&["aad", path.to_str().unwrap(), "--selected", "0,1,2"]);
    assert_eq!(all.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&all.stderr).contains("complement"));
    let oob = run(&["aad", path.to_str().unwrap(), "--selected", "9"]);
    assert_eq!(oob.status.code(), Some(2));
}

#[test]
fn aad_accepts_target_ordering_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&path, &factor_data(80, 4, 12));
    let out = run(&[
        "aad",
        path.to_str().unwrap(),
        "--order",
        "target:c2",
        "--k",
        "2",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["aad"].as_f64().unwrap() >= 0.0);
    assert_eq!(value["selection"]["selected"].as_array().unwrap().len(), 2);
}

#[test]
fn aad_sweep_emits_one_row_per_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&path, &factor_data(80, 5, 21));
    let out = run(&[
        "aad",
        path.to_str().unwrap(),
        "--order",
        "variance",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "k,aad");
    assert_eq!(text.lines().count(), 5); // header + k = 1..4
}

#[test]
fn instability_table_is_aligned() {
    let out = run(&[
        "instability",
        "--dims",
        "3",
        "--sizes",
        "20,80",
        "--trials",
        "2",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("d  n"), "header: {header}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn invariance_rejects_out_of_range_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&path, &factor_data(50, 3, 2));
    let out = run(&["invariance", path.to_str().unwrap(), "--rotate", "180"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn categorical_columns_are_ordinal_encoded_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "label,v\nred,1\nblue,2\nred,3\ngreen,4\n").unwrap();
    let out = run(&[
        "compare",
        a.to_str().unwrap(),
        a.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: CompareReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.inputs.d, 2);

    let rejected = run(&[
        "compare",
        a.to_str().unwrap(),
        a.to_str().unwrap(),
        "--categorical",
        "reject",
    ]);
    assert_eq!(rejected.status.code(), Some(2));
}
