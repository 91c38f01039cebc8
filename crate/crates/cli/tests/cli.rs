use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use vmfcorr_cli::{parse_config, parse_table_json, run, Table};

fn vmfcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmfcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const FIG1A: &str = r#"{
  "scf_curve": {
    "kappa": [0, 1, 10, 100],
    "beta_deg": [0],
    "d_over_lambda": { "start": 0, "stop": 3, "count": 121 }
  }
}"#;

#[test]
fn isotropic_curve_has_sinc_zeros() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "fig1a.json", FIG1A);
    let out = dir.path().join("fig1a.csv");
    let status = vmfcorr(&["scf-curve", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["kappa", "beta_deg", "d_over_lambda", "re", "im", "abs"]);
    assert_eq!(rows.len(), 4 * 121);
    let zeros: Vec<&Vec<f64>> = rows
        .iter()
        .filter(|r| r[0] == 0.0 && r[2] > 0.0 && ((2.0 * r[2]).round() - 2.0 * r[2]).abs() < 1e-9)
        .collect();
    assert_eq!(zeros.len(), 6);
    for r in zeros {
        assert!(r[5] < 1e-12, "d/λ = {}: |R| = {}", r[2], r[5]);
    }
    // every curve starts at exactly one
    assert!(rows.iter().filter(|r| r[2] == 0.0).all(|r| r[3] == 1.0 && r[4] == 0.0));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "validate.json",
        r#"{"seed": 11, "validate": {"kappa": [0, 10], "beta_deg": [0, 60],
            "d_over_lambda": {"start": 0, "stop": 1, "count": 3}, "montecarlo_realizations": 200}}"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = dir.path().join(format!("v{}.csv", outputs.len()));
        let o = vmfcorr(&[
            "validate",
            "--config",
            &config,
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);

    let other_seed = dir.path().join("seed.csv");
    vmfcorr(&[
        "validate",
        "--config",
        &config,
        "--seed",
        "12",
        "--out",
        other_seed.to_str().unwrap(),
    ]);
    assert_ne!(fs::read(other_seed).unwrap(), outputs[0]);
}

#[test]
fn json_output_round_trips() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "field.json",
        r#"{"format": "json", "scf_field": {
            "clusters": [{"azimuth_deg": 45, "kappa": 10, "power": 0.7}, {"azimuth_deg": -120, "elevation_deg": 30, "kappa": 2, "power": 0.3}],
            "x_over_lambda": {"start": -1, "stop": 1, "count": 9},
            "y_over_lambda": {"start": -1, "stop": 1, "count": 7}}}"#,
    );
    let o = vmfcorr(&["scf-field", "--config", &config]);
    assert!(o.status.success());
    let parsed = parse_table_json(&String::from_utf8(o.stdout).unwrap()).unwrap();

    let expected: Table = run(&parse_config(&fs::read_to_string(&config).unwrap()).unwrap())
        .unwrap()
        .table;
    assert_eq!(parsed, expected);
    assert_eq!(parsed.rows.len(), 63);
    // R(0) = 1 sits in the middle of the grid
    let mid = &parsed.rows[4 * 7 + 3];
    assert_eq!((mid[0].as_f64(), mid[1].as_f64(), mid[4].as_f64()), (0.0, 0.0, 1.0));
}

#[test]
fn validate_default_grid_passes() {
    let o = vmfcorr(&["validate"]);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{stderr}");
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 1 + 4 * 4 * 13);
    let max_error: f64 = table
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max_error < 1e-8, "{max_error}");
}

#[test]
fn validate_failure_exits_3_after_writing() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "strict.json",
        r#"{"validate": {"kappa": [10], "beta_deg": [30], "d_over_lambda": {"start": 1, "stop": 2, "count": 2}, "tolerance": 1e-30}}"#,
    );
    let out = dir.path().join("strict.csv");
    let o = vmfcorr(&["validate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation failed"));
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 3);
}

#[test]
fn radar_table_reproduces_quoted_times() {
    let o = vmfcorr(&["radar-table", "--format", "json"]);
    assert!(o.status.success());
    let table = parse_table_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(table.columns, ["width_deg", "speed_kmh", "decorrelation_ms"]);
    let lookup = |w: f64, v: f64| {
        table
            .rows
            .iter()
            .find(|r| r[0].as_f64() == w && r[1].as_f64() == v)
            .map(|r| r[2].as_f64())
            .unwrap()
    };
    for (w, v, want) in [
        (2.0, 150.0, 24.0),
        (1.0, 150.0, 46.0),
        (0.5, 150.0, 90.0),
        (2.0, 40.0, 85.0),
    ] {
        let got = lookup(w, v);
        assert!(
            (got / want - 1.0).abs() <= 0.15,
            "{w} deg, {v} km/h: {got} ms vs {want} ms"
        );
    }
}

#[test]
fn array_modes_emit_matrices_and_paths() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "matrix.json",
        r#"{"array_matrix": {"clusters": [{"kappa": 5}], "array": {"planar": {"nx": 3, "ny": 2, "dx_over_lambda": 0.5, "dy_over_lambda": 0.5}}}}"#,
    );
    let o = vmfcorr(&["array-matrix", "--config", &config]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(text.lines().nth(1).unwrap().starts_with("0,0,1.0,0.0,1.0"));

    let o = vmfcorr(&["array-path"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "element,s_over_lambda,re,im,abs");
    assert_eq!(text.lines().count(), 1 + 121);
}

#[test]
fn acf_curve_starts_at_one() {
    let o = vmfcorr(&["acf-curve"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "0.0,1.0,0.0,1.0");
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let negative = write(
        &dir,
        "neg.json",
        r#"{"scf_curve": {"kappa": [-1], "d_over_lambda": {"start": 0, "stop": 3, "count": 4}}}"#,
    );
    let o = vmfcorr(&["scf-curve", "--config", &negative]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa"));

    let both = write(&dir, "both.json", r#"{"radar_table": {}, "validate": {}}"#);
    assert_eq!(vmfcorr(&["radar-table", "--config", &both]).status.code(), Some(2));

    let radar = write(&dir, "radar.json", r#"{"radar_table": {}}"#);
    let o = vmfcorr(&["validate", "--config", &radar]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("radar-table"));

    let broken = write(&dir, "broken.json", "{\n  \"radar_table\": {\n");
    let o = vmfcorr(&["radar-table", "--config", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn io_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        vmfcorr(&["radar-table", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert_eq!(
        vmfcorr(&["acf-curve", "--out", unwritable.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
}
