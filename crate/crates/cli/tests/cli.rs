use std::path::Path;
use std::process::{Command, Output};

use nngp_core::embed::hypersphere_embed;
use nngp_core::kernels::{pairwise_distances, KernelSpec, Smoothness};
use nngp_core::linalg::DenseMatrix;

fn nngp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nngp"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data lines (comments dropped), header first.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let j = rows[0].iter().position(|c| c == name).expect("column");
    rows[1..].iter().map(|r| r[j].clone()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn scan_default_grid_at_depth_two_is_valid() {
    let out = stdout(&nngp(&["scan-validity", "--depths", "2"]));
    let r = rows(&out);
    assert_eq!(r[0], ["depth", "sigma_a", "sigma_b", "is_pd", "is_flat", "min_gap"]);
    assert_eq!(r.len() - 1, 400);
    assert!(column(&r, "is_pd").iter().all(|v| v == "true"));
    assert!(out.contains("# grid-res = 20"));
}

#[test]
fn scan_invalid_cells_grow_with_depth() {
    let r = rows(&stdout(&nngp(&["scan-validity", "--depths", "2,10"])));
    let invalid = |depth: &str| {
        r[1..]
            .iter()
            .filter(|row| row[0] == depth && (row[3] == "false" || row[4] == "true"))
            .count()
    };
    assert!(invalid("10") >= invalid("2"));
    assert!(invalid("10") > 0);
}

#[test]
fn scan_rejects_single_point_grid() {
    let out = nngp(&["scan-validity", "--grid-res", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid-res"));
}

#[test]
fn compare_single_point_is_scalar_weight_difference() {
    let r = rows(&stdout(&nngp(&["compare-1d", "--n", "1", "--rho-min", "0.5", "--rho-max", "0.5", "--rho-count", "1"])));
    let diff: f64 = column(&r, "max_abs_diff")[0].parse().unwrap();
    // one grid point at 1.0, predicted at 0.5
    let x = hypersphere_embed(&DenseMatrix::column_vector(&[1.0, 0.5]));
    let k = KernelSpec::nngp(2, 1.0, 0.5, 2).unwrap().gram(&x).unwrap().values;
    let w_nngp = k[(1, 0)] / (k[(0, 0)] + 1e-8);
    let d = pairwise_distances(&x, &x).unwrap()[(0, 1)];
    let w_matern = Smoothness::ThreeHalves.correlation(d / 0.5) / (1.0 + 1e-8);
    assert!((diff - (w_nngp - w_matern).abs()).abs() < 1e-14);
}

#[test]
fn compare_more_points_agree_better() {
    let r = rows(&stdout(&nngp(&["compare-1d", "--n", "10,150"])));
    let d: Vec<f64> = column(&r, "max_abs_diff").iter().map(|v| v.parse().unwrap()).collect();
    assert!(d[1] < d[0], "{d:?}");
}

#[test]
fn benchmark_self_comparison_and_fixed_spread_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let o = nngp(&[
        "benchmark", "--case", "borehole", "--iterations", "2", "--n", "30", "--m", "20",
        "--grid-res", "4", "--rho-count", "4", "--seed", "3", "--out", out.to_str().unwrap(),
    ]);
    stdout(&o);
    let text = std::fs::read_to_string(&out).unwrap();
    let r = rows(&text);
    for stat in ["maxdiff", "mindiff", "meandiff", "sddiff"] {
        let row = r.iter().find(|row| row[0] == stat).unwrap();
        assert_eq!(row[2], "0", "{stat}");
    }
    for stat in ["maxkw", "minkw", "meankw", "sdkw"] {
        let row = r.iter().find(|row| row[0] == stat).unwrap();
        assert_eq!(row[4], "0", "{stat}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 3);
    assert_eq!(report["results"]["iterations"].as_array().unwrap().len(), 2);
}

#[test]
fn benchmark_missing_csv_fails_before_fitting() {
    let o = nngp(&["benchmark", "--case", "csv", "--data", "/nonexistent/data.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));
    assert!(o.stdout.is_empty());
}

#[test]
fn reruns_are_bit_identical() {
    let args = ["benchmark", "--case", "friedman", "--iterations", "2", "--n", "25", "--m", "10", "--grid-res", "3", "--rho-count", "3", "--seed", "9", "--format", "json"];
    let a = stdout(&nngp(&args));
    assert_eq!(a, stdout(&nngp(&args)));
    let j: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(j["config"]["seed"], 9);
    assert_eq!(j["config"]["iterations"], 2);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.conf", "# scan settings\ndepths = 3\ngrid_res = 2\nn = 5\n");
    let r = rows(&stdout(&nngp(&["scan-validity", "--config", &cfg])));
    assert_eq!(r.len() - 1, 4);
    assert!(column(&r, "depth").iter().all(|d| d == "3"));
    let out = stdout(&nngp(&["scan-validity", "--config", &cfg, "--grid-res", "3"]));
    assert_eq!(rows(&out).len() - 1, 9);
    assert!(out.contains("# grid-res = 3") && out.contains("# depths = 3"));

    let bad = write(dir.path(), "bad.conf", "iterations = 4\n");
    let o = nngp(&["scan-validity", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn predict_interpolates_training_points() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(
        dir.path(),
        "train.csv",
        "x1,x2,y\n0.1,0.2,1.5\n0.5,0.9,-2.0\n0.8,0.3,0.25\n0.3,0.6,3.0\n0.95,0.05,-1.0\n",
    );
    let r = rows(&stdout(&nngp(&[
        "predict", "--train", &train, "--test", &train, "--nugget", "0", "--kernel", "matern", "--nu", "3/2",
    ])));
    assert_eq!(r[0], ["prediction", "posterior_sd"]);
    let y = [1.5, -2.0, 0.25, 3.0, -1.0];
    for (p, t) in column(&r, "prediction").iter().zip(y) {
        assert!((p.parse::<f64>().unwrap() - t).abs() < 1e-8);
    }
}

#[test]
fn predict_empty_test_file_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(dir.path(), "train.csv", "x1,y\n0.1,1\n0.7,2\n");
    for body in ["", "x1\n"] {
        let test = write(dir.path(), "test.csv", body);
        let out = stdout(&nngp(&["predict", "--train", &train, "--test", &test]));
        assert_eq!(rows(&out), vec![vec!["prediction".to_string(), "posterior_sd".to_string()]]);
    }
}

#[test]
fn predict_reports_invalid_nngp_setting() {
    // take an invalid cell from a deep scan
    let scan = rows(&stdout(&nngp(&["scan-validity", "--depths", "20", "--grid-res", "5"])));
    let bad = scan[1..]
        .iter()
        .find(|r| r[3] == "false" || r[4] == "true")
        .expect("an invalid cell at depth 20")
        .clone();
    let dir = tempfile::tempdir().unwrap();
    let xs: Vec<String> = (1..=50).map(|i| format!("{},{}", i as f64 / 50.0, i % 7)).collect();
    let train = write(dir.path(), "train.csv", &format!("x1,y\n{}\n", xs.join("\n")));
    let test = write(dir.path(), "test.csv", "x1\n0.33\n");
    let o = nngp(&[
        "predict", "--train", &train, "--test", &test, "--kernel", "nngp", "--depth", "20",
        "--sigma-a", &bad[1], "--sigma-b", &bad[2],
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not positive definite"), "{err}");
    assert!(err.contains(&format!("sigma_a={}", bad[1])) && err.contains(&format!("sigma_b={}", bad[2])));
    assert!(err.contains("depth=20"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(nngp(&["frobnicate"]).status.code(), Some(2));
}
