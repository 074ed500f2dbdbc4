use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi-kit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().unwrap()).expect("stderr holds error JSON")
}

fn csv_rows(s: &str) -> Vec<Vec<String>> {
    s.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn eval_row_count_and_header() {
    let o = run(&["--alpha", "1.3", "--beta", "0.2", "eval", "--lambda", "2", "--t", "0:3:301"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "t,lambda_re,lambda_im,phi_re,phi_im,method,err_est");
    assert_eq!(csv_rows(&s).len(), 301);
}

#[test]
fn eval_origin_rows_are_one() {
    let o = run(&["eval", "--lambda", "0.5,2,9", "--lambda-im", "0.3", "--t", "0,1"]);
    let rows = csv_rows(&stdout(&o));
    let origin: Vec<_> = rows.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0).collect();
    assert_eq!(origin.len(), 3);
    for r in origin {
        assert_eq!(r[3].parse::<f64>().unwrap(), 1.0);
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn auto_and_direct_agree() {
    let phis = |m: &str| -> Vec<(f64, f64)> {
        let o = run(&["eval", "--lambda", "0.5,2,6", "--t", "0:3:31", "--method", m]);
        assert!(o.status.success());
        csv_rows(&stdout(&o)).iter().map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap())).collect()
    };
    let (a, d) = (phis("auto"), phis("direct"));
    assert_eq!(a.len(), d.len());
    let worst = a.iter().zip(&d).map(|(x, y)| (x.0 - y.0).hypot(x.1 - y.1)).fold(0.0, f64::max);
    assert!(worst < 1e-7, "auto vs direct {worst:e}");
}

#[test]
fn empty_grid_is_usage_error() {
    let o = run(&["eval", "--t", "0:3:0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "usage");
}

#[test]
fn nonpositive_riesz_order_exits_2() {
    for a in ["0", "-1.5"] {
        let o = run(&["riesz", "--a", a, "--t", "0.1"]);
        assert_eq!(o.status.code(), Some(2), "a = {a}");
        assert_eq!(error_json(&o)["error"], "parameter");
    }
}

#[test]
fn unknown_flag_exits_2() {
    let o = run(&["selftest", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "usage");
}

#[test]
fn domain_errors_exit_2() {
    let o = run(&["eval", "--t", "-0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "domain");
    let o = run(&["--alpha", "-2", "eval", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_version_succeed() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
}

#[test]
fn region_shape() {
    let o = run(&["region", "--a", "2", "--grid", "64"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "inv_p,inv_q,bounded");
    let rows = csv_rows(&s);
    assert_eq!(rows.len(), 64 * 64);
    assert!(rows.iter().all(|r| r[2] == "true" || r[2] == "false"));
    assert!(rows.iter().any(|r| r[2] == "true"));
}

#[test]
fn riesz_slope_report() {
    let o = run(&["riesz", "--a", "1.0", "--slope"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    let d: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    let slope = d["diagnostics"]["slope"].as_f64().unwrap();
    let n_alpha = d["diagnostics"]["n_alpha"].as_f64().unwrap();
    assert!((slope - (1.0 - n_alpha)).abs() < 0.1, "slope {slope}");
}

#[test]
fn geom_json() {
    let o = run(&["geom", "--symmetric", "2,1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["alpha"], 1.0);
    assert_eq!(v["params"]["beta"], 0.0);
    assert_eq!(v["n_alpha_equals_dimension"], true);

    let o = run(&["geom", "--damek-ricci", "4,3"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rho_equals_homogeneous_dimension"], true);
    assert!(v["c_function_ratio_defect"].as_f64().unwrap() < 1e-10);

    let o = run(&["geom", "--bc", "0.7,0.9"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["hypergeometric_defect"].as_f64().unwrap() < 1e-10);

    assert_eq!(run(&["geom"]).status.code(), Some(2));
    assert_eq!(run(&["geom", "--bc", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn json_envelope_carries_diagnostics() {
    let o = run(&["--format", "json", "transform", "--function", "gaussian:1", "--lambda", "0:4:5"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!(v["diagnostics"]["forward"]["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn bundled_bump_roundtrip_and_plancherel() {
    let o = run(&["--format", "json", "transform", "--roundtrip", "--plancherel"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let max_error = v["diagnostics"]["max_error"].as_f64().unwrap();
    let defect = v["diagnostics"]["plancherel_defect"].as_f64().unwrap();
    assert!(max_error < 1e-4, "roundtrip {max_error:e}");
    assert!(defect < 1e-3, "plancherel {defect:e}");
}

#[test]
fn atomic_out_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let p = path.to_str().unwrap();
    let args = ["eval", "--lambda", "0:20:9", "--t", "0:4:41", "--out", p];
    assert!(run(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let piped = run(&args[..args.len() - 2]);
    assert_eq!(piped.stdout, first);
}

#[test]
fn thread_cap_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_jacobi-kit"))
        .args(["eval", "--t", "0:1:5"])
        .env("JACOBIKIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_jacobi-kit"))
        .args(["eval", "--t", "1"])
        .env("JACOBIKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convolve_and_expand_tables() {
    let o = run(&["convolve", "--f", "bump:1", "--g", "bump:0.5", "--x", "0:1.5:4"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 4);
    assert_eq!(run(&["convolve", "--f", "gaussian:1", "--g", "bump:1"]).status.code(), Some(2));

    let o = run(&["expand", "--lambda", "10", "--t", "0.2,0.5", "--order", "2"]);
    let rows = csv_rows(&stdout(&o));
    for r in rows {
        let (rem, dev): (f64, f64) = (r[7].parse().unwrap(), r[8].parse().unwrap());
        assert!((rem - dev).abs() < 1e-12 + 1e-3 * dev, "remainder {rem:e} vs deviation {dev:e}");
    }
}
