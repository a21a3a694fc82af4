use std::process::{Command, Output};

fn telegraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telegraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_1d_is_reproducible_and_round_trips() {
    let args = ["simulate-1d", "--profile", "power:gamma=0.5", "--rate", "coth", "--lambda", "1", "--t", "1", "--paths", "300", "--seed", "3"];
    let a = telegraph(&args);
    let b = telegraph(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path_id,x,n_events,direction"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 300);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let x: f64 = f[1].parse().unwrap();
        assert!(x.abs() <= 0.25 + 1e-12);
        assert!(f[3] == "1" || f[3] == "-1");
    }
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("paths.json");
    std::fs::write(&cfg, r#"{"lambda1": 2.0, "lambda2": 0.5, "t": 1.0, "paths": 50, "seed": 1, "format": "json"}"#).unwrap();
    let o = telegraph(&["simulate-1d", "--config", cfg.to_str().unwrap(), "--paths", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["paths"].as_array().unwrap().len(), 20);
    assert_eq!(v["seed"], 1);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["simulate-1d", "--t", "1", "--paths", "10", "--lambda", "1"][..],
        &["simulate-1d", "--t", "-1", "--paths", "10", "--lambda", "1", "--seed", "1"],
        &["simulate-1d", "--bogus"],
        &["verify", "--suite", "nope"],
        &["density", "--nu", "0.25", "--t", "1"],
        &["support", "--profile", "power:gamma=1.5", "--t", "1"],
    ] {
        let o = telegraph(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn density_table_with_header() {
    let o = telegraph(&["density", "--rate", "tanh:lambda=1", "--profile", "power:gamma=0.5", "--t", "2", "--points", "40"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["atoms"].as_array().unwrap().len(), 2);
    assert_eq!(header["support"][1].as_f64(), Some(1.0));
    assert_eq!(text.lines().nth(1), Some("x,pdf"));
    assert_eq!(text.lines().count(), 42);

    let o = telegraph(&["density", "--profile", "unit", "--profile-y", "constant:c=0.5", "--lambda", "1", "--t", "1", "--points", "10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 102);

    let o = telegraph(&["density", "--nu", "0.3", "--t", "1", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["atoms"].as_array().unwrap().is_empty());
}

#[test]
fn support_outputs() {
    let o = telegraph(&["support", "--profile", "power:gamma=0.6666666666666666,scale=0.3333333333333333", "--t", "1", "--points", "64"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("phi_angle,x,y"));
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let lhs = f[1].abs().powf(2.0 / 3.0) + f[2].abs().powf(2.0 / 3.0);
        assert!((lhs - 1.0).abs() < 1e-9, "{line}");
    }
    let o = telegraph(&["support", "--profile", "power:gamma=0.6666666666666666,scale=0.3333333333333333", "--t", "1", "--format", "svg", "--paths", "3", "--seed", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("<path ").count(), 4);
    let o = telegraph(&["support", "--figure1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_json_lines() {
    let o = telegraph(&["verify", "--suite", "riccati"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
        for key in ["name", "statistic", "threshold", "seed", "n", "details"] {
            assert!(v.get(key).is_some());
        }
    }
}

#[test]
fn verify_failure_exits_with_one() {
    // too few paths for the chi-square bins: the planar suite cannot pass
    let o = telegraph(&["verify", "--suite", "planar", "--paths", "30", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scan_nu_formats() {
    let o = telegraph(&["scan-nu", "--dim", "2", "--order", "2", "--grid", "0.05"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("nu,c1,c2,positive"));
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let c2: f64 = f[2].parse().unwrap();
        assert_eq!(f[3] == "true", c2 > 0.0);
    }
}
