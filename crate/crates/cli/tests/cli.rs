use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dampedwig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header_line(out: &Output) -> String {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .to_string()
}

#[test]
fn survival_defaults() {
    let out = run(&["survival"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("# dampedwig "));
    assert!(text.contains("# model: D=5 B=0.05 No=0.25 thermal=true"));
    assert_eq!(
        header_line(&out),
        "omega_t,exact,longtime_approx,nofriction"
    );
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0], ["0", "1", "0.33333333333333337", "1"]);
    for r in &rows {
        let p: f64 = r[1].parse().unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }
}

#[test]
fn frictionless_survival_column_is_exact_without_friction() {
    let out = run(&["survival", "--B", "0", "--No", "0.25", "--tmax", "30"]);
    assert!(out.status.success());
    for r in data_rows(&out) {
        assert_eq!(r[2], "nan");
        let (exact, top): (f64, f64) = (r[1].parse().unwrap(), r[3].parse().unwrap());
        assert!((exact / top - 1.0).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn phase_mean_curves() {
    let out = run(&["phase-mean", "--tmax", "20", "--dt-out", "1"]);
    assert!(out.status.success());
    assert_eq!(header_line(&out), "curve,omega_t,phase_expectation");
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 63);
    for curve in ["A", "B", "C"] {
        let first = rows.iter().find(|r| r[0] == curve).unwrap();
        assert_eq!(first[1..], ["0", "0"]);
    }
    let custom = run(&["phase-mean", "--D", "3", "--tmax", "5"]);
    assert!(data_rows(&custom).iter().all(|r| r[0] == "custom"));
}

#[test]
fn spectrum_counts_and_range() {
    let out = run(&["spectrum", "--nmax", "40", "--beta-t", "0,5"]);
    assert!(out.status.success());
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 80);
    for r in &rows {
        let l: f64 = r[2].parse().unwrap();
        assert!(l.abs() < std::f64::consts::PI);
    }
    assert_eq!(rows[40][..2], ["5", "0"]);
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["survival"][..],
        &["phase-mean", "--tmax", "30"],
        &["spectrum", "--nmax", "60"],
    ] {
        let a = run(args);
        let b = Command::new(env!("CARGO_BIN_EXE_dampedwig"))
            .args(args)
            .env("RAYON_NUM_THREADS", "3")
            .output()
            .unwrap();
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dampedwig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.csv");
    let out = run(&["spectrum", "--nmax", "10", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&["spectrum", "--nmax", "10"]).stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_configuration_exits_with_two() {
    for args in [
        &["survival", "--B", "2.5"][..],
        &["survival", "--D", "-1"],
        &["survival", "--dt-out", "0"],
        &["spectrum", "--nmax", "0"],
        &["spectrum", "--beta-t", "nan"],
        &["phase-mean", "--tol", "0"],
        &["validate", "--dt", "0.5"],
        &["validate", "--trajectories", "10"],
        &["survival", "--bogus"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn noiseless_validation_runs_deterministic_checks() {
    let out = run(&["validate", "--B", "0", "--No", "0", "--tmax", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("oracle,PASS,max|z|=0.000"));
    assert!(text.contains("kernel_mass,SKIP"));
    assert!(text.ends_with("# result: PASS (11 checks, 0 failed, 4 skipped)\n"));
}

#[test]
fn validation_passes_and_rejects_perturbed_friction() {
    let base = ["validate", "--trajectories", "10000", "--nmax", "60"];
    let good = run(&base);
    assert_eq!(
        good.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&good.stdout)
    );
    let text = String::from_utf8(good.stdout).unwrap();
    assert!(text.contains("oracle_sensitivity,PASS"));

    let bad = run(&[&base[..], &["--perturb-beta", "1.1"]].concat());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stdout)
        .unwrap()
        .contains("oracle,FAIL"));
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .contains("failing checks: oracle"));
}
