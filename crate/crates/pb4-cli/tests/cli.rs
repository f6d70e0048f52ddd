use std::io::Write;
use std::process::Command;

fn pb4() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pb4"))
}

#[test]
fn formula_prints_value_and_exits_zero() {
    let out = pb4()
        .args(["formula", "--A", "1", "--B", "2", "--q", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
}

#[test]
fn swapped_areas_exit_two() {
    let out = pb4()
        .args(["formula", "--A", "2", "--B", "1", "--q", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infinite_exponent_is_flagged() {
    let out = pb4()
        .args(["formula", "--A", "1", "--B", "3", "--q", "inf"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("LOWER_BOUND_ONLY"), "{text}");
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(cfg, "{}", r#"{"subcommand":"formula","A":1,"B":2,"q":1}"#).unwrap();
    let path = cfg.path().to_str().unwrap().to_string();
    let out = pb4().args(["--config", &path]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");

    // The flag overrides the config's q.
    let out = pb4()
        .args(["formula", "--config", &path, "--q", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 2.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn malformed_config_and_bad_values_exit_two() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(cfg, "not json").unwrap();
    let path = cfg.path().to_str().unwrap().to_string();
    let out = pb4().args(["--config", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = pb4()
        .args(["formula", "--A", "1", "--B", "2", "--q", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('q'), "{err}");
}

#[test]
fn verify_upper_emits_deterministic_csv() {
    let args = [
        "verify-upper",
        "--A",
        "1",
        "--B",
        "3",
        "--q",
        "2",
        "--eps",
        "1e-2,1e-3",
        "--grid",
        "256",
    ];
    let a = pb4().args(args).output().unwrap();
    assert!(a.status.success());
    let text = String::from_utf8_lossy(&a.stdout).to_string();
    assert!(text.starts_with("epsilon,C,norm,formula,ratio\n"), "{text}");
    assert_eq!(text.lines().count(), 3);
    let b = pb4().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout, "CSV must be byte-identical across runs");
}

#[test]
fn non_monotone_schedule_exits_one() {
    // Increasing eps makes the ratio column increase, which the command
    // treats as a failed certificate.
    let out = pb4()
        .args([
            "verify-upper",
            "--A",
            "1",
            "--B",
            "3",
            "--q",
            "2",
            "--eps",
            "1e-3,1e-2",
            "--cvals",
            "2.999,2.99",
            "--grid",
            "256",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nonseparating_curve_reports_zero() {
    let out = pb4()
        .args(["curve", "--q", "2", "--mode", "nonseparating", "--grid", "128"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("JSON output");
    assert_eq!(v["measured"], 0.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = pb4()
        .args([
            "highdim-decay",
            "--n",
            "2",
            "--d",
            "2",
            "--q",
            "2",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("alpha,grad_lq_q,field_lq_q\n"));
    assert_eq!(text.lines().count(), 5);
}
