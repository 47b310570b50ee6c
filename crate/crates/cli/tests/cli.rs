use std::fs;
use std::process::{Command, Output};

fn mbqrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbqrw"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn verify_passes_every_invariant() {
    let out = mbqrw(&["verify"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 7);
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = mbqrw(&[
        "sweep", "--mu", "1,10", "--iterations", "20", "--grid", "0:1:0.25", "--trials", "50", "--seed", "9",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mu,J,phi,sin2phi,trials,j0_mean,empirical_success,se,model_success,empirical_disturbance,model_disturbance"
    );
    assert_eq!(lines.count(), 2 * 5);
    let meta = fs::read_to_string(dir.path().join("sweep.csv.meta")).unwrap();
    assert!(meta.contains("master_seed=9"));
}

#[test]
fn serial_and_parallel_sweeps_are_identical() {
    let args = ["sweep", "--mu", "1", "--iterations", "30", "--grid", "0:1:0.1", "--trials", "40", "--seed", "3"];
    let par = mbqrw(&args);
    let mut serial_args = args.to_vec();
    serial_args.push("--serial");
    let ser = mbqrw(&serial_args);
    assert!(par.status.success() && ser.status.success());
    assert_eq!(par.stdout, ser.stdout);
}

#[test]
fn trace_has_one_row_per_step() {
    let out = mbqrw(&["trace", "--mu", "10", "--phi", "0.5236", "--iterations", "200", "--seed", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "step,outcome,j0,j1,delta_j,pr_psi0,pr_ax0");
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn model_needs_no_trials() {
    let out = mbqrw(&["model", "--mu", "1,10,50", "--iterations", "100", "--grid", "0:1:0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("mu,J,phi,sin2phi,model_success"));
    assert_eq!(text.lines().count(), 1 + 3 * 3);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small model run\nmu = 1,10\niterations = 40\ngrid = 0:1:0.5\n").unwrap();
    let out = mbqrw(&["model", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 2 * 3);

    let out = mbqrw(&["model", "--config", cfg.to_str().unwrap(), "--mu", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    assert!(text.lines().skip(1).all(|l| l.starts_with("5,40,")));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(mbqrw(&["sweep", "--iterations", "3"]).status.code(), Some(2));
    assert_eq!(mbqrw(&["trace", "--mu", "1", "--phi", "2.0"]).status.code(), Some(2));
    assert_eq!(mbqrw(&["model", "--mu", "0"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(mbqrw(&["model", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = mbqrw(&["model", "--mu", "1", "--iterations", "10", "--grid", "0:1:0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
