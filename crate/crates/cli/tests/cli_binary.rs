use std::process::Command;

fn zeno_lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zeno-lab"))
}

#[test]
fn twolevel_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeno_lab().args(["twolevel", "--svg", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("twolevel.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("1.00000000000000e2,")).unwrap();
    let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] - 0.01f64.cos().powi(200)).abs() < 1e-10);
    let svg = std::fs::read_to_string(dir.path().join("twolevel.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn spectrum_reports_the_analytic_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeno_lab().args(["spectrum", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let first = csv.lines().find(|l| l.starts_with("1.00000000000000e0,")).unwrap();
    let analytic: f64 = first.split(',').nth(2).unwrap().parse().unwrap();
    assert!((analytic - 4.9348).abs() < 1e-4);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["fig1", "--nope", "3"][..], &["not-an-experiment"], &["fig1", "--sigma", "-1"]] {
        let out = zeno_lab().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_lists_defaults() {
    let out = zeno_lab().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Defaults") && text.contains("zeno-convergence"));
}

#[test]
fn unwritable_output_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = zeno_lab().args(["twolevel", "--out"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let ok = zeno_lab().env("ZENO_LAB_THREADS", "1").args(["twolevel", "--out"]).arg(dir.path()).output().unwrap();
    assert!(ok.status.success());
    let bad = zeno_lab().env("ZENO_LAB_THREADS", "zero").args(["twolevel", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
