//! End-to-end runs of the `glfcert` binary.

use std::path::Path;
use std::process::{Command, Output};

use glfcert_cli::run::{echoed_config, OUT_ENV};
use glfcert_cli::RunConfig;

fn glfcert(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glfcert"))
        .args(args)
        .env(OUT_ENV, out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bundled_parabolic_run_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = glfcert(&["run", "parabolic_demo"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("min margin"));
    assert!(text.contains("status: PASS"));

    let root = dir.path().join("parabolic_demo");
    let head = |name: &str| {
        let s = std::fs::read_to_string(root.join(name)).unwrap();
        s.lines().next().unwrap().to_string()
    };
    assert_eq!(head("trajectory.csv"), "t,y,value");
    assert_eq!(head("check_parabolic_q_q2.csv"), "t,lhs,rhs,margin");
    assert!(head("glf.csv").starts_with("t,"));
    let report = std::fs::read_to_string(root.join("report.txt")).unwrap();
    assert!(text.starts_with(&report));
}

#[test]
fn echoed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = glfcert(&["run", "transport_steady"], dir.path());
    assert!(o.status.success());
    let report = std::fs::read_to_string(dir.path().join("transport_steady/report.txt")).unwrap();
    let echoed = echoed_config(&report).expect("config echo parses");
    let original = RunConfig::parse(glfcert_cli::scenarios::find("transport_steady").unwrap().source).unwrap();
    assert_eq!(echoed, original);
}

#[test]
fn invalid_coupling_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        r#"[scenario]
class = "transport"
id = "bad_coupling"
k = 1.0
lambda = { kind = "constant", value = 1.0 }
assumption = { kind = "bounded", lambda0 = 1.0 }
d = 0.0
rho0 = { kind = "constant", value = 0.5 }

[grid]
n = 50

[solver]
t_end = 1.0
"#,
    )
    .unwrap();
    let o = glfcert(&["run", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("|k| must be < 1"), "{err}");
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn fast_wave_run_reports_the_diffusion_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = glfcert(&["run", "wave_finite_time"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("below the diffusion floor"));
}

#[test]
fn scenario_listing_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&glfcert(&["list-scenarios"], dir.path()));
    let b = stdout(&glfcert(&["list-scenarios"], dir.path()));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 8);
    assert!(a.lines().any(|l| l.starts_with("heat_clm_demo — ")));
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = glfcert(&["verify", "nonsense", "--seed", "1"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn verify_writes_group_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify");
    let o = glfcert(
        &["verify", "trunc", "--seed", "3", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("[PASS]"));
    assert!(out.join("trunc.txt").exists());
}
