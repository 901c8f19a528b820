use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouvillian")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liouvillian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["solve", "ince"]), 0);
    assert_eq!(code(&["solve", "tn", "--n", "-4"]), 3);
    assert_eq!(code(&["propagator", "toy", "--id", "4"]), 2);
    assert_eq!(code(&["solve", "--r", "1/("]), 4);
    assert_eq!(code(&["propagator", "toy", "--id", "9"]), 4);
    assert_eq!(code(&["propagator", "toy", "--id", "2", "--set", "zz=1"]), 4);
    assert_eq!(code(&["solve"]), 4);
    assert_eq!(code(&["frobnicate"]), 4);
}

#[test]
fn json_is_deterministic() {
    let a = run(&["--format", "json", "solve", "ince", "--kappa", "5/4"]);
    let b = run(&["--format", "json", "solve", "ince", "--kappa", "5/4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["target"], "ince --lambda 1.25 --omega 1");
}

#[test]
fn reduced_equation_inline() {
    let out = run(&["solve", "--r", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tau"), "{text}");
}

#[test]
fn verify_reports() {
    let report = scratch("toy1.json");
    let r = report.to_str().unwrap();
    assert_eq!(code(&["--format", "json", "--output", r, "propagator", "toy", "--id", "1"]), 0);
    assert_eq!(code(&["verify", r]), 0);

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["mu0"] = "3*sin(t)".into();
    let tampered = scratch("toy1-tampered.json");
    std::fs::write(&tampered, v.to_string()).unwrap();
    assert_eq!(code(&["verify", tampered.to_str().unwrap()]), 2);

    v["checks"] = serde_json::json!([]);
    v["mu0"] = "2*sin(t)".into();
    let empty = scratch("toy1-empty.json");
    std::fs::write(&empty, v.to_string()).unwrap();
    let out = run(&["verify", empty.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("warning"));

    let garbage = scratch("garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    assert_eq!(code(&["verify", garbage.to_str().unwrap()]), 4);
}

#[test]
fn problem_file_with_parameter_override() {
    let file = scratch("oscillator.txt");
    std::fs::write(&file, "kind: hamiltonian\nparam: w = 1\na: 1/2\nb: w^2/2\nc: 0\n").unwrap();
    let f = file.to_str().unwrap();
    assert_eq!(code(&["propagator", f]), 0);
    assert_eq!(code(&["propagator", f, "--param", "w=2"]), 0);
    assert_eq!(code(&["propagator", f, "--param", "nope=2"]), 4);
}

#[test]
fn tolerance_override_can_fail_a_run() {
    assert_eq!(code(&["--tolerance", "schrodinger_pde=1e-9", "propagator", "toy", "--id", "2"]), 2);
    assert_eq!(code(&["--tolerance", "no_such_check=1", "propagator", "toy", "--id", "2"]), 4);
}

#[test]
fn property_subcommand() {
    let out = run(&["proptest", "--seed", "7", "--scale", "0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
