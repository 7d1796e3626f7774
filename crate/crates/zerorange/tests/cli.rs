use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zerorange"))
}

fn small_run(out: &std::path::Path) -> std::process::Output {
    bin()
        .args(["--experiment", "globular-endpoint", "--T", "4", "--n-paths", "2000", "--seed", "9", "--out"])
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn same_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let first = small_run(&a);
    let second = small_run(&b);
    assert!(first.status.code().is_some_and(|c| c <= 1), "{first:?}");
    assert_eq!(first.status.code(), second.status.code());
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "experiment,gamma,T,n_paths,seed,grid,mean_endpoint_radius,endpoint_ks,pass_globular_endpoint_ks\n"
    ));
}

#[test]
fn unknown_experiment_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let run = bin().args(["--experiment", "foo", "--out"]).arg(&out).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("unknown experiment id `foo`"));
    assert!(!out.exists());
}

#[test]
fn invalid_combination_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let run = bin().args(["--experiment", "globular-endpoint", "--kappa", "1", "--out"]).arg(&out).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unwritable_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("r.csv");
    let run = bin().args(["--experiment", "kernel-selftest", "--out"]).arg(&out).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "experiment = kernel-selftest\nformat = csv\n").unwrap();
    let out = dir.path().join("r.json");
    let run = bin().arg("--config").arg(&cfg).args(["--format", "json", "--out"]).arg(&out).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out).unwrap()).unwrap();
    assert_eq!(v["experiment"], "kernel-selftest");
    assert_eq!(v["pass"], true);
    assert!(v["statistics"]["kernel_max_rel_error"].as_f64().unwrap() <= 1e-8);
}
