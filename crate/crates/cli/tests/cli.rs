//! End-to-end CLI behavior: artifact layout, exit codes, machine-readable
//! errors, and the counterexample verify summary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mvpde"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mvpde-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_writes_artifacts_with_stable_header() {
    let dir = temp_dir("solve");
    let out = bin().args(["solve", "--out"]).arg(&dir).arg("--grid").arg("16x15").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("solution.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,dty,dxy\n"));
    assert_eq!(csv.lines().count(), 1 + 17 * 17);
    let header: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("solution.json")).unwrap()).unwrap();
    assert_eq!(header["grid"]["nt"], 16);
    assert_eq!(header["scheme"], "crank-nicolson");
    assert_eq!(header["range_escape"], false);
    let hash1 = header["problem_hash"].as_str().unwrap().to_string();

    // identical config hashes across runs
    let dir2 = temp_dir("solve2");
    bin().args(["solve", "--out"]).arg(&dir2).arg("--grid").arg("16x15").output().unwrap();
    let header2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir2.join("solution.json")).unwrap()).unwrap();
    assert_eq!(hash1, header2["problem_hash"].as_str().unwrap());
}

#[test]
fn invalid_initial_datum_is_a_config_error() {
    let dir = temp_dir("bad-ic");
    let config = dir.join("bad.toml");
    fs::write(&config, "[problem]\ny0 = [0.5, 1.0]\n").unwrap();
    let out = bin().args(["solve", "--config"]).arg(&config).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"], "ic-boundary-violation");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = temp_dir("unknown-key");
    let config = dir.join("bad.toml");
    fs::write(&config, "[problem]\nmystery_knob = 3\n").unwrap();
    let out = bin().args(["solve", "--config"]).arg(&config).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"], "config-parse-error");
}

#[test]
fn verify_on_counterexample_separates_families() {
    let dir = temp_dir("cx");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/counterexample.toml");
    let out = bin()
        .args(["verify", "--config", config, "--out"])
        .arg(&dir)
        .arg("--grid")
        .arg("48x48")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("verify_summary.json")).unwrap())
            .unwrap();
    let verdict = |name: &str| -> bool {
        summary["families"]
            .as_array()
            .unwrap()
            .iter()
            .find(|f| f["family"] == name)
            .unwrap_or_else(|| panic!("family {name} missing"))["pass"]
            .as_bool()
            .unwrap()
    };
    assert!(verdict("m1-weak"), "first-moment family must pass");
    assert!(verdict("m1-ic") && verdict("m1-bc"));
    assert!(!verdict("m2-weak"), "second-moment family must fail");
    assert!(!verdict("dissipation"));
    assert!(!verdict("certificate"));
}

#[test]
fn zero_fixture_convergence_study_reports_exact() {
    let dir = temp_dir("zero");
    let config = dir.join("zero.toml");
    fs::write(&config, "[problem]\ny0 = [0.0]\n\n[grid]\nnt = 8\nnx = 7\n").unwrap();
    let out = bin()
        .args(["convergence-study", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("exact"), "stdout: {stdout}");
    let csv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    assert!(csv.contains("exact"));
}

#[test]
fn verify_exit_code_zero_even_with_failing_families() {
    // a FAIL verdict is a reported result, not a run failure
    let dir = temp_dir("cx-exit");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/counterexample.toml");
    let out = bin()
        .args(["verify", "--config", config, "--out"])
        .arg(&dir)
        .arg("--grid")
        .arg("24x24")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn allen_cahn_solve_stays_in_range() {
    let dir = temp_dir("ac");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/allen_cahn.toml");
    let out = bin().args(["solve", "--config", config, "--out"]).arg(&dir).output().unwrap();
    assert!(out.status.success());
    let header: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("solution.json")).unwrap()).unwrap();
    assert_eq!(header["range_escape"], false);
}

#[test]
fn heat_convergence_study_observes_second_order() {
    let dir = temp_dir("conv2");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/heat.toml");
    let out = bin()
        .args(["convergence-study", "--config", config, "--out"])
        .arg(&dir)
        .arg("--grid")
        .arg("24x24")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("convergence.csv")).unwrap();
    assert!(csv.lines().count() >= 4);
}

#[test]
fn implicit_euler_convergence_study_observes_first_order() {
    let dir = temp_dir("conv1");
    let config = dir.join("ie.toml");
    // fine space grid so the first-order time error dominates the suites
    fs::write(
        &config,
        "[problem]\ny0 = [0.0, 0.0, 0.0, 16.0, -48.0, 48.0, -16.0]\nz0box = [-8.0, 8.0]\n\n\
         [grid]\nnt = 16\nnx = 127\nscheme = \"implicit-euler\"\n\n\
         [tolerances]\norder_window = [0.7, 1.3]\n",
    )
    .unwrap();
    let out = bin()
        .args(["convergence-study", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn relax_writes_bounds_with_config_hash() {
    let dir = temp_dir("relax");
    let config = dir.join("relax.toml");
    fs::write(
        &config,
        "[problem]\ny0 = [0.0, 0.0, 0.0, 16.0, -48.0, 48.0, -16.0]\nz0box = [-8.0, 8.0]\n\n\
         [grid]\nnt = 32\nnx = 32\n\n\
         [relax]\ndegrees = [2]\nsolver_tol = 1e-4\nmax_iters = 3000\nexport_sdpa = true\n",
    )
    .unwrap();
    let out = bin().args(["relax", "--config"]).arg(&config).arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("bounds.csv")).unwrap();
    assert!(csv.starts_with("objective_id,d,sense,value,gap,reference\n"));
    assert!(csv.contains("# config_hash="));
    assert!(csv.lines().any(|l| l.starts_with("objective,2,min,")));
    assert!(csv.lines().any(|l| l.starts_with("objective,2,max,")));
    assert!(dir.join("relax_d2_min.dat-s").exists());
    assert!(dir.join("relax_d2_max.dat-s").exists());
}
