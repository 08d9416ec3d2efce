use std::path::PathBuf;
use std::process::{Command, Output};

fn lightcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(args)
        .env_remove("LIGHTCONE_TOL")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lightcone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_is_deterministic() {
    let a = lightcone(&["analyze", "--grid", "9x4"]);
    let b = lightcone(&["analyze", "--grid", "9x4", "--sequential"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("\"stratum\": \"lightlike\""));
}

#[test]
fn classify_and_focal_views() {
    let c = stdout(&lightcone(&["classify", "--grid", "9x3"]));
    assert!(c.contains("\"tag\": \"cuspidal_edge\""));
    assert!(c.contains("\"focal_plus\": null"));
    let f = stdout(&lightcone(&["focal", "--grid", "9x3", "--branch", "plus"]));
    assert!(f.contains("\"focal_minus\": null"));
    assert!(f.contains("\"kind\": null"));
}

#[test]
fn mesh_to_file() {
    let out = scratch("base.obj");
    let o = lightcone(&["mesh", "--grid", "4x5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text
        .starts_with("# lightcone mesh\n# surface: paper-example\n# sheet: base\n# grid: 4 x 5\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 20);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 12);
}

#[test]
fn probe_csv_and_target_errors() {
    let o = lightcone(&[
        "probe",
        "--path-u",
        "u",
        "--path-v",
        "0",
        "--target",
        "3.9269908169872414",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("t,lambda_tilde,K_hat,H_hat,K,H\n"));
    assert_eq!(csv.lines().count(), 25);
    let bad = lightcone(&[
        "probe",
        "--path-u",
        "u",
        "--path-v",
        "0",
        "--target",
        "3.14159265",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_file_and_overrides() {
    let cfg = scratch("run.toml");
    std::fs::write(
        &cfg,
        "surface = \"twisted-ruled\"\n\n[grid]\nnu = 3\nnv = 3\n\n[tolerance]\nrel = 1e-8\n",
    )
    .unwrap();
    let o = lightcone(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("\"surface\": \"twisted-ruled\""));
    assert!(s.contains("\"rel_tol\": 1e-8"));
    let o = Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args([
            "analyze",
            "--config",
            cfg.to_str().unwrap(),
            "--grid",
            "2x2",
        ])
        .env("LIGHTCONE_TOL", "1e-6")
        .output()
        .unwrap();
    let s = stdout(&o);
    assert!(s.contains("\"rel_tol\": 1e-6"));
    assert!(s.contains("\"nu\": 2"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        lightcone(&["analyze", "--surface", "no-such"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        lightcone(&["analyze", "--grid", "1x4"]).status.code(),
        Some(1)
    );
    assert_eq!(
        lightcone(&["analyze", "--tol", "-1"]).status.code(),
        Some(1)
    );
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "surface = \"paper-example\"\nbogus = 1\n").unwrap();
    let o = lightcone(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    // A surface undefined at u = 1 leaves failed points.
    let cfg = scratch("partial.toml");
    std::fs::write(
        &cfg,
        "[surface]\nname = \"holey\"\nu_range = [0.0, 3.0]\nv_range = [0.0, 1.0]\n\
         X = [\"u + 0*log((u - 1)^2)\", \"u\", \"v\"]\nv = [\"1\", \"1\", \"0\"]\nw = [\"1\", \"-1\", \"0\"]\n\n\
         [grid]\nnu = 4\nnv = 3\n",
    )
    .unwrap();
    let p = cfg.to_str().unwrap();
    assert_eq!(lightcone(&["mesh", "--config", p]).status.code(), Some(3));
    assert_eq!(
        lightcone(&["mesh", "--config", p, "--allow-partial"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        lightcone(&["analyze", "--config", p]).status.code(),
        Some(3)
    );
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn shipped_configs_run() {
    let o = lightcone(&["probe", "--config", &fixture("sphere-band.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    let cells: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[2] - 0.5f64.sqrt()).abs() < 1e-6);
    assert!(cells[4].abs() > 1e6);
    assert!(String::from_utf8_lossy(&o.stderr).contains("K: diverges"));

    let o = lightcone(&["analyze", "--config", &fixture("helix-curve.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"causal\": \"timelike\""));

    // The inline sphere band and the built-in example give the same sheet.
    let inline = lightcone(&[
        "mesh",
        "--config",
        &fixture("sphere-band.toml"),
        "--grid",
        "9x9",
    ]);
    let builtin = lightcone(&["mesh", "--grid", "9x9", "--branch", "minus"]);
    let body = |o: &Output| stdout(o).lines().skip(5).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&inline), body(&builtin));
}
