use std::path::Path;
use std::process::Command;

use chimhd::{parse_str, run, sweep_epsilon, RunConfig, Scenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chimhd"))
}

fn write_cfg(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, body).unwrap();
    p
}

fn small(scenario: Scenario, dir: &Path) -> RunConfig {
    let mut c = RunConfig::for_scenario(scenario);
    c.nx = 32;
    c.ny = 32;
    c.params.eps = 0.05;
    c.t_end = 0.1;
    c.output_dir = dir.to_path_buf();
    c
}

#[test]
fn rounded_square_default_run_writes_200_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = parse_str("scenario = rounded_square\neps = 0.05\n").unwrap();
    cfg.output_dir = tmp.path().join("rs");
    let s = run(&cfg).unwrap();
    assert_eq!(s.steps, 200);
    let csv = std::fs::read_to_string(tmp.path().join("rs/diagnostics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 201);
    assert!(lines[0].starts_with("step,time,E_total"));
    assert!(lines[200].starts_with("200,2e0,"));
    for n in [0, 50, 100, 150, 200] {
        assert!(tmp.path().join(format!("rs/fields_{n:06}.vtk")).exists());
        assert!(tmp.path().join(format!("rs/contour_{n:06}.csv")).exists());
    }
    assert!(s.worst_increase <= 1e-8 * s.e0);
}

#[test]
fn identical_configs_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let a = small(Scenario::TwoBubbles, &tmp.path().join("a"));
    let mut b = a.clone();
    b.output_dir = tmp.path().join("b");
    run(&a).unwrap();
    run(&b).unwrap();
    let ra = std::fs::read(tmp.path().join("a/diagnostics.csv")).unwrap();
    let rb = std::fs::read(tmp.path().join("b/diagnostics.csv")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn snapshots_hold_state_invariants() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::RoundedSquare, tmp.path());
    c.snapshot_every = 3;
    let s = run(&c).unwrap();
    assert!(s.max_charge_residual <= 1e-10);
    assert!(s.max_div_residual <= 1e-9);
    assert!(s.final_state.epot.mean().abs() < 1e-12);
    assert!(s.final_state.pressure.mean().abs() < 1e-12);
    let vtk = std::fs::read_to_string(tmp.path().join("fields_000003.vtk")).unwrap();
    assert!(vtk.contains("CELL_DATA 1024"));
    assert!(vtk.contains("VECTORS current double"));
}

#[test]
fn single_entry_sweep_gives_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::RoundedSquare, tmp.path());
    c.nx = 48;
    c.ny = 48;
    let r = sweep_epsilon(&c, &[0.05], 0.04).unwrap();
    assert_eq!(r.rows.len(), 1);
    assert!(r.rows[0].hausdorff > 0.0 && r.rows[0].hausdorff < 0.05);
    assert_eq!(
        std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap().lines().count(),
        2
    );
    assert!(tmp.path().join("eps_0.05/diagnostics.csv").exists());
    assert!(tmp.path().join("eps_0.04/diagnostics.csv").exists());
    assert!(sweep_epsilon(&c, &[0.05], 0.05).is_err());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().display();

    let ok = write_cfg(tmp.path(), &format!("scenario = droplet\nnx = 32\nny = 32\nt_end = 0.05\noutput_dir = {out}/ok\n"));
    assert_eq!(bin().arg("run").arg(&ok).status().unwrap().code(), Some(0));

    let bad = write_cfg(tmp.path(), "scenario = droplet\neps = -0.1\n");
    let o = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(bin().arg("run").arg(tmp.path().join("missing.cfg")).status().unwrap().code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));

    // unstabilised and a huge step: the energy rises in the first step
    let unstable = write_cfg(
        tmp.path(),
        &format!("scenario = droplet\nnx = 32\nny = 32\ns_stab = 0\ndt = 0.5\nt_end = 1\noutput_dir = {out}/u\n"),
    );
    assert_eq!(bin().arg("run").arg(&unstable).output().unwrap().status.code(), Some(3));

    let starved = write_cfg(
        tmp.path(),
        &format!("scenario = rounded_square\nnx = 32\nny = 32\nmaxit = 1\nt_end = 0.02\noutput_dir = {out}/s\n"),
    );
    let o = bin().arg("run").arg(&starved).output().unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn energy_abort_can_be_overridden() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::Droplet, tmp.path());
    c.params.s_stab = 0.0;
    c.dt = 0.5;
    c.t_end = 1.0;
    assert!(matches!(run(&c), Err(chimhd::CliError::Invariant { step: 1, .. })));
    c.abort_on_energy_increase = false;
    let s = run(&c).unwrap();
    assert!(s.worst_increase > 0.0);
}

#[test]
fn output_root_env_relocates_relative_dirs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "scenario = droplet\nnx = 16\nny = 16\nt_end = 0.02\noutput_dir = rel/x\n");
    let st = bin()
        .env(chimhd::run::OUTPUT_ROOT_ENV, tmp.path())
        .arg("run")
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(tmp.path().join("rel/x/diagnostics.csv").exists());
}

#[test]
fn check_subcommand_passes() {
    let o = bin().arg("check").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 6);
}
