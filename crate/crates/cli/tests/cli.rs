use std::path::Path;
use std::process::{Command, Output};

use zakharov::energy::load_ledger;

fn zakharov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zakharov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = "\
grid.M = 16
grid.L = 4
time.dt = 1e-2
time.T = 0.2
time.ledger_every = 5
time.delta = 0.05
imethod.N_list = 1, 2, 4, 8
imethod.s = 0.8
init.preset = gaussian_pair
init.width = 0.4
init.mass_fraction = 0.3
";

#[test]
fn verify_passes() {
    let out = zakharov(&["verify"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 10);
}

#[test]
fn unknown_preset_exits_one_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = zakharov(&[
        "simulate",
        "--preset",
        "vortex",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn unknown_flag_exits_one() {
    let out = zakharov(&["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr)
        .to_lowercase()
        .contains("usage"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(zakharov(&["--help"]).status.code(), Some(0));
}

#[test]
fn constant_preset_keeps_constant_mass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = zakharov(&[
        "simulate",
        "--config",
        &cfg,
        "--preset",
        "constant",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let ledger = load_ledger(out_dir.join("ledger.csv")).unwrap();
    assert!(ledger.len() > 2);
    let m0 = ledger[0].mass;
    assert!(ledger.iter().all(|r| (r.mass - m0).abs() <= 1e-13 * m0));
    assert!(out_dir.join("ledger.gp").exists());
    assert!(out_dir.join("snapshots").join("u_000000.zkf").exists());
}

#[test]
fn studies_write_tables_and_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    for (cmd, name) in [
        ("study-fixed-diff", "fixed_diff"),
        ("study-almost-cons", "almost_cons"),
        ("study-growth", "growth"),
        ("study-local-time", "local_time"),
    ] {
        let out = zakharov(&[cmd, "--config", &cfg, "--out", o]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out_dir.join(format!("{name}.csv")).exists(), "{cmd}");
        assert!(out_dir.join(format!("{name}.gp")).exists(), "{cmd}");
    }
}

#[test]
fn growth_below_three_quarters_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}imethod.s = 0.7\n"));
    let out = zakharov(&[
        "study-growth",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s > 3/4"));
}

// Broad-band data with N well inside the spectrum: the fixed-time
// difference grows with N here.
const BROAD: &str = "\
grid.M = 64
grid.L = 6.283185307179586
imethod.N_list = 1, 2, 4, 8
init.preset = random_smooth
init.width = 0.05
init.seed = 1
";

#[test]
fn disabled_check_does_not_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{BROAD}checks.fixed_diff = false\n"));
    let out = zakharov(&[
        "study-fixed-diff",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn failed_slope_assertion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BROAD);
    let out = zakharov(&[
        "study-fixed-diff",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn amplitude_beyond_the_detector_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{SMALL}init.preset = gaussian\ninit.mass_fraction = 1e14\n"),
    );
    let out = zakharov(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ground_state_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = zakharov(&["ground-state", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("ground_state.csv")).unwrap();
    assert!(text.starts_with("r,Q"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}init.preset = random_smooth\n"));
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = zakharov(&[
            "study-fixed-diff",
            "--config",
            &cfg,
            "--seed",
            "42",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &Path| std::fs::read(d.join("fixed_diff.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
