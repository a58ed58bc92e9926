//! End-to-end checks of the `cmc-sim` binary: artifact creation, overrides,
//! debug dumps, and the failure contract (nonzero exit, one machine-readable
//! error line on stderr).

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmc-sim"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cmc-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_config(dir: &Path) -> PathBuf {
    let out = bin().arg("default-config").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout)
        .unwrap()
        .replace("num_mts = 10", "num_mts = 3")
        .replace("num_subchannels = 64", "num_subchannels = 4");
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_produces_all_artifacts() {
    let dir = temp_dir("artifacts");
    let config = write_small_config(&dir);
    let out_dir = dir.join("out");
    let out = bin()
        .args(["run"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .args(["--trials", "3", "--seed", "9", "--schemes", "ps,multicast"])
        .args(["--trace", "--dump-channels"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "results.csv",
        "summary.csv",
        "plot_ec_mt.svg",
        "plot_ec_system.svg",
    ] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    // Debug dumps: gain matrices and solver traces of each sweep point's
    // first trial.
    assert!(out_dir.join("channels_sweep0_lr.csv").exists());
    assert!(out_dir.join("channels_sweep0_sr.csv").exists());
    assert!(out_dir.join("trace_ratio_sweep0_lr.csv").exists());
    assert!(out_dir.join("trace_prices_sweep0_lr.csv").exists());

    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    // 10 sweep points x 3 trials x 2 schemes plus the header.
    assert_eq!(results.lines().count(), 1 + 10 * 3 * 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn no_swipt_zeroes_the_harvest_column() {
    let dir = temp_dir("noswipt");
    let config = write_small_config(&dir);
    let out_dir = dir.join("out");
    let out = bin()
        .args(["run"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .args(["--trials", "2", "--schemes", "ps", "--no-swipt"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let header: Vec<&str> = results.lines().next().unwrap().split(',').collect();
    let q_idx = header.iter().position(|c| *c == "q_harvest_total").unwrap();
    for line in results.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[4] == "true" {
            let q: f64 = fields[q_idx].parse().unwrap();
            assert_eq!(q, 0.0);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_level_out_dir_is_honored() {
    let dir = temp_dir("cfgout");
    let config = write_small_config(&dir);
    let mut text = std::fs::read_to_string(&config).unwrap();
    text = text.replace(
        "schema_version = 1",
        "schema_version = 1\nout_dir = \"from-config\"",
    );
    std::fs::write(&config, text).unwrap();
    let out = bin()
        .args(["run"])
        .arg(&config)
        .args(["--trials", "1", "--schemes", "multicast"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("from-config").join("results.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_config_fails_with_machine_readable_line() {
    let out = bin()
        .args(["run", "/nonexistent/config.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let line = stderr.lines().next().unwrap_or_default();
    assert!(line.starts_with("error: "), "got: {line}");
}

#[test]
fn invalid_config_fails_with_kind_tag() {
    let dir = temp_dir("badcfg");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "schema_version = 1\ntrials = 0\n").unwrap();
    let out = bin().args(["run"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.starts_with("error: invalid-config: "),
        "got: {stderr}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_scheme_is_rejected() {
    let dir = temp_dir("badscheme");
    let config = write_small_config(&dir);
    let out = bin()
        .args(["run"])
        .arg(&config)
        .args(["--schemes", "ps,warp-drive"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: parse: "), "got: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}
