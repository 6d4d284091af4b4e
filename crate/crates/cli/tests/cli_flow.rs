//! End-to-end exercises of the `safescale` binary: the full pipeline on a
//! small scale, the error paths, and cross-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_safescale"))
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/sim_default.toml")
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn safescale");
    assert!(
        out.status.success(),
        "safescale {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn safescale");
    assert!(!out.status.success(), "safescale {args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn pipeline(dir: &Path, seed: &str) {
    let cfg = default_config();
    let cfg = cfg.to_str().unwrap();
    let out = dir.to_str().unwrap();
    run_ok(&[
        "collect", "--config", cfg, "--out", out, "--episodes", "10", "--seed", seed,
        "--duration", "60",
    ]);
    run_ok(&["estimate-k", "--out", out]);
    run_ok(&[
        "train", "--out", out, "--horizon", "6", "--epochs", "12", "--seed", "3",
    ]);
    let model = dir.join("model.json");
    let model = model.to_str().unwrap();
    run_ok(&[
        "evaluate", "--config", cfg, "--out", out, "--policy", "random", "--episodes", "4",
        "--seed", "9", "--tasks", "4",
    ]);
    run_ok(&[
        "evaluate", "--config", cfg, "--out", out, "--policy", "greedy", "--model", model,
        "--episodes", "4", "--seed", "9", "--tasks", "4",
    ]);
    run_ok(&["report", "--out", out]);
}

#[test]
fn the_full_pipeline_produces_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    pipeline(&out, "11");

    for rel in [
        "config.toml",
        "manifest.json",
        "logs/ep_0000.csv",
        "logs/ep_0005.csv",
        "k_estimate.txt",
        "model.json",
        "history.csv",
        "eval_logs/random/ep_0003.csv",
        "eval_logs/greedy/ep_0000.csv",
        "metrics_random.csv",
        "metrics_greedy.csv",
        "results.csv",
        "report/report.md",
        "report/histograms.csv",
        "report/histogram_random.svg",
        "report/histogram_greedy.svg",
        "report/density.csv",
        "report/density.svg",
    ] {
        assert!(out.join(rel).exists(), "missing {rel}");
    }

    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert!(lines.next().unwrap().starts_with("label,policy,episodes,"));
    let labels: Vec<&str> =
        lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["greedy", "random"], "rows sorted by label");

    let estimate = std::fs::read_to_string(out.join("k_estimate.txt")).unwrap();
    assert!(estimate.starts_with("k 5\n"), "unexpected estimate: {estimate}");
}

#[test]
fn matched_seeds_give_byte_identical_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    pipeline(&a, "17");
    pipeline(&b, "17");

    for rel in [
        "logs/ep_0002.csv",
        "model.json",
        "results.csv",
        "metrics_greedy.csv",
        "report/report.md",
        "report/density.csv",
    ] {
        let left = std::fs::read(a.join(rel)).unwrap();
        let right = std::fs::read(b.join(rel)).unwrap();
        assert_eq!(left, right, "{rel} differs between identical runs");
    }
}

#[test]
fn zero_episodes_fails_with_a_parsable_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = default_config();
    let stderr = run_err(&[
        "collect", "--config", cfg.to_str().unwrap(), "--out",
        dir.path().join("x").to_str().unwrap(), "--episodes", "0",
    ]);
    assert!(stderr.contains("error: "), "no error line: {stderr}");
    assert!(stderr.contains("nothing to collect"), "wrong message: {stderr}");
}

#[test]
fn commands_refuse_to_run_out_of_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    std::fs::create_dir_all(&out).unwrap();
    let stderr = run_err(&["estimate-k", "--out", out.to_str().unwrap()]);
    assert!(stderr.contains("run collect first"), "wrong message: {stderr}");
    let stderr = run_err(&["report", "--out", out.to_str().unwrap()]);
    assert!(stderr.contains("run collect first") || stderr.contains("no manifest"), "{stderr}");
}

#[test]
fn a_tampered_model_is_rejected_as_stale() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let cfg = default_config();
    let cfg = cfg.to_str().unwrap();
    run_ok(&[
        "collect", "--config", cfg, "--out", out.to_str().unwrap(), "--episodes", "3",
        "--seed", "2", "--duration", "20",
    ]);
    run_ok(&[
        "train", "--out", out.to_str().unwrap(), "--k", "5", "--horizon", "4", "--epochs",
        "3", "--seed", "3",
    ]);

    // Grow the file without changing its JSON meaning: still stale.
    let model = out.join("model.json");
    let mut bytes = std::fs::read(&model).unwrap();
    bytes.push(b'\n');
    std::fs::write(&model, bytes).unwrap();

    let stderr = run_err(&[
        "evaluate", "--config", cfg, "--out", out.to_str().unwrap(), "--policy", "greedy",
        "--model", model.to_str().unwrap(), "--episodes", "1", "--seed", "4", "--tasks", "2",
    ]);
    assert!(stderr.contains("stale model"), "wrong message: {stderr}");
}

#[test]
fn an_edited_config_invalidates_the_trained_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let cfg = default_config();
    let cfg = cfg.to_str().unwrap();
    run_ok(&[
        "collect", "--config", cfg, "--out", out.to_str().unwrap(), "--episodes", "3",
        "--seed", "2", "--duration", "20",
    ]);
    run_ok(&[
        "train", "--out", out.to_str().unwrap(), "--k", "5", "--horizon", "4", "--epochs",
        "3", "--seed", "3",
    ]);

    let dir_cfg = out.join("config.toml");
    let mut text = std::fs::read_to_string(&dir_cfg).unwrap();
    text.push_str("\n# edited after training\n");
    std::fs::write(&dir_cfg, text).unwrap();

    let model = out.join("model.json");
    let stderr = run_err(&[
        "evaluate", "--config", cfg, "--out", out.to_str().unwrap(), "--policy", "greedy",
        "--model", model.to_str().unwrap(), "--episodes", "1", "--seed", "4", "--tasks", "2",
    ]);
    assert!(stderr.contains("stale model"), "wrong message: {stderr}");
}

#[test]
fn greedy_without_a_model_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = default_config();
    let stderr = run_err(&[
        "evaluate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--policy", "greedy", "--episodes", "1", "--seed", "4", "--tasks", "2",
    ]);
    assert!(stderr.contains("requires --model"), "wrong message: {stderr}");
}
