//! End-to-end checks of the `cdsc` binary: subcommand output, config
//! override flags, exit codes and plot rendering.

use std::path::Path;
use std::process::Command;

fn cdsc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdsc"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn hashing_bound_prints_csv() {
    let out = cdsc().args(["hashing-bound", "0.5", "inf"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "schema,eta,p_hb");
    assert!(lines[1].starts_with("1,0.5,0.189"));
    assert_eq!(lines[2], "1,inf,0.5");
}

#[test]
fn rate_runs_from_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("rate.cfg");
    write(
        &config,
        "[experiment]\nkind = rate\n[code]\npreset = css\n[noise]\np = 0.1\neta = 0.5\n[run]\nl_list = 3\ndecoder = exact\ntrials = 5000\nseed = 1\n",
    );
    let csv_path = dir.path().join("rate.csv");
    let trace_path = dir.path().join("trace.csv");
    let out = cdsc()
        .args([
            "rate",
            "--config",
            config.to_str().unwrap(),
            "--trials",
            "400",
            "--seed",
            "9",
            "--out",
            csv_path.to_str().unwrap(),
            "--trace",
            trace_path.to_str().unwrap(),
            "--trace-trials",
            "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[10], "400", "trials override: {row}");
    assert_eq!(cols[11], "9", "seed override: {row}");
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    assert_eq!(trace.lines().count(), 6);

    // Reruns are byte-identical.
    let rerun_path = dir.path().join("rate2.csv");
    let out = cdsc()
        .args([
            "rate",
            "--config",
            config.to_str().unwrap(),
            "--trials",
            "400",
            "--seed",
            "9",
            "--out",
            rerun_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(csv, std::fs::read_to_string(&rerun_path).unwrap());
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    write(&config, "[experiment]\nkind = rate\n[run]\nbogus = 1\n");
    let out = cdsc()
        .args(["rate", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));

    // Subcommand / config kind mismatch is also a config error.
    write(&config, "[experiment]\nkind = rate\n");
    let out = cdsc()
        .args(["threshold", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cluster_threshold_and_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cluster.cfg");
    write(
        &config,
        "[experiment]\nkind = cluster-threshold\n[noise]\neta = inf\n[run]\ncluster_levels = 0\n",
    );
    let out = cdsc()
        .args(["cluster-threshold", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("1,inf,0,0.5"));

    // Rate CSV -> SVG.
    let rate_cfg = dir.path().join("rate.cfg");
    write(
        &rate_cfg,
        "[experiment]\nkind = subthreshold\n[code]\npreset = css\n[noise]\np = 0.1\neta = 0.5\n[run]\nl_list = 3\ndecoder = exact\ntrials = 200\nseed = 3\n",
    );
    let csv_path = dir.path().join("sub.csv");
    assert!(cdsc()
        .args([
            "subthreshold",
            "--config",
            rate_cfg.to_str().unwrap(),
            "--out",
            csv_path.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let svg_path = dir.path().join("sub.svg");
    assert!(cdsc()
        .args([
            "plot",
            csv_path.to_str().unwrap(),
            "--kind",
            "subthreshold",
            "--out",
            svg_path.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    assert!(std::fs::read_to_string(&svg_path).unwrap().contains("</svg>"));

    let out = cdsc()
        .args(["plot", csv_path.to_str().unwrap(), "--kind", "nonsense", "--out", "x.svg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
