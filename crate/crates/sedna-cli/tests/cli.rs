//! End-to-end checks of the command-line surface: flag parsing, config
//! files, exit codes, and byte-exact reproducibility of emitted CSVs.

use std::process::{Command, Output};

fn sedna(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sedna"))
        .args(args)
        .env_remove("SEDNA_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn plan_defaults_emit_three_variants() {
    let out = sedna(&["plan"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# command = plan"));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 4, "header row plus one row per variant");
    assert!(data[1].starts_with("naive,"));
    assert!(data[2].starts_with("mds,"));
    assert!(data[3].starts_with("rateless,"));
}

#[test]
fn plan_rateless_flags_match_documented_run() {
    let out = sedna(&[
        "plan",
        "--variant",
        "rateless",
        "--n",
        "256",
        "--ce",
        "32",
        "--delta",
        "1e-9",
        "--S",
        "4096",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# n = 256"));
    assert!(text.contains("# ce = 32"));
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("rateless,256,32,"));
}

#[test]
fn infeasible_reliability_exits_two() {
    let out = sedna(&[
        "plan",
        "--variant",
        "rateless",
        "--delta",
        "1e-12",
        "--delta-code",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("delta"),
        "diagnostic names the violated bound: {err}"
    );
}

#[test]
fn unknown_axis_exits_two() {
    let out = sedna(&["sweep", "--axis", "volume"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_same_seed_is_byte_identical() {
    let args = [
        "simulate",
        "--n",
        "16",
        "--ce",
        "2",
        "--m",
        "6",
        "--s",
        "2",
        "--ell-sym",
        "64",
        "--payload-bytes",
        "500",
        "--trials",
        "25",
        "--seed",
        "1234",
    ];
    let a = sedna(&args);
    let b = sedna(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn config_file_feeds_commands_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("sedna-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("scenario.conf");
    std::fs::write(
        &config,
        "seed = 11\n[simulate]\nn = 16\nce = 2\nm = 6\ns = 2\nell_sym = 64\npayload_bytes = 400\ntrials = 10\n",
    )
    .unwrap();
    let base = sedna(&["--config", config.to_str().unwrap(), "simulate"]);
    assert!(base.status.success());
    let text = stdout(&base);
    assert!(text.contains("# n = 16"));
    assert!(text.contains("# seed = 11"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 11);

    let overridden = sedna(&[
        "--config",
        config.to_str().unwrap(),
        "simulate",
        "--trials",
        "3",
    ]);
    let text = stdout(&overridden);
    assert!(text.contains("# trials = 3"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_dir_env_places_the_file() {
    let dir = std::env::temp_dir().join(format!("sedna-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sedna"))
        .args([
            "codec-bench",
            "--blocks",
            "4",
            "--margins",
            "0",
            "--trials",
            "50",
        ])
        .env("SEDNA_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.join("codec-bench.csv")).unwrap();
    assert!(written.contains("# command = codec-bench"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn emitted_csv_reruns_byte_identically_from_its_header() {
    let out = sedna(&["sweep", "--axis", "ce_ratio", "--S", "8192"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rerun = sedna_core::experiments::rerun_csv(&text).unwrap();
    assert_eq!(text, rerun);
}
