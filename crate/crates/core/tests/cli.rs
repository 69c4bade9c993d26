use std::fs;
use std::process::Command;

use ftrl_delay::bench::CSV_HEADER;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ftrl-bench"))
}

#[test]
fn writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = bench()
        .args(["--tuner", "advanced", "--n", "400", "--k", "3", "--delay-gen", "uniform:10", "--seeds", "1,5"])
        .args(["--check-bounds", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let summary: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(summary["tuner"], "advanced");
    assert_eq!(summary["generator"], "chacha8");
    assert_eq!(summary["seeds"].as_array().unwrap().len(), 2);
    assert_eq!(summary["bounds"]["skipping_pass"], true);
    assert!(summary["bounds"]["delay_pass"].is_null());

    let on_disk: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(on_disk, summary);
    for seed in [1, 5] {
        let csv = fs::read_to_string(out.join(format!("seed_{seed}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 400);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "tuner = \"tsallis\"\nn = 200\nk = 2\ndelay_gen = \"zero\"\nseeds = 3\nmeans = [0.2, 0.7]\n")
        .unwrap();
    let output = bench().arg("--config").arg(&config).args(["--tuner", "simple"]).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["tuner"], "simple");
    assert_eq!(summary["n"], 200);
    assert_eq!(summary["seeds"].as_array().unwrap().len(), 3);
}

#[test]
fn repeat_runs_print_identical_output() {
    let args = ["--tuner", "simple", "--n", "300", "--k", "4", "--delay-gen", "unbalanced", "--seeds", "2"];
    let a = bench().args(args).output().unwrap();
    let b = bench().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_exits_with_error() {
    for args in [
        vec!["--tuner", "greedy", "--n", "10", "--k", "2", "--delay-gen", "zero"],
        vec!["--n", "10", "--k", "1", "--delay-gen", "zero"],
        vec!["--n", "10", "--k", "2", "--delay-gen", "poisson:3"],
        vec!["--n", "10", "--k", "2", "--delay-gen", "zero", "--means", "0.5"],
        vec!["--delay-gen", "file:/definitely/missing.json"],
    ] {
        let output = bench().args(&args).output().unwrap();
        assert_eq!(output.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"), "{args:?}");
    }
}
