//! End-to-end checks of the binary: output values, determinism, round
//! trips, and exit codes.

use std::process::{Command, Output};

fn faraday(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faraday")).args(args).output().expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = faraday(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn reflection_reports_the_working_point() {
    let v = stdout_json(&[
        "reflection",
        "--omega-p",
        "-0.5",
        "--g",
        "0.5",
        "--gamma",
        "0",
        "--detuning0",
        "0",
    ]);
    assert!((v["coupled"]["r_re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(v["coupled"]["r_im"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["coupled"]["phase"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!((v["coupled"]["magnitude"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["empty"]["phase"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((v["theta_plus"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn reflection_sweep_emits_csv() {
    let out = faraday(&["reflection", "--sweep", "--from", "-2", "--to", "2", "--points", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("omega_p,coupled_re,coupled_im,coupled_phase,coupled_mag,empty_re,empty_im,empty_phase,empty_mag")
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn forced_teleport_matches_published_row() {
    let v = stdout_json(&[
        "teleport",
        "--n",
        "2",
        "--state",
        "random",
        "--outcome",
        "RR:11",
        "--seed",
        "7",
    ]);
    assert_eq!(v["correction"], "I.I");
    assert_eq!(v["outcome"], "RR:11");
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["probability"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-10);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["teleport", "--n", "2", "--state", "random", "--seed", "9"];
    let a = faraday(&args);
    let b = faraday(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let sweep_args =
        ["sweep", "--n", "1", "--samples", "4", "--gamma-range", "0:0.1:2", "--seed", "5"];
    let a = faraday(&sweep_args);
    let b = faraday(&sweep_args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn teleport_report_round_trips() {
    // Re-running with the reported input amplitudes and outcome reproduces
    // the reported numbers.
    let v = stdout_json(&["teleport", "--n", "1", "--state", "random", "--seed", "21"]);
    let amps: Vec<String> = v["input"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| format!("{}:{}", p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    let state = amps.join(",");
    let outcome = v["outcome"].as_str().unwrap();
    let replay = stdout_json(&[
        "teleport",
        "--n",
        "1",
        "--state",
        &state,
        "--outcome",
        outcome,
        "--seed",
        "21",
    ]);
    assert_eq!(v["fidelity"], replay["fidelity"]);
    assert_eq!(v["probability"], replay["probability"]);
    assert_eq!(v["correction"], replay["correction"]);
}

#[test]
fn timing_reports_the_three_hour_point() {
    let v = stdout_json(&["timing", "--n", "2"]);
    let hours = v["hours"].as_f64().unwrap();
    assert!((2.5..=4.0).contains(&hours), "got {hours}");
    assert!((v["seconds"].as_f64().unwrap() - 1.227e4).abs() < 50.0);
}

#[test]
fn figure2_csv_grid() {
    let out = faraday(&["timing", "--figure2", "--n-from", "1", "--n-to", "3", "--etas", "1e-4,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,eta,seconds"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn tables_reports_the_known_verdicts() {
    let v = stdout_json(&["tables"]);
    assert_eq!(v["all_m_pass"], false);
    let failures: Vec<&str> =
        v["m_failures"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert_eq!(failures, ["LRL:odd", "RLL:odd"]);
    assert_eq!(v["table1"].as_array().unwrap().len(), 16);
    assert_eq!(v["table2"].as_array().unwrap().len(), 16);
    // Every two-qubit row passes the M-check.
    for row in v["table1"].as_array().unwrap() {
        assert_eq!(row["m_check"], true, "row {}", row["outcome"]);
    }
}

#[test]
fn montecarlo_reports_consistent_fields() {
    let v = stdout_json(&[
        "montecarlo",
        "--n",
        "1",
        "--trials",
        "20000",
        "--eta",
        "0.01",
        "--seed",
        "13",
    ]);
    let trials = v["trials"].as_u64().unwrap();
    let successes = v["successes"].as_u64().unwrap();
    assert_eq!(trials, 20000);
    assert!(successes > 0);
    let rate = v["empirical_rate"].as_f64().unwrap();
    assert!((rate - successes as f64 / trials as f64).abs() < 1e-12);
    assert!((v["conditional_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = std::env::temp_dir().join(format!("faraday-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("timing.json");
    let out = faraday(&["timing", "--n", "2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"hours\""));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    let out = faraday(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = faraday(&["teleport", "--n", "1", "--state", "1:0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = faraday(&["teleport", "--n", "2", "--outcome", "R:0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = faraday(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn domain_errors_exit_two() {
    // Without coupling the photons stay linear and the R outcome is
    // impossible, so forcing it is a physics error.
    let out = faraday(&["teleport", "--n", "1", "--g", "0", "--outcome", "R:0"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("zero probability"), "stderr: {msg}");
}
