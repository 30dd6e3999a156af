use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use tempfile::TempDir;

// Oracle value for 100 unanimous queries, n = 250, K = 10, gamma = 0.1,
// tau = 1, delta = 1e-5, lmax = 25.
const UNANIMOUS_EPSILON: f64 = 0.460_517_534_763_922_4;

fn speed(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speed"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stderr(o)))
}

fn unanimous_votes(dir: &Path, queries: usize) -> String {
    let mut row = vec![0u64; 10];
    row[0] = 250;
    let v = serde_json::json!({"n": 250, "k": 10, "queries": vec![row; queries]});
    fs::write(dir.join("votes.json"), v.to_string()).unwrap();
    "votes.json".into()
}

fn sweep_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn accountant_unanimous_fixture() {
    let tmp = TempDir::new().unwrap();
    let votes = unanimous_votes(tmp.path(), 100);
    let o = speed(
        tmp.path(),
        &["accountant", "--votes", &votes, "--out", "acc"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = json(&tmp.path().join("acc/report.json"));
    assert_eq!(a["schema"], "speed.accountant/1");
    assert_eq!(a["config"]["gamma"], 0.1);
    assert_eq!(a["report"]["schema"], "speed.privacy-report/1");
    let eps = a["report"]["epsilon"].as_f64().unwrap();
    assert!(eps <= 1.5);
    assert!((eps - UNANIMOUS_EPSILON).abs() < 1e-9, "{eps}");
    assert_eq!(a["report"]["per_query"].as_array().unwrap().len(), 100);
    let m = json(&tmp.path().join("acc/manifest.json"));
    assert_eq!(m["schema"], "speed.manifest/1");
    assert_eq!(m["files"][0], "report.json");
}

#[test]
fn accountant_reads_csv_like_json() {
    let tmp = TempDir::new().unwrap();
    let votes = unanimous_votes(tmp.path(), 20);
    let mut csv = String::new();
    for _ in 0..20 {
        csv.push_str("250,0,0,0,0,0,0,0,0,0\n");
    }
    fs::write(tmp.path().join("votes.csv"), csv).unwrap();
    let a = stdout_json(&speed(tmp.path(), &["accountant", "--votes", &votes]));
    let b = stdout_json(&speed(tmp.path(), &["accountant", "--votes", "votes.csv"]));
    assert_eq!(a["report"]["epsilon"], b["report"]["epsilon"]);
}

#[test]
fn accountant_empty_votes_costs_nothing() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("empty.json"), "").unwrap();
    let o = speed(tmp.path(), &["accountant", "--votes", "empty.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout_json(&o)["report"]["epsilon"], 0.0);
}

#[test]
fn accountant_error_contract() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.csv"), "3,1,1\n2,2,x\n").unwrap();
    let o = speed(tmp.path(), &["accountant", "--votes", "bad.csv"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));

    let o = speed(tmp.path(), &["accountant", "--votes", "missing.json"]);
    assert_eq!(code(&o), 4);

    let o = speed(tmp.path(), &["accountant"]);
    assert_eq!(code(&o), 2);

    let votes = unanimous_votes(tmp.path(), 3);
    let o = speed(
        tmp.path(),
        &["accountant", "--votes", &votes, "--gamma", "-0.5"],
    );
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("gamma"), "{}", stderr(&o));

    let o = speed(
        tmp.path(),
        &["accountant", "--votes", &votes, "--teachers", "100"],
    );
    assert_eq!(code(&o), 3);

    let o = speed(tmp.path(), &["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = TempDir::new().unwrap();
    let votes = unanimous_votes(tmp.path(), 10);
    fs::write(
        tmp.path().join("run.toml"),
        format!("gamma = 0.2\ndelta = 1e-6\nvotes = \"{votes}\"\n\n[heargmax]\ntheta1 = 40\n"),
    )
    .unwrap();
    let o = speed(
        tmp.path(),
        &["accountant", "--config", "run.toml", "--gamma", "0.1"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = stdout_json(&o);
    assert_eq!(a["config"]["gamma"], 0.1);
    assert_eq!(a["config"]["delta"], 1e-6);
    assert_eq!(a["config"]["heargmax"]["theta1"], 40);

    fs::write(tmp.path().join("typo.toml"), "gama = 0.2\n").unwrap();
    let o = speed(tmp.path(), &["accountant", "--config", "typo.toml"]);
    assert_eq!(code(&o), 4);
}

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--out",
        "sim",
        "--queries",
        "40",
        "--teachers",
        "50",
        "--seed",
        "11",
    ];
    args.extend_from_slice(extra);
    let o = speed(dir, &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    o
}

#[test]
fn simulate_is_bit_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    simulate(a.path(), &["--he", "noisy"]);
    simulate(b.path(), &["--he", "noisy"]);
    for f in [
        "labels.csv",
        "votes.json",
        "report.json",
        "traces.json",
        "manifest.json",
    ] {
        let x = fs::read(a.path().join("sim").join(f)).unwrap();
        let y = fs::read(b.path().join("sim").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn simulate_ideal_circuit_matches_clear_labels() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    simulate(a.path(), &["--he", "off"]);
    simulate(b.path(), &["--he", "ideal"]);
    let x = fs::read_to_string(a.path().join("sim/labels.csv")).unwrap();
    let y = fs::read_to_string(b.path().join("sim/labels.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn simulated_votes_feed_the_accountant() {
    let tmp = TempDir::new().unwrap();
    simulate(tmp.path(), &["--tau", "0.8"]);
    let report = json(&tmp.path().join("sim/report.json"));
    assert_eq!(report["schema"], "speed.simulate-report/1");
    let votes = json(&tmp.path().join("sim/votes.json"));
    assert_eq!(votes["schema"], "speed.votes/1");
    assert_eq!(votes["queries"].as_array().unwrap().len(), 40);
    let o = speed(
        tmp.path(),
        &["accountant", "--votes", "sim/votes.json", "--tau", "0.8"],
    );
    assert_eq!(
        stdout_json(&o)["report"]["epsilon"],
        report["report"]["epsilon"]
    );
    let traces = json(&tmp.path().join("sim/traces.json"));
    assert_eq!(traces["traces"][0]["noisy_shares"], 40);
}

#[test]
fn simulate_full_size_noisy_session_is_fast() {
    let tmp = TempDir::new().unwrap();
    let start = Instant::now();
    let o = speed(
        tmp.path(),
        &[
            "simulate",
            "--out",
            "sim",
            "--teachers",
            "250",
            "--classes",
            "10",
            "--queries",
            "100",
            "--he",
            "noisy",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(start.elapsed().as_secs() < 60);
    let traces = json(&tmp.path().join("sim/traces.json"));
    assert_eq!(traces["traces"][0]["circuit"]["bootstraps"], 100);
}

#[test]
fn simulate_needs_an_output_directory() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&speed(tmp.path(), &["simulate"])), 2);
}

#[test]
fn tau_sweep_is_non_increasing() {
    let tmp = TempDir::new().unwrap();
    let o = speed(
        tmp.path(),
        &[
            "sweep", "--param", "tau", "--from", "0.5", "--to", "0.99", "--points", "8",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = sweep_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[0] == "speed.sweep/1"));
    let eps: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(eps.windows(2).all(|w| w[1] <= w[0]), "{eps:?}");
}

#[test]
fn gamma_sweep_matches_pointwise_accounting() {
    let tmp = TempDir::new().unwrap();
    let votes = unanimous_votes(tmp.path(), 100);
    let o = speed(
        tmp.path(),
        &[
            "sweep", "--param", "gamma", "--from", "0.05", "--to", "0.1", "--points", "2",
            "--votes", &votes, "--out", "sw",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = sweep_rows(&fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap());
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let a = stdout_json(&speed(
            tmp.path(),
            &["accountant", "--votes", &votes, "--gamma", &r[2]],
        ));
        assert_eq!(
            r[5].parse::<f64>().unwrap(),
            a["report"]["epsilon"].as_f64().unwrap()
        );
    }
    assert!((rows[1][5].parse::<f64>().unwrap() - UNANIMOUS_EPSILON).abs() < 1e-9);
    assert_eq!(
        json(&tmp.path().join("sw/manifest.json"))["command"],
        "sweep"
    );
}

#[test]
fn sweep_rejects_bad_ranges() {
    let tmp = TempDir::new().unwrap();
    let bad: [&[&str]; 3] = [
        &["sweep", "--param", "gamma", "--from", "0.5", "--to", "0.1"],
        &[
            "sweep", "--param", "gamma", "--from", "0.1", "--to", "0.5", "--points", "1",
        ],
        &["sweep", "--param", "tau", "--from", "0.5", "--to", "1.5"],
    ];
    for args in bad {
        assert_eq!(code(&speed(tmp.path(), args)), 3, "{args:?}");
    }
}

#[test]
fn dist_check_passes_for_the_full_ensemble() {
    let tmp = TempDir::new().unwrap();
    let o = speed(
        tmp.path(),
        &[
            "dist-check",
            "--teachers",
            "250",
            "--gamma",
            "0.1",
            "--samples",
            "1000000",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    assert_eq!(r["schema"], "speed.dist-check/1");
    assert_eq!(r["pass"], true);
    assert!(r["variance_rel_error"].as_f64().unwrap() < 0.02);
    assert!(r["ks"].as_f64().unwrap() < 0.005);
}

#[test]
fn dist_check_single_share_and_negative_control() {
    let tmp = TempDir::new().unwrap();
    let o = speed(
        tmp.path(),
        &["dist-check", "--teachers", "1", "--samples", "1000000"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = speed(
        tmp.path(),
        &[
            "dist-check",
            "--teachers",
            "10",
            "--reference-gamma",
            "0.12",
            "--samples",
            "100000",
        ],
    );
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["pass"], false);
    assert_eq!(
        code(&speed(tmp.path(), &["dist-check", "--samples", "100"])),
        3
    );
}

#[test]
fn attack_demo_reports_both_noise_models() {
    let tmp = TempDir::new().unwrap();
    let o = speed(tmp.path(), &["attack-demo", "--trials", "2000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    assert_eq!(r["schema"], "speed.attack-demo/1");
    assert_eq!(r["known_noise"]["accuracy"], 1.0);
    let acc = r["distributed_noise"]["accuracy"].as_f64().unwrap();
    let bound = r["distributed_noise"]["accuracy_bound"].as_f64().unwrap();
    assert!(acc <= bound + 3.0 * (bound * (1.0 - bound) / 2000.0).sqrt());

    fs::write(
        tmp.path().join("s.toml"),
        "counts = [3, 5, 2]\nk0 = 0\nk1 = 1\n",
    )
    .unwrap();
    let o = speed(
        tmp.path(),
        &["attack-demo", "--trials", "100", "--scenario", "s.toml"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout_json(&o)["scenario"]["counts"][1], 5);
}

#[test]
fn argmax_bench_counts_bootstraps() {
    let tmp = TempDir::new().unwrap();
    let o = speed(
        tmp.path(),
        &["argmax-bench", "--queries", "300", "--classes", "6"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    assert_eq!(r["schema"], "speed.argmax-bench/1");
    assert_eq!(r["bootstraps_per_query"], 36);
    assert_eq!(r["accuracy"]["accuracy"], 1.0);

    let o = speed(
        tmp.path(),
        &[
            "argmax-bench",
            "--queries",
            "500",
            "--target-accuracy",
            "0.9",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    assert!(r["calibration"]["sigma_c"].as_f64().unwrap() > 0.0);
}
