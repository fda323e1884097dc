//! End-to-end checks of the command-line surface: verbs, file formats,
//! exit codes (0 certified/valid, 1 refuted, 2 inconclusive, 64+ input
//! errors), and determinism of the machine-readable output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coevo")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

struct Tmp(PathBuf);

impl Tmp {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("coevo-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Tmp(dir)
    }
}

impl Drop for Tmp {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const PD_ENV_COSTLY: &str = r#"{
  "game": {"actions": ["C", "D"], "payoff": [["3", "0"], ["4", "1"]]},
  "costs": {"levels": ["0", "2"], "tail_step": "10"}
}"#;

const PD_ENV_CHEAP: &str = r#"{
  "game": {"actions": ["C", "D"], "payoff": [["3", "0"], ["4", "1"]]},
  "costs": {"levels": ["0", "1/2"], "tail_step": "10"}
}"#;

const RPS_ENV: &str = r#"{
  "game": "rps-game.txt",
  "costs": {"levels": ["0","3/10","3/5","9/10","6/5","3/2","9/5"], "tail_step": "3/10"}
}"#;

const RPS_GAME_TEXT: &str = "actions: R P S\n0 -1 1\n1 0 -1\n-1 1 0\n";

#[test]
fn analyze_reports_diagnostics_and_rejects_bad_input() {
    let tmp = Tmp::new("analyze");
    let game = write(&tmp.0, "rps.txt", RPS_GAME_TEXT);
    let out = run(&["analyze", game.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("efficient payoff: 0"));
    assert!(text.contains("generic: false"));
    assert!(text.contains("punishment actions: none"));
    assert!(text.contains("pure maxmin: -1"));

    let bad = write(&tmp.0, "bad.txt", "actions: a b\n1 2\n3\n");
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 2"), "{err}");
}

#[test]
fn certify_exit_codes_track_the_verdict() {
    let tmp = Tmp::new("certify");
    let costly = write(&tmp.0, "costly.json", PD_ENV_COSTLY);
    let cheap = write(&tmp.0, "cheap.json", PD_ENV_CHEAP);

    let witness = tmp.0.join("witness.json");
    let out = run(&[
        "certify",
        costly.to_str().unwrap(),
        "--pure",
        "C",
        "-o",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(witness.exists());

    let out = run(&["certify", cheap.to_str().unwrap(), "--pure", "C"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("indifferent-deceiver"), "{text}");

    // Refute accepts the emitted witness configuration and stays quiet on
    // the certified side.
    let out = run(&[
        "refute",
        costly.to_str().unwrap(),
        witness.to_str().unwrap(),
        "--budget",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["certify", cheap.to_str().unwrap(), "--pure", "nope"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn refute_finds_the_deceiver_on_cheap_environments() {
    let tmp = Tmp::new("refute");
    let cheap = write(&tmp.0, "cheap.json", PD_ENV_CHEAP);
    let config = write(
        &tmp.0,
        "all-c.json",
        r#"{
          "types": [{"name": "mat", "level": 1, "frequency": "1",
                     "utility": [["1","1/2"],["1","0"]]}],
          "policy": {"nash": [{"of": "mat", "vs": "mat", "play": "C"}]}
        }"#,
    );
    let out = run(&[
        "refute",
        cheap.to_str().unwrap(),
        config.to_str().unwrap(),
        "--budget",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("indifferent-deceiver"), "{text}");
}

#[test]
fn construct_round_trips_and_revalidates() {
    let tmp = Tmp::new("construct");
    write(&tmp.0, "rps-game.txt", RPS_GAME_TEXT);
    let env = write(&tmp.0, "rps-env.json", RPS_ENV);
    let ladder = tmp.0.join("ladder.json");
    let out = run(&[
        "construct",
        env.to_str().unwrap(),
        "--rps",
        "-o",
        ladder.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("configuration: valid"));
    assert!(text.contains("balanced: true"));

    // Round-trip: the emitted file re-parses and re-emits byte-identically.
    let first = std::fs::read_to_string(&ladder).unwrap();
    let config = coevo::io::parse_configuration_str(&first, None, None).unwrap();
    assert_eq!(coevo::io::write_configuration(&config), first);

    // The written ladder survives the refutation battery.
    let out = run(&[
        "refute",
        env.to_str().unwrap(),
        ladder.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_hawk_dove_cases() {
    let tmp = Tmp::new("hd");
    let env = write(
        &tmp.0,
        "hd-env.json",
        r#"{
          "game": {"actions": ["H", "D"], "payoff": [["0", "3/2"], ["3/5", "1"]]},
          "costs": {"levels": ["0", "7/20", "7/10"], "tail_step": "7/20"}
        }"#,
    );
    let out = run(&[
        "construct",
        env.to_str().unwrap(),
        "--hawk-dove",
        "1/2",
        "2/5",
        "-o",
        tmp.0.join("hd.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("evolutionarily stable"));

    let out = run(&[
        "construct",
        env.to_str().unwrap(),
        "--hawk-dove",
        "3/10",
        "2/5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("no stable in-group ladder"));
}

#[test]
fn simulate_writes_trajectories_and_probes() {
    let tmp = Tmp::new("simulate");
    write(&tmp.0, "rps-game.txt", RPS_GAME_TEXT);
    let env = write(&tmp.0, "rps-env.json", RPS_ENV);
    let ladder = tmp.0.join("ladder.json");
    let out = run(&[
        "construct",
        env.to_str().unwrap(),
        "--rps",
        "-o",
        ladder.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = tmp.0.join("trajectory.csv");
    let out = run(&[
        "simulate",
        env.to_str().unwrap(),
        ladder.to_str().unwrap(),
        "--horizon",
        "20",
        "--probe-radii",
        "0.001",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no escape within horizon"), "{text}");
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("time,share_materialistic-L1"));
    assert!(csv_text.lines().count() > 10);
}

#[test]
fn json_reports_are_deterministic_and_superset_of_text() {
    let tmp = Tmp::new("json");
    let env = write(&tmp.0, "env.json", PD_ENV_COSTLY);
    let a = run(&["certify", env.to_str().unwrap(), "--pure", "C", "--json", "--seed", "5"]);
    let b = run(&["certify", env.to_str().unwrap(), "--pure", "C", "--json", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout, "identical inputs and seed must agree byte-for-byte");
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    // The manifest embeds the command, the environment hash, and the seed.
    assert_eq!(parsed["manifest"]["command"], "certify");
    assert_eq!(parsed["manifest"]["seed"], 5);
    assert!(parsed["manifest"]["environment_hash"].is_string());
    // Everything the text report states is present in the JSON body.
    assert_eq!(parsed["verdict"]["status"], "CertifiedStable");
    assert!(parsed["verdict"]["conditions"].as_array().unwrap().len() >= 3);
    assert!(parsed["witness_configuration"].is_object());
}
