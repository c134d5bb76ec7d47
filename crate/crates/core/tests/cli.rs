use std::path::PathBuf;
use std::process::Command;

use ipfp::cli::{machine_section, run, CmdOutput};
use serde_json::Value;

fn game(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("games").join(name).display().to_string()
}

fn ipfp(args: &[&str]) -> CmdOutput {
    run(std::iter::once("ipfp").chain(args.iter().copied()))
}

fn machine(out: &CmdOutput) -> Value {
    machine_section(&out.stdout).unwrap_or_else(|| panic!("no machine section in\n{}", out.stdout))
}

const PENNIES: &str = r#"
players = [
  { name = "IP", actions = ["x"] },
  { name = "P1", actions = ["H", "T"] },
  { name = "P2", actions = ["H", "T"] },
]
payoffs = [
  { profile = ["x", "H", "H"], values = ["0", "2", "1"] },
  { profile = ["x", "H", "T"], values = ["0", "1", "2"] },
  { profile = ["x", "T", "H"], values = ["0", "1", "2"] },
  { profile = ["x", "T", "T"], values = ["0", "2", "1"] },
]
"#;

#[test]
fn validate_bundled_tables() {
    for t in ["table1.toml", "table2.toml", "table3.toml"] {
        let out = ipfp(&["validate", &game(t)]);
        assert_eq!(out.code, 0, "{t}: {}{}", out.stdout, out.stderr);
        assert_eq!(machine(&out)["report"]["passed"], true);
    }
}

#[test]
fn missing_profile_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(game("table1.toml")).unwrap();
    let cut: String = text.lines().filter(|l| !l.contains(r#"["D", "R"]"#)).map(|l| format!("{l}\n")).collect();
    let path = dir.path().join("cut.toml");
    std::fs::write(&path, cut).unwrap();
    let out = ipfp(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("(D,R)"), "{}", out.stderr);
}

#[test]
fn cycling_subgame_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pennies.toml");
    std::fs::write(&path, PENNIES).unwrap();
    for cmd in ["validate", "synthesize", "plan"] {
        let out = ipfp(&[cmd, path.to_str().unwrap()]);
        assert_eq!(out.code, 2, "{cmd}");
        assert!(format!("{}{}", out.stdout, out.stderr).contains("better-response cycle"));
    }
}

#[test]
fn bad_flags_and_files_exit_one() {
    assert_eq!(ipfp(&["simulate", &game("table1.toml"), "--tie-rule", "random"]).code, 1);
    assert_eq!(ipfp(&["simulate", &game("table1.toml"), "--init", "Z,L"]).code, 1);
    assert_eq!(ipfp(&["simulate", &game("table1.toml"), "--init", "U"]).code, 1);
    assert_eq!(ipfp(&["simulate", &game("table1.toml"), "--horizon", "0"]).code, 1);
    assert_eq!(ipfp(&["validate", "/nonexistent/game.toml"]).code, 1);
    assert_eq!(ipfp(&["frobnicate"]).code, 1);
    assert_eq!(ipfp(&["--help"]).code, 0);
}

#[test]
fn simulate_trace_is_jsonl() {
    let out = ipfp(&["simulate", &game("table1.toml"), "--horizon", "20"]);
    assert_eq!(out.code, 0);
    let lines: Vec<Value> = out.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[19]["t"], 20);
    assert_eq!(lines[19]["actions"], serde_json::json!(["U", "L"]));
    assert_eq!(lines[19]["ip_average"], "6");
    assert!(out.stderr.contains("absorbed at (U,L)"), "{}", out.stderr);
}

#[test]
fn simulate_fixed_policy_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let out = ipfp(&[
        "simulate",
        &game("table1.toml"),
        "--policy",
        "fixed:D",
        "--horizon",
        "50",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("absorbed at (D,R)"), "{}", out.stdout);
    let written = std::fs::read_to_string(&path).unwrap();
    let last: Value = serde_json::from_str(written.lines().last().unwrap()).unwrap();
    assert_eq!(last["actions"], serde_json::json!(["D", "R"]));
    assert_eq!(written.lines().count(), 50);
}

#[test]
fn synthesize_reports_exact_values() {
    let out = ipfp(&["synthesize", &game("table1.toml")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("j* = B"));
    let m = machine(&out);
    assert_eq!(m["synthesis"]["value"]["exact"], "85/6");
    assert_eq!(m["synthesis"]["mix"], serde_json::json!(["1/6", "5/6"]));

    let out = ipfp(&["synthesize", &game("table2.toml")]);
    let m = machine(&out);
    assert!(out.stdout.contains("y0* = C"));
    assert_eq!(m["synthesis"]["value"]["exact"], "52/9");
    let rows: Vec<Vec<String>> = m["synthesis"]["lp"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["coefficients"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect())
        .collect();
    assert_eq!(rows, vec![vec!["-1", "2", "-1"], vec!["1", "3", "-2"], vec!["-1", "-7", "-2"], vec!["1", "-6", "-1"]]);
}

#[test]
fn precision_only_changes_rendering() {
    let a = machine(&ipfp(&["synthesize", &game("table3.toml"), "--precision", "2"]));
    let b = machine(&ipfp(&["synthesize", &game("table3.toml"), "--precision", "9"]));
    assert_eq!(a["synthesis"]["value"]["exact"], "60/7");
    assert_eq!(a["synthesis"]["value"]["exact"], b["synthesis"]["value"]["exact"]);
    assert_eq!(a["synthesis"]["value"]["decimal"], "8.6");
    assert_eq!(b["synthesis"]["value"]["decimal"], "8.57142857");
}

#[test]
fn plan_documents() {
    let out = ipfp(&["plan", &game("table1.toml")]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("(U, D×5)"), "{}", out.stdout);

    let out = ipfp(&["plan", &game("table3.toml"), "--reps", "20"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let m = machine(&out);
    assert_eq!(m["plan"]["warmup"], serde_json::json!(vec!["A"; 7]));
    assert_eq!(m["plan"]["block"], serde_json::json!(["B", "C", "C", "C", "C", "C", "C"]));
    assert_eq!(m["plan"]["verification"]["held"], true);
    assert_eq!(m["plan"]["verification"]["monitor_violations"], 0);
}

#[test]
fn plan_writes_document_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.txt");
    let out = ipfp(&["plan", &game("table2.toml"), "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let doc = std::fs::read_to_string(&path).unwrap();
    assert_eq!(machine_section(&doc).unwrap()["plan"]["tau_star"], 9);
}

#[test]
fn verify_agrees_on_tables_and_singleton() {
    for t in ["table1.toml", "table2.toml", "table3.toml"] {
        let out = ipfp(&["verify", &game(t)]);
        assert_eq!(out.code, 0, "{t}: {}", out.stdout);
        assert_eq!(machine(&out)["agree"], true);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.toml");
    std::fs::write(
        &path,
        "players = [\n  { name = \"IP\", actions = [\"a\"] },\n  { name = \"P1\", actions = [\"b\"] },\n]\npayoffs = [\n  { profile = [\"a\", \"b\"], values = [\"1\", \"1\"] },\n]\n",
    )
    .unwrap();
    let out = ipfp(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ipfp");
    let ok = Command::new(bin).args(["validate", &game("table2.toml")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["validate", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pennies.toml");
    std::fs::write(&path, PENNIES).unwrap();
    let cyc = Command::new(bin).args(["validate", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(cyc.status.code(), Some(2));
}
