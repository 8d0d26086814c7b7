use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infostruct::counterexample::{build_g_p, build_u_l, default_epsilon, sample_chain, ChainSpec};
use infostruct::{bayesian_value, q, InfoStructure, PayoffStructure, Rational};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infostruct")).args(args).env_remove("INFOSTRUCT_BUDGET").output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distance_of_u2_and_u4() {
    let out = json(&run(&["distance", path(&fixture("u2")), path(&fixture("u4"))]));
    assert_eq!(out["d"], "1/2");
    assert_eq!(out["config"]["subcommand"], "distance");
    assert_eq!(out["config"]["inputs"][1], path(&fixture("u4")));
}

#[test]
fn relabeled_copy_is_equivalent() {
    let out = json(&run(&["compare", path(&fixture("u2")), path(&fixture("u2_relabeled"))]));
    assert_eq!(out["direction"], "equivalent");
}

#[test]
fn odd_chain_size_is_a_domain_error() {
    let out = run(&["cx", "sample", "--n", "3", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("even"));
    assert!(out.stdout.is_empty());
}

#[test]
fn budget_refusal_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    assert_eq!(run(&["cx", "sample", "--n", "4", "--seed", "2", "-o", path(&chain)]).status.code(), Some(0));
    let out = run(&["cx", "check-ui", path(&chain), "--lmax", "6", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget"));
    let out = Command::new(env!("CARGO_BIN_EXE_infostruct"))
        .args(["cx", "build-u", path(&chain), "--l", "2"])
        .env("INFOSTRUCT_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(run(&["--help"]).stdout.windows(17).any(|w| w == b"INFOSTRUCT_BUDGET"));
}

#[test]
fn bad_inputs_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"states\": [\"a\"],\n \"entries\": [").unwrap();
    let out = run(&["value", path(&broken), path(&fixture("g_ex2"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let unnormalized = dir.path().join("half.json");
    std::fs::write(&unnormalized, r#"{"states": ["a"], "entries": [{"k": 0, "c": 0, "d": 0, "p": "1/2"}]}"#).unwrap();
    let out = run(&["beliefs", path(&unnormalized), "--order", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("probabilities sum to 1"), "{}", stderr(&out));

    assert_eq!(run(&["value", "/nonexistent.json", path(&fixture("g_ex2"))]).status.code(), Some(1));
    assert_eq!(run(&["cx", "no-such-command"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["compare".to_string(), path(&fixture("u4")).into(), path(&fixture("u2_prime")).into()],
        vec!["cx".into(), "hoeffding".into(), "--n".into(), "16".into(), "--gamma".into(), "1/4".into(), "--trials".into(), "50".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn counterexample_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let chain_path = dir.path().join("chain.json");
    let u_path = dir.path().join("u.json");
    let g_path = dir.path().join("g.json");
    assert_eq!(run(&["cx", "sample", "--n", "4", "--seed", "7", "-o", path(&chain_path)]).status.code(), Some(0));
    let chain: ChainSpec = serde_json::from_str(&std::fs::read_to_string(&chain_path).unwrap()).unwrap();
    assert_eq!(chain, sample_chain(4, 7).unwrap());

    assert_eq!(run(&["cx", "build-u", path(&chain_path), "--l", "1", "-o", path(&u_path)]).status.code(), Some(0));
    assert_eq!(run(&["cx", "build-g", path(&chain_path), "--p", "2", "-o", path(&g_path)]).status.code(), Some(0));
    let u: InfoStructure = serde_json::from_str(&std::fs::read_to_string(&u_path).unwrap()).unwrap();
    let g: PayoffStructure = serde_json::from_str(&std::fs::read_to_string(&g_path).unwrap()).unwrap();
    assert_eq!(u, build_u_l(&chain, 1).unwrap());
    assert_eq!(g, build_g_p(&chain, 2, &default_epsilon(4)).unwrap());

    let value = json(&run(&["value", path(&u_path), path(&g_path)]));
    let verify = json(&run(&["cx", "verify", path(&chain_path), "--l", "1", "--p", "2"]));
    assert_eq!(value["value"], verify["value"]);
    assert_eq!(verify["value"].as_str().unwrap().parse::<Rational>().unwrap(), bayesian_value(&u, &g).unwrap().value);

    let ui = json(&run(&["cx", "check-ui", path(&chain_path), "--lmax", "2", "--max-listed", "1"]));
    assert!(ui["violations"].as_object().unwrap().values().all(|l| l.as_array().unwrap().len() <= 1));
    let cross = json(&run(&["cx", "crosscheck", path(&chain_path), "--lmax", "2"]));
    assert_eq!(cross["mismatches"].as_array().unwrap().len(), 0);
}

#[test]
fn witness_file_attains_the_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = json(&run(&["distance", path(&fixture("u2_prime")), path(&fixture("u4")), "--witness", path(&w)]));
    let g: PayoffStructure = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    let u: InfoStructure = serde_json::from_str(&std::fs::read_to_string(fixture("u2_prime")).unwrap()).unwrap();
    let v: InfoStructure = serde_json::from_str(&std::fs::read_to_string(fixture("u4")).unwrap()).unwrap();
    let gap = bayesian_value(&v, &g).unwrap().value - bayesian_value(&u, &g).unwrap().value;
    assert_eq!(out["forward"]["delta"].as_str().unwrap().parse::<Rational>().unwrap(), gap);
    assert_eq!(out["d"], "1/1");
}

#[test]
fn remaining_subcommands_run() {
    let u1 = fixture("u1");
    let out = json(&run(&["weakdist", path(&u1), path(&fixture("trivial")), "--terms", "4"]));
    assert_eq!(out["terms"], 4);
    let out = json(&run(&["beliefs", path(&fixture("u4")), "--order", "2"]));
    assert_eq!(out["order"], 2);
    let out = json(&run(&["cx", "constants"]));
    assert_eq!(out["p2_misreport_step"], "1317/1250");
    assert_eq!(out["hold"], true);
    let out = json(&run(&["cx", "stirling", "--nmax", "10"]));
    assert_eq!(out["all_hold"], true);
    let out = json(&run(&["cx", "decode", "--n", "4", "--len", "3", "6"]));
    assert_eq!(out["tuple"], serde_json::json!([1, 2, 3]));
    let human = run(&["value", path(&fixture("u2")), path(&fixture("g_ex2")), "--format", "human"]);
    assert!(String::from_utf8(human.stdout).unwrap().contains("value: 1/5"));
    assert_eq!(q(1, 5).to_string(), "1/5");
}
