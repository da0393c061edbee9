use std::fs;
use std::path::PathBuf;
use std::process::Command;

use pcg_cli::{run, EXIT_EXHAUSTED, EXIT_INVALID, EXIT_OK};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn pcg(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pcg").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn validate_accepts_t1() {
    let (code, out, _) = pcg(&["validate", &data("t1.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("2 players, 2 resources"));
}

#[test]
fn validate_names_the_missing_entry() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, fs::read_to_string(data("t1.json")).unwrap().replacen("[0,2,\"2\"],", "", 1)).unwrap();
    let (code, _, err) = pcg(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("(x=0, y=2)"), "{err}");
}

#[test]
fn validate_reports_parse_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, fs::read_to_string(data("t1.json")).unwrap().replacen("\"3\"", "\"3/0\"", 1)).unwrap();
    let (code, _, err) = pcg(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("line 8"), "{err}");
}

#[test]
fn insertion_solve_writes_two_row_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let (code, out, _) = pcg(&["solve", &data("t1.json"), "--method", "insertion", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("profile: 1=a 2=b"), "{out}");
    let csv = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,phase,player,from,to,cost_before,cost_after,potential");
    assert_eq!(lines.len(), 3);

    let (code, out, _) = pcg(&["verify", &data("t1.json"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("trace: certified"));
}

#[test]
fn verify_profile() {
    let (code, out, _) = pcg(&["verify", &data("t1.json"), "--profile", r#"{"1":"a","2":"b"}"#]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("PNE: true"));
    let (code, out, _) = pcg(&["verify", &data("t1.json"), "--profile", r#"{"1":"a","2":"a"}"#]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.contains("PNE: false"));
}

#[test]
fn tampered_trace_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    pcg(&["solve", &data("t1.json"), "--method", "insertion", "--trace", trace.to_str().unwrap()]);
    let csv = fs::read_to_string(&trace).unwrap().replace("2,insert-A,2,NONE,b", "2,insert-A,2,NONE,a");
    fs::write(&trace, csv).unwrap();
    let (code, out, _) = pcg(&["verify", &data("t1.json"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.contains("trace: rejected"));
}

#[test]
fn dynamics_json_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("br.csv");
    let (code, out, _) =
        pcg(&["solve", &data("t1.json"), "--method", "br", "--policy", "best", "--json", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pne"], true);
    assert_eq!(v["status"], "converged");
    assert!(v.get("costs_approx").is_none());
    let (code, _, _) = pcg(&["verify", &data("t1.json"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn zero_step_cap_reports_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let (code, _, _) = pcg(&["gen", "--seed", "5", "--players", "4", "--resources", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    // with four players on two resources the initial profile is rarely stable
    let mut exhausted = false;
    for seed in 0..20 {
        pcg(&["gen", "--seed", &seed.to_string(), "--players", "4", "--resources", "2", "-o", path.to_str().unwrap()]);
        let (code, _, _) = pcg(&["solve", path.to_str().unwrap(), "--method", "br", "--max-steps", "0"]);
        assert!(code == EXIT_OK || code == EXIT_EXHAUSTED);
        exhausted |= code == EXIT_EXHAUSTED;
    }
    assert!(exhausted);
}

#[test]
fn approximations_only_on_request() {
    let (_, out, _) = pcg(&["solve", &data("t1.json"), "--method", "brute"]);
    assert!(!out.contains('~'));
    let (_, out, _) = pcg(&["solve", &data("t1.json"), "--method", "brute", "--approx"]);
    assert!(out.contains("(~1)"), "{out}");
}

#[test]
fn brute_and_layered_agree_on_consistent_instances() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    for seed in 0..15 {
        let (code, _, _) = pcg(&[
            "gen", "--seed", &seed.to_string(), "--players", "4", "--resources", "3", "--consistent", "--levels", "3",
            "--space", "mixed", "-o", path.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let (c1, o1, _) = pcg(&["solve", path.to_str().unwrap(), "--method", "layered", "--json"]);
        let (c2, o2, _) = pcg(&["solve", path.to_str().unwrap(), "--method", "brute", "--json"]);
        assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
        let v1: serde_json::Value = serde_json::from_str(&o1).unwrap();
        let v2: serde_json::Value = serde_json::from_str(&o2).unwrap();
        assert_eq!(v1["pne"], v2["pne"]);
    }
}

#[test]
fn gen_is_deterministic() {
    let (_, a, _) = pcg(&["gen", "--seed", "42", "--model", "market", "--levels", "3"]);
    let (_, b, _) = pcg(&["gen", "--seed", "42", "--model", "market", "--levels", "3"]);
    assert_eq!(a, b);
    let (_, c, _) = pcg(&["gen", "--seed", "43", "--model", "market", "--levels", "3"]);
    assert_ne!(a, c);
}

#[test]
fn reductions_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let classic = dir.path().join("c.json");
    let prio = dir.path().join("p.json");
    let market = dir.path().join("m.json");
    let ps = dir.path().join("ps.json");
    let p = |x: &PathBuf| x.to_str().unwrap().to_owned();
    assert_eq!(pcg(&["gen", "--seed", "3", "--model", "classic", "-o", &p(&classic)]).0, EXIT_OK);
    assert_eq!(pcg(&["reduce", &p(&classic), "--to", "priority", "-o", &p(&prio)]).0, EXIT_OK);
    assert_eq!(pcg(&["reduce", &p(&prio), "--to", "market", "-o", &p(&market)]).0, EXIT_OK);
    assert_eq!(pcg(&["reduce", &p(&market), "--to", "playerspecific", "-o", &p(&ps)]).0, EXIT_OK);
    for f in [&classic, &prio, &market, &ps] {
        assert_eq!(pcg(&["validate", &p(f)]).0, EXIT_OK);
    }
    let (_, a, _) = pcg(&["solve", &p(&classic), "--method", "brute", "--json"]);
    let (_, b, _) = pcg(&["solve", &p(&ps), "--method", "brute", "--json"]);
    let a: serde_json::Value = serde_json::from_str(&a).unwrap();
    let b: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert_eq!(a["equilibria"], b["equilibria"]);
    assert_eq!(pcg(&["reduce", &p(&classic), "--to", "playerspecific"]).0, EXIT_INVALID);
}

#[test]
fn budget_env_limits_brute_force() {
    let out = Command::new(env!("CARGO_BIN_EXE_pcg"))
        .args(["solve", &data("t1.json"), "--method", "brute"])
        .env("PCG_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_EXHAUSTED));
    let out = Command::new(env!("CARGO_BIN_EXE_pcg"))
        .args(["solve", &data("t1.json"), "--method", "brute"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PNE: true"));
}

#[test]
fn unknown_verb_fails() {
    assert_eq!(pcg(&["frobnicate"]).0, EXIT_INVALID);
    assert_eq!(pcg(&["--help"]).0, EXIT_OK);
}
