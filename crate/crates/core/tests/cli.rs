use std::path::Path;
use std::process::{Command, Output};

fn mgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgs"))
        .args(args)
        .env_remove("MGS_SAT_SOLVER")
        .env_remove("MGS_MAXSAT_SOLVER")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_verify_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.json");
    let o = mgs(&["exact", &fixture("xx4.json"), "-o", s(&circ)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&mgs(&["verify", s(&circ), &fixture("xx4.json")])), 0);
    assert_eq!(code(&mgs(&["verify", s(&circ), &fixture("ttil.json")])), 2);
    let a = mgs(&["analyze", &fixture("ttil.json")]);
    assert_eq!(code(&a), 0);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).or_else(|_| serde_json::from_slice(&a.stderr)).unwrap();
    assert_eq!(report["k_max"], 1);
    let a = mgs(&["analyze", s(&circ)]);
    assert_eq!(code(&a), 0);
}

#[test]
fn identity_gives_empty_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.json");
    std::fs::write(&id, r#"{"n": 2, "scale_k": 0, "a": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "b": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#).unwrap();
    for cmd in ["exact", "approx"] {
        let o = mgs(&[cmd, s(&id)]);
        assert_eq!(code(&o), 0);
        let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let gates: usize = c["layers"].as_array().unwrap().iter().map(|l| l.as_array().unwrap().len()).sum();
        assert_eq!(gates, 0, "{cmd}");
    }
}

#[test]
fn sat_exit_codes() {
    let t = fixture("ttil.json");
    let o = mgs(&["sat", &t, "--search", "4"]);
    assert_eq!(code(&o), 0);
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["layers"].as_array().unwrap().len(), 1);
    assert_eq!(code(&mgs(&["sat", &t, "--depth", "0"])), 4);
    assert_eq!(code(&mgs(&["sat", &t, "--depth", "1", "--maxsat"])), 0);
    assert_eq!(code(&mgs(&["sat", &t, "--depth", "1", "--solver", "/no/such/solver"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("t.cnf");
    assert_eq!(code(&mgs(&["sat", &t, "--depth", "1", "--emit", s(&cnf)])), 0);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/ttil_d1.cnf");
    assert_eq!(std::fs::read(&cnf).unwrap(), std::fs::read(golden).unwrap());
    let solved = mgs(&["dimacs-solve", s(&cnf)]);
    assert_eq!(code(&solved), 10);
    assert!(String::from_utf8_lossy(&solved.stdout).contains("s SATISFIABLE"));
}

#[test]
fn external_solver_from_env() {
    let t = fixture("ttil.json");
    let solver = format!("{} dimacs-solve", env!("CARGO_BIN_EXE_mgs"));
    let o = Command::new(env!("CARGO_BIN_EXE_mgs"))
        .args(["sat", &t, "--depth", "1", "--maxsat"])
        .env("MGS_SAT_SOLVER", &solver)
        .env("MGS_MAXSAT_SOLVER", &solver)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_mgs"))
        .args(["sat", &t, "--depth", "1"])
        .env("MGS_SAT_SOLVER", "/no/such/solver")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn approx_ledger_and_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.csv");
    for seed in ["1", "2"] {
        let o = mgs(&["approx", "--random", "3", "--seed", seed, "--eps", "0.5", "--ledger", s(&ledger)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&ledger).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let loc: f64 = r[3].parse().unwrap();
        let glob: f64 = r[4].parse().unwrap();
        assert!(glob <= loc + 1e-12);
    }
    assert_eq!(code(&mgs(&["approx", "--random", "3", "--eps", "1e-5"])), 5);
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&mgs(&["exact", s(&bad)])), 1);
    assert_eq!(code(&mgs(&["exact", s(&dir.path().join("missing.json"))])), 1);
    let refl = dir.path().join("refl.json");
    std::fs::write(&refl, r#"{"n": 1, "scale_k": 0, "a": [[1,0],[0,-1]], "b": [[0,0],[0,0]]}"#).unwrap();
    assert_eq!(code(&mgs(&["exact", s(&refl)])), 2);
    assert_eq!(code(&mgs(&["exact", "--bogus-flag", s(&refl)])), 2);
    assert_eq!(code(&mgs(&["target", "xx", "5"])), 2);
}

#[test]
fn deterministic_outputs() {
    let run = |args: &[&str]| mgs(args).stdout;
    let a = run(&["target", "random", "3", "--t-budget", "5", "--seed", "9"]);
    assert_eq!(a, run(&["target", "random", "3", "--t-budget", "5", "--seed", "9"]));
    assert_ne!(a, run(&["target", "random", "3", "--t-budget", "5", "--seed", "10"]));
    assert_eq!(run(&["target", "xx", "4"]), std::fs::read(fixture("xx4.json")).unwrap());
    assert_eq!(run(&["exact", &fixture("xx4.json")]), std::fs::read(fixture("xx4_exact.json")).unwrap());
    let ap = &["approx", "--random", "2", "--seed", "3", "--eps", "0.3"];
    assert_eq!(run(ap), run(ap));
}

#[test]
fn env_overrides_solver_flag() {
    let t = fixture("ttil.json");
    let solver = format!("{} dimacs-solve", env!("CARGO_BIN_EXE_mgs"));
    let o = Command::new(env!("CARGO_BIN_EXE_mgs"))
        .args(["sat", &t, "--depth", "1", "--solver", "/no/such/solver"])
        .env("MGS_SAT_SOLVER", &solver)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
