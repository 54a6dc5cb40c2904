use std::path::PathBuf;
use std::process::{Command, Output};

const QUADRIC: &str = r#"{"field":{"p":3,"k":1},"n_vars":3,"polys":[[{"exps":[2,0,0],"coeff":[1]},{"exps":[0,2,0],"coeff":[1]},{"exps":[0,0,2],"coeff":[1]}]],"exponent_matrix":[[1]],"nu_max":4}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pointdiv"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pointdiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_then_recheck() {
    let spec = scratch("quadric.json");
    let report = scratch("quadric-report.json");
    std::fs::write(&spec, QUADRIC).unwrap();
    let out = bin().arg("run").arg(&spec).arg("--out").arg(&report).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    // the complement needs six terms, so its zeta is inconclusive without failing the run
    assert!(text.contains("\"overall\": \"inconclusive\""));
    assert!(text.contains("\"telemetry\""));

    let again = bin().arg("recheck").arg(&report).output().unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert!(stdout(&again).contains("\"mismatches\": []"));

    // a tampered witness is caught
    let tampered = text.replacen("\"count\": \"9\"", "\"count\": \"10\"", 1);
    assert_ne!(tampered, text);
    std::fs::write(&report, tampered).unwrap();
    assert_eq!(bin().arg("recheck").arg(&report).output().unwrap().status.code(), Some(1));
}

#[test]
fn overrides_and_budget() {
    let spec = scratch("budget.json");
    std::fs::write(&spec, QUADRIC).unwrap();
    let out = bin().args(["run", spec.to_str().unwrap(), "--budget", "10", "--nu-max", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("budget exceeded"));
    assert!(s.contains("\"nu_max\": 2"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, QUADRIC.replace("\"nu_max\"", "\"numax\"")).unwrap();
    assert_eq!(bin().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));
    std::fs::write(&bad, QUADRIC.replace("[[1]]", "[[-1]]")).unwrap();
    assert_eq!(bin().arg("run").arg(&bad).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["bounds", "--n", "3"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["bounds", "--n", "3", "--degrees", "0"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn bounds_command() {
    let out = bin().args(["bounds", "--n", "4", "--degrees", "2,2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("mu = 0"));
    assert!(s.contains("kappa = 1"));
    let out = bin().args(["bounds", "--n", "10", "--degrees", "2,3", "--json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mu"], 2);
    assert_eq!(v["mu_j"].as_array().unwrap().len(), 11);
}

#[test]
fn fuzz_command_is_reproducible() {
    let dir = scratch("repro");
    std::fs::create_dir_all(&dir).unwrap();
    let run = |extra: &[&str]| {
        let mut c = bin();
        c.args(["fuzz", "--seed", "11", "--instances", "15", "--repro-dir", dir.to_str().unwrap()]);
        c.args(extra).output().unwrap()
    };
    let a = run(&[]);
    let b = run(&[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let m = run(&["--mutate"]);
    assert_eq!(m.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&m.stdout).unwrap();
    assert!(v["divisibility_failures"].as_u64().unwrap() > 0);
    let p = run(&["--projective"]);
    assert_eq!(p.status.code(), Some(0));
    assert!(stdout(&p).contains("\"mode\": \"projective\""));
}
