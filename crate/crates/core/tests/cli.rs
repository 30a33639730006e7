use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlf"))
        .args(args)
        .env_remove("TLF_LIMITS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn strip_elapsed(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.starts_with("elapsed") && k != "seconds");
            map.values_mut().for_each(strip_elapsed);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_elapsed),
        _ => {}
    }
}

fn gen_file(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", &path]);
    let out = tlf(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_file(dir.path(), "b.hg", &["clique-join-empty", "--n", "6", "--r", "3", "--k", "4"]);
    let h: tlf_core::Hypergraph = std::fs::read_to_string(&p).unwrap().parse().unwrap();
    assert_eq!(h.edge_count(), 10);
    let p = gen_file(dir.path(), "k.hg", &["complete", "--n", "5", "--r", "3"]);
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 11);
    let out = tlf(&["gen", "perfect-matching", "--n", "6", "--r", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "6 3\n0 1 2\n3 4 5\n");
    assert_eq!(tlf(&["gen", "clique-join-empty", "--n", "6", "--r", "3", "--k", "3"]).status.code(), Some(1));
}

#[test]
fn solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_file(dir.path(), "k6.hg", &["complete", "--n", "6", "--r", "3"]);
    let out = tlf(&["solve", "lforest", &p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["value"], 4);
    assert_eq!(json_of(&tlf(&["solve", "nu", &p]))["result"]["value"], 2);
    assert_eq!(json_of(&tlf(&["solve", "tightpath", &p]))["result"]["value"], 4);
    let empty = dir.path().join("empty.hg");
    std::fs::write(&empty, "").unwrap();
    let out = tlf(&["solve", "lforest", empty.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(!out.stderr.is_empty());
    assert_eq!(tlf(&["solve", "lforest", "/nonexistent/x.hg"]).status.code(), Some(1));
}

#[test]
fn exact_examples() {
    let out = tlf(&["exact", "--n", "6", "--r", "2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["value"], 5);
    let out = tlf(&["exact", "--n", "6", "--r", "3", "--k", "4", "--target", "forest"]);
    // exhaustive search and the brute-force oracle both give 11 here
    assert_eq!(json_of(&out)["result"]["value"], 11);
    let out = tlf(&["exact", "--n", "20", "--r", "3", "--k", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= 7"));
    let out = tlf(&["exact", "--n", "8", "--r", "3", "--k", "2", "--limit-override", "r3=8", "--target", "matching"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_appends_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let c = csv.to_str().unwrap();
    for k in ["2", "3"] {
        assert_eq!(tlf(&["exact", "--n", "5", "--r", "2", "--k", k, "--append-csv", c]).status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("n,r,k,target,value"));
    assert!(lines[2].starts_with("5,2,3,forest-family,"));
}

#[test]
fn formula_examples() {
    let out = tlf(&["formula", "conjecture-rhs", "--n", "7", "--r", "3", "--k", "4"]);
    assert_eq!(json_of(&out)["result"]["value"], 15);
    let out = tlf(&["formula", "beta0", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("beta0 = 0.2868"), "{text}");
    let v = json_of(&tlf(&["formula", "beta0"]));
    assert!(v["result"]["abs_f_beta0"].as_f64().unwrap() < 1e-12);
    let out = tlf(&["formula", "matching-lb", "--r", "3", "--alpha", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/6"));
    let v = json_of(&tlf(&["formula", "matching-lb", "--r", "3", "--alpha", "0.16", "--n", "1000"]));
    assert_eq!(v["result"]["kind"], "real");
}

#[test]
fn verify_examples() {
    let out = tlf(&["verify", "ning-wang", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["result"]["rows"].as_array().unwrap().iter().all(|r| r["match"] == true));
    let out = tlf(&["verify", "emc", "--r", "3", "--n-max", "6", "--k-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    // the closed form gives 10 at n = 6 but the exact value is 11
    let out = tlf(&["verify", "conjecture", "--r", "3", "--n-max", "6", "--k", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,r,k,target,exact,formula,match,status,nodes,seconds\n"));
    assert!(text.contains("6,3,4,forest-family,11,10,false,complete"));
    let out = tlf(&["verify", "conjecture", "--r", "3", "--n-max", "6", "--k", "4"]);
    let v = json_of(&out);
    let bad = &v["result"]["rows"][1];
    assert_eq!(bad["match"], false);
    assert_eq!(bad["witnesses"][0]["graph"]["edges"].as_array().unwrap().len(), 11);
    let out = tlf(&["verify", "conjecture", "--r", "3", "--n-max", "8", "--k", "4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("8,3,4,") && l.contains("skipped")), "{text}");
}

#[test]
fn cover_examples() {
    let out = tlf(&["cover", "--r", "3", "--m", "10", "--density", "1.0", "--eps", "0.2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["violated"], false);
    assert!(v["result"]["leftover"].as_u64().unwrap() <= 6);
    assert_eq!(v["seed"], 1);
    let out = tlf(&["cover", "--r", "3", "--m", "4", "--density", "0.0", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = tlf(&["cover", "--r", "3", "--m", "4", "--density", "0.9", "--eps", "0.3", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json_of(&out)["result"]["density_trace"].as_array().unwrap().is_empty());
}

#[test]
fn identical_runs_differ_only_in_timing() {
    for args in [
        &["exact", "--n", "6", "--r", "2", "--k", "4", "--workers", "2"][..],
        &["cover", "--r", "3", "--m", "6", "--density", "0.8", "--eps", "0.2", "--seed", "9"][..],
        &["verify", "emc", "--r", "2", "--n-max", "6", "--k-max", "2"][..],
    ] {
        let mut a = json_of(&tlf(args));
        let mut b = json_of(&tlf(args));
        assert!(a.get("tool_version").is_some() && a.get("config").is_some() && a.get("seed").is_some());
        strip_elapsed(&mut a);
        strip_elapsed(&mut b);
        assert_eq!(a, b);
    }
}

#[test]
fn checkpoint_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let c = cp.to_str().unwrap();
    let first = json_of(&tlf(&["exact", "--n", "6", "--r", "2", "--k", "4", "--checkpoint", c]));
    assert!(cp.exists());
    // the finished checkpoint has an empty frontier and resumes to the same record
    let again = json_of(&tlf(&["exact", "--n", "6", "--r", "2", "--k", "4", "--checkpoint", c]));
    assert_eq!(first["result"], again["result"]);
    std::fs::write(&cp, "garbage").unwrap();
    assert_eq!(tlf(&["exact", "--n", "6", "--r", "2", "--k", "4", "--checkpoint", c]).status.code(), Some(1));
}

#[test]
fn limits_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("limits.txt");
    std::fs::write(&file, "# tighter\nr2=5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tlf"))
        .args(["exact", "--n", "6", "--r", "2", "--k", "3"])
        .env("TLF_LIMITS", &file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tlf(&["exact", "--n", "6", "--r", "2", "--k", "3", "--limit-override", "bogus"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tlf(&[]).status.code(), Some(1));
    assert_eq!(tlf(&["exact", "--n", "x"]).status.code(), Some(1));
    assert_eq!(tlf(&["exact", "--n", "5", "--r", "2", "--k", "2", "--target", "cycles"]).status.code(), Some(1));
    assert_eq!(tlf(&["--help"]).status.code(), Some(0));
}
