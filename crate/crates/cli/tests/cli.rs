use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvecensus")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let o = run(args);
    (serde_json::from_str(&stdout(&o)).expect("valid json"), o.status.code().unwrap())
}

#[test]
fn legendre_seven_passes() {
    let (v, code) = json(&["verify", "--family", "legendre", "--q", "7", "--format", "json", "--stable"]);
    assert_eq!(code, 0);
    let r = &v[0];
    assert_eq!(r["J"]["predicted"], 2);
    assert_eq!(r["J"]["enumerated"], 2);
    assert_eq!(r["I"]["predicted"], 3);
    assert_eq!(r["I"]["enumerated"], 3);
    assert!(r.get("elapsed_ms").is_none());
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass", "{c}");
    }
}

#[test]
fn hessian_four_passes() {
    let (v, code) = json(&["verify", "--family", "hessian", "--q", "4", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v[0]["J"]["enumerated"], 1);
    assert_eq!(v[0]["I"]["enumerated"], 1);
    assert!(v[0]["elapsed_ms"].is_u64());
}

#[test]
fn sweep_skips_even_characteristic_legendre() {
    let o = run(&["verify", "--q-max", "50", "--family", "all", "--format", "json", "--stable"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v.as_array().unwrap();
    let qs = curvecensus::gf::prime_powers_up_to(50);
    assert_eq!(recs.len(), 5 * qs.len());
    let skipped: Vec<_> = recs
        .iter()
        .filter(|r| r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "skipped"))
        .collect();
    assert_eq!(skipped.len(), 3 * 5);
    assert!(skipped.iter().all(|r| r["q"].as_u64().unwrap().is_power_of_two()));
    assert!(String::from_utf8_lossy(&o.stderr).contains("characteristic 2"));
}

#[test]
fn golden_csv_for_legendre_seven() {
    let o = run(&["verify", "--family", "legendre", "--q", "7", "--format", "csv", "--stable"]);
    let golden = include_str!("fixtures/legendre_7.csv");
    assert_eq!(stdout(&o), golden);
}

#[test]
fn stable_output_is_byte_identical() {
    let args = ["verify", "--q-max", "30", "--format", "json", "--stable", "--jobs", "3"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&["verify", "--q-max", "30", "--format", "json", "--stable", "--jobs", "1"]));
    assert_eq!(a, b);
}

#[test]
fn injected_fault_names_the_theorem() {
    let o = run(&["verify", "--family", "hessian", "--q", "5,7", "--inject-fault", "--format", "csv", "--stable"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("hessian,5,hessian-j-theorem,fail"));
    assert!(out.contains("hessian,7,hessian-j-theorem,fail"));
}

#[test]
fn fail_fast_stops_after_first_failure() {
    let (v, code) = json(&["verify", "--family", "legendre", "--q-max", "40", "--inject-fault", "--fail-fast", "--format", "json", "--stable"]);
    assert_eq!(code, 1);
    // q = 2 is skipped, q = 3 is the first failure
    let qs: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["q"].as_u64().unwrap()).collect();
    assert_eq!(qs, vec![2, 3]);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["verify", "--q", "6"],
        vec!["verify", "--q", "7", "--q-max", "9"],
        vec!["verify", "--family", "edwards", "--q", "7"],
        vec!["verify", "--family", "hessian", "--q", "1024"],
        vec!["verify", "--q", "7", "--jobs", "0"],
        vec!["census", "--q-max", "1"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unsafe_no_guard_lifts_limits() {
    let o = run(&["census", "--family", "generalized-hessian", "--q", "131", "--unsafe-no-guard", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["J"], curvecensus::formulas::predicted_j(curvecensus::Family::GeneralizedHessian, 131).unwrap());
    assert!(v[0]["I"].is_u64());
}

#[test]
fn generalized_hessian_census_over_f4() {
    let (v, _) = json(&["census", "--family", "generalized-hessian", "--q", "4", "--format", "json"]);
    assert_eq!(v[0]["curves"], 9);
    assert_eq!(v[0]["J"], 3);
    assert_eq!(v[0]["I"], 5);
}

#[test]
fn legendre_census_csv_rows() {
    let o = run(&["census", "--family", "legendre", "--q", "13", "--format", "csv"]);
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11);
    let mut m = std::collections::BTreeMap::new();
    for r in &rows {
        *m.entry(r[7].parse::<u64>().unwrap()).or_insert(0) += 1;
    }
    assert_eq!(m, [(1, 1), (2, 6), (4, 4)].into());
}

#[test]
fn hessian_classes_over_f7() {
    let (v, code) = json(&["classes", "--family", "hessian", "--q", "7", "--format", "json"]);
    assert_eq!(code, 0);
    let classes = v[0]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["representative"]["u"], 0);
    assert_eq!(classes[0]["members"].as_array().unwrap().len(), 4);
}

#[test]
fn fields_lists_prime_powers() {
    let (v, _) = json(&["fields", "--q-max", "32", "--format", "json"]);
    let qs: Vec<u64> = v.as_array().unwrap().iter().map(|f| f["q"].as_u64().unwrap()).collect();
    assert_eq!(qs, curvecensus::gf::prime_powers_up_to(32));
    let f8 = v.as_array().unwrap().iter().find(|f| f["q"] == 8).unwrap();
    assert_eq!(f8["p"], 2);
    assert_eq!(f8["k"], 3);
}

#[test]
fn report_goes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = run(&["verify", "--family", "legendre", "--q", "7", "--format", "csv", "--stable", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), include_str!("fixtures/legendre_7.csv"));
}
