use std::process::{Command, Output};

use serde_json::Value;
use sg_harmonic::Rational;

fn sgh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgh"))
        .args(args)
        .output()
        .expect("failed to run sgh")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = sgh(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_examples() {
    let out = sgh(&["eval", "-a", "0", "-b", "0", "-g", "1", "--edge", "bottom", "--point", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2/5 (0.4)");

    let out = sgh(&["eval", "-a", "0", "-b", "0", "-g", "1", "--point", "1/3"]);
    assert!(stdout(&out).starts_with("7/27 ("));

    let out = sgh(&["eval", "-a", "1", "-b", "1", "-g", "1", "--point", "3/8"]);
    assert!(stdout(&out).starts_with("1 ("));

    let out = sgh(&["eval", "-a", "0", "-b", "0", "-g", "1", "--point", "1/2^2"]);
    assert!(stdout(&out).starts_with("1/5 ("));
}

#[test]
fn eval_negative_and_third_points_on_other_edges() {
    let out = sgh(&["eval", "-a", "-1/2", "-b", "3", "-g", "-7", "--edge", "left", "--point", "0"]);
    assert!(stdout(&out).starts_with("-1/2 ("), "{}", stdout(&out));
    // Third point of the right edge [p0, p2]: reflection of the bottom-edge
    // formula with (beta, alpha, gamma).
    let v = json(&["eval", "-a", "1", "-b", "0", "-g", "0", "--edge", "right", "--point", "1/3"]);
    assert_eq!(v["results"]["value"], "5/9");
}

#[test]
fn eval_rejects_unsupported_point() {
    let out = sgh(&["eval", "-a", "0", "-b", "0", "-g", "1", "--point", "1/5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/5"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    for args in [
        vec!["eval", "-a", "x", "-b", "0", "-g", "1", "--point", "1/2"],
        vec!["eval", "-a", "1/0", "-b", "0", "-g", "1", "--point", "1/2"],
        vec!["eval", "-a", "0", "-b", "0", "--point", "1/2"],
        vec!["classify", "-a", "0", "-b", "0", "-g", "1", "--format", "yaml"],
        vec!["verify", "--suite", "nope"],
        vec!["frobnicate"],
    ] {
        let out = sgh(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "-a", "5", "-b", "0", "-g", "1", "--depth", "6"]);
    let bottom = &v["results"]["edges"][0];
    assert_eq!(bottom["edge"], "bottom");
    assert_eq!(bottom["class"], "NonMonotone");
    assert_eq!(bottom["extremum"]["type"], "bracket");
    let lo: Rational = bottom["extremum"]["lo"].as_str().unwrap().parse().unwrap();
    let hi: Rational = bottom["extremum"]["hi"].as_str().unwrap().parse().unwrap();
    assert_eq!(hi - lo, Rational::frac(1, 64));

    let v = json(&["classify", "-a", "1", "-b", "0", "-g", "2"]);
    assert_eq!(v["results"]["simultaneous"], true);
    for e in v["results"]["edges"].as_array().unwrap() {
        assert!(e["class"].as_str().unwrap().starts_with("Strictly"));
    }

    let v = json(&["classify", "-a", "0", "-b", "0", "-g", "0"]);
    for e in v["results"]["edges"].as_array().unwrap() {
        assert_eq!(e["class"], "Constant");
    }
    assert_eq!(v["results"]["simultaneous"], Value::Null);
}

#[test]
fn classify_reports_side_length_order() {
    let v = json(&["classify", "-a", "0", "-b", "1", "-g", "3"]);
    let order: Vec<&str> = v["results"]["side_length_order"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap())
        .collect();
    assert_eq!(order, ["right", "bottom", "left"]);
}

fn scan_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = sgh(args);
    assert!(out.status.success());
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["x_num", "x_den", "f_num", "f_den", "f_float"]);
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn scan_examples() {
    let rows = scan_rows(&["scan", "-a", "0", "-b", "0", "-g", "1", "--depth", "1"]);
    let f: Vec<String> = rows.iter().map(|r| format!("{}/{}", r[2], r[3])).collect();
    assert_eq!(f, ["0/1", "2/5", "1/1"]);

    let rows = scan_rows(&["scan", "-a", "0", "-b", "0", "-g", "1", "--depth", "2"]);
    assert_eq!(rows[1][..4], ["1", "4", "1", "5"]);

    let rows = scan_rows(&["scan", "-a", "1", "-b", "1", "-g", "1", "--depth", "5"]);
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| r[2] == "1" && r[3] == "1"));
}

#[test]
fn scan_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let args = ["scan", "-a", "3/7", "-b", "-2", "-g", "5", "--edge", "left", "--depth", "9"];
    let first = sgh(&args).stdout;
    assert_eq!(first, sgh(&args).stdout);

    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let out = sgh(&with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn scan_depth_guard() {
    let out = sgh(&["scan", "-a", "0", "-b", "0", "-g", "1", "--depth", "21"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn printed_rationals_reparse() {
    let rows = scan_rows(&["scan", "-a", "-13/7", "-b", "22/9", "-g", "1/3", "--depth", "4"]);
    for r in rows {
        let f = Rational::new(r[2].parse::<i64>().unwrap(), r[3].parse::<i64>().unwrap()).unwrap();
        assert_eq!(f.to_string().parse::<Rational>().unwrap(), f);
    }
    let out = sgh(&["eval", "-a", "-13/7", "-b", "22/9", "-g", "1/3", "--point", "5/16"]);
    let text = stdout(&out);
    let exact = text.split_whitespace().next().unwrap();
    let parsed: Rational = exact.parse().unwrap();
    assert_eq!(parsed.to_string(), exact);
}

#[test]
fn verify_examples() {
    let out = sgh(&["verify", "--suite", "oracle", "--depth", "3", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("oracle: PASS"));

    let v = json(&["verify", "--suite", "theorem6", "--m-max", "20", "--trials", "10"]);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["suites"][0]["name"], "theorem6");
    assert_eq!(v["suites"][0]["status"], "PASS");
    // The (0,0,1) table decreases from the first row on.
    let rows: Vec<(f64, f64)> = v["suites"][0]["details"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|d| {
            let parts: Vec<&str> = d.as_str()?.split(" | ").collect();
            (parts.len() == 3 && parts[0] != "m").then(|| (parts[1].parse().unwrap(), parts[2].parse().unwrap()))
        })
        .collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1));

    let v = json(&["verify", "--suite", "theorem5", "--trials", "100", "--depth", "5"]);
    assert_eq!(v["suites"][0]["status"], "PASS");
    assert!(v["suites"][0]["details"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d == "max zero-count 1"));
}

#[test]
fn verify_csv_lists_suites() {
    let out = sgh(&["verify", "--suite", "normal", "--suite", "conservation", "--trials", "5", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "suite,status\nnormal,PASS\nconservation,PASS\n");
}

#[test]
fn zero_search_examples() {
    let v = json(&["zero-search", "-a", "-2", "-b", "0", "-g", "2", "--depth", "4"]);
    assert_eq!(v["results"]["count"], 1);
    assert_eq!(v["results"]["points"][0]["label"], "p1");
    assert_eq!(v["results"]["relations"], serde_json::json!([[1, -2, 1]]));

    // alpha = beta makes the left edge symmetric, so its midpoint is a
    // zero-derivative junction.
    let v = json(&["zero-search", "-a", "0", "-b", "0", "-g", "1", "--depth", "4"]);
    assert_eq!(v["results"]["count"], 1);
    assert_eq!(v["results"]["points"][0]["label"], "left@1/2");

    let v = json(&["zero-search", "-a", "0", "-b", "1", "-g", "100", "--depth", "4"]);
    assert_eq!(v["results"]["count"], 0);
    assert_eq!(v["results"]["relations"], serde_json::json!([]));

    let out = sgh(&["zero-search", "-a", "1", "-b", "1", "-g", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_share_schema() {
    for args in [
        vec!["eval", "-a", "0", "-b", "0", "-g", "1", "--point", "1/4"],
        vec!["classify", "-a", "0", "-b", "0", "-g", "1"],
        vec!["zero-search", "-a", "0", "-b", "1", "-g", "3"],
        vec!["verify", "--suite", "normal", "--trials", "3"],
    ] {
        let v = json(&args);
        for key in ["command", "inputs", "results", "suites"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
    }
}
