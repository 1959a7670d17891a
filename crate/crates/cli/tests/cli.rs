use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stochdom::files::{parse_measure, to_canonical_string, MeasureFile};

const COIN: &str = r#"{"dim": 1, "atoms": [{"x": ["0"], "w": "1/2"}, {"x": ["1"], "w": "1/2"}]}"#;
const BIASED: &str = r#"{"dim": 1, "atoms": [{"x": ["0"], "w": "1/4"}, {"x": ["1"], "w": "3/4"}]}"#;

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        ("coin.json", COIN),
        ("biased.json", BIASED),
        ("d0.json", r#"{"dim": 1, "atoms": [{"x": ["0"], "w": "1"}]}"#),
        ("d1.json", r#"{"dim": 1, "atoms": [{"x": ["1"], "w": "1"}]}"#),
        ("x.json", r#"{"dim": 1, "atoms": [{"x": ["0.4"], "w": "0.1"}, {"x": ["3/5"], "w": "9/10"}]}"#),
        ("y.json", r#"{"dim": 1, "atoms": [{"x": ["1/2"], "w": "1/2"}, {"x": ["4/5"], "w": "1/2"}]}"#),
        ("heavy.json", r#"{"dim": 1, "atoms": [{"x": ["0"], "w": "1"}, {"x": ["1"], "w": "1"}]}"#),
        ("wedge.json", r#"{"dim": 2, "kind": "generators", "rays": [["1", "0"], ["1", "1"]], "unit": ["2", "1"]}"#),
        ("p.json", r#"{"dim": 2, "atoms": [{"x": ["0", "0"], "w": "1/2"}, {"x": ["1", "0"], "w": "1/2"}]}"#),
        ("q.json", r#"{"dim": 2, "atoms": [{"x": ["1", "0"], "w": "1/2"}, {"x": ["2", "1"], "w": "1/2"}]}"#),
    ];
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochdom")).current_dir(dir).args(args).output().unwrap()
}

fn report(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = run(dir, &[args, &["--json", "-"]].concat());
    let code = out.status.code().unwrap();
    assert_ne!(code, 1, "{}", String::from_utf8_lossy(&out.stderr));
    (code, serde_json::from_slice(&out.stdout).unwrap())
}

#[test]
fn rate_fn_matches_the_bernoulli_closed_form() {
    let d = setup();
    let (code, r) = report(d.path(), &["rate-fn", "coin.json", "--c", "3/4"]);
    assert_eq!(code, 0);
    let v = r["result"]["value"].as_f64().unwrap();
    assert!((v - 0.130812).abs() < 1e-6, "{v}");
    assert_eq!(r["tool"], "stochdom");
    assert_eq!(r["seed"], 0);
    let out = run(d.path(), &["rate-fn", "coin.json", "--c", "3/4"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "rate 0.130812 (bisection)\n");
}

#[test]
fn dominate_reports_strict_for_a_point_shift() {
    let d = setup();
    let (code, r) = report(d.path(), &["dominate", "d0.json", "d1.json", "--cone", "halfline"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "Strict");
    assert_eq!(r["result"]["min_n"]["n0"], 1);
    let (code, r) = report(d.path(), &["dominate", "biased.json", "coin.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "Violated");
    assert!(r["result"]["min_n"].is_null());
}

#[test]
fn min_n_finds_the_curated_baseline() {
    let d = setup();
    let (code, r) = report(d.path(), &["min-n", "x.json", "y.json", "--cone", "halfline", "--n-max", "64"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["found"], true);
    assert_eq!(r["result"]["n0"], 14);
    // The last failure is at 13, so no window ends at 13.
    let (code, r) = report(d.path(), &["min-n", "x.json", "y.json", "--n-max", "13"]);
    assert_eq!(code, 2);
    assert_eq!(r["result"]["found"], false);
    let (_, r) = report(d.path(), &["min-n", "x.json", "y.json", "--n-max", "10"]);
    assert_eq!(r["result"]["n0"], 10);
}

#[test]
fn catalyst_outcomes_and_exit_codes() {
    let d = setup();
    let (code, r) = report(d.path(), &["catalyst", "x.json", "y.json", "--grid-step", "1/10", "--grid-max", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verified"], true);
    let (code, r) = report(d.path(), &["catalyst", "biased.json", "coin.json"]);
    assert_eq!(code, 2);
    assert_eq!(r["result"]["found"], false);
}

#[test]
fn order_check_gives_a_certificate_either_way() {
    let d = setup();
    let (code, r) = report(d.path(), &["order-check", "coin.json", "biased.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["dominated"], true);
    assert!(r["result"]["coupling"].is_array());
    let (_, r) = report(d.path(), &["order-check", "biased.json", "coin.json"]);
    assert_eq!(r["result"]["dominated"], false);
    assert_eq!(r["result"]["upset_generators"][0][0], "1");
    let (_, r) = report(d.path(), &["order-check", "p.json", "q.json", "--cone", "wedge.json"]);
    assert_eq!(r["result"]["dominated"], true);
}

#[test]
fn rel_rate_and_cramer_reports() {
    let d = setup();
    let (code, r) = report(d.path(), &["rel-rate", "biased.json", "coin.json", "--n", "8,16", "--eps", "1/64,1/8"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["rhs"]["certified"], "exact-limit");
    assert_eq!(r["result"]["table"].as_array().unwrap().len(), 4);
    let (_, r) = report(d.path(), &["rel-rate", "coin.json", "biased.json", "--n", "8"]);
    assert_eq!(r["result"]["rhs"]["value"], 0.0);
    let (_, r) = report(d.path(), &["rel-rate", "d1.json", "d0.json", "--n", "8"]);
    assert_eq!(r["result"]["rhs"]["value"], "inf");
    let (code, r) = report(d.path(), &["cramer", "coin.json", "--c", "3/4", "--n", "64"]);
    assert_eq!(code, 0);
    assert!(r["result"]["empirical"][0]["empirical"].as_f64().unwrap() < 0.0);
}

#[test]
fn csv_and_plot_outputs() {
    let d = setup();
    let out = run(d.path(), &["spectrum", "biased.json", "coin.json", "--csv", "s.csv", "--plot", "s.gp"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(d.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("ray,theta,radial,lev_x,lev_y,margin\n"));
    assert_eq!(csv.lines().count(), 1 + 259);
    assert!(fs::read_to_string(d.path().join("s.gp")).unwrap().contains("'s.csv'"));
    let out =
        run(d.path(), &["rel-rate", "biased.json", "coin.json", "--n", "8", "--csv", "t.csv", "--curve", "g.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(d.path().join("t.csv")).unwrap().starts_with("n,eps,lhs,spread,exhaustive\n"));
    assert!(fs::read_to_string(d.path().join("g.csv")).unwrap().starts_with("r,g\n"));
    assert_eq!(run(d.path(), &["spectrum", "biased.json", "coin.json", "--plot", "s.gp"]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_one() {
    let d = setup();
    fs::write(d.path().join("bad.json"), "{\"dim\": 1,\n \"atoms\": [{\"x\": [\"1/0\"], \"w\": \"1\"}]}").unwrap();
    let out = run(d.path(), &["rate-fn", "bad.json", "--c", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2 column"));
    let out = run(d.path(), &["spectrum", "heavy.json", "coin.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(d.path(), &["spectrum", "heavy.json", "coin.json", "--normalize"]).status.code(), Some(0));
    let out = run(d.path(), &["min-n", "x.json", "y.json", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    assert_eq!(run(d.path(), &["spectrum", "coin.json", "p.json"]).status.code(), Some(1));
    assert_eq!(
        run(d.path(), &["order-check", "coin.json", "coin.json", "--cone", "wedge.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn canonical_measure_files_round_trip() {
    let mu =
        parse_measure(r#"{"dim": 1, "atoms": [{"x": ["0.6"], "w": "0.9"}, {"x": ["2/5"], "w": "1/10"}]}"#).unwrap();
    let canonical = to_canonical_string(&MeasureFile::canonical(&mu));
    let again = to_canonical_string(&MeasureFile::canonical(&parse_measure(&canonical).unwrap()));
    assert_eq!(canonical, again);
}
