use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn blochop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blochop"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 4] = ["--levels", "16", "--angular-cap", "1024"];

fn analyze(u: &str, phi: &str, space: &str, extra: &[&str]) -> Output {
    let mut args = vec!["analyze", "--u", u, "--phi", phi, "--space", space];
    args.extend_from_slice(&SMALL);
    args.extend_from_slice(extra);
    blochop(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_writes_a_json_report() {
    let o = analyze("1", "z/2", "bergman:p=2,alpha=0", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"], "Compact");
    assert_eq!(v["agreement"]["unanimous"], true);
    assert_eq!(v["spec"]["kind"], "bergman");
    assert!(v.get("timings").is_none());
    assert!(v["P_tail"]["band_values"].is_array());
}

#[test]
fn analyze_out_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = analyze("1", "z/2", "hardy:2", &["--timings", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["timings"]["total_s"].as_f64().unwrap() > 0.0);
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let a = analyze("exp(z)", "0.8*z+0.1", "bergman:4,0.5", &[]);
    let b = analyze("exp(z)", "0.8*z+0.1", "bergman:4,0.5", &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_rejects_bad_input() {
    let o = analyze("(1-z)^1.5", "z", "bergman:2,0", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot parse u"), "{}", stderr(&o));

    let o = analyze("1", "2*z", "bergman:2,0", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("self-map") || stderr(&o).contains("disk"), "{}", stderr(&o));

    let o = analyze("1", "z/2", "bergman:0.5,0", &[]);
    assert_eq!(o.status.code(), Some(1));

    let o = analyze("1", "z/2", "sobolev:2", &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lemma33_table_and_errors() {
    let o = blochop(&["lemma33", "--alpha", "1", "--k", "1,3,100000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["value"], 1.0);
    assert!(rows[2]["relative_error"].as_f64().unwrap() < 1e-2);

    let o = blochop(&["lemma33", "--alpha", "2.5", "--kmax", "1000"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().last().unwrap()["k"], 1000);

    for alpha in ["0", "-1"] {
        let o = blochop(&["lemma33", "--alpha", alpha]);
        assert_eq!(o.status.code(), Some(1), "alpha={alpha}");
    }
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing here\n\n").unwrap();
    let o = blochop(&["compare", "--corpus", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no entries"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 | z/2 | bergman:2,0\n(1-z)^1.5 | z | bergman:2,0\n").unwrap();
    let o = blochop(&["compare", "--corpus", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let good = dir.path().join("good.txt");
    fs::write(&good, "1 | z/2 | bergman:2,0\n# comment\n1 | z/2 | hardy:2\n").unwrap();
    let mut args = vec!["compare", "--corpus", good.to_str().unwrap()];
    args.extend_from_slice(&SMALL);
    let o = blochop(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);
    assert_eq!(v["entries"][1]["line"], 3);
    assert_eq!(v["all_unanimous"], true);

    let missing = dir.path().join("missing.txt");
    let o = blochop(&["compare", "--corpus", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gridcheck_passes() {
    let o = blochop(&["gridcheck", "--sup-levels", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn gridcheck_flags_a_coarse_quadrature() {
    let o = blochop(&["gridcheck", "--levels", "6", "--sup-levels", "12"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let bergman = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["suite"] == "bergman_norm_monomials")
        .unwrap();
    assert_eq!(bergman["passed"], false);
}
