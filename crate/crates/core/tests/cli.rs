use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn exceedance(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exceedance"))
        .args(args)
        .env_remove("EXCEEDANCE_ENUM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn pmf_csv_rows() {
    let out = exceedance(&["pmf", "--m", "2", "--n", "3", "--k", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "l,count,prob_exact,prob_decimal\n0,5,1/2,0.5\n1,3,3/10,0.3\n2,2,1/5,0.2\n"
    );
}

#[test]
fn pmf_json_schema() {
    let out = exceedance(&["pmf", "--m", "2", "--n", "2", "--k", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["probs"]["0"], "1/2");
    assert_eq!(v["probs"]["1"], "1/2");
    assert_eq!(v["total"], "6");
    assert_eq!(v["counts"]["1"], "3");
    assert_eq!(v["m"], 2);
}

#[test]
fn pmf_large_counts_are_strings() {
    let out = exceedance(&["pmf", "--m", "40", "--n", "50", "--k", "10", "--format", "json"]);
    let v = json(&out);
    let total = v["total"].as_str().unwrap();
    assert_eq!(total.len(), 26);
    assert!(v["counts"]["3"].is_string());
}

#[test]
fn pmf_swap_requires_flag() {
    let out = exceedance(&["pmf", "--m", "3", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--allow-swap"));
    let out = exceedance(&["pmf", "--m", "3", "--n", "2", "--k", "2", "--allow-swap", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reduction"], "reflected");
    assert_eq!(v["probs"]["0"], "1/5");
}

#[test]
fn validation_and_usage_errors_exit_2() {
    for args in [
        &["pmf", "--m", "2", "--n", "3", "--k", "0"][..],
        &["pmf", "--m", "2", "--n", "3", "--k", "3"],
        &["pmf", "--m", "2", "--n", "3"],
        &["pmf", "--m", "2", "--n", "3", "--k", "1", "--format", "xml"],
        &["walk", "--m", "0", "--n", "3", "--k", "1"],
        &["simulate", "--m", "2", "--n", "2", "--k", "1", "--trials", "0"],
        &["simulate", "--m", "2", "--n", "2", "--k", "1", "--dist", "cauchy"],
        &["asymptotics", "--k-list", "1,x"],
        &["asymptotics", "--k-list", "0"],
        &["asymptotics", "--m", "2"],
    ] {
        let out = exceedance(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn enumerate_matches() {
    let out = exceedance(&["enumerate", "--m", "2", "--n", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("MATCH"));
    let out = exceedance(&["enumerate", "--m", "1", "--n", "1", "--k", "1", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["enumerated"]["0"], "1");
    assert_eq!(v["enumerated"]["1"], "1");
    assert_eq!(v["status"], "MATCH");
    let out = exceedance(&["enumerate", "--m", "2", "--n", "3", "--k", "2", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["enumerated"], serde_json::json!({"0": "5", "1": "3", "2": "2"}));
}

#[test]
fn enumerate_cap() {
    let out = exceedance(&["enumerate", "--m", "20", "--n", "20", "--k", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("26"));
    let out = Command::new(env!("CARGO_BIN_EXE_exceedance"))
        .args(["enumerate", "--m", "3", "--n", "4", "--k", "2"])
        .env("EXCEEDANCE_ENUM_CAP", "6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cap of 6"));
    let out = exceedance(&["enumerate", "--m", "3", "--n", "4", "--k", "2", "--cap", "7"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn walk_keys_are_even() {
    let out = exceedance(&["walk", "--m", "2", "--n", "3", "--k", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["t2k"], serde_json::json!({"0": "1/2", "2": "3/10", "4": "1/5"}));
    let out = exceedance(&["walk", "--m", "2", "--n", "2", "--k", "1", "--format", "json"]);
    assert_eq!(json(&out)["t2k"], serde_json::json!({"0": "1/2", "2": "1/2"}));
    let out = exceedance(&["walk", "--m", "5", "--n", "9", "--k", "4", "--format", "csv"]);
    for line in stdout(&out).lines().skip(1) {
        let t: usize = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(t % 2, 0);
    }
}

#[test]
fn simulate_reports_deviation() {
    for dist in ["uniform", "pareto"] {
        let out = exceedance(&[
            "simulate", "--m", "2", "--n", "2", "--k", "1", "--dist", dist, "--trials", "1000000",
            "--seed", "42", "--format", "json",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let dev: f64 = v["max_abs_deviation"].as_str().unwrap().parse().unwrap();
        assert!(dev < 0.003, "{dist}: {dev}");
        assert_eq!(v["metadata"]["dist"], dist);
        assert_eq!(v["metadata"]["seed"], "42");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "simulate", "--m", "3", "--n", "5", "--k", "3", "--trials", "50000", "--seed", "9", "--format", "csv",
    ];
    assert_eq!(exceedance(&args).stdout, exceedance(&args).stdout);
    let args = ["pmf", "--m", "7", "--n", "9", "--k", "5", "--format", "json"];
    assert_eq!(exceedance(&args).stdout, exceedance(&args).stdout);
}

#[test]
fn test_command_reports_exact_p_value() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.txt", "# system X\n0.3\n0.1\n");
    let y = write(dir.path(), "y.txt", "0.9\n\n0.2\n0.4\n");
    let out = exceedance(&["test", "--x-file", &x, "--y-file", &y, "--k", "2", "--alternative", "greater", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["observed_l"], 2);
    assert_eq!(v["p_value"], "1/5");
    assert_eq!(v["alternative"], "greater");
    assert_eq!(v["pmf"]["probs"]["2"], "1/5");

    let out = exceedance(&["test", "--x-file", &x, "--y-file", &y, "--k", "2", "--alternative", "two-sided"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("two-sided convention"));
}

#[test]
fn test_command_errors() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.txt", "1.0\n2.0\n");
    let missing = dir.path().join("absent.txt").to_string_lossy().into_owned();
    let out = exceedance(&["test", "--x-file", &x, "--y-file", &missing, "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("absent.txt"));

    let bad = write(dir.path(), "bad.txt", "1.0\n2.0\nthree\n");
    let out = exceedance(&["test", "--x-file", &x, "--y-file", &bad, "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.txt:3"));

    let tied = write(dir.path(), "tied.txt", "1.0\n5.0\n6.0\n");
    let out = exceedance(&["test", "--x-file", &x, "--y-file", &tied, "--k", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let big = write(dir.path(), "big.txt", "0.5\n0.7\n0.9\n");
    let out = exceedance(&["test", "--x-file", &big, "--y-file", &x, "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = exceedance(&["test", "--x-file", &big, "--y-file", &x, "--k", "2", "--allow-swap", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reduction"], "reflected");
}

#[test]
fn asymptotics_outputs() {
    let out = exceedance(&["asymptotics", "--m", "2", "--n", "2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,density,beta_fit_density,arcsine_density");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("0.666666666666667")));

    let out = exceedance(&["asymptotics", "--m", "8", "--n", "8", "--k", "4"]);
    let text = stdout(&out);
    assert!(text.lines().skip(1).all(|l| !l.ends_with(',')), "arcsine column filled for (2k, 2k, k)");

    let out = exceedance(&["asymptotics", "--k-list", "3,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let ks: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ks, ["1", "2", "3"]);

    let out = exceedance(&["asymptotics", "--k-list", "1,2", "--format", "json"]);
    assert_eq!(json(&out)["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn version_names_generator() {
    let out = exceedance(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("ChaCha8"));
}
