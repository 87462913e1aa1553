use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TWO_POLES: &str = r#"{"poles":[[2,0],[-2,0]],"residues":[[1,0],[1,0]]}"#;
const UNIT: &str = r#"{"poles":[[0,0]],"residues":[[1,0]]}"#;

fn lemnis(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lemnis"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json_summary(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON summary on stdout")
}

#[test]
fn trace_reports_components_and_goodness() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(dir.path(), &["trace", "--r", TWO_POLES, "--t", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = json_summary(&o);
    assert_eq!(s["components"], 2);
    assert_eq!(s["good"], true);

    let o = lemnis(dir.path(), &["trace", "--r", TWO_POLES, "--t", "0.4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = json_summary(&o);
    assert_eq!(s["components"], 1);
    assert_eq!(s["good"], false);

    let lem: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lemniscate.json")).unwrap()).unwrap();
    assert_eq!(lem["level"], 0.4);
    assert_eq!(lem["curves"].as_array().unwrap().len(), 2);
    assert_eq!(lem["components"][0]["holes"].as_array().unwrap().len(), 1);
}

#[test]
fn trace_of_single_pole_draws_a_circle() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(dir.path(), &["trace", "--r", UNIT]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("lemniscate.svg")).unwrap();
    // one curve and one pole marker
    assert_eq!(svg.matches("<path").count(), 2);
    assert!(svg.contains("viewBox=\"-1.1 -1.1 2.2 2.2\""));
}

#[test]
fn capacity_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(dir.path(), &["cap", "--r", r#"{"poles":[[0,0]],"residues":[[3,0]]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("capacity.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["set", "method", "panels", "value", "robin_constant", "error_indicator"]
    );
    for row in rdr.records() {
        let v: f64 = row.unwrap()[3].parse().unwrap();
        assert!((v - 3.0).abs() < 1e-3, "{v}");
    }

    let o = lemnis(dir.path(), &["cap", "--r", TWO_POLES, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s = json_summary(&o);
    assert!(s["max_relative_disagreement"].as_f64().unwrap() < 1e-2);
    assert_eq!(s["rows"].as_array().unwrap().len(), 6);
    assert!(dir.path().join("measure.json").exists());
}

#[test]
fn refuses_critical_level() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(dir.path(), &["cap", "--r", TWO_POLES, "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("critical modulus"), "{err}");
}

#[test]
fn missing_function_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(dir.path(), &["trace"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn harmonic_measure_from_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(
        dir.path(),
        &["hm", "--r", UNIT, "--arcs", "4", "--walks", "20000", "--json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let s = json_summary(&o);
    assert_eq!(s["domain"], "omega");
    for (e, sd) in s["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .zip(s["sigma"].as_array().unwrap())
    {
        assert!((e.as_f64().unwrap() - 0.25).abs() < 4.0 * sd.as_f64().unwrap());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = lemnis(
            dir.path(),
            &["hm", "--r", TWO_POLES, "--source", "0,0", "--walks", "5000"],
        );
        assert_eq!(o.status.code(), Some(0));
        let o = lemnis(dir.path(), &["cap", "--r", TWO_POLES]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["hm.json", "capacity.csv", "measure.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    let other = tempfile::tempdir().unwrap();
    lemnis(
        other.path(),
        &[
            "hm", "--r", TWO_POLES, "--source", "0,0", "--walks", "5000", "--seed", "7",
        ],
    );
    assert_ne!(
        std::fs::read(a.path().join("hm.json")).unwrap(),
        std::fs::read(other.path().join("hm.json")).unwrap()
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.json"), TWO_POLES).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "r = \"f.json\"\nt = 0.4\n").unwrap();
    let out = dir.path().join("out");
    let run = |extra: &[&str]| {
        let mut args = vec!["trace", "--json", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        json_summary(&lemnis(&out, &args))
    };
    assert_eq!(run(&[])["components"], 1);
    assert_eq!(run(&["--t", "1"])["components"], 2);
}

#[test]
fn counterexample_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(
        dir.path(),
        &[
            "verify",
            "counterexample",
            "--a",
            "1",
            "--eta",
            "0.75",
            "--p",
            "100,1000,10000",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let mut rdr = csv::Reader::from_path(dir.path().join("counterexample.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.len(), 10);
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn failed_assertion_exits_one() {
    // The plateau F = 2 is not reached when the sweep starts at t = 0.7.
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(
        dir.path(),
        &["verify", "schwarz", "--r", TWO_POLES, "--tmin", "0.7", "--levels", "3"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn precondition_failure_exits_two() {
    // Poles at ±0.5 merge at level 1.
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(
        dir.path(),
        &[
            "verify",
            "lower",
            "--r",
            r#"{"poles":[[0.5,0],[-0.5,0]],"residues":[[1,0],[1,0]]}"#,
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_on_single_pole() {
    let dir = tempfile::tempdir().unwrap();
    let o = lemnis(
        dir.path(),
        &["verify", "all", "--r", UNIT, "--walks", "20000", "--json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = json_summary(&o);
    for suite in [
        "reflection",
        "energy",
        "lower",
        "upper",
        "schwarz",
        "epsilon",
        "counterexample",
    ] {
        assert_eq!(s[suite]["pass"], true, "{suite}");
    }
    for f in [
        "reflection.json",
        "energy.json",
        "lower.csv",
        "upper.csv",
        "schwarz.csv",
        "schwarz.svg",
        "epsilon.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
