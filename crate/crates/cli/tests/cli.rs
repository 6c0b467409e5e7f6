use std::process::{Command, Output};

use serde_json::Value;

fn nonosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonosc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::JSONSchema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/analysis_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

const EQUATIONS: &[&str] = &[
    "z^2*y'' + z*y' - y = 0",
    "z^2*y'' + z*y' + y = 0",
    "y'' - z*y = 0",
    "z^2*y'' + z*y' + (z^2 - 0.25)*y = 0",
    "z*(1-z)*y'' + (0.5 - 2*z)*y' - 0.1875*y = 0",
    "(z - z^2)*y'' + (2.5 - 1.5*z)*y' + (-0.5+1.5i)*y = 0",
    "z^3*y''' + 3*z^2*y'' - 2*z*y' + 2*y = 0",
    "y' - y = 0",
];

#[test]
fn analyze_verdicts_and_exit_codes() {
    let o = nonosc(&["analyze", "z^2*y'' + z*y' - y = 0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: GloballyNonOscillating"));

    let o = nonosc(&["analyze", "z^2*y'' + z*y' + y = 0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_of(&o);
    assert_eq!(r["verdict"], "Oscillating");
    assert!(r["points"][0]["note"].as_str().unwrap().contains("share real part 0"));

    let o = nonosc(&["analyze", "y'' - z*y = 0", "--json"]);
    let r = json_of(&o);
    assert_eq!(r["verdict"], "Oscillating");
    assert_eq!(r["points"][0]["note"], "irregular singular point at infinity");
}

#[test]
fn analyze_reads_files() {
    let dir = std::env::temp_dir().join(format!("nonosc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("euler.ode");
    std::fs::write(&file, "z^2*y'' + z*y' - y = 0\n").unwrap();
    let o = nonosc(&["analyze", file.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["verdict"], "GloballyNonOscillating");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn error_exit_codes() {
    let o = nonosc(&["analyze", "y'' + * = 0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: parse error"));

    let o = nonosc(&["bound", "strip", "--lambda", "0", "--lambda", "i"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("equal real parts"));

    let o = nonosc(&["bound", "cover", "--lambda", "1", "--lambda", "-1", "--kind", "perturbed", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(5));

    // Degenerate box.
    let o = nonosc(&["count", "--lambda", "0", "--poly", "0*z + 1", "--box", "0", "0", "0", "1"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn indeterminate_verdict_exits_4() {
    // Exponents 0 and 1e-9 + i: real parts tie inside a coarse band without sharing a value.
    let o = nonosc(&["analyze", "z^2*y'' + z*y' + y = 0", "--tol-real-tie", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = nonosc(&["analyze", "z^2*y'' + (1 - 0.01)*z*y' = 0", "--tol-real-tie", "0.5", "--json"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(json_of(&o)["verdict"], "Indeterminate");
}

#[test]
fn bound_examples() {
    let o = nonosc(&["bound", "strip", "--lambda", "-1", "--lambda", "1", "--alpha", "0", "--json"]);
    let r = json_of(&o);
    let expect = 1.0 + 4.0 * 2f64.ln() / std::f64::consts::PI;
    assert!((r["bound"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert_eq!(r["theta"], 0.5);

    let o = nonosc(&["bound", "cover", "--lambda", "1", "--lambda", "-1", "--json"]);
    let r = json_of(&o);
    let boxes = r["boxes"].as_array().unwrap();
    assert_eq!(boxes.len(), 1);
    assert_eq!(boxes[0]["u_lo"].as_f64().unwrap(), -std::f64::consts::LN_2);
    assert_eq!(boxes[0]["u_hi"].as_f64().unwrap(), std::f64::consts::LN_2);

    let o = nonosc(&["bound", "ky", "--lambda", "0", "--lambda", "i", "--diam", "6.283185307179586", "--json"]);
    assert!((json_of(&o)["bound"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    let o = nonosc(&[
        "bound", "sector", "--equation", "z^2*y'' + z*y' - y = 0", "--alpha", "1.5707963267948966", "--json",
    ]);
    let r = json_of(&o);
    assert!(r["value"].as_f64().unwrap().is_finite());
    assert_eq!(r["rigorous"], false);
}

#[test]
fn count_examples() {
    let sine = ["--lambda", "i", "--lambda", "-i", "--poly", "-0.5i", "--poly", "0.5i"];
    let mut args = vec!["count"];
    args.extend(sine);
    args.extend(["--box", "-4", "4", "-1", "1"]);
    let o = nonosc(&args);
    assert_eq!(stdout(&o).trim(), "3");

    let o = nonosc(&["count", "--lambda", "1", "--box", "-3", "2", "-7", "5"]);
    assert_eq!(stdout(&o).trim(), "0");

    let o = nonosc(&["count", "--lambda", "1", "--lambda", "-1", "--box", "-1", "1", "0", "2", "--subdivide", "3", "--json"]);
    let r = json_of(&o);
    assert_eq!(r["count"], 1);
    assert_eq!(r["consistent"], true);
}

#[test]
fn verify_runs_and_passes() {
    let o = nonosc(&["verify", "--seed", "7", "--cases", "20", "--which", "dominance"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nonosc(&["verify", "--seed", "42", "--cases", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = nonosc(&["verify", "--which", "bogus"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn reports_validate_against_schema() {
    let schema = schema();
    for eq in EQUATIONS {
        let o = nonosc(&["analyze", eq, "--json"]);
        assert!(matches!(o.status.code(), Some(0) | Some(4)), "{eq}");
        let report = json_of(&o);
        let msgs: Vec<String> = match schema.validate(&report) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(msgs.is_empty(), "{eq}: {msgs:?}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema = schema();
    let o = nonosc(&["analyze", EQUATIONS[0], "--json"]);
    let mut report = json_of(&o);
    report["verdict"] = Value::from("Maybe");
    assert!(!schema.is_valid(&report));
    let mut report = json_of(&o);
    report.as_object_mut().unwrap().remove("tolerances");
    assert!(!schema.is_valid(&report));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_nonosc"))
            .args(["verify", "--seed", "11", "--cases", "12", "--json"])
            .env("NONOSC_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));

    for eq in EQUATIONS {
        let a = nonosc(&["analyze", eq, "--json"]).stdout;
        let b = nonosc(&["analyze", eq, "--json"]).stdout;
        assert_eq!(a, b, "{eq}");
    }
}
