use std::io::Write;

use mott1d::oscint::rate_table;
use mott1d_cli::{demo_strip, run, DEMO_LAMBDAS, DEMO_TOL};

fn invoke(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mott1d").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn validate_defaults_passes() {
    let (code, out, _) = invoke(&["validate"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 2 * 9);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn validate_reports_broken_assumptions() {
    let f = config_file("[experiment]\nbase_epsilon = 0.05\nlambda0 = 0.01\na2_sign = \"plus\"\n");
    let (code, out, _) = invoke(&["validate", "--config", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let line = out.lines().find(|l| l.contains("lambda0/epsilon")).unwrap();
    assert!(line.ends_with(",0,0.1,false"), "{line}");
}

#[test]
fn missing_config_is_a_usage_error() {
    let (code, _, err) = invoke(&["validate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code, 64);
    assert!(err.contains("Usage"));
}

#[test]
fn unknown_flags_and_subcommands_are_usage_errors() {
    assert_eq!(invoke(&["validate", "--frobnicate"]).0, 64);
    assert_eq!(invoke(&["teleport"]).0, 64);
    assert_eq!(invoke(&[]).0, 64);
}

#[test]
fn help_exits_cleanly() {
    let (code, _, err) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(err.contains("oscint-demo"));
}

#[test]
fn invalid_config_values_exit_one() {
    let f = config_file("[experiment]\nlambda_sweep = []\n");
    assert_eq!(invoke(&["sweep", "--config", f.path().to_str().unwrap()]).0, 1);
    let f = config_file("oracle.n_points = 1000\n");
    assert_eq!(invoke(&["validate", "-c", f.path().to_str().unwrap()]).0, 1);
}

#[test]
fn numerical_failures_exit_two() {
    let f = config_file("oracle.n_points = 64\noracle.max_time_nodes = 8\n[output]\nverbosity = 0\n");
    let (code, _, err) = invoke(&["first-order", "-c", f.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn oscint_demo_prints_library_values() {
    let (code, out, _) = invoke(&["oscint-demo"]);
    assert_eq!(code, 0);
    let rows = rate_table(&demo_strip().unwrap(), &DEMO_LAMBDAS, DEMO_TOL).unwrap();
    let body: Vec<&str> = out.lines().skip(1).take(rows.len()).collect();
    for (line, r) in body.iter().zip(&rows) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v, vec![r.lambda, r.order as f64, r.error, r.truncation_error, r.error_bound]);
    }
    assert_eq!(out.matches("# slope order").count(), 3);
}
