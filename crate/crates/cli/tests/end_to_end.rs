//! Runs the built binary; the output-directory override is set on the child
//! process only.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mott1d"))
}

#[test]
fn exit_codes_from_the_binary() {
    assert_eq!(bin().arg("validate").status().unwrap().code(), Some(0));
    assert_eq!(bin().arg("--bogus").status().unwrap().code(), Some(64));
    let st = bin().args(["sweep", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(st.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&st.stderr).contains("Usage"));
}

#[test]
fn probability_both_signs_at_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["probability", "--both-signs"])
        .env("MOTT1D_OUTPUT_DIR", dir.path())
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let file = std::fs::read_to_string(dir.path().join("probability.csv")).unwrap();
    assert_eq!(stdout, file);
    assert!(dir.path().join("probability.json").is_file());
    let lines: Vec<Vec<&str>> = file.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(lines.len(), 3);
    let col = |name: &str| lines[0].iter().position(|h| *h == name).unwrap();
    let minus = lines.iter().find(|l| l[col("a2_sign")] == "-1").unwrap();
    let p: f64 = minus[col("p_oracle")].parse().unwrap();
    let bound: f64 = minus[col("p_bound")].parse().unwrap();
    let ratio: f64 = minus[col("ratio")].parse().unwrap();
    assert!(p <= bound);
    assert!(ratio <= bound);
    assert!(ratio < 5.0 / 400.0);
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "oracle.n_points = 4096\n[experiment]\nlambda_sweep = [10]\na2_sign = \"plus\"\n\
         [output]\ndir = \"never-used\"\nformats = [\"csv\", \"svg\"]\nverbosity = 0\n",
    )
    .unwrap();
    let target = dir.path().join("redirected");
    let out = bin()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .env("MOTT1D_OUTPUT_DIR", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    assert!(target.join("sweep.csv").is_file());
    assert!(target.join("sweep.svg").is_file());
    assert!(!target.join("sweep.json").exists());
    assert!(!dir.path().join("never-used").exists());
}
