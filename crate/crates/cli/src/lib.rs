//! Command-line front end for `mott1d`.
//!
//! Every physics parameter comes from one TOML run file (see
//! [`mott1d::config`]); the subcommands only pick which analysis to run.
//!
//! Exit codes: 0 success, 1 invalid input or failed assumption checks,
//! 2 numerical failure, 64 usage errors (bad flags, unreadable config).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{CommandFactory, Parser, Subcommand};
use mott1d::config::{load_config, Format, RunConfig};
use mott1d::duhamel::{f1_oracle, f2_both_excited_oracle, Model};
use mott1d::oscint::{rate_slope, rate_table, SeparableGaussian, StripIntegrand};
use mott1d::params::{derive_dimensionless, scaling_family_with, validate_assumptions, ValidationConfig};
use mott1d::report::{fit_slopes, run_experiment, write_csv, write_json, ComparisonRow, SignChoice};
use mott1d::stationary::{f1_leading, f2_leading_term};
use mott1d::{Error, Result};

pub mod svg;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

/// `Lambda` values and reference tolerance of the oscillatory-integral demo.
pub const DEMO_LAMBDAS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
pub const DEMO_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "mott1d", version, about = "Joint excitation probabilities of two oscillators crossed by a fast particle")]
struct Cli {
    /// Run file (TOML). Built-in defaults apply when omitted.
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the small-parameter assumptions at `experiment.base_epsilon`.
    Validate,
    /// First-order amplitudes: oracle against the leading term.
    FirstOrder,
    /// Second-order both-excited amplitude: oracle against the leading term.
    SecondOrder,
    /// Joint excitation probability at `experiment.base_epsilon`.
    Probability {
        /// Run both placements of the second oscillator.
        #[arg(long)]
        both_signs: bool,
    },
    /// Convergence table of the strip-integral expansion on a Gaussian.
    OscintDemo,
    /// Full sweep over `experiment.lambda_sweep`, written to the output directory.
    Sweep,
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match &cli.config {
        None => RunConfig::default(),
        Some(path) if !path.is_file() => {
            let _ = writeln!(err, "error: cannot read config file {}\n", path.display());
            let _ = writeln!(err, "{}", Cli::command().render_usage());
            return EXIT_USAGE;
        }
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVALID;
            }
        },
    };
    let result = match cli.command {
        Command::Validate => validate(&cfg, out),
        Command::FirstOrder => first_order(&cfg, out),
        Command::SecondOrder => second_order(&cfg, out),
        Command::Probability { both_signs } => probability(&cfg, both_signs, out),
        Command::OscintDemo => oscint_demo(out),
        Command::Sweep => sweep(&cfg, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::Config(_) => EXIT_INVALID,
        _ => EXIT_NUMERICAL,
    }
}

fn model_for(cfg: &RunConfig, sign: i32) -> Result<Model> {
    let spec = cfg.spec();
    let eps = spec.base_epsilon;
    Ok(Model::with_default_potential(scaling_family_with(eps, sign, spec.lambda0_for(eps))?))
}

fn validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let spec = cfg.spec();
    let eps = spec.base_epsilon;
    let mut ok = true;
    writeln!(out, "a2_sign,check,value,lower,upper,passed")?;
    for &sign in spec.a2_sign.signs() {
        let p = scaling_family_with(eps, sign, spec.lambda0_for(eps))?;
        let report = validate_assumptions(&derive_dimensionless(&p, eps)?, &ValidationConfig::default());
        ok &= report.all_passed();
        for c in &report.checks {
            writeln!(out, "{sign},{},{},{},{},{}", c.name, c.value, c.lower, c.upper, c.passed)?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_INVALID })
}

fn first_order(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let spec = cfg.spec();
    let (n1, n2) = spec.excitations[0];
    let t_rel = spec.times[0];
    writeln!(out, "a2_sign,j,n,t_over_tau2,oracle_norm,leading_norm,rel_distance,converged")?;
    for &sign in spec.a2_sign.signs() {
        let model = model_for(cfg, sign)?;
        let t = t_rel * model.params.tau(2);
        for (j, n) in [(1, n1), (2, n2)] {
            let run = f1_oracle(&model, n, j, t, &spec.oracle_cfg)?;
            let lead = f1_leading(&model, n, j, t, &run.grid)?;
            writeln!(
                out,
                "{sign},{j},{n},{t_rel},{},{},{},{}",
                run.f.norm(),
                lead.norm(),
                run.f.distance(&lead) / run.f.norm(),
                run.diagnostics.converged
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn second_order(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let spec = cfg.spec();
    let (n1, n2) = spec.excitations[0];
    let t_rel = spec.times[0];
    let model = model_for(cfg, 1)?;
    let p = model.params;
    let t = t_rel * p.tau(2);
    let run = f2_both_excited_oracle(&model, n1, n2, t, &spec.oracle_cfg)?;
    let term = f2_leading_term(&model, n1, n2, t)?;
    let lead = term.sample(&run.grid, p.hbar(), p.mass());
    let fields = [
        ("oracle_norm", run.f.norm()),
        ("leading_norm", lead.norm()),
        ("rel_distance", run.f.distance(&lead) / run.f.norm()),
        ("centroid", run.f.centroid()),
        ("expected_centroid", term.packet.center_at(term.evolve_time, p.mass())),
        ("sigma", p.sigma()),
        ("momentum_peak", run.f.momentum_peak(&run.grid, p.hbar())),
        ("expected_momentum", term.packet.momentum),
    ];
    writeln!(out, "n1,n2,t_over_tau2,{},converged", fields.map(|f| f.0).join(","))?;
    let vals: Vec<String> = fields.iter().map(|f| f.1.to_string()).collect();
    writeln!(out, "{n1},{n2},{t_rel},{},{}", vals.join(","), run.diagnostics.converged)?;
    Ok(EXIT_OK)
}

fn write_outputs(cfg: &RunConfig, stem: &str, rows: &[ComparisonRow]) -> Result<Vec<PathBuf>> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    for f in &cfg.output.formats {
        let path = dir.join(format!(
            "{stem}.{}",
            match f {
                Format::Csv => "csv",
                Format::Json => "json",
                Format::Svg => "svg",
            }
        ));
        match f {
            Format::Csv => write_csv(rows, BufWriter::new(File::create(&path)?))?,
            Format::Json => write_json(rows, BufWriter::new(File::create(&path)?))?,
            Format::Svg => svg::emit_svg(rows, &path)?,
        }
        written.push(path);
    }
    Ok(written)
}

fn report_rows(cfg: &RunConfig, stem: &str, rows: &[ComparisonRow], out: &mut dyn Write) -> Result<u8> {
    let written = write_outputs(cfg, stem, rows)?;
    if cfg.output.verbosity > 0 {
        write_csv(rows, &mut *out)?;
    }
    if cfg.output.verbosity > 1 {
        for s in fit_slopes(rows) {
            writeln!(out, "# slopes {s:?}")?;
        }
        for p in &written {
            writeln!(out, "# wrote {}", p.display())?;
        }
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        writeln!(out, "# Lambda1 = {} a2_sign = {}: {}", r.lambda1, r.a2_sign, r.error.as_deref().unwrap_or_default())?;
    }
    Ok(if rows.iter().any(|r| r.error.is_some()) { EXIT_NUMERICAL } else { EXIT_OK })
}

fn probability(cfg: &RunConfig, both_signs: bool, out: &mut dyn Write) -> Result<u8> {
    let mut spec = cfg.spec();
    spec.lambda_sweep = vec![1.0 / spec.base_epsilon];
    if both_signs {
        spec.a2_sign = SignChoice::Both;
    }
    let rows = run_experiment(&spec)?;
    report_rows(cfg, "probability", &rows, out)
}

fn sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let rows = run_experiment(&cfg.spec())?;
    report_rows(cfg, "sweep", &rows, out)
}

/// The strip used by `oscint-demo`: `e^{-x^2 - y^2}` on `y in [-1, 1]`.
pub fn demo_strip() -> Result<StripIntegrand> {
    StripIntegrand::new(Arc::new(SeparableGaussian::standard()), 1.0, 1.0)
}

fn oscint_demo(out: &mut dyn Write) -> Result<u8> {
    let rows = rate_table(&demo_strip()?, &DEMO_LAMBDAS, DEMO_TOL)?;
    writeln!(out, "Lambda,order,error,truncation_error,error_bound")?;
    for r in &rows {
        writeln!(out, "{},{},{},{},{}", r.lambda, r.order, r.error, r.truncation_error, r.error_bound)?;
    }
    for order in 1..=3 {
        let s = rate_slope(&rows, order).map(|s| s.to_string()).unwrap_or_default();
        writeln!(out, "# slope order {order}: {s}")?;
    }
    Ok(EXIT_OK)
}
