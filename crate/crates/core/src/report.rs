//! Parameter sweeps comparing the oracle with the asymptotic formulas.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duhamel::{probability_oracle, Model, OracleConfig};
use crate::error::{invalid, Error, Result};
use crate::params::{scaling_family_with, default_lambda0, Constants};
use crate::stationary::{p_minus_bound, p_plus_leading};

/// Which side the second oscillator sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    #[default]
    Plus,
    Minus,
    Both,
}

impl SignChoice {
    pub fn signs(self) -> &'static [i32] {
        match self {
            SignChoice::Plus => &[1],
            SignChoice::Minus => &[-1],
            SignChoice::Both => &[1, -1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Epsilon for single-point runs.
    pub base_epsilon: f64,
    /// `Lambda1` targets; each is realized with `epsilon = 1 / Lambda1`.
    pub lambda_sweep: Vec<f64>,
    /// Final times in units of `tau2`.
    pub times: Vec<f64>,
    pub excitations: Vec<(usize, usize)>,
    pub a2_sign: SignChoice,
    /// Overrides `lambda0 = epsilon^3`; zero switches the coupling off.
    pub lambda0: Option<f64>,
    /// Integration-by-parts order for the opposite-side bound.
    pub bound_k: usize,
    /// Worker threads for concurrent rows; `None` uses the global pool.
    pub workers: Option<usize>,
    #[serde(skip)]
    pub oracle_cfg: OracleConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            base_epsilon: 0.05,
            lambda_sweep: vec![10.0, 20.0, 40.0],
            times: vec![1.5],
            excitations: vec![(1, 1)],
            a2_sign: SignChoice::Both,
            lambda0: None,
            bound_k: 3,
            workers: None,
            oracle_cfg: OracleConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_sweep.is_empty() || self.times.is_empty() || self.excitations.is_empty() {
            return invalid("lambda_sweep, times and excitations must be nonempty");
        }
        if let Some(l) = self.lambda_sweep.iter().find(|&&l| !(l > 1.0 && l.is_finite())) {
            return invalid(format!("Lambda1 targets must exceed 1, got {l}"));
        }
        if let Some(t) = self.times.iter().find(|&&t| !(t > 1.0 && t.is_finite())) {
            return invalid(format!("t / tau2 must exceed 1, got {t}"));
        }
        if self.excitations.iter().any(|&(a, b)| a == 0 || b == 0) {
            return invalid("excitation levels must be positive");
        }
        if !(self.base_epsilon > 0.0 && self.base_epsilon < 1.0) {
            return invalid(format!("base_epsilon must lie in (0, 1), got {}", self.base_epsilon));
        }
        if self.workers == Some(0) {
            return invalid("workers must be positive");
        }
        self.oracle_cfg.validate()
    }

    pub fn lambda0_for(&self, epsilon: f64) -> f64 {
        self.lambda0.unwrap_or_else(|| default_lambda0(epsilon))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub epsilon: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub t_over_tau2: f64,
    pub n1: usize,
    pub n2: usize,
    pub a2_sign: i32,
    pub p_oracle: Option<f64>,
    /// Leading-order probability (same-side rows).
    pub p_leading: Option<f64>,
    /// Opposite-side ceiling.
    pub p_bound: Option<f64>,
    /// Same side: `p_oracle / p_leading`. Opposite side: `P- / P+` when the
    /// matching same-side row was run.
    pub ratio: Option<f64>,
    pub converged: bool,
    pub at_noise_floor: bool,
    pub time_nodes: usize,
    pub error: Option<String>,
    pub params: Constants,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    lambda1: f64,
    t_over_tau2: f64,
    n: (usize, usize),
    sign: i32,
}

fn tasks(spec: &ExperimentSpec) -> Vec<Task> {
    let mut out = Vec::new();
    for &lambda1 in &spec.lambda_sweep {
        for &t_over_tau2 in &spec.times {
            for &n in &spec.excitations {
                for &sign in spec.a2_sign.signs() {
                    out.push(Task {
                        lambda1,
                        t_over_tau2,
                        n,
                        sign,
                    });
                }
            }
        }
    }
    out
}

fn run_task(spec: &ExperimentSpec, task: Task) -> Result<ComparisonRow> {
    let eps = 1.0 / task.lambda1;
    let params = scaling_family_with(eps, task.sign, spec.lambda0_for(eps))?;
    let model = Model::with_default_potential(params);
    let t = task.t_over_tau2 * params.tau(2);
    let (n1, n2) = task.n;
    let mut row = ComparisonRow {
        epsilon: eps,
        lambda1: params.big_lambda(1),
        lambda2: params.big_lambda(2),
        t_over_tau2: task.t_over_tau2,
        n1,
        n2,
        a2_sign: task.sign,
        p_oracle: None,
        p_leading: None,
        p_bound: None,
        ratio: None,
        converged: false,
        at_noise_floor: false,
        time_nodes: 0,
        error: None,
        params: *params.constants(),
    };
    if task.sign > 0 {
        row.p_leading = Some(p_plus_leading(&model, n1, n2)?);
    } else {
        row.p_bound = Some(p_minus_bound(&model, n1, n2, t, spec.bound_k)?.bound_value);
    }
    match probability_oracle(&model, n1, n2, t, &spec.oracle_cfg) {
        Ok(run) => {
            row.p_oracle = Some(run.probability);
            row.converged = run.run.diagnostics.converged;
            row.at_noise_floor = run.run.diagnostics.at_noise_floor;
            row.time_nodes = run.run.diagnostics.time_nodes;
            if let Some(l) = row.p_leading.filter(|&l| l > 0.0) {
                row.ratio = Some(run.probability / l);
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    Ok(row)
}

// a row that could not even be set up
fn failed_row(spec: &ExperimentSpec, task: Task, e: Error) -> ComparisonRow {
    let eps = 1.0 / task.lambda1;
    ComparisonRow {
        epsilon: eps,
        lambda1: task.lambda1,
        lambda2: 2.0 * task.lambda1,
        t_over_tau2: task.t_over_tau2,
        n1: task.n.0,
        n2: task.n.1,
        a2_sign: task.sign,
        p_oracle: None,
        p_leading: None,
        p_bound: None,
        ratio: None,
        converged: false,
        at_noise_floor: false,
        time_nodes: 0,
        error: Some(e.to_string()),
        params: Constants {
            mass: 1.0,
            osc_mass: eps,
            omega: 1.0 / eps,
            hbar: eps * eps,
            lambda: spec.lambda0_for(eps),
            a1: 1.0,
            a2: 2.0 * task.sign as f64,
            sigma: eps,
            p0: 1.0,
        },
    }
}

/// One row per `(Lambda1, t, (n1, n2), sign)` in that nesting order. Rows
/// run concurrently; failures are recorded in the row and never abort the
/// sweep.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ComparisonRow>> {
    spec.validate()?;
    let list = tasks(spec);
    let run = || -> Vec<ComparisonRow> {
        list.par_iter()
            .map(|&task| run_task(spec, task).unwrap_or_else(|e| failed_row(spec, task, e)))
            .collect()
    };
    let mut rows = match spec.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    };
    attach_minus_ratios(&mut rows);
    Ok(rows)
}

fn attach_minus_ratios(rows: &mut [ComparisonRow]) {
    let plus: Vec<(f64, f64, usize, usize, f64)> = rows
        .iter()
        .filter(|r| r.a2_sign > 0)
        .filter_map(|r| r.p_oracle.map(|p| (r.lambda1, r.t_over_tau2, r.n1, r.n2, p)))
        .collect();
    for r in rows.iter_mut().filter(|r| r.a2_sign < 0) {
        let m = plus
            .iter()
            .find(|p| p.0 == r.lambda1 && p.1 == r.t_over_tau2 && p.2 == r.n1 && p.3 == r.n2);
        if let (Some(&(.., pp)), Some(pm)) = (m, r.p_oracle) {
            if pp > 0.0 {
                r.ratio = Some(pm / pp);
            }
        }
    }
}

/// Least-squares slope of `log ys` against `log xs`.
pub fn fit_rate(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return invalid(format!("need at least 3 matched points, got {} and {}", xs.len(), ys.len()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return invalid("rate fits need positive finite data");
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return invalid("rate fit with constant abscissae");
    }
    Ok(crate::oscint::loglog_slope(xs, ys))
}

/// Fitted slopes over `Lambda1` for one `(t, n1, n2)` group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub t_over_tau2: f64,
    pub n1: usize,
    pub n2: usize,
    /// Slope of `|P+ / p_leading - 1|`.
    pub leading_deviation: Option<f64>,
    /// Slope of `P- / P+`.
    pub suppression: Option<f64>,
}

/// Slopes per group, using only converged rows.
pub fn fit_slopes(rows: &[ComparisonRow]) -> Vec<SlopeFit> {
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for r in rows {
        let key = (r.t_over_tau2, r.n1, r.n2);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    groups
        .into_iter()
        .map(|(t, n1, n2)| {
            let pick = |sign: i32, f: &dyn Fn(&ComparisonRow) -> Option<f64>| -> Option<f64> {
                let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                    .iter()
                    .filter(|r| r.t_over_tau2 == t && r.n1 == n1 && r.n2 == n2 && r.a2_sign == sign && r.converged)
                    .filter_map(|r| f(r).map(|y| (r.lambda1, y)))
                    .unzip();
                fit_rate(&xs, &ys).ok()
            };
            SlopeFit {
                t_over_tau2: t,
                n1,
                n2,
                leading_deviation: pick(1, &|r| r.ratio.map(|q| (q - 1.0).abs())),
                suppression: pick(-1, &|r| r.ratio),
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_default()
}

pub const CSV_HEADER: [&str; 12] = [
    "epsilon",
    "Lambda1",
    "Lambda2",
    "t_over_tau2",
    "n1",
    "n2",
    "a2_sign",
    "p_oracle",
    "p_leading",
    "p_bound",
    "ratio",
    "converged",
];

pub fn write_csv<W: Write>(rows: &[ComparisonRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    out.write_record(CSV_HEADER).map_err(ser)?;
    for r in rows {
        out.write_record([
            format!("{}", r.epsilon),
            format!("{}", r.lambda1),
            format!("{}", r.lambda2),
            format!("{}", r.t_over_tau2),
            r.n1.to_string(),
            r.n2.to_string(),
            r.a2_sign.to_string(),
            opt(r.p_oracle),
            opt(r.p_leading),
            opt(r.p_bound),
            opt(r.ratio),
            r.converged.to_string(),
        ])
        .map_err(ser)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    rows: &'a [ComparisonRow],
    slopes: Vec<SlopeFit>,
}

pub fn write_json<W: Write>(rows: &[ComparisonRow], w: W) -> Result<()> {
    let doc = JsonReport {
        rows,
        slopes: fit_slopes(rows),
    };
    serde_json::to_writer_pretty(w, &doc).map_err(|e| Error::Serialization(e.to_string()))
}
