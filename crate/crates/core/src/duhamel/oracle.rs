use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Branch, Grid, GridFunction, Model, OracleConfig, TimeRule, HERMITE_TAIL};
use crate::error::{invalid, Error, Result};
use crate::quad::{gauss_legendre, simpson_weights, IntegrationMatrix};
use crate::specfun::GaussianPacket;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Convergence and boundary diagnostics of one oracle evaluation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Diagnostics {
    pub time_nodes: usize,
    /// Relative L2 change against the run with half the nodes.
    pub change: Option<f64>,
    pub converged: bool,
    pub boundary_ratio: f64,
    /// Estimated L2 size of accumulated roundoff in the result.
    pub noise_floor: f64,
    /// The result is not distinguishable from roundoff.
    pub at_noise_floor: bool,
}

/// Unit roundoff times a generous FFT growth factor.
fn roundoff(n: usize) -> f64 {
    8.0 * f64::EPSILON * (n as f64).log2()
}

/// Results within this factor of the noise floor count as roundoff.
const NOISE_MARGIN: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub f: GridFunction,
    pub grid: Grid,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct ProbabilityRun {
    pub probability: f64,
    pub run: OracleRun,
}

/// Grid covering the ballistic range of both halves of the initial state,
/// both oscillators, plus `domain_pad` spread widths.
pub fn oracle_grid(model: &Model, t: f64, cfg: &OracleConfig) -> Result<Grid> {
    let p = &model.params;
    let tau = p.hbar() * t / (p.mass() * p.sigma() * p.sigma());
    let spread = p.sigma() * (1.0 + tau * tau).sqrt();
    let reach = p.gamma() * (model.potential.support_radius() + HERMITE_TAIL);
    let a_max = model.center(1).abs().max(model.center(2).abs()) + reach;
    let half = (p.v0() * t).max(a_max) + cfg.domain_pad * spread;
    Grid::symmetric(half, cfg.n_points)
}

// A coupling function sampled on the grid where it is nonzero.
struct Sampled {
    range: Range<usize>,
    values: Vec<f64>,
}

fn sample_coupling(model: &Model, grid: &Grid, j: usize, m: usize, n: usize) -> Result<Sampled> {
    let c = model.coupling(j, m, n)?;
    let (lo, hi) = c.support();
    let range = grid.index_range(lo, hi);
    let values = range.clone().into_par_iter().map(|i| c.evaluate(grid.x(i))).collect();
    Ok(Sampled { range, values })
}

struct Ctx<'a> {
    model: &'a Model,
    grid: &'a Grid,
    packets: Vec<GaussianPacket>,
    ks: Vec<f64>,
}

impl<'a> Ctx<'a> {
    fn new(model: &'a Model, grid: &'a Grid, branch: Branch) -> Ctx<'a> {
        Ctx {
            model,
            grid,
            packets: model.initial_packets(branch),
            ks: grid.ks(),
        }
    }

    // exp(sign * i hbar k^2 s / 2M) applied in place
    fn kinetic(&self, buf: &mut [Complex64], s: f64, sign: f64) {
        let p = &self.model.params;
        let c = sign * p.hbar() * s / (2.0 * p.mass());
        for (z, &k) in buf.iter_mut().zip(&self.ks) {
            *z *= Complex64::from_polar(1.0, c * k * k);
        }
    }

    fn psi(&self, x: f64, s: f64) -> Complex64 {
        let p = &self.model.params;
        self.packets.iter().map(|q| q.evolved(x, s, p.hbar(), p.mass())).sum()
    }

    /// `e^{i nu omega s} I(s) psi` in the DFT domain, where `I(s)` is the
    /// interaction-picture coupling summed over `sources`.
    /// The second value is the position-space L2 size of the product, the
    /// scale against which roundoff is measured.
    fn first_integrand(&self, sources: &[&Sampled], nu: f64, s: f64) -> (Vec<Complex64>, f64) {
        let mut buf = vec![ZERO; self.grid.len()];
        for src in sources {
            for (i, &v) in src.range.clone().zip(&src.values) {
                buf[i] += v * self.psi(self.grid.x(i), s);
            }
        }
        let scale = (buf.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt();
        self.grid.fft(&mut buf);
        self.kinetic(&mut buf, s, 1.0);
        let ph = Complex64::from_polar(1.0, nu * self.model.params.omega() * s);
        buf.iter_mut().for_each(|z| *z *= ph);
        (buf, scale)
    }

    /// `e^{i n1 w s} I_1(s) h_2 + e^{i n2 w s} I_2(s) h_1` in the DFT domain.
    /// The scale is the size the product would have if each first-order
    /// wave sat at its peak value on the coupling support: roundoff in
    /// the waves is spread over the whole grid, so this is what bounds the
    /// error when the true product is tiny.
    fn second_integrand(
        &self,
        c1: &Sampled,
        c2: &Sampled,
        n: [f64; 2],
        h: [&[Complex64]; 2],
        s: f64,
    ) -> (Vec<Complex64>, f64) {
        let back = |hj: &[Complex64]| {
            let mut u = hj.to_vec();
            self.kinetic(&mut u, s, -1.0);
            self.grid.ifft(&mut u);
            u
        };
        let u1 = back(h[0]);
        let u2 = back(h[1]);
        let w = self.model.params.omega();
        let e1 = Complex64::from_polar(1.0, n[0] * w * s);
        let e2 = Complex64::from_polar(1.0, n[1] * w * s);
        let mut buf = vec![ZERO; self.grid.len()];
        for (i, &v) in c1.range.clone().zip(&c1.values) {
            buf[i] += e1 * v * u2[i];
        }
        for (i, &v) in c2.range.clone().zip(&c2.values) {
            buf[i] += e2 * v * u1[i];
        }
        let peak = |u: &[Complex64]| u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let l2 = |c: &Sampled| c.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = self.grid.dx().sqrt() * (peak(&u2) * l2(c1) + peak(&u1) * l2(c2));
        self.grid.fft(&mut buf);
        self.kinetic(&mut buf, s, 1.0);
        (buf, scale)
    }

    /// `e^{-i t K_0 / hbar}` of a DFT-domain vector, returned in position space.
    fn finish(&self, mut buf: Vec<Complex64>, t: f64, prefactor: Complex64) -> GridFunction {
        self.kinetic(&mut buf, t, -1.0);
        self.grid.ifft(&mut buf);
        buf.iter_mut().for_each(|z| *z *= prefactor);
        GridFunction {
            x_min: self.grid.x_min(),
            x_max: self.grid.x_max(),
            samples: buf,
        }
    }
}

// Nodes, outer weights and the cumulative (inner) rule on [0, t].
struct Scheme {
    s: Vec<f64>,
    w: Vec<f64>,
    rule: Cumulative,
}

enum Cumulative {
    Simpson { h: f64 },
    Panels { half: f64, mat: IntegrationMatrix },
}

fn scheme(rule: TimeRule, t: f64, intervals: usize) -> Scheme {
    match rule {
        TimeRule::Simpson => {
            let h = t / intervals as f64;
            Scheme {
                s: (0..=intervals).map(|i| i as f64 * h).collect(),
                w: simpson_weights(intervals, h),
                rule: Cumulative::Simpson { h },
            }
        }
        TimeRule::GaussLegendre { order } => {
            let panels = intervals.div_ceil(order).max(1);
            let width = t / panels as f64;
            let (x, wt) = gauss_legendre(order);
            let mut s = Vec::with_capacity(panels * order);
            let mut w = Vec::with_capacity(panels * order);
            for p in 0..panels {
                let lo = p as f64 * width;
                for (xi, wi) in x.iter().zip(&wt) {
                    s.push(lo + 0.5 * width * (xi + 1.0));
                    w.push(0.5 * width * wi);
                }
            }
            Scheme {
                s,
                w,
                rule: Cumulative::Panels {
                    half: 0.5 * width,
                    mat: IntegrationMatrix::new(order),
                },
            }
        }
    }
}

fn axpy(acc: &mut [Complex64], c: f64, x: &[Complex64]) {
    acc.iter_mut().zip(x).for_each(|(a, b)| *a += c * b);
}

/// Streaming cumulative integral `H(s_i) = \int_0^{s_i} f`; node values are
/// pushed in order and finished `H` values are released as soon as the
/// rule allows.
struct Accumulator<'a> {
    rule: &'a Cumulative,
    len: usize,
    f_hist: Vec<(usize, Vec<Complex64>)>,
    h_hist: Vec<Vec<Complex64>>,
    base: Vec<Complex64>,
}

impl<'a> Accumulator<'a> {
    fn new(rule: &'a Cumulative, len: usize) -> Self {
        Accumulator {
            rule,
            len,
            f_hist: Vec::new(),
            h_hist: Vec::new(),
            base: vec![ZERO; len],
        }
    }

    fn push(&mut self, i: usize, f: Vec<Complex64>) -> Vec<(usize, Vec<Complex64>)> {
        match self.rule {
            Cumulative::Simpson { h } => {
                let h = *h;
                let mut out = Vec::new();
                if i == 0 {
                    let z = vec![ZERO; self.len];
                    self.h_hist.push(z.clone());
                    out.push((0, z));
                } else if i == 2 {
                    let (f0, f1) = (&self.f_hist[0].1, &self.f_hist[1].1);
                    let mut h1 = vec![ZERO; self.len];
                    axpy(&mut h1, 5.0 * h / 12.0, f0);
                    axpy(&mut h1, 8.0 * h / 12.0, f1);
                    axpy(&mut h1, -h / 12.0, &f);
                    let mut h2 = vec![ZERO; self.len];
                    axpy(&mut h2, h / 3.0, f0);
                    axpy(&mut h2, 4.0 * h / 3.0, f1);
                    axpy(&mut h2, h / 3.0, &f);
                    self.h_hist.push(h1.clone());
                    self.h_hist.push(h2.clone());
                    out.push((1, h1));
                    out.push((2, h2));
                } else if i > 2 {
                    let n = self.f_hist.len();
                    let mut hi = self.h_hist[self.h_hist.len() - 2].clone();
                    axpy(&mut hi, h / 3.0, &self.f_hist[n - 2].1);
                    axpy(&mut hi, 4.0 * h / 3.0, &self.f_hist[n - 1].1);
                    axpy(&mut hi, h / 3.0, &f);
                    self.h_hist.push(hi.clone());
                    out.push((i, hi));
                }
                self.f_hist.push((i, f));
                if self.f_hist.len() > 2 && i > 2 {
                    self.f_hist.remove(0);
                }
                if self.h_hist.len() > 2 {
                    self.h_hist.remove(0);
                }
                out
            }
            Cumulative::Panels { half, mat } => {
                self.f_hist.push((i, f));
                let m = mat.nodes.len();
                if self.f_hist.len() < m {
                    return Vec::new();
                }
                let mut out = Vec::with_capacity(m);
                for (l, row) in mat.entries.iter().enumerate() {
                    let mut hl = self.base.clone();
                    for (c, (_, fj)) in row.iter().zip(&self.f_hist) {
                        axpy(&mut hl, half * c, fj);
                    }
                    out.push((self.f_hist[l].0, hl));
                }
                for (wj, (_, fj)) in mat.weights.iter().zip(&self.f_hist) {
                    axpy(&mut self.base, half * wj, fj);
                }
                self.f_hist.clear();
                out
            }
        }
    }
}

fn interval_count(model: &Model, t: f64, cfg: &OracleConfig) -> Result<usize> {
    let p = &model.params;
    let n = match cfg.n_time_nodes {
        Some(n) => n,
        None => {
            let transit = p.gamma() / p.v0();
            let raw = (t / transit * cfg.nodes_per_transit).ceil() as usize;
            // multiple of 4 so that the halved check still has an even count
            raw.div_ceil(4).max(1) * 4
        }
    };
    if n > cfg.max_time_nodes {
        return Err(Error::CostGuard(format!(
            "{n} time nodes requested, limit is {}",
            cfg.max_time_nodes
        )));
    }
    Ok(n)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("time must be positive, got {t}"));
    }
    Ok(())
}

// First-order DFT-domain integral `\int_0^t e^{i nu w s} I(s) psi ds`.
fn first_total(ctx: &Ctx, sources: &[&Sampled], nu: f64, sch: &Scheme, block: usize) -> (Vec<Complex64>, f64) {
    let mut total = vec![ZERO; ctx.grid.len()];
    let mut scale = 0.0;
    if sources.is_empty() {
        return (total, scale);
    }
    let idx: Vec<usize> = (0..sch.s.len()).collect();
    for chunk in idx.chunks(block) {
        let vals: Vec<(Vec<Complex64>, f64)> = chunk
            .par_iter()
            .map(|&i| ctx.first_integrand(sources, nu, sch.s[i]))
            .collect();
        for (&i, (v, sc)) in chunk.iter().zip(&vals) {
            axpy(&mut total, sch.w[i], v);
            scale += sch.w[i].abs() * sc;
        }
    }
    (total, scale)
}

// Second-order DFT-domain integral with both first-order integrals
// accumulated on the same nodes.
fn second_total(ctx: &Ctx, c: [&Sampled; 2], n: [usize; 2], sch: &Scheme, block: usize) -> (Vec<Complex64>, f64) {
    let len = ctx.grid.len();
    let nf = [n[0] as f64, n[1] as f64];
    let mut acc1 = Accumulator::new(&sch.rule, len);
    let mut acc2 = Accumulator::new(&sch.rule, len);
    let mut pend1: Vec<(usize, Vec<Complex64>)> = Vec::new();
    let mut pend2: Vec<(usize, Vec<Complex64>)> = Vec::new();
    let mut total = vec![ZERO; len];
    let mut scale = 0.0;
    let idx: Vec<usize> = (0..sch.s.len()).collect();
    for chunk in idx.chunks(block) {
        let vals: Vec<(Vec<Complex64>, Vec<Complex64>)> = chunk
            .par_iter()
            .map(|&i| {
                let s = sch.s[i];
                (ctx.first_integrand(&[c[0]], nf[0], s).0, ctx.first_integrand(&[c[1]], nf[1], s).0)
            })
            .collect();
        for (&i, (g1, g2)) in chunk.iter().zip(vals) {
            pend1.extend(acc1.push(i, g1));
            pend2.extend(acc2.push(i, g2));
        }
        // both accumulators release the same indices
        let ready: Vec<(usize, Vec<Complex64>, Vec<Complex64>)> = pend1
            .drain(..)
            .zip(pend2.drain(..))
            .map(|((i, h1), (i2, h2))| {
                debug_assert_eq!(i, i2);
                (i, h1, h2)
            })
            .collect();
        let outs: Vec<(Vec<Complex64>, f64)> = ready
            .par_iter()
            .map(|(i, h1, h2)| ctx.second_integrand(c[0], c[1], nf, [h1, h2], sch.s[*i]))
            .collect();
        for ((i, _, _), (v, sc)) in ready.iter().zip(&outs) {
            axpy(&mut total, sch.w[*i], v);
            scale += sch.w[*i].abs() * sc;
        }
    }
    (total, scale)
}

fn with_convergence<F>(model: &Model, t: f64, cfg: &OracleConfig, eval: F) -> Result<OracleRun>
where
    F: Fn(&Ctx, &Scheme) -> (GridFunction, f64),
{
    cfg.validate()?;
    check_time(t)?;
    let grid = oracle_grid(model, t, cfg)?;
    let ctx = Ctx::new(model, &grid, cfg.branch);
    let n = interval_count(model, t, cfg)?;
    let (f, noise_floor) = eval(&ctx, &scheme(cfg.quadrature_rule, t, n));
    let boundary_ratio = f.boundary_ratio();
    if cfg.check_boundary {
        // roundoff is spread evenly over the grid
        let floor_amp = noise_floor / (grid.x_max() - grid.x_min()).sqrt();
        f.check_boundary_above(floor_amp)?;
    }
    let norm = f.norm();
    let mut converged = true;
    let change = if cfg.check_convergence {
        let (coarse, _) = eval(&ctx, &scheme(cfg.quadrature_rule, t, n / 2));
        let d = f.distance(&coarse);
        // differences at roundoff level say nothing about the time rule
        converged = d <= cfg.rtol * norm || d <= NOISE_MARGIN * noise_floor;
        Some(if norm > 0.0 { d / norm } else { 0.0 })
    } else {
        None
    };
    if cfg.strict && !converged {
        return Err(Error::TimeQuadrature {
            change: change.unwrap_or(f64::NAN),
            rtol: cfg.rtol,
        });
    }
    let time_nodes = match cfg.quadrature_rule {
        TimeRule::Simpson => n + 1,
        TimeRule::GaussLegendre { order } => n.div_ceil(order).max(1) * order,
    };
    Ok(OracleRun {
        f,
        grid,
        diagnostics: Diagnostics {
            time_nodes,
            change,
            converged,
            boundary_ratio,
            noise_floor,
            at_noise_floor: norm <= NOISE_MARGIN * noise_floor,
        },
    })
}

/// First Duhamel iterate of a general component `f^{(1)}_{n1 n2}(t)`.
///
/// The zeroth iterate lives only in the ground component `(0, 0)` and the
/// coupling changes one oscillator index at a time, so the sum over
/// intermediate components keeps oscillator 1's term only when `n2 = 0`
/// and oscillator 2's only when `n1 = 0`.
pub fn first_order_component(model: &Model, n1: usize, n2: usize, t: f64, cfg: &OracleConfig) -> Result<OracleRun> {
    let p = model.params;
    let grid = oracle_grid(model, t, cfg)?;
    let mut sources = Vec::new();
    if n2 == 0 {
        sources.push(sample_coupling(model, &grid, 1, n1, 0)?);
    }
    if n1 == 0 {
        sources.push(sample_coupling(model, &grid, 2, n2, 0)?);
    }
    let nu = (n1 + n2) as f64;
    let pref = -I * (p.lambda() / p.hbar()) * Complex64::from_polar(1.0, -p.omega() * (nu + 1.0) * t);
    let refs: Vec<&Sampled> = sources.iter().collect();
    with_convergence(model, t, cfg, |ctx, sch| {
        let (total, scale) = first_total(ctx, &refs, nu, sch, cfg.block);
        let floor = pref.norm() * scale * roundoff(ctx.grid.len());
        (ctx.finish(total, t, pref), floor)
    })
}

/// `f^{(1)}_{n0}` (`j = 1`) or `f^{(1)}_{0n}` (`j = 2`).
pub fn f1_oracle(model: &Model, n: usize, j: usize, t: f64, cfg: &OracleConfig) -> Result<OracleRun> {
    if n == 0 {
        return invalid("excitation index must be positive");
    }
    match j {
        1 => first_order_component(model, n, 0, t, cfg),
        2 => first_order_component(model, 0, n, t, cfg),
        _ => invalid(format!("oscillator index must be 1 or 2, got {j}")),
    }
}

/// Second iterate `f^{(2)}_{n1 n2}(t)` with both oscillators excited.
pub fn f2_both_excited_oracle(model: &Model, n1: usize, n2: usize, t: f64, cfg: &OracleConfig) -> Result<OracleRun> {
    if n1 == 0 || n2 == 0 {
        return invalid("both excitation indices must be positive");
    }
    let p = model.params;
    let grid = oracle_grid(model, t, cfg)?;
    let c1 = sample_coupling(model, &grid, 1, n1, 0)?;
    let c2 = sample_coupling(model, &grid, 2, n2, 0)?;
    let g = p.lambda() / p.hbar();
    let pref = -(g * g) * Complex64::from_polar(1.0, -p.omega() * (n1 + n2 + 1) as f64 * t);
    with_convergence(model, t, cfg, |ctx, sch| {
        let (total, scale) = second_total(ctx, [&c1, &c2], [n1, n2], sch, cfg.block);
        let floor = pref.norm() * scale * roundoff(ctx.grid.len());
        (ctx.finish(total, t, pref), floor)
    })
}

/// Joint excitation probability `\int |f^{(2)}_{n1 n2}(R, t)|^2 dR`.
pub fn probability_oracle(model: &Model, n1: usize, n2: usize, t: f64, cfg: &OracleConfig) -> Result<ProbabilityRun> {
    let run = f2_both_excited_oracle(model, n1, n2, t, cfg)?;
    Ok(ProbabilityRun {
        probability: run.f.norm_sqr(),
        run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::scaling_family;
    use approx::assert_relative_eq;

    fn small_cfg() -> OracleConfig {
        OracleConfig {
            n_points: 1 << 12,
            ..Default::default()
        }
    }

    #[test]
    fn simpson_cumulative_is_exact_for_cubics() {
        let sch = scheme(TimeRule::Simpson, 2.0, 8);
        let mut acc = Accumulator::new(&sch.rule, 1);
        let f = |s: f64| s * s * s - s + 1.0;
        let big_f = |s: f64| s.powi(4) / 4.0 - s * s / 2.0 + s;
        let mut got = Vec::new();
        for (i, &s) in sch.s.iter().enumerate() {
            got.extend(acc.push(i, vec![Complex64::new(f(s), 0.0)]));
        }
        assert_eq!(got.len(), sch.s.len());
        for (i, h) in got {
            // odd nodes inherit the quadratic start-up step
            let tol = if i % 2 == 1 { 1e-2 } else { 1e-12 };
            assert!((h[0].re - big_f(sch.s[i])).abs() < tol, "i={i}");
        }
    }

    #[test]
    fn panel_cumulative_is_exact_for_polynomials() {
        let sch = scheme(TimeRule::GaussLegendre { order: 6 }, 3.0, 18);
        let mut acc = Accumulator::new(&sch.rule, 1);
        let f = |s: f64| 5.0 * s.powi(4) - 2.0 * s;
        let big_f = |s: f64| s.powi(5) - s * s;
        let mut got = Vec::new();
        for (i, &s) in sch.s.iter().enumerate() {
            got.extend(acc.push(i, vec![Complex64::new(f(s), 0.0)]));
        }
        assert_eq!(got.len(), 18);
        for (i, h) in got {
            assert_relative_eq!(h[0].re, big_f(sch.s[i]), max_relative = 1e-11);
        }
        let w: f64 = sch.w.iter().sum();
        assert_relative_eq!(w, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let p = scaling_family(0.1, 1).unwrap().with_lambda(0.0).unwrap();
        let m = Model::with_default_potential(p);
        let r = f1_oracle(&m, 1, 1, 1.5, &small_cfg()).unwrap();
        assert_eq!(r.f.max_abs(), 0.0);
        let q = probability_oracle(&m, 1, 1, 3.0, &small_cfg()).unwrap();
        assert_eq!(q.probability, 0.0);
    }

    #[test]
    fn both_excited_first_order_component_vanishes() {
        let m = Model::with_default_potential(scaling_family(0.1, 1).unwrap());
        let r = first_order_component(&m, 1, 1, 3.0, &small_cfg()).unwrap();
        assert_eq!(r.f.max_abs(), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = Model::with_default_potential(scaling_family(0.1, 1).unwrap());
        assert!(f1_oracle(&m, 0, 1, 1.0, &small_cfg()).is_err());
        assert!(f1_oracle(&m, 1, 3, 1.0, &small_cfg()).is_err());
        assert!(f1_oracle(&m, 1, 1, -1.0, &small_cfg()).is_err());
        assert!(f2_both_excited_oracle(&m, 0, 1, 1.0, &small_cfg()).is_err());
        let guard = OracleConfig {
            max_time_nodes: 10,
            ..small_cfg()
        };
        assert!(matches!(
            f1_oracle(&m, 1, 1, 1.0, &guard).unwrap_err(),
            Error::CostGuard(_)
        ));
    }

    #[test]
    fn first_order_is_linear_in_lambda() {
        let p = scaling_family(0.1, 1).unwrap();
        let m1 = Model::with_default_potential(p);
        let m2 = Model::with_default_potential(p.with_lambda(2.0 * p.lambda()).unwrap());
        let a = f1_oracle(&m1, 1, 1, 1.5, &small_cfg()).unwrap().f;
        let b = f1_oracle(&m2, 1, 1, 1.5, &small_cfg()).unwrap().f;
        let mut a2 = a.clone();
        a2.scale(Complex64::new(2.0, 0.0));
        assert!(a2.distance(&b) <= 1e-13 * b.norm());
    }

    #[test]
    fn rules_agree() {
        let m = Model::with_default_potential(scaling_family(0.1, 1).unwrap());
        let a = f1_oracle(&m, 1, 1, 1.5, &small_cfg()).unwrap();
        let gl = OracleConfig {
            quadrature_rule: TimeRule::GaussLegendre { order: 8 },
            ..small_cfg()
        };
        let b = f1_oracle(&m, 1, 1, 1.5, &gl).unwrap();
        assert!(a.diagnostics.converged && b.diagnostics.converged);
        assert!(a.f.distance(&b.f) < 1e-6 * a.f.norm(), "{}", a.f.distance(&b.f) / a.f.norm());
    }
}
