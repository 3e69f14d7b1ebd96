//! Large-`Lambda` expansion of strip integrals with a bilinear phase,
//!
//! ```text
//! J(Lambda) = \int dx \int_{-nu}^{mu} dy f(x, y) e^{i Lambda x y},
//! ```
//!
//! truncated after `order - 1` terms of
//! `(2 pi / Lambda) sum_m (i / Lambda)^m / m! (d_x d_y)^m f(0, 0)`, together
//! with explicit bounds `K_p` such that `|J - truncation| <= K_p / Lambda^p`.
//!
//! The bounds follow from writing `f(x, y) = f(x, 0) + y \int_0^1 f_y(x, ty) dt`,
//! integrating the first piece exactly in `y` and the second by parts in `x`.
//! The `f(x, 0)` piece is controlled through
//! `h(x) = (f(x, 0) - f(0, 0)) / x`, whose derivatives satisfy
//! `||h'||_1 <= ||f_xx||_1` and `||h''||_1 <= ||f_xxx||_1 / 2`; the `y`-remainder is
//! controlled by Cauchy-Schwarz in `y` on `[-nu, mu]`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A smooth function on the plane with analytic mixed partials.
pub trait StripFunction: Send + Sync {
    /// `d_x^dx d_y^dy f(x, y)`.
    fn partial(&self, dx: usize, dy: usize, x: f64, y: f64) -> Complex64;

    /// Half-width in `x` beyond which `f` and its partials are negligible.
    fn decay_radius(&self) -> f64;

    fn value(&self, x: f64, y: f64) -> Complex64 {
        self.partial(0, 0, x, y)
    }
}

// d^k/dx^k [p(x) e^{-a x^2}] = q(x) e^{-a x^2}; returns q.
fn gauss_poly_deriv(p: &[f64], a: f64, k: usize) -> Vec<f64> {
    let mut q = p.to_vec();
    for _ in 0..k {
        let mut r = vec![0.0; q.len() + 1];
        for (i, &c) in q.iter().enumerate() {
            if i > 0 {
                r[i - 1] += c * i as f64;
            }
            r[i + 1] -= 2.0 * a * c;
        }
        q = r;
    }
    q
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `scale * p(x) e^{-ax x^2} * q(y) e^{-ay y^2}` with polynomial coefficients
/// in ascending order.
#[derive(Debug, Clone)]
pub struct SeparableGaussian {
    pub px: Vec<f64>,
    pub ax: f64,
    pub py: Vec<f64>,
    pub ay: f64,
    pub scale: Complex64,
}

impl SeparableGaussian {
    /// `e^{-x^2 - y^2}`.
    pub fn standard() -> Self {
        SeparableGaussian {
            px: vec![1.0],
            ax: 1.0,
            py: vec![1.0],
            ay: 1.0,
            scale: Complex64::new(1.0, 0.0),
        }
    }
}

impl StripFunction for SeparableGaussian {
    fn partial(&self, dx: usize, dy: usize, x: f64, y: f64) -> Complex64 {
        let fx = horner(&gauss_poly_deriv(&self.px, self.ax, dx), x) * (-self.ax * x * x).exp();
        let fy = horner(&gauss_poly_deriv(&self.py, self.ay, dy), y) * (-self.ay * y * y).exp();
        self.scale * (fx * fy)
    }

    fn decay_radius(&self) -> f64 {
        // e^{-a x^2} below 1e-18 times the polynomial growth
        let deg = self.px.len() as f64 + 4.0;
        ((41.5 + deg * 2.0) / self.ax).sqrt()
    }
}

/// Linear combination `sum c_i f_i`.
#[derive(Clone, Default)]
pub struct Sum {
    pub terms: Vec<(Complex64, Arc<dyn StripFunction>)>,
}

impl Sum {
    pub fn new() -> Self {
        Sum::default()
    }

    pub fn with(mut self, c: Complex64, f: Arc<dyn StripFunction>) -> Self {
        self.terms.push((c, f));
        self
    }
}

impl StripFunction for Sum {
    fn partial(&self, dx: usize, dy: usize, x: f64, y: f64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.partial(dx, dy, x, y)).sum()
    }

    fn decay_radius(&self) -> f64 {
        self.terms.iter().map(|(_, f)| f.decay_radius()).fold(0.0, f64::max)
    }
}

/// `f` on the strip `-nu <= y <= mu`.
#[derive(Clone)]
pub struct StripIntegrand {
    pub f: Arc<dyn StripFunction>,
    pub mu: f64,
    pub nu: f64,
}

impl std::fmt::Debug for StripIntegrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StripIntegrand")
            .field("mu", &self.mu)
            .field("nu", &self.nu)
            .finish_non_exhaustive()
    }
}

impl StripIntegrand {
    pub fn new(f: Arc<dyn StripFunction>, mu: f64, nu: f64) -> Result<Self> {
        if !(mu > 0.0 && nu > 0.0 && mu.is_finite() && nu.is_finite()) {
            return invalid(format!("strip needs positive finite mu, nu; got {mu}, {nu}"));
        }
        let s = StripIntegrand { f, mu, nu };
        let n = s.norms(3)?;
        if !n.all_finite() {
            return Err(Error::Quadrature("strip norms are not finite".into()));
        }
        Ok(s)
    }

    /// Weighted norms entering the remainder bounds, each with its
    /// estimated truncation tail already added.
    pub fn norms(&self, order: usize) -> Result<StripNorms> {
        let xr = self.f.decay_radius();
        let tol = Tolerance::new(1e-15, 1e-10);
        let line = |dx: usize, dy: usize| -> Result<f64> {
            let g = |x: f64| self.f.partial(dx, dy, x, 0.0).norm();
            let core = quad::integrate_real(g, -xr, 0.0, tol)?.value + quad::integrate_real(g, 0.0, xr, tol)?.value;
            let tail =
                quad::integrate_real(g, -2.0 * xr, -xr, tol)?.value + quad::integrate_real(g, xr, 2.0 * xr, tol)?.value;
            Ok(core + tail)
        };
        let (mu, nu) = (self.mu, self.nu);
        let strip = |k: usize| -> Result<f64> {
            // \int dx ||d_x^k d_y^k f(x, .)||_{L^2(-nu, mu)}
            let g = |x: f64| {
                quad::integrate_real(|y| self.f.partial(k, k, x, y).norm_sqr(), -nu, mu, tol)
                    .map(|e| e.value.sqrt())
                    .unwrap_or(f64::NAN)
            };
            let core = quad::integrate_real(g, -xr, 0.0, tol)?.value + quad::integrate_real(g, 0.0, xr, tol)?.value;
            let tail =
                quad::integrate_real(g, -2.0 * xr, -xr, tol)?.value + quad::integrate_real(g, xr, 2.0 * xr, tol)?.value;
            Ok(core + tail)
        };
        let mut n = StripNorms {
            fxx: line(2, 0)?,
            strip1: strip(1)?,
            ..Default::default()
        };
        if order >= 2 {
            n.fxxy = line(2, 1)?;
            n.strip2 = strip(2)?;
        }
        if order >= 3 {
            n.fxxx = line(3, 0)?;
            n.fxxxyy = line(3, 2)?;
            n.strip3 = strip(3)?;
        }
        Ok(n)
    }
}

/// `L^1` norms on the line `y = 0` and strip norms
/// `\int dx ||d_x^k d_y^k f(x, .)||_{L^2(-nu, mu)}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct StripNorms {
    pub fxx: f64,
    pub fxxy: f64,
    pub fxxx: f64,
    pub fxxxyy: f64,
    pub strip1: f64,
    pub strip2: f64,
    pub strip3: f64,
}

impl StripNorms {
    fn all_finite(&self) -> bool {
        [
            self.fxx,
            self.fxxy,
            self.fxxx,
            self.fxxxyy,
            self.strip1,
            self.strip2,
            self.strip3,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub order: usize,
    pub lambda: f64,
    /// The `order - 1` retained terms, each including its power of `Lambda`.
    pub leading_terms: Vec<Complex64>,
    /// The first omitted term of the series.
    pub next_term: Complex64,
    /// Bound on `K_order`: `|J - sum(leading_terms)| <= remainder_bound / Lambda^order`.
    pub remainder_bound: f64,
    /// `sum(leading_terms) + next_term`.
    pub value_estimate: Complex64,
    pub norms: StripNorms,
}

impl ExpansionResult {
    pub fn truncation(&self) -> Complex64 {
        self.leading_terms.iter().sum()
    }

    /// `remainder_bound / Lambda^order`.
    pub fn error_bound(&self) -> f64 {
        self.remainder_bound / self.lambda.powi(self.order as i32)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// `m`-th series term `(2 pi / Lambda) (i / Lambda)^m / m! (d_x d_y)^m f(0, 0)`.
pub fn series_term(f: &dyn StripFunction, lambda: f64, m: usize) -> Complex64 {
    let c = (2.0 * PI / lambda) * I.powu(m as u32) / (lambda.powi(m as i32) * factorial(m));
    c * f.partial(m, m, 0.0, 0.0)
}

pub fn expand_strip(s: &StripIntegrand, lambda: f64, order: usize) -> Result<ExpansionResult> {
    if !(1..=3).contains(&order) {
        return invalid(format!("expansion order must be 1, 2 or 3, got {order}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("Lambda must be positive, got {lambda}"));
    }
    let norms = s.norms(order)?;
    let f = s.f.as_ref();
    let (mu, nu) = (s.mu, s.nu);
    let inv1 = 1.0 / mu + 1.0 / nu;
    let inv2 = 1.0 / (mu * mu) + 1.0 / (nu * nu);
    let root = mu.sqrt() + nu.sqrt();
    let f00 = f.partial(0, 0, 0.0, 0.0).norm();
    let fxy00 = f.partial(1, 1, 0.0, 0.0).norm();
    let fxxyy00 = f.partial(2, 2, 0.0, 0.0).norm();
    let remainder_bound = match order {
        1 => 2.0 * PI * f00 + inv1 * norms.fxx / lambda + 2.0 * root * norms.strip1,
        2 => {
            inv1 * norms.fxx + 2.0 * PI * fxy00 + inv1 * norms.fxxy / lambda + (4.0 / 3.0) * root * norms.strip2
        }
        _ => {
            0.5 * inv2 * norms.fxxx
                + inv1 * norms.fxxy
                + PI * fxxyy00
                + inv1 * norms.fxxxyy / (2.0 * lambda)
                + (8.0 / 15.0) * root * norms.strip3
        }
    };
    let leading_terms: Vec<Complex64> = (0..order - 1).map(|m| series_term(f, lambda, m)).collect();
    let next_term = series_term(f, lambda, order - 1);
    let value_estimate = leading_terms.iter().sum::<Complex64>() + next_term;
    Ok(ExpansionResult {
        order,
        lambda,
        leading_terms,
        next_term,
        remainder_bound,
        value_estimate,
        norms,
    })
}

// h'(x) = -(f(x,0) - f(0,0) - x f_x(x,0)) / x^2 with a Taylor branch near 0.
fn h_prime(f: &dyn StripFunction, x: f64) -> Complex64 {
    if x.abs() < 1e-3 {
        let d2 = f.partial(2, 0, 0.0, 0.0);
        let d3 = f.partial(3, 0, 0.0, 0.0);
        let d4 = f.partial(4, 0, 0.0, 0.0);
        return d2 / 2.0 + d3 * (x / 3.0) + d4 * (x * x / 8.0);
    }
    -(f.partial(0, 0, x, 0.0) - f.partial(0, 0, 0.0, 0.0) - f.partial(1, 0, x, 0.0) * x) / (x * x)
}

/// `K_21 = \int h'(x) (e^{i Lambda mu x} / mu + e^{-i Lambda nu x} / nu) dx`, the
/// `1/Lambda^2` part of the `f(x, 0)` contribution to `J`.
pub fn k21_term(s: &StripIntegrand, lambda: f64) -> Result<Complex64> {
    let f = s.f.as_ref();
    let xr = s.f.decay_radius();
    let g = |x: f64| {
        h_prime(f, x) * (Complex64::from_polar(1.0 / s.mu, lambda * s.mu * x) + Complex64::from_polar(1.0 / s.nu, -lambda * s.nu * x))
    };
    // h' decays only like 1/x^2 once f(x,0) has died out; integrate the
    // algebraic tail separately.
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    let core = quad::integrate(g, -xr, xr, tol)?.value;
    // beyond xr: h'(x) = f(0,0) / x^2 exactly (f and f_x vanish)
    let f00 = f.partial(0, 0, 0.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    if f00.norm() > 0.0 {
        for (w, freq) in [(1.0 / s.mu, lambda * s.mu), (1.0 / s.nu, -lambda * s.nu)] {
            // \int_{|x| > xr} e^{i k x} / x^2 dx = 2 Re \int_xr^inf e^{i k x} / x^2 dx
            acc += f00 * w * 2.0 * inverse_square_tail(freq.abs(), xr, tol)?.re;
        }
    }
    Ok(core + acc)
}

// \int_x0^inf e^{i a x} x^{-2} dx: quadrature up to a point where the
// integration-by-parts series converges, then that series.
fn inverse_square_tail(a: f64, x0: f64, tol: Tolerance) -> Result<Complex64> {
    let x1 = (2.0 * x0).max(60.0 / a);
    let head = quad::integrate(|x| Complex64::from_polar(1.0 / (x * x), a * x), x0, x1, tol)?.value;
    // I_k = -e^{i a x1} x1^{-k} / (i a) + k / (i a) I_{k+1}
    let ia = Complex64::new(0.0, a);
    let mut term = -Complex64::from_polar(1.0, a * x1) / (ia * x1 * x1);
    let mut tail = term;
    for k in 2..40 {
        term *= k as f64 / (ia * x1);
        tail += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    Ok(head + tail)
}

/// `-i \int f(x, 0) (e^{i Lambda mu x} - e^{-i Lambda nu x}) / x dx`, which equals
/// `2 pi f(0, 0) + K_21 / Lambda`.
pub fn line_integral(s: &StripIntegrand, lambda: f64) -> Result<Complex64> {
    let f = s.f.as_ref();
    let xr = s.f.decay_radius();
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    // (e^{iax} - e^{-ibx}) / x, regular at 0
    let kernel = |x: f64| {
        if x.abs() < 1e-8 {
            I * (lambda * s.mu + lambda * s.nu)
        } else {
            (Complex64::from_polar(1.0, lambda * s.mu * x) - Complex64::from_polar(1.0, -lambda * s.nu * x)) / x
        }
    };
    let g = |x: f64| -I * f.partial(0, 0, x, 0.0) * kernel(x);
    Ok(quad::integrate(g, -xr, 0.0, tol)?.value + quad::integrate(g, 0.0, xr, tol)?.value)
}

/// Direct nested adaptive quadrature of `J(Lambda)`. The `x` range is cut
/// where `|f|` drops below `tol * max|f|`; the tolerance is tightened
/// until two successive results agree within `tol`.
pub fn brute_strip(s: &StripIntegrand, lambda: f64, tol: f64) -> Result<Complex64> {
    if !(tol >= 1e-12) {
        return invalid(format!("tolerance must be >= 1e-12, got {tol}"));
    }
    if !(lambda >= 0.0) {
        return invalid(format!("Lambda must be nonnegative, got {lambda}"));
    }
    let f = s.f.as_ref();
    let xr = cut_radius(s, tol);
    if xr == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Inner y-integral: composite Gauss-Legendre resolving every period of
    // e^{i Lambda x y}; the refinement loop doubles the panel density and
    // tightens the outer adaptive tolerance together.
    let eval = |density: usize, abs: f64| -> Result<Complex64> {
        let t = Tolerance {
            abs,
            rel: 1e-13,
            max_intervals: 20_000,
        };
        let inner = |x: f64| {
            let cycles = lambda * x.abs() * (s.mu + s.nu) / (2.0 * PI);
            let panels = density * (2 + cycles.ceil() as usize);
            quad::composite_gauss_legendre(-s.nu, s.mu, panels, 16)
                .into_iter()
                .map(|(y, w)| w * f.partial(0, 0, x, y) * Complex64::from_polar(1.0, lambda * x * y))
                .sum::<Complex64>()
        };
        Ok(quad::integrate(inner, -xr, 0.0, t)?.value + quad::integrate(inner, 0.0, xr, t)?.value)
    };
    let mut abs = tol * 0.1;
    let mut density = 1;
    let mut prev = eval(density, abs)?;
    for _ in 0..4 {
        abs = (abs * 0.1).max(1e-15);
        density *= 2;
        let next = eval(density, abs)?;
        if (next - prev).norm() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("strip quadrature did not settle at Lambda = {lambda}")))
}

/// One entry of a convergence table against [`brute_strip`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RateRow {
    pub lambda: f64,
    pub order: usize,
    /// `|J - value_estimate|`.
    pub error: f64,
    /// `|J - truncation|`.
    pub truncation_error: f64,
    /// `remainder_bound / Lambda^order`.
    pub error_bound: f64,
}

/// Expansion errors for every `Lambda` and orders 1 to 3, with `J` from
/// [`brute_strip`] at tolerance `tol`.
pub fn rate_table(s: &StripIntegrand, lambdas: &[f64], tol: f64) -> Result<Vec<RateRow>> {
    let mut rows = Vec::with_capacity(3 * lambdas.len());
    for &lambda in lambdas {
        let exact = brute_strip(s, lambda, tol)?;
        for order in 1..=3 {
            let e = expand_strip(s, lambda, order)?;
            rows.push(RateRow {
                lambda,
                order,
                error: (exact - e.value_estimate).norm(),
                truncation_error: (exact - e.truncation()).norm(),
                error_bound: e.error_bound(),
            });
        }
    }
    Ok(rows)
}

/// Log-log slope of `error` against `Lambda` for one order; `None` with
/// fewer than three points or a vanishing error.
pub fn rate_slope(rows: &[RateRow], order: usize) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.order == order)
        .map(|r| (r.lambda, r.error))
        .unzip();
    if xs.len() < 3 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    Some(loglog_slope(&xs, &ys))
}

fn cut_radius(s: &StripIntegrand, tol: f64) -> f64 {
    let f = s.f.as_ref();
    let r = f.decay_radius();
    let ys: Vec<f64> = (0..=16).map(|k| -s.nu + (s.mu + s.nu) * k as f64 / 16.0).collect();
    let sup = |x: f64| ys.iter().map(|&y| f.partial(0, 0, x, y).norm()).fold(0.0, f64::max);
    let xs: Vec<f64> = (0..=400).map(|k| -r + 2.0 * r * k as f64 / 400.0).collect();
    let peak = xs.iter().map(|&x| sup(x)).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    xs.iter()
        .filter(|&&x| sup(x) >= tol * 1e-4 * peak)
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(r / 400.0)
        + r / 100.0
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(mu: f64, nu: f64) -> StripIntegrand {
        StripIntegrand::new(Arc::new(SeparableGaussian::standard()), mu, nu).unwrap()
    }

    #[test]
    fn gaussian_order_two_leading_term() {
        let s = gaussian(1.0, 1.0);
        let e = expand_strip(&s, 30.0, 2).unwrap();
        assert_eq!(e.leading_terms.len(), 1);
        assert_relative_eq!(e.truncation().re, 2.0 * PI / 30.0, max_relative = 1e-15);
        assert_eq!(e.next_term.norm(), 0.0);
    }

    #[test]
    fn odd_function_has_no_first_term() {
        let f = SeparableGaussian {
            px: vec![0.0, 1.0],
            ..SeparableGaussian::standard()
        };
        let s = StripIntegrand::new(Arc::new(f), 1.0, 1.0).unwrap();
        let e = expand_strip(&s, 20.0, 2).unwrap();
        assert_eq!(e.leading_terms[0].norm(), 0.0);
    }

    #[test]
    fn small_lambda_matches_plain_integral() {
        let s = gaussian(1.0, 1.0);
        let v = brute_strip(&s, 1e-9, 1e-12).unwrap();
        // pi erf(1)
        assert_relative_eq!(v.re, PI * 0.842_700_792_949_714_9, max_relative = 1e-10);
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let f = SeparableGaussian {
            scale: Complex64::new(0.0, 0.0),
            ..SeparableGaussian::standard()
        };
        let s = StripIntegrand::new(Arc::new(f), 1.0, 1.0).unwrap();
        assert_eq!(brute_strip(&s, 10.0, 1e-10).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn first_order_decay() {
        let s = gaussian(1.0, 1.0);
        let a = brute_strip(&s, 20.0, 1e-12).unwrap().norm();
        let b = brute_strip(&s, 40.0, 1e-12).unwrap().norm();
        assert!((a / b - 2.0).abs() < 0.02, "{}", a / b);
    }

    #[test]
    fn k21_identity() {
        for (mu, nu) in [(1.0, 1.0), (0.7, 1.3)] {
            let f = SeparableGaussian {
                px: vec![1.0, 0.5, 0.2],
                py: vec![1.0, -0.3],
                ..SeparableGaussian::standard()
            };
            let s = StripIntegrand::new(Arc::new(f), mu, nu).unwrap();
            for lambda in [10.0, 25.0] {
                let lhs = line_integral(&s, lambda).unwrap();
                let k21 = k21_term(&s, lambda).unwrap();
                let f00 = s.f.partial(0, 0, 0.0, 0.0);
                let rhs = 2.0 * PI * f00 + k21 / lambda;
                assert!((lhs - rhs).norm() < 1e-8, "mu={mu} L={lambda}: {lhs} vs {rhs}");
                // and the remainder stays inside its norm bound
                assert!(k21.norm() <= (1.0 / mu + 1.0 / nu) * s.norms(1).unwrap().fxx + 1e-12);
            }
        }
    }

    #[test]
    fn linear_in_f() {
        let f1: Arc<dyn StripFunction> = Arc::new(SeparableGaussian::standard());
        let f2: Arc<dyn StripFunction> = Arc::new(SeparableGaussian {
            px: vec![0.3, 1.0, 0.5],
            py: vec![0.0, 1.0],
            ax: 1.5,
            ay: 0.8,
            scale: Complex64::new(0.2, -0.4),
        });
        let two = Complex64::new(2.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let sum = Sum::new().with(one, f1.clone()).with(two, f2.clone());
        let s = StripIntegrand::new(Arc::new(sum), 1.0, 1.0).unwrap();
        let a = StripIntegrand::new(f1, 1.0, 1.0).unwrap();
        let b = StripIntegrand::new(f2, 1.0, 1.0).unwrap();
        for order in 1..=3 {
            let es = expand_strip(&s, 25.0, order).unwrap();
            let ea = expand_strip(&a, 25.0, order).unwrap();
            let eb = expand_strip(&b, 25.0, order).unwrap();
            let lin = ea.value_estimate + two * eb.value_estimate;
            assert!((es.value_estimate - lin).norm() < 1e-14);
            assert!(es.remainder_bound <= ea.remainder_bound + 2.0 * eb.remainder_bound + 1e-12);
        }
    }

    #[test]
    fn bounds_hold_on_asymmetric_strip() {
        let f = SeparableGaussian {
            px: vec![1.0, 0.5, 0.2],
            py: vec![1.0, -0.3],
            ..SeparableGaussian::standard()
        };
        let s = StripIntegrand::new(Arc::new(f), 0.6, 1.4).unwrap();
        for lambda in [5.0, 15.0, 40.0] {
            let truth = brute_strip(&s, lambda, 1e-12).unwrap();
            for order in 1..=3 {
                let e = expand_strip(&s, lambda, order).unwrap();
                let err = (truth - e.truncation()).norm();
                assert!(err <= e.error_bound(), "order {order} L {lambda}: {err} > {}", e.error_bound());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = gaussian(1.0, 1.0);
        assert!(expand_strip(&s, 10.0, 4).is_err());
        assert!(expand_strip(&s, -1.0, 1).is_err());
        assert!(brute_strip(&s, 10.0, 1e-14).is_err());
        assert!(StripIntegrand::new(Arc::new(SeparableGaussian::standard()), 0.0, 1.0).is_err());
    }

    #[test]
    fn slope_helper() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 / (x * x)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys), -2.0, epsilon = 1e-12);
    }
}
