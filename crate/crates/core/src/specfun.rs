//! Hermite functions, Gaussian packets, compactly supported potentials and
//! the spectral profiles `g_n = V~ * (phi_n phi_0)~`.
//!
//! Fourier transforms use the unitary convention
//! `f~(k) = (2 pi)^(-1/2) \int f(x) e^{-ikx} dx`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};

/// Largest Hermite index accepted by [`hermite_fn`].
pub const MAX_HERMITE: usize = 60;

/// Highest derivative / weight order for which norms are cached.
pub const K_MAX: usize = 4;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

/// `<x> = sqrt(1 + x^2)`.
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// All normalized Hermite functions `phi_0..=phi_n` at `x`.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(2f64.sqrt() * x * p0);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// The `L^2`-normalized oscillator eigenfunction `phi_n(x)`.
pub fn hermite_fn(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE {
        return invalid(format!("Hermite index {n} exceeds {MAX_HERMITE}"));
    }
    Ok(hermite_all(n, x)[n])
}

// Coefficients of P with d^k/dxi^k [xi^n e^{-xi^2/4}] = P(xi) e^{-xi^2/4}.
fn gauss_monomial_poly(n: usize, k: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[n] = 1.0;
    for _ in 0..k {
        let mut q = vec![0.0; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            if i > 0 {
                q[i - 1] += c * i as f64;
            }
            q[i + 1] -= 0.5 * c;
        }
        p = q;
    }
    p
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn pair_scale(n: usize) -> Complex64 {
    // (-i)^n / sqrt(2 pi 2^n n!)
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    let mag = inv_sqrt_2pi() * (-0.5 * (n as f64 * 2f64.ln() + log_fact)).exp();
    (-I).powu(n as u32) * mag
}

/// `(phi_n phi_0)~(xi)`, closed form `(-i xi)^n e^{-xi^2/4} / sqrt(2 pi 2^n n!)`.
pub fn pair_transform(n: usize, xi: f64) -> Complex64 {
    pair_transform_deriv(n, 0, xi)
}

/// `d^k/dxi^k (phi_n phi_0)~(xi)`.
pub fn pair_transform_deriv(n: usize, k: usize, xi: f64) -> Complex64 {
    let p = gauss_monomial_poly(n, k);
    pair_scale(n) * (horner(&p, xi) * (-0.25 * xi * xi).exp())
}

enum Shape {
    Bump { height: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A continuous, nonnegative potential supported in `[-radius, radius]`
/// (lengths in units of the oscillator length).
#[derive(Clone)]
pub struct Potential {
    shape: Arc<Shape>,
    radius: f64,
    // Quadrature nodes paired with weight * V(x), reused by every transform.
    table: Arc<Vec<(f64, f64)>>,
    l1: [f64; K_MAX + 1],
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.shape {
            Shape::Bump { height } => format!("Bump {{ height: {height} }}"),
            Shape::Custom(_) => "Custom".to_string(),
        };
        f.debug_struct("Potential")
            .field("shape", &kind)
            .field("radius", &self.radius)
            .field("l1", &self.l1)
            .finish()
    }
}

const POT_PANELS: usize = 64;
const POT_ORDER: usize = 16;

/// Smooth bump `h exp(1 - 1/(1 - (x/r)^2))` on `|x| < r`.
pub fn bump_potential(radius: f64, height: f64) -> Result<Potential> {
    if !(radius > 0.0 && radius.is_finite()) || !(height > 0.0 && height.is_finite()) {
        return invalid(format!("bump needs positive radius and height, got {radius}, {height}"));
    }
    Ok(Potential::build(Shape::Bump { height }, radius))
}

impl Default for Potential {
    fn default() -> Self {
        bump_potential(1.0, 1.0).expect("default bump")
    }
}

impl Potential {
    /// A user potential. `f` is evaluated only inside the support and
    /// must be continuous and nonnegative there.
    pub fn custom<F>(f: F, radius: f64) -> Result<Potential>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid(format!("support radius must be positive, got {radius}"));
        }
        let p = Potential::build(Shape::Custom(Arc::new(f)), radius);
        if p.table.iter().any(|&(_, wv)| wv < 0.0 || !wv.is_finite()) {
            return invalid("custom potential must be finite and nonnegative");
        }
        Ok(p)
    }

    fn build(shape: Shape, radius: f64) -> Potential {
        let shape = Arc::new(shape);
        let eval = |x: f64| raw_eval(&shape, radius, x);
        let table: Vec<(f64, f64)> = quad::composite_gauss_legendre(-radius, radius, POT_PANELS, POT_ORDER)
            .into_iter()
            .map(|(x, w)| (x, w * eval(x)))
            .collect();
        let mut l1 = [0.0; K_MAX + 1];
        for (s, slot) in l1.iter_mut().enumerate() {
            *slot = table.iter().map(|&(x, wv)| japanese(x).powi(s as i32) * wv).sum();
        }
        Potential {
            shape,
            radius,
            table: Arc::new(table),
            l1,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        raw_eval(&self.shape, self.radius, x)
    }

    pub fn support_radius(&self) -> f64 {
        self.radius
    }

    /// Cached `||V||_{L^1_s}` for integer `s <= K_MAX`.
    pub fn l1_weighted(&self, s: usize) -> Result<f64> {
        self.l1
            .get(s)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("weight order {s} exceeds {K_MAX}")))
    }

    /// `\int V`.
    pub fn integral(&self) -> f64 {
        self.l1[0]
    }

    /// Quadrature table `(x_i, w_i V(x_i))` over the support.
    pub fn quadrature_table(&self) -> &[(f64, f64)] {
        &self.table
    }

    /// `true` for potentials known to be even (the bump).
    pub fn is_even(&self) -> bool {
        matches!(*self.shape, Shape::Bump { .. })
    }
}

fn raw_eval(shape: &Shape, radius: f64, x: f64) -> f64 {
    let u = x / radius;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    match shape {
        Shape::Bump { height } => height * (1.0 - 1.0 / (1.0 - u * u)).exp(),
        Shape::Custom(f) => f(x),
    }
}

/// `V~(xi)`.
pub fn potential_transform(v: &Potential, xi: f64) -> Complex64 {
    potential_transform_deriv(v, 0, xi)
}

/// `d^m/dxi^m V~(xi) = (2 pi)^{-1/2} \int V(x) (-ix)^m e^{-i xi x} dx`.
pub fn potential_transform_deriv(v: &Potential, m: usize, xi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, wv) in v.table.iter() {
        let ph = Complex64::from_polar(1.0, -xi * x);
        acc += ph * (wv * x.powi(m as i32));
    }
    acc * (-I).powu(m as u32) * inv_sqrt_2pi()
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// `g_n(xi) = V~(xi) (phi_n phi_0)~(xi)` with analytic derivatives.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    pub n: usize,
    potential: Potential,
}

pub fn spectral_profile(v: &Potential, n: usize) -> SpectralProfile {
    SpectralProfile {
        n,
        potential: v.clone(),
    }
}

impl SpectralProfile {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn value(&self, xi: f64) -> Complex64 {
        potential_transform(&self.potential, xi) * pair_transform(self.n, xi)
    }

    /// `d^k g_n / dxi^k` by the Leibniz rule.
    pub fn derivative(&self, k: usize, xi: f64) -> Complex64 {
        (0..=k)
            .map(|i| {
                potential_transform_deriv(&self.potential, i, xi)
                    * pair_transform_deriv(self.n, k - i, xi)
                    * binomial(k, i)
            })
            .sum()
    }

    /// Derivatives `0..=k` at once, sharing the potential transforms.
    pub fn derivatives(&self, k: usize, xi: f64) -> Vec<Complex64> {
        let vt: Vec<Complex64> = (0..=k)
            .map(|i| potential_transform_deriv(&self.potential, i, xi))
            .collect();
        let pt: Vec<Complex64> = (0..=k).map(|i| pair_transform_deriv(self.n, i, xi)).collect();
        (0..=k)
            .map(|d| (0..=d).map(|i| vt[i] * pt[d - i] * binomial(d, i)).sum())
            .collect()
    }

    /// `||g_n||_{W^{k,1}_s}` over the whole line.
    pub fn sobolev_norm(&self, k: usize, s: f64) -> Result<NormEstimate> {
        if k > K_MAX {
            return invalid(format!("derivative order {k} exceeds {K_MAX}"));
        }
        weighted_sobolev_norm(|d, xi| self.derivative(d, xi), k, s, 16.0)
    }
}

/// A truncated-domain norm value with the size of the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub tail: f64,
}

impl NormEstimate {
    /// Value plus tail; a safe upper estimate of the full norm.
    pub fn upper(&self) -> f64 {
        self.value + self.tail
    }
}

fn norm_tol() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-10,
        max_intervals: 20_000,
    }
}

/// `\sum_{m<=k} \int <x>^s |f^{(m)}(x)| dx` over `[-half_width, half_width]`.
/// `f(m, x)` must return the `m`-th derivative. The tail is estimated as
/// the increase when the domain is doubled.
pub fn weighted_sobolev_norm<F>(f: F, k: usize, s: f64, half_width: f64) -> Result<NormEstimate>
where
    F: Fn(usize, f64) -> Complex64,
{
    if s < 0.0 || !(half_width > 0.0) {
        return invalid(format!("need s >= 0 and positive half width, got {s}, {half_width}"));
    }
    let integrand = |x: f64| -> f64 {
        let w = japanese(x).powf(s);
        (0..=k).map(|m| f(m, x).norm()).sum::<f64>() * w
    };
    let l = half_width;
    // Split at the origin so integrands peaked there are resolved early.
    let core = quad::integrate_real(integrand, -l, 0.0, norm_tol())?.value
        + quad::integrate_real(integrand, 0.0, l, norm_tol())?.value;
    let tail = quad::integrate_real(integrand, -2.0 * l, -l, norm_tol())?.value
        + quad::integrate_real(integrand, l, 2.0 * l, norm_tol())?.value;
    Ok(NormEstimate { value: core, tail })
}

/// Two-dimensional analogue over `[-hx, hx] x [-hy, hy]`:
/// `\sum_{a+b<=k} \int\int <(x,y)>^s |d_x^a d_y^b f|`. `f(a, b, x, y)` returns
/// the mixed partial.
pub fn weighted_sobolev_norm_2d<F>(f: F, k: usize, s: f64, hx: f64, hy: f64) -> Result<f64>
where
    F: Fn(usize, usize, f64, f64) -> Complex64,
{
    if s < 0.0 || !(hx > 0.0 && hy > 0.0) {
        return invalid("need s >= 0 and a nonempty rectangle");
    }
    let tol = Tolerance::new(1e-12, 1e-8);
    let inner = |x: f64| -> f64 {
        let g = |y: f64| -> f64 {
            let w = (1.0 + x * x + y * y).sqrt().powf(s);
            let mut acc = 0.0;
            for a in 0..=k {
                for b in 0..=(k - a) {
                    acc += f(a, b, x, y).norm();
                }
            }
            acc * w
        };
        quad::integrate_real(g, -hy, hy, tol).map(|e| e.value).unwrap_or(f64::NAN)
    };
    let v = quad::integrate_real(inner, -hx, hx, tol)?.value;
    if !v.is_finite() {
        return Err(Error::Quadrature("inner norm quadrature failed".into()));
    }
    Ok(v)
}

/// Gaussian packet `A exp(-(x - x0)^2 / (2 s^2) + i p x / hbar)` at `t = 0`,
/// with closed-form free evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64, momentum: f64, amplitude: Complex64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return invalid(format!("packet width must be positive, got {width}"));
        }
        Ok(GaussianPacket {
            center,
            width,
            momentum,
            amplitude,
        })
    }

    /// Value at `x` after free evolution for time `t` with `K = p^2 / 2M`.
    pub fn evolved(&self, x: f64, t: f64, hbar: f64, mass: f64) -> Complex64 {
        let s2 = self.width * self.width;
        let tau = hbar * t / (mass * s2);
        let z = Complex64::new(1.0, tau);
        let y = x - self.center - self.momentum * t / mass;
        let expo = -y * y / (2.0 * s2 * z) + I * (self.momentum / hbar) * (x - self.momentum * t / (2.0 * mass));
        self.amplitude / z.sqrt() * expo.exp()
    }

    pub fn at(&self, x: f64, hbar: f64) -> Complex64 {
        let y = x - self.center;
        self.amplitude * (Complex64::new(-y * y / (2.0 * self.width * self.width), self.momentum * x / hbar)).exp()
    }

    /// `\int |psi|^2 = |A|^2 sigma sqrt(pi)`; invariant under free evolution.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitude.norm_sqr() * self.width * PI.sqrt()
    }

    /// Mean position at time `t`.
    pub fn center_at(&self, t: f64, mass: f64) -> f64 {
        self.center + self.momentum * t / mass
    }

    /// Position standard deviation times `sqrt 2`: `sigma sqrt(1 + (hbar t / M sigma^2)^2)`.
    pub fn width_at(&self, t: f64, hbar: f64, mass: f64) -> f64 {
        let tau = hbar * t / (mass * self.width * self.width);
        self.width * (1.0 + tau * tau).sqrt()
    }
}
