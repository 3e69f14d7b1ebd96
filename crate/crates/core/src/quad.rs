//! Quadrature primitives shared by every other module.
//!
//! * [`integrate`] / [`integrate_real`]: globally adaptive Gauss-Kronrod
//!   (7/15 point) for complex or real integrands on a finite interval.
//! * [`gauss_legendre`]: nodes and weights on `[-1, 1]`.
//! * [`simpson_weights`], [`IntegrationMatrix`]: fixed rules used by the
//!   time quadratures of the Duhamel oracle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += s * WGK[i];
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).norm();
    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod integration of a complex integrand over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite limits [{a}, {b}]")));
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    loop {
        if err <= tol.abs.max(tol.rel * total.norm()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "{} intervals on [{a}, {b}], error {err:.3e}, value {total:.6e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!(
                "interval collapsed near {mid} with error {err:.3e}"
            )));
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to remove drift from the running updates.
    let (value, error) = heap
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Estimate {
        value,
        error,
        intervals: heap.len(),
    })
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<f64>>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok(Estimate {
        value: est.value.re,
        error: est.error,
        intervals: est.intervals,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes on `[a, b]`.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Composite Simpson weights for `n` (even) intervals of width `h`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "Simpson rule needs an even number of intervals");
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Spectral integration matrix on Gauss-Legendre nodes.
///
/// For a panel `[a, b]` carrying `m` GL nodes, `entries[i][j] * (b - a) / 2`
/// is the weight of `f(x_j)` in `∫_a^{x_i} f`, exact for polynomials of
/// degree `< m`. The last row is complemented by the full GL weights.
#[derive(Debug, Clone)]
pub struct IntegrationMatrix {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub entries: Vec<Vec<f64>>,
}

impl IntegrationMatrix {
    pub fn new(m: usize) -> Self {
        let (nodes, weights) = gauss_legendre(m);
        let (qx, qw) = gauss_legendre(m + 2);
        let entries = nodes
            .iter()
            .map(|&xi| {
                // ∫_{-1}^{xi} l_j(x) dx by a GL rule mapped onto [-1, xi].
                let half = 0.5 * (xi + 1.0);
                (0..m)
                    .map(|j| {
                        qx.iter()
                            .zip(&qw)
                            .map(|(&u, &w)| {
                                let x = -1.0 + half * (u + 1.0);
                                w * half * lagrange_basis(&nodes, j, x)
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        IntegrationMatrix {
            nodes,
            weights,
            entries,
        }
    }
}

fn lagrange_basis(nodes: &[f64], j: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &xk)| (x - xk) / (nodes[j] - xk))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert_relative_eq!(total, 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert_relative_eq!(s, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let est = integrate_real(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert_relative_eq!(est.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn adaptive_oscillatory_complex() {
        let est = integrate(
            |x| Complex64::new(0.0, 50.0 * x).exp() * (-x * x).exp(),
            -8.0,
            8.0,
            Tolerance::default(),
        )
        .unwrap();
        let exact = PI.sqrt() * (-625.0f64).exp();
        assert!((est.value.re - exact).abs() < 1e-12);
        assert!(est.value.im.abs() < 1e-12);
    }

    #[test]
    fn integration_matrix_is_exact_for_low_degree() {
        let im = IntegrationMatrix::new(6);
        for (i, xi) in im.nodes.iter().enumerate() {
            let approx: f64 = im.entries[i]
                .iter()
                .zip(&im.nodes)
                .map(|(s, x)| s * x.powi(4))
                .sum();
            let exact = (xi.powi(5) + 1.0) / 5.0;
            assert_relative_eq!(approx, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let n = 10;
        let h = 0.3;
        let w = simpson_weights(n, h);
        let s: f64 = w.iter().enumerate().map(|(i, w)| w * (i as f64 * h).powi(3)).sum();
        assert_relative_eq!(s, (n as f64 * h).powi(4) / 4.0, max_relative = 1e-13);
    }
}
