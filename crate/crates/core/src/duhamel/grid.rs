use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::params::PhysicalParams;

/// Edge-to-peak amplitude ratio tolerated after a propagation.
pub const BOUNDARY_LIMIT: f64 = 1e-8;

/// Uniform periodic grid `x_i = x_min + i dx`, `dx = (x_max - x_min) / n`,
/// with cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("n", &self.n)
            .finish()
    }
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Grid> {
        if !n.is_power_of_two() || n < 4 {
            return invalid(format!("grid size must be a power of two >= 4, got {n}"));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return invalid(format!("empty grid interval [{x_min}, {x_max}]"));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            x_min,
            x_max,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// Symmetric grid `[-half, half)`.
    pub fn symmetric(half: f64, n: usize) -> Result<Grid> {
        Grid::new(-half, half, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumber of DFT bin `i` (FFT ordering).
    pub fn k(&self, i: usize) -> f64 {
        let l = self.x_max - self.x_min;
        let m = if i < self.n / 2 {
            i as f64
        } else {
            i as f64 - self.n as f64
        };
        2.0 * PI * m / l
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.k(i)).collect()
    }

    /// Index range `[lo, hi)` of grid points inside `[a, b]`.
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let dx = self.dx();
        let lo = ((a - self.x_min) / dx).ceil().max(0.0) as usize;
        let hi = (((b - self.x_min) / dx).floor() as i64 + 1).clamp(0, self.n as i64) as usize;
        lo.min(hi)..hi
    }

    /// Unnormalized forward DFT in place.
    pub fn fft(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse DFT in place, including the `1/n` factor.
    pub fn ifft(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    /// Free propagator phases `exp(-i hbar k^2 t / 2M)` per DFT bin.
    pub fn kinetic_phases(&self, t: f64, hbar: f64, mass: f64) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let k = self.k(i);
                Complex64::from_polar(1.0, -hbar * k * k * t / (2.0 * mass))
            })
            .collect()
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> GridFunction {
        GridFunction {
            x_min: self.x_min,
            x_max: self.x_max,
            samples: (0..self.n).map(|i| f(self.x(i))).collect(),
        }
    }
}

/// Complex samples on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub x_min: f64,
    pub x_max: f64,
    pub samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: &Grid) -> GridFunction {
        GridFunction {
            x_min: grid.x_min,
            x_max: grid.x_max,
            samples: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn n_points(&self) -> usize {
        self.samples.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.samples.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// `\int |f|^2` by the (spectrally accurate) rectangle rule.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest edge magnitude over the peak magnitude (0 for the zero function).
    pub fn boundary_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let n = self.samples.len();
        self.samples[0].norm().max(self.samples[n - 1].norm()) / m
    }

    pub fn check_boundary(&self) -> Result<()> {
        self.check_boundary_above(0.0)
    }

    /// Edge check that tolerates an absolute `floor` (roundoff) on top of
    /// the relative limit.
    pub fn check_boundary_above(&self, floor: f64) -> Result<()> {
        let n = self.samples.len();
        let edge = self.samples[0].norm().max(self.samples[n - 1].norm());
        if edge <= BOUNDARY_LIMIT * self.max_abs() + floor {
            return Ok(());
        }
        let ratio = self.boundary_ratio();
        if ratio > BOUNDARY_LIMIT || ratio.is_nan() {
            return Err(Error::Boundary {
                ratio,
                limit: BOUNDARY_LIMIT,
            });
        }
        Ok(())
    }

    /// `<self, other> = \int conj(self) other`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.dx()
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        (self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * self.dx())
        .sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.samples.iter_mut().for_each(|z| *z *= c);
    }

    /// Mean position of the density `|f|^2`.
    pub fn centroid(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, z) in self.samples.iter().enumerate() {
            let w = z.norm_sqr();
            num += w * self.x(i);
            den += w;
        }
        num / den
    }

    /// Momentum `hbar k` at the peak of `|f~|^2`, refined by a parabola
    /// through the three largest neighbouring bins.
    pub fn momentum_peak(&self, grid: &Grid, hbar: f64) -> f64 {
        let mut buf = self.samples.clone();
        grid.fft(&mut buf);
        let n = buf.len();
        let (imax, _) = buf
            .iter()
            .map(|z| z.norm_sqr())
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let f = |i: usize| buf[i % n].norm_sqr().ln();
        let (a, b, c) = (f(imax + n - 1), f(imax), f(imax + 1));
        let denom = a - 2.0 * b + c;
        let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        hbar * (grid.k(imax) + shift * dk)
    }

    /// Binary dump: `x_min`, `x_max` (f64), `n_points` (u64), then
    /// interleaved re/im pairs, all little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.x_min.to_le_bytes())?;
        w.write_all(&self.x_max.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for z in &self.samples {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<GridFunction> {
        let mut b = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut b)?;
            Ok(b)
        };
        let x_min = f64::from_le_bytes(next(&mut r)?);
        let x_max = f64::from_le_bytes(next(&mut r)?);
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        if !n.is_power_of_two() {
            return Err(Error::Serialization(format!("bad point count {n}")));
        }
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            samples.push(Complex64::new(re, im));
        }
        Ok(GridFunction { x_min, x_max, samples })
    }
}

/// `exp(-i t K_0 / hbar) g` by exact multiplication in the discrete Fourier
/// domain. Checks the edge invariant before and after.
pub fn free_propagate(grid: &Grid, g: &GridFunction, t: f64, p: &PhysicalParams) -> Result<GridFunction> {
    if g.samples.len() != grid.len() {
        return invalid("grid function and grid sizes differ");
    }
    g.check_boundary()?;
    let mut buf = g.samples.clone();
    grid.fft(&mut buf);
    for (z, ph) in buf.iter_mut().zip(grid.kinetic_phases(t, p.hbar(), p.mass())) {
        *z *= ph;
    }
    grid.ifft(&mut buf);
    let out = GridFunction {
        x_min: g.x_min,
        x_max: g.x_max,
        samples: buf,
    };
    out.check_boundary()?;
    Ok(out)
}
