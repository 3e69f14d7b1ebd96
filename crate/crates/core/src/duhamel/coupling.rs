use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::specfun::{hermite_all, Potential};

/// Beyond this many oscillator lengths the Hermite products below
/// index 10 are below 1e-25 and are treated as zero.
pub const HERMITE_TAIL: f64 = 12.0;

/// Largest oscillator index accepted by [`coupling_potential`].
pub const MAX_COUPLING_INDEX: usize = 10;

/// The coupling function
/// `V^a_{mn}(x) = \int dz V(z) (phi_m phi_n)((x - a)/gamma - z)`.
#[derive(Debug, Clone)]
pub struct CouplingPotential {
    pub a: f64,
    pub gamma: f64,
    pub m: usize,
    pub n: usize,
    potential: Potential,
}

pub fn coupling_potential(v: &Potential, gamma: f64, a: f64, m: usize, n: usize) -> Result<CouplingPotential> {
    if m > MAX_COUPLING_INDEX || n > MAX_COUPLING_INDEX {
        return invalid(format!("coupling indices must be <= {MAX_COUPLING_INDEX}, got ({m}, {n})"));
    }
    if !(gamma > 0.0) {
        return invalid(format!("gamma must be positive, got {gamma}"));
    }
    Ok(CouplingPotential {
        a,
        gamma,
        m,
        n,
        potential: v.clone(),
    })
}

impl CouplingPotential {
    /// Interval outside which the function vanishes (to double precision).
    pub fn support(&self) -> (f64, f64) {
        let r = self.gamma * (self.potential.support_radius() + HERMITE_TAIL);
        (self.a - r, self.a + r)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let u = (x - self.a) / self.gamma;
        let top = self.m.max(self.n);
        self.potential
            .quadrature_table()
            .iter()
            .map(|&(z, wv)| {
                let h = hermite_all(top, u - z);
                wv * h[self.m] * h[self.n]
            })
            .sum()
    }

    pub fn evaluate_complex(&self, x: f64) -> Complex64 {
        Complex64::new(self.evaluate(x), 0.0)
    }
}
