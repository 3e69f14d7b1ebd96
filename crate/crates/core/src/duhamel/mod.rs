//! Numerical oracle for the first and second Duhamel iterates.
//!
//! The coefficient functions `f_{n1 n2}(R, t)` of the state in the product
//! basis of the two oscillators are computed on a periodic position grid.
//! Free evolution is exact in the discrete Fourier domain; the remaining
//! time integrals are done in the interaction picture, where the integrand
//! is slowly varying, with a streaming cumulative quadrature so that the
//! nested second-order integral costs the same number of propagations as
//! the first-order one.

mod coupling;
mod grid;
mod oracle;

use serde::{Deserialize, Serialize};

pub use coupling::{coupling_potential, CouplingPotential, HERMITE_TAIL, MAX_COUPLING_INDEX};
pub use grid::{free_propagate, Grid, GridFunction, BOUNDARY_LIMIT};
pub use oracle::{
    f1_oracle, f2_both_excited_oracle, first_order_component, oracle_grid, probability_oracle, Diagnostics,
    OracleRun, ProbabilityRun,
};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::params::PhysicalParams;
use crate::specfun::{GaussianPacket, Potential};

/// Which halves of the initial superposition `psi+ + psi-` are propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Both,
    Plus,
    Minus,
}

/// Quadrature used for every time integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TimeRule {
    /// Composite Simpson on uniform nodes; inner integrals cumulative.
    #[default]
    Simpson,
    /// Composite Gauss-Legendre panels of `order` nodes; inner integrals
    /// through the spectral integration matrix.
    GaussLegendre { order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Grid size, a power of two.
    pub n_points: usize,
    /// Padding beyond the ballistic range, in units of the spread packet
    /// width `sigma sqrt(1 + (hbar t / M sigma^2)^2)`.
    pub domain_pad: f64,
    /// Explicit number of time intervals. When absent it follows from
    /// `nodes_per_transit`.
    pub n_time_nodes: Option<usize>,
    /// Time nodes per transit time `gamma / v0` of an oscillator.
    pub nodes_per_transit: f64,
    pub quadrature_rule: TimeRule,
    /// Relative L2 change tolerated when the node count is halved.
    pub rtol: f64,
    pub check_convergence: bool,
    /// Fail instead of flagging when the convergence check misses `rtol`.
    pub strict: bool,
    /// Guard on the total number of time nodes.
    pub max_time_nodes: usize,
    /// Nodes evaluated concurrently between sequential accumulation steps.
    pub block: usize,
    pub branch: Branch,
    /// Enforce the edge invariant on the result.
    pub check_boundary: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_points: 1 << 14,
            domain_pad: 10.0,
            n_time_nodes: None,
            nodes_per_transit: 16.0,
            quadrature_rule: TimeRule::Simpson,
            rtol: 1e-2,
            check_convergence: true,
            strict: true,
            max_time_nodes: 1 << 18,
            block: 64,
            branch: Branch::Both,
            check_boundary: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 64 {
            return invalid(format!("n_points must be a power of two >= 64, got {}", self.n_points));
        }
        if !(self.domain_pad > 0.0) {
            return invalid("domain_pad must be positive");
        }
        if let Some(n) = self.n_time_nodes {
            if n < 4 || n % 2 != 0 {
                return invalid(format!("n_time_nodes must be even and >= 4, got {n}"));
            }
        }
        if !(self.nodes_per_transit > 0.0) {
            return invalid("nodes_per_transit must be positive");
        }
        if let TimeRule::GaussLegendre { order } = self.quadrature_rule {
            if !(2..=64).contains(&order) {
                return invalid(format!("Gauss-Legendre order must lie in 2..=64, got {order}"));
            }
        }
        if !(self.rtol > 0.0) || self.block == 0 {
            return invalid("rtol and block must be positive");
        }
        Ok(())
    }
}

/// Physical parameters, interaction profile and (possibly overridden)
/// oscillator centers.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: PhysicalParams,
    pub potential: Potential,
    centers: [f64; 2],
}

impl Model {
    pub fn new(params: PhysicalParams, potential: Potential) -> Model {
        Model {
            centers: [params.a1(), params.a2()],
            params,
            potential,
        }
    }

    /// Default smooth bump of unit radius and height.
    pub fn with_default_potential(params: PhysicalParams) -> Model {
        Model::new(params, Potential::default())
    }

    /// Same model with explicit centers; used for the reflected problem,
    /// whose first center is negative.
    pub fn with_centers(mut self, centers: [f64; 2]) -> Result<Model> {
        if !(centers[0] != 0.0 && centers[1].abs() > centers[0].abs()) {
            return invalid(format!("need |a2| > |a1| > 0, got {centers:?}"));
        }
        self.centers = centers;
        Ok(self)
    }

    /// Reflection `R -> -R`: both centers change sign; the symmetric
    /// initial state maps onto itself with `psi+` and `psi-` exchanged.
    pub fn mirrored(&self) -> Model {
        Model {
            params: self.params,
            potential: self.potential.clone(),
            centers: [-self.centers[0], -self.centers[1]],
        }
    }

    pub fn center(&self, j: usize) -> f64 {
        match j {
            1 => self.centers[0],
            2 => self.centers[1],
            _ => panic!("oscillator index must be 1 or 2, got {j}"),
        }
    }

    pub fn centers(&self) -> [f64; 2] {
        self.centers
    }

    /// `psi+` (moving right) and `psi-` (moving left), each
    /// `(N / sqrt(sigma)) exp(-R^2 / 2 sigma^2 +- i P0 R / hbar)`.
    pub fn initial_packets(&self, branch: Branch) -> Vec<GaussianPacket> {
        let p = &self.params;
        let amp = Complex64::new(p.norm_factor() / p.sigma().sqrt(), 0.0);
        let mk = |sign: f64| GaussianPacket {
            center: 0.0,
            width: p.sigma(),
            momentum: sign * p.p0(),
            amplitude: amp,
        };
        match branch {
            Branch::Both => vec![mk(1.0), mk(-1.0)],
            Branch::Plus => vec![mk(1.0)],
            Branch::Minus => vec![mk(-1.0)],
        }
    }

    pub fn coupling(&self, j: usize, m: usize, n: usize) -> Result<CouplingPotential> {
        coupling_potential(&self.potential, self.params.gamma(), self.center(j), m, n)
    }
}
