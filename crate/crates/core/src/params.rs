//! Model constants, their dimensionless ratios and the one-parameter
//! scaling family in which every smallness assumption holds at once.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dimensionful inputs from which [`PhysicalParams`] is built. The
/// interaction range is not an input: it is pinned to the oscillator
/// length `sqrt(hbar / (m omega))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Test particle mass `M`.
    pub mass: f64,
    /// Oscillator mass `m`.
    pub osc_mass: f64,
    pub omega: f64,
    pub hbar: f64,
    /// Coupling strength (an energy).
    pub lambda: f64,
    pub a1: f64,
    pub a2: f64,
    /// Initial packet width.
    pub sigma: f64,
    /// Mean momentum magnitude of each half of the initial superposition.
    pub p0: f64,
}

/// Validated physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Constants", into = "Constants")]
pub struct PhysicalParams {
    c: Constants,
    gamma: f64,
}

impl TryFrom<Constants> for PhysicalParams {
    type Error = crate::Error;
    fn try_from(c: Constants) -> Result<Self> {
        PhysicalParams::new(c)
    }
}

impl From<PhysicalParams> for Constants {
    fn from(p: PhysicalParams) -> Self {
        p.c
    }
}

impl PhysicalParams {
    pub fn new(c: Constants) -> Result<Self> {
        let positive = [
            ("mass", c.mass),
            ("osc_mass", c.osc_mass),
            ("omega", c.omega),
            ("hbar", c.hbar),
            ("sigma", c.sigma),
            ("p0", c.p0),
            ("a1", c.a1),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be finite and positive, got {v}"));
            }
        }
        // lambda = 0 is allowed: it switches the interaction off.
        if !(c.lambda.is_finite() && c.lambda >= 0.0) {
            return invalid(format!("lambda must be finite and nonnegative, got {}", c.lambda));
        }
        if !(c.a2.is_finite() && c.a2.abs() > c.a1) {
            return invalid(format!("|a2| must exceed a1 (a1 = {}, a2 = {})", c.a1, c.a2));
        }
        let gamma = (c.hbar / (c.osc_mass * c.omega)).sqrt();
        Ok(PhysicalParams { c, gamma })
    }

    pub fn constants(&self) -> &Constants {
        &self.c
    }
    pub fn mass(&self) -> f64 {
        self.c.mass
    }
    pub fn osc_mass(&self) -> f64 {
        self.c.osc_mass
    }
    pub fn omega(&self) -> f64 {
        self.c.omega
    }
    pub fn hbar(&self) -> f64 {
        self.c.hbar
    }
    pub fn lambda(&self) -> f64 {
        self.c.lambda
    }
    pub fn a1(&self) -> f64 {
        self.c.a1
    }
    pub fn a2(&self) -> f64 {
        self.c.a2
    }
    pub fn sigma(&self) -> f64 {
        self.c.sigma
    }
    pub fn p0(&self) -> f64 {
        self.c.p0
    }
    /// Interaction range; always equal to [`gamma`](Self::gamma).
    pub fn delta(&self) -> f64 {
        self.gamma
    }
    /// Oscillator localization length `sqrt(hbar / (m omega))`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn v0(&self) -> f64 {
        self.c.p0 / self.c.mass
    }
    /// Oscillator center `a_j` (signed), `j` in `{1, 2}`.
    pub fn center(&self, j: usize) -> f64 {
        match j {
            1 => self.c.a1,
            2 => self.c.a2,
            _ => panic!("oscillator index must be 1 or 2, got {j}"),
        }
    }
    /// Flight time `|a_j| / v0`.
    pub fn tau(&self, j: usize) -> f64 {
        self.center(j).abs() / self.v0()
    }
    /// Large parameter `|a_j| / gamma`.
    pub fn big_lambda(&self, j: usize) -> f64 {
        self.center(j).abs() / self.gamma
    }
    /// Oscillator level `E_n = hbar omega (n + 1/2)`.
    pub fn level(&self, n: usize) -> f64 {
        self.c.hbar * self.c.omega * (n as f64 + 0.5)
    }
    /// Normalization of the two-packet initial state.
    pub fn norm_factor(&self) -> f64 {
        let k = self.c.p0 * self.c.sigma / self.c.hbar;
        (2.0 * std::f64::consts::PI.sqrt() * (1.0 + (-k * k).exp())).powf(-0.5)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        PhysicalParams::new(Constants { lambda, ..self.c })
    }

    pub fn with_a2(&self, a2: f64) -> Result<Self> {
        PhysicalParams::new(Constants { a2, ..self.c })
    }

    /// Same model with the second oscillator moved to the other side.
    pub fn flipped(&self) -> Self {
        PhysicalParams {
            c: Constants {
                a2: -self.c.a2,
                ..self.c
            },
            gamma: self.gamma,
        }
    }
}

/// Dimensionless ratios governing the asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub lambda0: f64,
    pub dm: f64,
    pub de: f64,
    pub dr: [f64; 2],
    pub dl: [f64; 2],
    pub dtau: [f64; 2],
    pub tau: [f64; 2],
    pub big_lambda: [f64; 2],
    pub epsilon: f64,
}

impl DimensionlessParams {
    /// Stationary momentum `q(n) = -n sqrt(dE / dm)`.
    pub fn q(&self, n: usize) -> f64 {
        -(n as f64) * (self.de / self.dm).sqrt()
    }
}

pub fn derive_dimensionless(p: &PhysicalParams, epsilon: f64) -> Result<DimensionlessParams> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let v0 = p.v0();
    let e_kin = p.mass() * v0 * v0;
    let abs_a = [p.a1().abs(), p.a2().abs()];
    Ok(DimensionlessParams {
        lambda0: p.lambda() / e_kin,
        dm: p.osc_mass() / p.mass(),
        de: p.hbar() * p.omega() / e_kin,
        dr: abs_a.map(|a| p.sigma() / a),
        dl: abs_a.map(|a| p.delta() / a),
        dtau: abs_a.map(|a| v0 / (p.omega() * a)),
        tau: abs_a.map(|a| a / v0),
        big_lambda: abs_a.map(|a| a / p.gamma()),
        epsilon,
    })
}

/// `lambda0 = epsilon^3` unless overridden.
pub fn default_lambda0(epsilon: f64) -> f64 {
    epsilon.powi(3)
}

/// The scaling family `M = v0 = a1 = 1`, `a2 = ±2`, `m = sigma = epsilon`,
/// `omega = 1/epsilon`, `hbar = epsilon^2`, `lambda0 = epsilon^3`.
pub fn scaling_family(epsilon: f64, a2_sign: i32) -> Result<PhysicalParams> {
    scaling_family_with(epsilon, a2_sign, default_lambda0(epsilon))
}

pub fn scaling_family_with(epsilon: f64, a2_sign: i32, lambda0: f64) -> Result<PhysicalParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if a2_sign != 1 && a2_sign != -1 {
        return invalid(format!("a2_sign must be +1 or -1, got {a2_sign}"));
    }
    PhysicalParams::new(Constants {
        mass: 1.0,
        osc_mass: epsilon,
        omega: 1.0 / epsilon,
        hbar: epsilon * epsilon,
        lambda: lambda0,
        a1: 1.0,
        a2: 2.0 * a2_sign as f64,
        sigma: epsilon,
        p0: 1.0,
    })
}

/// Acceptance band for the assumption checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Each `O(epsilon)` ratio must lie in `[epsilon / bandwidth, epsilon * bandwidth]`.
    pub bandwidth: f64,
    /// `lambda0 < epsilon * margin`.
    pub margin: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            bandwidth: 3.0,
            margin: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The checked ratio (quantity / epsilon).
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn validate_assumptions(d: &DimensionlessParams, cfg: &ValidationConfig) -> ValidationReport {
    let eps = d.epsilon;
    let lo = 1.0 / cfg.bandwidth;
    let hi = cfg.bandwidth;
    let band = |name: &str, v: f64| {
        let r = v / eps;
        Check {
            name: format!("{name}/epsilon"),
            value: r,
            lower: lo,
            upper: hi,
            passed: r >= lo && r <= hi,
        }
    };
    let mut checks = vec![
        band("dm", d.dm),
        band("dE", d.de),
        band("dR1", d.dr[0]),
        band("dR2", d.dr[1]),
        band("dL1", d.dl[0]),
        band("dL2", d.dl[1]),
        band("dtau1", d.dtau[0]),
        band("dtau2", d.dtau[1]),
    ];
    let r = d.lambda0 / eps;
    checks.push(Check {
        name: "lambda0/epsilon".into(),
        value: r,
        lower: 0.0,
        upper: cfg.margin,
        passed: r < cfg.margin,
    });
    ValidationReport { checks }
}
