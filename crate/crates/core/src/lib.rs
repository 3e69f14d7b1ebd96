//! Second-order joint excitation probabilities for a fast test particle
//! crossing two localized harmonic oscillators in one dimension.
//!
//! The crate computes the same quantities two ways:
//!
//! * [`duhamel`]: a numerical oracle that evaluates the first and second
//!   Duhamel iterates on a position grid with spectral free propagation;
//! * [`stationary`]: closed-form stationary-phase leading terms together
//!   with computable upper bounds on what they neglect.
//!
//! [`oscint`] is the underlying expansion engine for bilinear-phase
//! oscillatory integrals, [`report`] drives parameter sweeps and
//! [`config`] reads run descriptions from TOML.
//!
//! ```
//! use mott1d::params::{scaling_family, derive_dimensionless};
//!
//! let p = scaling_family(0.05, 1).unwrap();
//! let d = derive_dimensionless(&p, 0.05).unwrap();
//! assert!((d.big_lambda[0] - 20.0).abs() < 1e-12);
//! ```

// input checks are written `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod duhamel;
pub mod error;
pub mod oscint;
pub mod params;
pub mod quad;
pub mod report;
pub mod specfun;
pub mod stationary;

pub use error::{Error, Result};

// Chapters of the guide under `book/` compiled as doc-tests so that every
// snippet keeps building.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/oscillatory.md")]
    mod oscillatory {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
