//! Simulation and analysis of mixed-state geometric phase measured with
//! single photons in a Mach-Zehnder interferometer.
//!
//! The crate is layered bottom-up:
//!
//! * [`qubit`]: 2x2 density matrices, Bloch vectors, partial trace.
//! * [`optics`]: Jones-calculus waveplates and dephasing.
//! * [`prep`]: the two mixed-state preparation routes.
//! * [`phase`]: analytic phase/visibility, path geometry and the
//!   interferometric `arg Tr(U rho)` oracle.
//! * [`interferometer`]: Poisson photon-count fringe scans.
//! * [`fit`]: fringe fitting, phase differences, chi-square, purity
//!   retrodiction.
//! * [`experiment`]: config-driven sweeps, CSV datasets, reports and plots.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod fit;
pub mod interferometer;
pub mod optics;
pub mod phase;
pub mod prep;
pub mod qubit;

pub use error::{Error, Result};

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}
