//! Mixed polarization inputs with controlled purity.
//!
//! Two routes produce the same family of states:
//!
//! * a pure `cos t|H> + sin t|V>` whose H/V coherence is erased by a thick
//!   birefringent stack (coherence factor `d`), and
//! * the partner photon of `cos t_p|HH> + sin t_p|VV>` with the trigger
//!   photon traced out.
//!
//! A quarter-wave plate then turns the H/V mixture into an R/L mixture.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::optics::{apply, dephase, hwp, qwp};
use crate::qubit::{
    bloch_from_density, partial_trace_over_trigger, purity, DensityMatrix, Ket, Purity,
    TwoQubitPureState,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Handedness {
    R,
    L,
}

impl Handedness {
    /// `+1` for R, `-1` for L.
    pub fn sign(self) -> f64 {
        match self {
            Handedness::R => 1.0,
            Handedness::L => -1.0,
        }
    }

    pub fn ket(self) -> Ket {
        match self {
            Handedness::R => Ket::r(),
            Handedness::L => Ket::l(),
        }
    }

    pub fn opposite(self) -> Handedness {
        match self {
            Handedness::R => Handedness::L,
            Handedness::L => Handedness::R,
        }
    }
}

impl std::fmt::Display for Handedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Handedness::R => "R",
            Handedness::L => "L",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreparationMethod {
    /// HWP sets `cos theta|H> + sin theta|V>`; decoherers keep a fraction
    /// `coherence` of the H/V off-diagonals.
    Decoherer { theta: f64, coherence: f64 },
    /// Pump polarization `theta_p` sets `cos theta_p|HH> + sin theta_p|VV>`.
    Entangled { theta_p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationRecipe {
    pub method: PreparationMethod,
    pub qwp_angle: f64,
}

impl PreparationRecipe {
    pub fn decoherer(theta: f64, coherence: f64) -> Self {
        PreparationRecipe {
            method: PreparationMethod::Decoherer { theta, coherence },
            qwp_angle: FRAC_PI_4,
        }
    }

    pub fn entangled(theta_p: f64) -> Self {
        PreparationRecipe {
            method: PreparationMethod::Entangled { theta_p },
            qwp_angle: FRAC_PI_4,
        }
    }

    pub fn prepare(&self) -> Result<PreparedState> {
        match self.method {
            PreparationMethod::Decoherer { theta, coherence } => {
                prepare_decoherer(theta, coherence, self.qwp_angle)
            }
            PreparationMethod::Entangled { theta_p } => prepare_entangled(theta_p, self.qwp_angle),
        }
    }
}

/// Which preparation route; used where only the route matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Decoherer,
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedState {
    pub rho: DensityMatrix,
    pub r: Purity,
    /// Circular eigenvector with the larger weight (R when `s3 >= 0`).
    pub dominant_eigenvector: Handedness,
}

impl PreparedState {
    pub fn from_density(rho: DensityMatrix) -> Self {
        let b = bloch_from_density(&rho);
        PreparedState {
            rho,
            r: purity(&rho),
            dominant_eigenvector: if b.s3 >= 0.0 {
                Handedness::R
            } else {
                Handedness::L
            },
        }
    }
}

fn check_angle(name: &str, a: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&a) {
        return Err(Error::InvalidArgument(format!(
            "{name} = {a} rad outside [0, pi/2]"
        )));
    }
    Ok(())
}

pub fn prepare_decoherer(theta: f64, coherence: f64, qwp_angle: f64) -> Result<PreparedState> {
    check_angle("theta", theta)?;
    // a HWP at theta/2 maps |H> to cos theta|H> + sin theta|V> (up to phase)
    let fiducial = DensityMatrix::pure(&Ket::h());
    let superposed = apply(&hwp(theta / 2.0), &fiducial);
    let decohered = dephase(&superposed, coherence)?;
    Ok(PreparedState::from_density(apply(
        &qwp(qwp_angle),
        &decohered,
    )))
}

pub fn prepare_entangled(theta_p: f64, qwp_angle: f64) -> Result<PreparedState> {
    check_angle("theta_p", theta_p)?;
    let pair = TwoQubitPureState::variable_entanglement(theta_p);
    let partner = partial_trace_over_trigger(&pair);
    Ok(PreparedState::from_density(apply(
        &qwp(qwp_angle),
        &partner,
    )))
}

/// Setting angle giving purity `r` with full decoherence: `acos(r)/2`.
/// Both routes share the relation `r = |cos 2 angle|`.
pub fn angle_for_purity(r: f64, _method: MethodKind) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("purity {r} outside [0, 1]")));
    }
    Ok(0.5 * r.acos())
}
