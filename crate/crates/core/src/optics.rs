//! Jones-calculus elements acting on polarization qubits.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C;

use crate::qubit::{DensityMatrix, Mat2};
use crate::{Error, Result};

/// Birefringence of crystal quartz near 670 nm.
pub const QUARTZ_BIREFRINGENCE: f64 = 0.0091;

/// A 2x2 unitary. The overall phase is kept: the interferometer sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationUnitary(Mat2);

impl PolarizationUnitary {
    pub fn new(m: Mat2) -> Result<Self> {
        if (m.adjoint() * m).max_abs_diff(&Mat2::identity()) > 1e-12 {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(PolarizationUnitary(m))
    }

    pub fn identity() -> Self {
        PolarizationUnitary(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `self` after `first`: the beam meets `first`, then `self`.
    pub fn after(&self, first: &PolarizationUnitary) -> PolarizationUnitary {
        PolarizationUnitary(self.0 * first.0)
    }

    pub fn pow(&self, n: u32) -> PolarizationUnitary {
        (0..n).fold(Self::identity(), |acc, _| acc.after(self))
    }
}

/// Retardance and optic-axis angle of a linear retarder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSetting {
    retardance: f64,
    axis: f64,
}

impl WaveplateSetting {
    /// `retardance` must lie in `[0, 2 pi)`. The axis is reduced into
    /// `(-pi/2, pi/2]`; a retarder is invariant under `axis -> axis + pi`.
    pub fn new(retardance: f64, axis: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&retardance) {
            return Err(Error::InvalidArgument(format!(
                "retardance {retardance} outside [0, 2pi)"
            )));
        }
        if !axis.is_finite() {
            return Err(Error::InvalidArgument("non-finite axis angle".into()));
        }
        let mut axis = axis.rem_euclid(PI);
        if axis > FRAC_PI_2 {
            axis -= PI;
        }
        Ok(WaveplateSetting { retardance, axis })
    }

    pub fn retardance(&self) -> f64 {
        self.retardance
    }

    pub fn axis(&self) -> f64 {
        self.axis
    }
}

/// How the retardance is split between the two eigen-polarizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RetardanceConvention {
    /// `diag(e^{-i d/2}, e^{+i d/2})`: special unitary.
    #[default]
    Symmetric,
    /// `diag(1, e^{i d})`: adds a dynamical phase `d/2` on circular inputs.
    Asymmetric,
}

fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::real(c, -s, s, c)
}

/// Retarder `R(theta) D(delta) R(-theta)` for any real retardance.
pub fn retarder(delta: f64, axis: f64, convention: RetardanceConvention) -> PolarizationUnitary {
    let core = match convention {
        RetardanceConvention::Symmetric => Mat2::diag(
            C::from_polar(1.0, -delta / 2.0),
            C::from_polar(1.0, delta / 2.0),
        ),
        RetardanceConvention::Asymmetric => Mat2::diag(C::new(1.0, 0.0), C::from_polar(1.0, delta)),
    };
    PolarizationUnitary(rotation(axis) * core * rotation(-axis))
}

pub fn waveplate(setting: WaveplateSetting) -> PolarizationUnitary {
    retarder(
        setting.retardance,
        setting.axis,
        RetardanceConvention::Symmetric,
    )
}

/// Half-wave plate with optic axis at `axis` radians.
pub fn hwp(axis: f64) -> PolarizationUnitary {
    retarder(PI, axis, RetardanceConvention::Symmetric)
}

/// Quarter-wave plate with optic axis at `axis` radians.
pub fn qwp(axis: f64) -> PolarizationUnitary {
    retarder(FRAC_PI_2, axis, RetardanceConvention::Symmetric)
}

/// `U rho U^dagger`
pub fn apply(u: &PolarizationUnitary, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_raw(u.0 * *rho.matrix() * u.0.adjoint())
}

/// Scales the H/V coherences by `d`, leaving populations unchanged.
pub fn dephase(rho: &DensityMatrix, d: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidCoherence(d));
    }
    let mut m = *rho.matrix();
    m.0[0][1] *= d;
    m.0[1][0] *= d;
    Ok(DensityMatrix::from_raw(m))
}

/// Coherence length of a photon with a Gaussian-ish spectrum, together with
/// the polarization-dependent delay of a birefringent stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceModel {
    coherence_length: f64,
    delay: f64,
}

impl CoherenceModel {
    /// Both lengths in meters.
    pub fn new(coherence_length: f64, delay: f64) -> Result<Self> {
        if !(coherence_length > 0.0) || !(delay >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need coherence length > 0 and delay >= 0, got {coherence_length}, {delay}"
            )));
        }
        Ok(CoherenceModel {
            coherence_length,
            delay,
        })
    }

    /// `lambda^2 / bandwidth`, e.g. 670 nm with a 5 nm filter is about 90 um.
    pub fn coherence_length_from_spectrum(wavelength: f64, bandwidth: f64) -> f64 {
        wavelength * wavelength / bandwidth
    }

    /// Group delay between the slow and fast axes of a plate, as a length.
    pub fn birefringent_delay(thickness: f64, birefringence: f64) -> f64 {
        thickness * birefringence
    }

    pub fn coherence_length(&self) -> f64 {
        self.coherence_length
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }
}

/// Gaussian degree of coherence `exp(-(delay / L_c)^2)`.
pub fn coherence_factor(model: &CoherenceModel) -> f64 {
    (-(model.delay / model.coherence_length).powi(2)).exp()
}
