//! Mixed-state geometric phase and visibility.
//!
//! The upper interferometer arm holds two half-wave plates; the beam meets
//! the plate at `theta1` first and the plate at `theta2` second, so the arm
//! unitary is `U = hwp(theta2) hwp(theta1)`. For a state diagonal in the
//! circular basis with weights `p_R`, `p_L` this gives, relative to the
//! `theta1 = theta2 = 0` reference,
//!
//! ```text
//! Tr(U rho) / Tr(U_ref rho) = cos(Omega/2) - i (p_R - p_L) sin(Omega/2),
//! Omega = 4 (theta1 - theta2)
//! ```
//!
//! so an R-dominant input reproduces the analytic phase with `r = p_R - p_L`
//! and an L-dominant input mirrors it.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C;

use crate::optics::{hwp, retarder, PolarizationUnitary, RetardanceConvention};
use crate::prep::Handedness;
use crate::qubit::{BlochVector, DensityMatrix, Ket, Purity};
use crate::{wrap_angle, Error, Result};

/// Visibility below which the phase is reported as undefined.
pub const VISIBILITY_FLOOR: f64 = 1e-12;

/// Signed solid angle on the Bloch sphere, radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SolidAngle(pub f64);

impl SolidAngle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

/// An interference phase (wrapped to `(-pi, pi]`) and visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVisibility {
    pub gamma: f64,
    pub v: f64,
    /// False when `v` is too small for the phase to mean anything.
    pub defined: bool,
}

impl PhaseVisibility {
    pub fn from_complex(z: C) -> Self {
        let v = z.norm();
        PhaseVisibility {
            gamma: wrap_angle(z.arg()),
            v,
            defined: v >= VISIBILITY_FLOOR,
        }
    }

    pub fn as_complex(&self) -> C {
        C::from_polar(self.v, self.gamma)
    }
}

/// One eigenmode's share of the total phase factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenmodeContribution {
    pub p: f64,
    pub gamma: f64,
    pub v: f64,
}

/// `Omega = 4 (theta1 - theta2)`.
pub fn solid_angle_from_waveplates(theta1: f64, theta2: f64) -> SolidAngle {
    SolidAngle(4.0 * (theta1 - theta2))
}

/// `v e^{i gamma} = cos(Omega/2) - i r sin(Omega/2)`.
///
/// The phase is taken as `arg z`, so the branch is fixed even where
/// `tan gamma = -r tan(Omega/2)` is ambiguous (for `r = 0` past the
/// visibility zero the phase is `pi`).
pub fn mixed_phase_analytic(r: Purity, omega: SolidAngle) -> PhaseVisibility {
    signed_phase(r.value(), omega.0)
}

/// [`mixed_phase_analytic`] for a state whose dominant circular eigenvector
/// is `dominant`; an L-dominant state sees the mirrored phase.
pub fn mixed_phase_for(r: Purity, dominant: Handedness, omega: SolidAngle) -> PhaseVisibility {
    signed_phase(dominant.sign() * r.value(), omega.0)
}

fn signed_phase(r: f64, omega: f64) -> PhaseVisibility {
    let half = 0.5 * omega;
    PhaseVisibility::from_complex(C::new(half.cos(), -r * half.sin()))
}

/// `v e^{i gamma} = sum_k p_k v_k e^{i gamma_k}`.
pub fn weighted_average(contribs: &[EigenmodeContribution]) -> Result<PhaseVisibility> {
    let total: f64 = contribs.iter().map(|c| c.p).sum();
    if total > 1.0 + 1e-9 || contribs.iter().any(|c| c.p < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eigenmode weights must be non-negative with sum <= 1, got {total}"
        )));
    }
    let z: C = contribs
        .iter()
        .map(|c| C::from_polar(c.p * c.v, c.gamma))
        .sum();
    Ok(PhaseVisibility::from_complex(z))
}

/// Unitary of the geometric-phase arm: `hwp(theta2) * hwp(theta1)`.
pub fn arm_unitary(theta1: f64, theta2: f64) -> PolarizationUnitary {
    hwp(theta2).after(&hwp(theta1))
}

/// Phase and visibility read by the interferometer: `v = |Tr(U rho)|` and
/// `gamma = arg Tr(U rho) - arg Tr(U_ref rho)`.
pub fn interferometric_oracle(
    u: &PolarizationUnitary,
    u_ref: &PolarizationUnitary,
    rho: &DensityMatrix,
) -> Result<PhaseVisibility> {
    let t_ref = (*u_ref.matrix() * *rho.matrix()).trace();
    if t_ref.norm() <= VISIBILITY_FLOOR {
        return Err(Error::ReferenceVisibilityZero(t_ref.norm()));
    }
    let t = (*u.matrix() * *rho.matrix()).trace();
    let v = t.norm();
    Ok(PhaseVisibility {
        gamma: wrap_angle(t.arg() - t_ref.arg()),
        v,
        defined: v >= VISIBILITY_FLOOR,
    })
}

/// Sampled Bloch trajectory of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochPath {
    points: Vec<BlochVector>,
}

impl BlochPath {
    /// All samples must have unit norm within `1e-9`.
    pub fn new(points: Vec<BlochVector>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArgument(
                "path needs at least 3 samples".into(),
            ));
        }
        if let Some(p) = points.iter().find(|p| (p.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "path sample off the unit sphere (norm {})",
                p.norm()
            )));
        }
        Ok(BlochPath { points })
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn reversed(&self) -> BlochPath {
        let mut points = self.points.clone();
        points.reverse();
        BlochPath { points }
    }

    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (self.points[0], self.points[self.points.len() - 1]);
        BlochVector::new(a.s1 - b.s1, a.s2 - b.s2, a.s3 - b.s3).norm()
    }
}

fn leg_states(theta1: f64, theta2: f64, start: Ket, steps: usize) -> Vec<Ket> {
    let conv = RetardanceConvention::Symmetric;
    let mut states = Vec::with_capacity(2 * steps + 1);
    for i in 0..=steps {
        let delta = std::f64::consts::PI * i as f64 / steps as f64;
        states.push(retarder(delta, theta1, conv).matrix().apply(&start));
    }
    let mid = hwp(theta1).matrix().apply(&start);
    for i in 1..=steps {
        let delta = std::f64::consts::PI * i as f64 / steps as f64;
        states.push(
            retarder(delta, theta2 + FRAC_PI_2, conv)
                .matrix()
                .apply(&mid),
        );
    }
    states
}

/// Bloch trajectory of `eigenvector` through the `theta1` plate, then the
/// `theta2` plate, each with retardance swept `0 -> pi` in `steps` steps.
///
/// The second leg accumulates retardance about the `theta2` plate's slow
/// axis, so the legs are the two geodesics `R -> L -> R` meeting at a
/// dihedral angle `2 (theta1 - theta2)` and `theta1 = theta2` retraces the
/// first leg. The endpoint differs from `arm_unitary` only by the constant
/// sign `hwp(t + pi/2) = -hwp(t)`, which reference subtraction removes.
pub fn evolve_path(
    theta1: f64,
    theta2: f64,
    eigenvector: Handedness,
    steps: usize,
) -> Result<BlochPath> {
    if steps < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 steps per leg".into(),
        ));
    }
    let points = leg_states(theta1, theta2, eigenvector.ket(), steps)
        .iter()
        .map(Ket::bloch)
        .collect();
    BlochPath::new(points)
}

fn normalize(v: BlochVector) -> Option<BlochVector> {
    let n = v.norm();
    (n > 1e-6).then(|| v.scaled(1.0 / n))
}

/// Reference point for the triangle fan: the normalized centroid, or, when
/// that vanishes, the coordinate axis farthest from every antipode.
fn fan_apex(points: &[BlochVector]) -> BlochVector {
    let sum = points.iter().fold(BlochVector::default(), |acc, p| {
        BlochVector::new(acc.s1 + p.s1, acc.s2 + p.s2, acc.s3 + p.s3)
    });
    if let Some(c) = normalize(sum) {
        return c;
    }
    let axes = [
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
        BlochVector::new(0.0, 0.0, -1.0),
    ];
    let clearance = |a: &BlochVector| {
        points
            .iter()
            .map(|p| 1.0 + a.dot(p))
            .fold(f64::INFINITY, f64::min)
    };
    axes.into_iter()
        .max_by(|a, b| clearance(a).total_cmp(&clearance(b)))
        .expect("non-empty")
}

/// Enclosed signed area of a closed path as a sum of spherical-triangle
/// excesses fanned from a fixed apex.
///
/// Orientation: the Stokes axes used here are left-handed with respect to
/// the Pauli algebra, so the area is counted clockwise as seen from outside
/// the sphere. With this orientation a pure state transported around the
/// path picks up the geometric phase `-Omega/2`; the |R> path through
/// plates at `(theta1, theta2)` encloses `+4 (theta1 - theta2)`.
pub fn solid_angle_from_path(path: &BlochPath) -> Result<SolidAngle> {
    let gap = path.closure_gap();
    if gap > 1e-9 {
        return Err(Error::NonClosedPath(gap));
    }
    let pts = path.points();
    let apex = fan_apex(pts);
    let mut area = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let num = apex.dot(&a.cross(&b));
        let den = 1.0 + apex.dot(&a) + apex.dot(&b) + a.dot(&b);
        area += 2.0 * num.atan2(den);
    }
    // counter-clockwise sum, reduced mod 4 pi into (-2 pi, 2 pi]
    let tau2 = 4.0 * std::f64::consts::PI;
    let mut omega = (-area).rem_euclid(tau2);
    if omega > 0.5 * tau2 {
        omega -= tau2;
    }
    Ok(SolidAngle(omega))
}

/// Largest local phase rate `|arg <psi(t - dt)|psi(t + dt)>| / (2 dt)` along
/// the two-plate evolution, with `t` the retardance in radians.
///
/// Zero in the continuum limit exactly when the evolution parallel
/// transports the input.
pub fn parallel_transport_residual(
    theta1: f64,
    theta2: f64,
    eigenvector: Handedness,
    steps: usize,
) -> Result<f64> {
    parallel_transport_residual_with(
        theta1,
        theta2,
        eigenvector,
        steps,
        RetardanceConvention::Symmetric,
    )
}

pub fn parallel_transport_residual_with(
    theta1: f64,
    theta2: f64,
    eigenvector: Handedness,
    steps: usize,
    convention: RetardanceConvention,
) -> Result<f64> {
    if steps < 10 {
        return Err(Error::InvalidArgument("need at least 10 steps".into()));
    }
    let dt = std::f64::consts::PI / steps as f64;
    let start = eigenvector.ket();
    let mid = retarder(std::f64::consts::PI, theta1, convention)
        .matrix()
        .apply(&start);
    let leg = |axis: f64, input: Ket| {
        (1..steps)
            .map(|i| {
                let before = retarder((i - 1) as f64 * dt, axis, convention)
                    .matrix()
                    .apply(&input);
                let after = retarder((i + 1) as f64 * dt, axis, convention)
                    .matrix()
                    .apply(&input);
                before.inner(&after).arg().abs() / (2.0 * dt)
            })
            .fold(0.0, f64::max)
    };
    Ok(leg(theta1, start).max(leg(theta2 + FRAC_PI_2, mid)))
}
