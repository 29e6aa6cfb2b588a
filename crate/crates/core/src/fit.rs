//! Fringe fitting.
//!
//! For a fixed angular frequency `k` the fringe model
//! `a0 (1 + v cos(k V - phi))` is linear in the quadratures
//! `(a0, b, c) = (a0, a0 v cos phi, a0 v sin phi)`, so each fit is a 3x3
//! weighted linear solve with Poisson weights `1 / max(n, 1)`. The frequency
//! is found separably by scanning the residual chi-square over `k`.

use crate::interferometer::FringeScan;
use crate::{wrap_angle, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Mean counts.
    pub a0: f64,
    /// Fitted contrast, baseline included.
    pub v_fit: f64,
    /// Phase of the cosine at `V = 0`, wrapped.
    pub phi: f64,
    /// Angular frequency used, rad/V.
    pub k: f64,
    pub sigma_v: f64,
    pub sigma_phi: f64,
    /// Covariance of `(a0, b, c)`.
    pub covariance: [[f64; 3]; 3],
    pub chi2_fit: f64,
    pub dof: usize,
}

/// Column names of [`FitResult::csv_row`].
pub const FIT_CSV_HEADER: &str = "k_rad_per_V,a0,v_fit,sigma_v,phi_rad,sigma_phi_rad,chi2_fit,dof";

impl FitResult {
    pub fn model(&self, volts: f64) -> f64 {
        self.a0 * (1.0 + self.v_fit * (self.k * volts - self.phi).cos())
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k,
            self.a0,
            self.v_fit,
            self.sigma_v,
            self.phi,
            self.sigma_phi,
            self.chi2_fit,
            self.dof
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDifference {
    pub gamma: f64,
    pub sigma: f64,
}

pub const PHASE_DIFFERENCE_CSV_HEADER: &str = "gamma_rad,sigma_gamma_rad";

impl PhaseDifference {
    pub fn csv_row(&self) -> String {
        format!("{},{}", self.gamma, self.sigma)
    }
}

type Mat3 = [[f64; 3]; 3];

fn invert3(m: &Mat3) -> Option<Mat3> {
    let c =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let cof = [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ];
    let det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    // a normal matrix is singular when a column carries no weight or the
    // columns are (nearly) collinear
    let trace = m[0][0] + m[1][1] + m[2][2];
    if (0..3).any(|i| !(m[i][i] > 1e-12 * trace)) {
        return None;
    }
    if !(det.abs() > 1e-10 * m[0][0] * m[1][1] * m[2][2]) {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = cof[j][i] / det;
        }
    }
    Some(inv)
}

fn basis(k: f64, volts: f64) -> [f64; 3] {
    let (s, c) = (k * volts).sin_cos();
    [1.0, c, s]
}

/// Weighted least-squares fit of `a0 + b cos(kV) + c sin(kV)`.
pub fn fit_fringe(scan: &FringeScan, k: f64) -> Result<FitResult> {
    let n = scan.len();
    if n < 4 || scan.counts.len() != n {
        return Err(Error::InvalidArgument(format!(
            "fringe fit needs >= 4 points, got {n}"
        )));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "frequency {k} must be positive"
        )));
    }
    if scan.counts.iter().all(|&c| c == 0) {
        return Err(Error::InvalidArgument("scan has no counts".into()));
    }
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&volts, &count) in scan.voltages.iter().zip(&scan.counts) {
        let x = basis(k, volts);
        let y = count as f64;
        let w = 1.0 / y.max(1.0);
        for i in 0..3 {
            rhs[i] += w * x[i] * y;
            for j in 0..3 {
                normal[i][j] += w * x[i] * x[j];
            }
        }
    }
    let cov = invert3(&normal).ok_or(Error::DegenerateDesign)?;
    let beta: Vec<f64> = (0..3)
        .map(|i| (0..3).map(|j| cov[i][j] * rhs[j]).sum())
        .collect();
    let (a0, b, c) = (beta[0], beta[1], beta[2]);

    let chi2_fit = scan
        .voltages
        .iter()
        .zip(&scan.counts)
        .map(|(&volts, &count)| {
            let x = basis(k, volts);
            let y = count as f64;
            let r = y - (a0 * x[0] + b * x[1] + c * x[2]);
            r * r / y.max(1.0)
        })
        .sum();

    let amp = b.hypot(c);
    let v_fit = amp / a0;
    let phi = c.atan2(b);
    // gradients of v and phi with respect to (a0, b, c)
    let (grad_v, grad_phi) = if amp > 0.0 {
        (
            [-v_fit / a0, b / (a0 * amp), c / (a0 * amp)],
            [0.0, -c / (amp * amp), b / (amp * amp)],
        )
    } else {
        // at zero amplitude the radial direction is undefined; use the
        // isotropic quadrature spread
        ([0.0, 1.0 / a0, 0.0], [0.0, f64::INFINITY, f64::INFINITY])
    };
    let quad = |g: &[f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if g[i] != 0.0 && g[j] != 0.0 {
                    s += g[i] * cov[i][j] * g[j];
                }
            }
        }
        s.max(0.0).sqrt()
    };
    Ok(FitResult {
        a0,
        v_fit,
        phi: wrap_angle(phi),
        k,
        sigma_v: quad(&grad_v),
        sigma_phi: quad(&grad_phi),
        covariance: cov,
        chi2_fit,
        dof: n - 3,
    })
}

/// Golden-section minimization of `f` on `[a, b]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Coarse grid followed by golden-section refinement around the best node.
fn grid_then_golden(
    f: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    nodes: usize,
    tol: f64,
) -> (f64, f64) {
    let step = (hi - lo) / (nodes - 1) as f64;
    let (best, _) =
        (0..nodes)
            .map(|i| (i, f(lo + step * i as f64)))
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
    let a = lo + step * best.saturating_sub(1) as f64;
    let b = (lo + step * (best + 1) as f64).min(hi);
    let x = golden_min(f, a, b, tol);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEstimate {
    /// rad/V
    pub k: f64,
    /// 1-sigma from the curvature of the profiled chi-square.
    pub sigma_k: f64,
}

const FREQUENCY_GRID: usize = 121;
const FREQUENCY_TOL: f64 = 1e-9;

fn min_spacing(volts: &[f64]) -> f64 {
    let mut v = volts.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min)
}

fn check_range(scans: &[&FringeScan], k_range: (f64, f64)) -> Result<()> {
    let (lo, hi) = k_range;
    let spacing = scans
        .iter()
        .map(|s| min_spacing(&s.voltages))
        .fold(f64::INFINITY, f64::min);
    let nyquist = std::f64::consts::PI / spacing;
    if !(lo > 0.0 && hi > lo && hi < nyquist) {
        return Err(Error::InvalidArgument(format!(
            "frequency range ({lo}, {hi}) must lie inside (0, {nyquist})"
        )));
    }
    Ok(())
}

fn profiled_chi2(scans: &[&FringeScan], k: f64) -> f64 {
    scans
        .iter()
        .map(|s| fit_fringe(s, k).map_or(f64::INFINITY, |f| f.chi2_fit))
        .sum()
}

fn significant(fit: &FitResult) -> bool {
    fit.sigma_v > 0.0 && fit.v_fit / fit.sigma_v >= 3.0
}

/// Frequency minimizing the fit chi-square of one scan over `k_range`.
pub fn estimate_frequency(scan: &FringeScan, k_range: (f64, f64)) -> Result<FrequencyEstimate> {
    estimate_frequency_pooled(&[scan], k_range)
}

/// Shared frequency for several scans taken with the same PZT calibration:
/// minimizes the summed fit chi-square.
pub fn estimate_frequency_pooled(
    scans: &[&FringeScan],
    k_range: (f64, f64),
) -> Result<FrequencyEstimate> {
    if scans.is_empty() {
        return Err(Error::InvalidArgument("no scans to calibrate on".into()));
    }
    check_range(scans, k_range)?;
    let f = |k: f64| profiled_chi2(scans, k);
    let (k, best) = grid_then_golden(&f, k_range.0, k_range.1, FREQUENCY_GRID, FREQUENCY_TOL);
    if !best.is_finite() {
        return Err(Error::DegenerateDesign);
    }
    let any_signal = scans
        .iter()
        .any(|s| fit_fringe(s, k).is_ok_and(|fit| significant(&fit)));
    if !any_signal {
        return Err(Error::FrequencyIndeterminate);
    }
    let h = 1e-4 * k;
    let curvature = (f(k + h) - 2.0 * best + f(k - h)) / (h * h);
    let sigma_k = if curvature > 0.0 {
        (2.0 / curvature).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(FrequencyEstimate { k, sigma_k })
}

/// `fit.phi - reference.phi`, wrapped, with the two phase errors in
/// quadrature.
pub fn phase_difference(fit: &FitResult, reference: &FitResult) -> Result<PhaseDifference> {
    if (fit.k - reference.k).abs() > 1e-9 {
        return Err(Error::MismatchedFrequency(fit.k, reference.k));
    }
    Ok(PhaseDifference {
        gamma: wrap_angle(fit.phi - reference.phi),
        sigma: fit.sigma_phi.hypot(reference.sigma_phi),
    })
}

/// `(1/N) sum ((m - t) / sigma)^2`.
pub fn reduced_chi2(measured: &[(f64, f64)], theory: &[f64]) -> Result<f64> {
    if measured.len() != theory.len() {
        return Err(Error::LengthMismatch(measured.len(), theory.len()));
    }
    if measured.is_empty() {
        return Err(Error::InvalidArgument("no points for chi-square".into()));
    }
    let mut sum = 0.0;
    for (i, (&(m, s), &t)) in measured.iter().zip(theory).enumerate() {
        if !(s > 0.0) {
            return Err(Error::ZeroSigma(i));
        }
        sum += ((m - t) / s).powi(2);
    }
    Ok(sum / measured.len() as f64)
}

/// One measured geometric phase at a plate setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    /// Half the solid angle over two: `theta1 - theta2`, radians.
    pub theta1: f64,
    pub gamma: f64,
    pub sigma: f64,
}

/// `arg(cos 2t - i r sin 2t)`; accepts signed `r`.
fn model_phase(r: f64, theta1: f64) -> f64 {
    let (s, c) = (2.0 * theta1).sin_cos();
    (-r * s).atan2(c)
}

fn phase_chi2(points: &[PhasePoint], r: f64) -> f64 {
    points
        .iter()
        .map(|p| (wrap_angle(p.gamma - model_phase(r, p.theta1)) / p.sigma).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityEstimate {
    pub r: f64,
    pub sigma_r: f64,
}

/// Weighted least-squares inversion of `gamma(theta1) = -atan(r tan 2 theta1)`
/// for `r` in `[0, 1]`.
pub fn retrodict_purity(points: &[PhasePoint]) -> Result<PurityEstimate> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "purity retrodiction needs >= 3 settings, got {}",
            points.len()
        )));
    }
    if let Some(i) = points.iter().position(|p| !(p.sigma > 0.0)) {
        return Err(Error::ZeroSigma(i));
    }
    // d gamma / d r = -sin 2t cos 2t / (cos^2 2t + r^2 sin^2 2t), evaluated at r = 1/2
    let sensitivity = points
        .iter()
        .map(|p| {
            let (s, c) = (2.0 * p.theta1).sin_cos();
            (s * c / (c * c + 0.25 * s * s)).abs()
        })
        .fold(0.0, f64::max);
    if sensitivity < 1e-6 {
        return Err(Error::NoSensitivity);
    }
    let f = |r: f64| phase_chi2(points, r);
    let (r, best) = grid_then_golden(&f, 0.0, 1.0, 201, 1e-13);
    let h = 1e-4;
    let curvature = (f(r + h) - 2.0 * best + f(r - h)) / (h * h);
    let sigma_r = if curvature > 0.0 {
        (2.0 / curvature).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(PurityEstimate { r, sigma_r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{simulate_scan, InterferometerConfig};
    use crate::phase::PhaseVisibility;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn synthetic(a0: f64, v: f64, phi: f64, k: f64) -> FringeScan {
        let voltages: Vec<f64> = (0..9).map(|i| 30.0 + 5.0 * i as f64).collect();
        let expected: Vec<f64> = voltages
            .iter()
            .map(|&x| a0 * (1.0 + v * (k * x - phi).cos()))
            .collect();
        FringeScan {
            counts: expected.iter().map(|e| e.round() as u64).collect(),
            expected_counts: expected,
            voltages,
            theta1: 0.0,
            seed: 0,
        }
    }

    /// Scan whose counts are exactly the model (integer-valued by choice of a0 = 0).
    fn exact_scan(a0: f64, v: f64, phi: f64, k: f64) -> (FringeScan, Vec<f64>) {
        let scan = synthetic(a0, v, phi, k);
        let exact = scan.expected_counts.clone();
        (scan, exact)
    }

    fn fit_on_values(values: &[f64], k: f64) -> FitResult {
        // weighted solve on real-valued "counts" via a scaled integer scan
        let scale = 1e9;
        let scan = FringeScan {
            voltages: (0..values.len()).map(|i| 30.0 + 5.0 * i as f64).collect(),
            expected_counts: values.to_vec(),
            counts: values.iter().map(|v| (v * scale).round() as u64).collect(),
            theta1: 0.0,
            seed: 0,
        };
        let f = fit_fringe(&scan, k).unwrap();
        FitResult {
            a0: f.a0 / scale,
            ..f
        }
    }

    #[test]
    fn noiseless_recovery() {
        let (a0, v, phi, k) = (500.0, 0.8, 1.1, 0.164);
        let (_, exact) = exact_scan(a0, v, phi, k);
        let fit = fit_on_values(&exact, k);
        assert!((fit.a0 - a0).abs() / a0 < 1e-9);
        assert!((fit.v_fit - v).abs() / v < 1e-9);
        assert!((fit.phi - phi).abs() < 1e-9);
        assert_eq!(fit.dof, 6);
    }

    #[test]
    fn fit_errors() {
        let scan = synthetic(500.0, 0.5, 0.0, 0.16);
        // k * 5 V = 2 pi: cos(kV) is constant on the grid
        assert!(matches!(
            fit_fringe(&scan, 2.0 * PI / 5.0),
            Err(Error::DegenerateDesign)
        ));
        // k * 5 V = pi: sin and cos columns are parallel
        assert!(matches!(
            fit_fringe(&scan, PI / 5.0),
            Err(Error::DegenerateDesign)
        ));
        assert!(fit_fringe(&scan, -0.1).is_err());
        let mut short = scan.clone();
        short.voltages.truncate(3);
        short.counts.truncate(3);
        assert!(fit_fringe(&short, 0.16).is_err());
        let mut zero = scan;
        zero.counts.iter_mut().for_each(|c| *c = 0);
        assert!(fit_fringe(&zero, 0.16).is_err());
    }

    #[test]
    fn zero_visibility_consistent_with_zero() {
        let cfg = InterferometerConfig::default();
        let flat = PhaseVisibility {
            gamma: 0.0,
            v: 0.0,
            defined: false,
        };
        let k = cfg.angular_frequency();
        let within = (0..100)
            .filter(|&seed| {
                let fit = fit_fringe(&simulate_scan(&cfg, &flat, 0.0, seed), k).unwrap();
                fit.v_fit < 3.0 * fit.sigma_v
            })
            .count();
        assert!(within >= 95, "{within}");
    }

    /// Cramer-Rao bound on phi for Poisson counts with mean a0 (1 + v cos(kV - phi)),
    /// nuisance parameters a0 and v.
    fn phase_crb(a0: f64, v: f64, phi: f64, k: f64, volts: &[f64]) -> f64 {
        let mut fisher = [[0.0; 3]; 3];
        for &x in volts {
            let arg = k * x - phi;
            let mean = a0 * (1.0 + v * arg.cos());
            let grad = [1.0 + v * arg.cos(), a0 * arg.cos(), a0 * v * arg.sin()];
            for i in 0..3 {
                for j in 0..3 {
                    fisher[i][j] += grad[i] * grad[j] / mean;
                }
            }
        }
        invert3(&fisher).unwrap()[2][2].sqrt()
    }

    #[test]
    fn phase_uncertainty_near_fisher_bound() {
        let cfg = InterferometerConfig::default();
        let k = cfg.angular_frequency();
        let truth = PhaseVisibility {
            gamma: 0.4,
            v: 0.9 / 0.95,
            defined: true,
        };
        let crb = phase_crb(500.0, 0.9, 0.4, k, &cfg.voltages);
        for seed in 0..20 {
            let fit = fit_fringe(&simulate_scan(&cfg, &truth, 0.0, seed), k).unwrap();
            let ratio = fit.sigma_phi / crb;
            assert!((1.0 / 1.5..1.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn sigma_phi_matches_empirical_spread() {
        let cfg = InterferometerConfig::default();
        let k = cfg.angular_frequency();
        let truth = PhaseVisibility {
            gamma: -0.7,
            v: 0.8,
            defined: true,
        };
        let fits: Vec<FitResult> = (0..400)
            .map(|s| fit_fringe(&simulate_scan(&cfg, &truth, 0.0, s), k).unwrap())
            .collect();
        let mean = fits.iter().map(|f| f.phi).sum::<f64>() / fits.len() as f64;
        let spread = (fits.iter().map(|f| (f.phi - mean).powi(2)).sum::<f64>()
            / (fits.len() - 1) as f64)
            .sqrt();
        let typical = fits.iter().map(|f| f.sigma_phi).sum::<f64>() / fits.len() as f64;
        let ratio = typical / spread;
        assert!((1.0 / 1.5..1.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn frequency_noiseless() {
        let k_true = 0.1641;
        let (_, exact) = exact_scan(500.0, 0.9, 0.3, k_true);
        let scan = FringeScan {
            voltages: (0..9).map(|i| 30.0 + 5.0 * i as f64).collect(),
            counts: exact.iter().map(|v| (v * 1e9).round() as u64).collect(),
            expected_counts: exact,
            theta1: 0.0,
            seed: 0,
        };
        let est = estimate_frequency(&scan, (0.05, 0.4)).unwrap();
        assert!((est.k - k_true).abs() < 1e-6, "{}", est.k);
    }

    #[test]
    fn frequency_errors() {
        let flat = synthetic(500.0, 0.0, 0.0, 0.16);
        assert!(matches!(
            estimate_frequency(&flat, (0.05, 0.4)),
            Err(Error::FrequencyIndeterminate)
        ));
        // above the 5 V grid Nyquist limit pi/5
        assert!(estimate_frequency(&flat, (0.05, 0.7)).is_err());
        assert!(estimate_frequency(&flat, (0.0, 0.4)).is_err());
    }

    #[test]
    fn frequency_noisy_within_three_sigma() {
        let cfg = InterferometerConfig::default();
        let k_true = cfg.angular_frequency();
        let truth = PhaseVisibility {
            gamma: 0.2,
            v: 0.9 / 0.95,
            defined: true,
        };
        let inside = (0..100)
            .filter(|&seed| {
                let est = estimate_frequency(&simulate_scan(&cfg, &truth, 0.0, seed), (0.08, 0.3))
                    .unwrap();
                (est.k - k_true).abs() < 3.0 * est.sigma_k
            })
            .count();
        assert!(inside >= 95, "{inside}");
    }

    #[test]
    fn phase_difference_examples() {
        let (_, exact) = exact_scan(500.0, 0.9, 0.3, 0.16);
        let fit = fit_on_values(&exact, 0.16);
        let fit = FitResult {
            sigma_phi: 0.01,
            ..fit
        };
        let d = phase_difference(&fit, &fit).unwrap();
        assert_eq!(d.gamma, 0.0);
        assert!((d.sigma - 2f64.sqrt() * 0.01).abs() < 1e-15);

        let a = FitResult {
            phi: 170f64.to_radians(),
            ..fit
        };
        let b = FitResult {
            phi: -170f64.to_radians(),
            ..fit
        };
        let d = phase_difference(&b, &a).unwrap();
        assert!((d.gamma - 20f64.to_radians()).abs() < 1e-12);
        let d = phase_difference(&a, &b).unwrap();
        assert!((d.gamma + 20f64.to_radians()).abs() < 1e-12);

        let other = FitResult { k: 0.17, ..fit };
        assert!(matches!(
            phase_difference(&fit, &other),
            Err(Error::MismatchedFrequency(..))
        ));
    }

    #[test]
    fn reduced_chi2_examples() {
        assert_eq!(
            reduced_chi2(&[(1.0, 0.1), (2.0, 0.3)], &[1.0, 2.0]).unwrap(),
            0.0
        );
        let one = reduced_chi2(&[(1.1, 0.1), (1.7, 0.3), (5.0, 2.0)], &[1.0, 2.0, 3.0]).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        assert!(matches!(
            reduced_chi2(&[(1.0, 0.0)], &[1.0]),
            Err(Error::ZeroSigma(0))
        ));
        assert!(matches!(
            reduced_chi2(&[(1.0, 1.0)], &[]),
            Err(Error::LengthMismatch(1, 0))
        ));
    }

    proptest! {
        #[test]
        fn reduced_chi2_scale_invariant(vals in proptest::collection::vec((-5.0f64..5.0, 0.1f64..2.0, -5.0f64..5.0), 1..20),
                                        scale in 0.01f64..100.0) {
            let measured: Vec<(f64, f64)> = vals.iter().map(|&(m, s, _)| (m, s)).collect();
            let theory: Vec<f64> = vals.iter().map(|&(_, _, t)| t).collect();
            let scaled: Vec<(f64, f64)> = vals.iter().map(|&(m, s, t)| (t + (m - t) * scale, s * scale)).collect();
            let a = reduced_chi2(&measured, &theory).unwrap();
            let b = reduced_chi2(&scaled, &theory).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn fit_exact_on_noiseless_model(v in 0.05f64..0.99, phi in -3.0f64..3.0, k in 0.1f64..0.25) {
            let (_, exact) = exact_scan(400.0, v, phi, k);
            let fit = fit_on_values(&exact, k);
            prop_assert!((fit.v_fit - v).abs() < 1e-9 * v.max(1.0));
            prop_assert!(wrap_angle(fit.phi - phi).abs() < 1e-9);
        }

        #[test]
        fn phase_difference_equivariant(v in 0.2f64..0.95, phi in -3.0f64..3.0, shift in -3.0f64..3.0, k in 0.1f64..0.25) {
            let (_, a) = exact_scan(400.0, v, phi, k);
            let (_, r) = exact_scan(400.0, 0.9, 0.2, k);
            let (_, a2) = exact_scan(400.0, v, phi + shift, k);
            let (_, r2) = exact_scan(400.0, 0.9, 0.2 + shift, k);
            let d1 = phase_difference(&fit_on_values(&a, k), &fit_on_values(&r, k)).unwrap();
            let d2 = phase_difference(&fit_on_values(&a2, k), &fit_on_values(&r2, k)).unwrap();
            prop_assert!(wrap_angle(d1.gamma - d2.gamma).abs() < 1e-9);
        }
    }

    fn exact_points(r: f64) -> Vec<PhasePoint> {
        (-18..=18)
            .map(|i| {
                let t = (2.5 * i as f64).to_radians();
                PhasePoint {
                    theta1: t,
                    gamma: model_phase(r, t),
                    sigma: 0.01,
                }
            })
            .collect()
    }

    #[test]
    fn retrodict_exact() {
        let est = retrodict_purity(&exact_points(0.81)).unwrap();
        assert!((est.r - 0.81).abs() < 1e-9, "{}", est.r);
        assert!(est.sigma_r > 0.0 && est.sigma_r < 0.01);
        let est = retrodict_purity(&exact_points(0.0)).unwrap();
        assert!(est.r < 1e-9);
        let est = retrodict_purity(&exact_points(1.0)).unwrap();
        assert!((est.r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn retrodict_errors() {
        let flat = vec![
            PhasePoint {
                theta1: 0.0,
                gamma: 0.0,
                sigma: 0.1
            };
            5
        ];
        assert!(matches!(retrodict_purity(&flat), Err(Error::NoSensitivity)));
        assert!(retrodict_purity(&exact_points(0.5)[..2]).is_err());
        let mut pts = exact_points(0.5);
        pts[3].sigma = 0.0;
        assert!(matches!(retrodict_purity(&pts), Err(Error::ZeroSigma(3))));
    }
}
