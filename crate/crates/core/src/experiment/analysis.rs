//! From fringe scans to phases, visibilities and goodness of fit.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Method};
use super::dataset::{Dataset, Role};
use crate::fit::{
    estimate_frequency_pooled, fit_fringe, phase_difference, reduced_chi2, retrodict_purity,
    FitResult, FrequencyEstimate, PhaseDifference, PhasePoint, PurityEstimate, FIT_CSV_HEADER,
};
use crate::interferometer::FringeScan;
use crate::phase::{mixed_phase_for, solid_angle_from_waveplates, PhaseVisibility};
use crate::prep::Handedness;
use crate::qubit::Purity;
use crate::{wrap_angle, Error, Result};

/// Measured points closer to zero visibility than this many sigmas carry no
/// usable phase.
const PHASE_SIGNIFICANCE: f64 = 3.0;

/// One repeat at one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatFit {
    pub signal: FitResult,
    pub reference: FitResult,
    pub phase: PhaseDifference,
}

/// Repeats at one `(r, theta1)` combined.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub theta1_deg: f64,
    /// Circular mean of the repeat phases.
    pub gamma: f64,
    /// Propagated from the fit covariances: `sqrt(sum sigma_i^2) / n`.
    pub sigma_gamma: f64,
    /// Standard error from the scatter of the repeats (NaN for one repeat).
    pub spread_gamma: f64,
    pub visibility: f64,
    pub sigma_visibility: f64,
    pub spread_visibility: f64,
    pub theory: PhaseVisibility,
    /// Theory visibility times the measured reference contrast.
    pub visibility_theory: f64,
    /// Phase is meaningful: theory and data both have non-zero visibility.
    pub defined: bool,
    pub repeats: Vec<RepeatFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub r: f64,
    /// Purity of the state actually prepared.
    pub r_state: f64,
    pub dominant: Handedness,
    /// Mean fitted contrast of the reference scans.
    pub reference_visibility: f64,
    pub points: Vec<PointReport>,
    /// None when no point has a defined phase.
    pub chi2_phase: Option<f64>,
    pub chi2_visibility: f64,
    pub retrodicted: Option<PurityEstimate>,
}

impl CurveReport {
    pub fn defined_points(&self) -> impl Iterator<Item = &PointReport> {
        self.points.iter().filter(|p| p.defined)
    }

    /// RMS of (repeat scatter / propagated sigma) over defined points.
    pub fn spread_ratio_phase(&self) -> Option<f64> {
        let ratios: Vec<f64> = self
            .defined_points()
            .filter(|p| p.spread_gamma.is_finite())
            .map(|p| (p.spread_gamma / p.sigma_gamma).powi(2))
            .collect();
        (!ratios.is_empty()).then(|| (ratios.iter().sum::<f64>() / ratios.len() as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub method: Method,
    pub theta2_deg: f64,
    /// Configured empty-interferometer contrast.
    pub baseline_visibility: f64,
    /// Session fringe frequency from the pooled reference scans.
    pub frequency: FrequencyEstimate,
    pub curves: Vec<CurveReport>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl SweepReport {
    /// Average of the per-curve phase chi-squares.
    pub fn mean_chi2_phase(&self) -> Option<f64> {
        mean(self.curves.iter().filter_map(|c| c.chi2_phase))
    }

    pub fn mean_chi2_visibility(&self) -> Option<f64> {
        mean(self.curves.iter().map(|c| c.chi2_visibility))
    }
}

fn circular_mean(angles: &[f64]) -> f64 {
    let z: C = angles.iter().map(|&a| C::from_polar(1.0, a)).sum();
    wrap_angle(z.arg())
}

/// Standard error of the mean from sample deviations.
fn standard_error(devs: &[f64]) -> f64 {
    let n = devs.len();
    if n < 2 {
        return f64::NAN;
    }
    let ss: f64 = devs.iter().map(|d| d * d).sum();
    (ss / (n - 1) as f64 / n as f64).sqrt()
}

fn combine(
    theta1_deg: f64,
    repeats: Vec<RepeatFit>,
    theory: PhaseVisibility,
    v_ref: f64,
) -> PointReport {
    let n = repeats.len() as f64;
    let gammas: Vec<f64> = repeats.iter().map(|f| f.phase.gamma).collect();
    let gamma = circular_mean(&gammas);
    let sigma_gamma = repeats
        .iter()
        .map(|f| f.phase.sigma.powi(2))
        .sum::<f64>()
        .sqrt()
        / n;
    let spread_gamma = standard_error(
        &gammas
            .iter()
            .map(|g| wrap_angle(g - gamma))
            .collect::<Vec<_>>(),
    );

    let vis: Vec<f64> = repeats.iter().map(|f| f.signal.v_fit).collect();
    let visibility = vis.iter().sum::<f64>() / n;
    let sigma_visibility = repeats
        .iter()
        .map(|f| f.signal.sigma_v.powi(2))
        .sum::<f64>()
        .sqrt()
        / n;
    let spread_visibility = standard_error(&vis.iter().map(|v| v - visibility).collect::<Vec<_>>());

    let defined = theory.defined && visibility >= PHASE_SIGNIFICANCE * sigma_visibility;
    PointReport {
        theta1_deg,
        gamma,
        sigma_gamma,
        spread_gamma,
        visibility,
        sigma_visibility,
        spread_visibility,
        theory,
        visibility_theory: v_ref * theory.v,
        defined,
        repeats,
    }
}

fn curve_statistics(curve: &mut CurveReport) -> Result<()> {
    let phases: Vec<(f64, f64)> = curve
        .defined_points()
        .map(|p| (wrap_angle(p.gamma - p.theory.gamma), p.sigma_gamma))
        .collect();
    curve.chi2_phase = if phases.is_empty() {
        None
    } else {
        Some(reduced_chi2(&phases, &vec![0.0; phases.len()])?)
    };
    let vis: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.visibility, p.sigma_visibility))
        .collect();
    let vis_theory: Vec<f64> = curve.points.iter().map(|p| p.visibility_theory).collect();
    curve.chi2_visibility = reduced_chi2(&vis, &vis_theory)?;
    Ok(())
}

/// Fits every scan of `ds` and compares with theory.
///
/// All scans share one fringe frequency, calibrated on the pooled reference
/// scans. Each signal scan is referred to the reference scan of the same
/// repeat, the repeats are averaged, and each curve gets reduced
/// chi-squares and a retrodicted purity.
pub fn analyze(ds: &Dataset) -> Result<SweepReport> {
    let cfg: &ExperimentConfig = &ds.config;
    cfg.validate()?;

    let mut by_key: BTreeMap<(usize, usize, usize), [Option<&FringeScan>; 2]> = BTreeMap::new();
    for (rec, scan) in &ds.entries {
        if rec.r_index >= cfg.purities.len()
            || rec.theta1_index >= cfg.theta1_grid.len()
            || rec.repeat >= cfg.repeats
        {
            return Err(Error::InvalidArgument(format!(
                "scan {} is outside the configured grid",
                rec.file
            )));
        }
        let slot = by_key
            .entry((rec.r_index, rec.theta1_index, rec.repeat))
            .or_default();
        slot[(rec.role == Role::Reference) as usize] = Some(scan);
    }
    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for ri in 0..cfg.purities.len() {
        for ti in 0..cfg.theta1_grid.len() {
            for rep in 0..cfg.repeats {
                match by_key.get(&(ri, ti, rep)) {
                    Some([Some(s), Some(r)]) => pairs.push(((ri, ti, rep), *s, *r)),
                    _ => missing.push(format!(
                        "r={} theta1={} repeat={}",
                        cfg.purities[ri], cfg.theta1_grid[ti], rep
                    )),
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::PartialDataset(missing));
    }

    let references: Vec<&FringeScan> = pairs.iter().map(|(_, _, r)| *r).collect();
    let frequency = estimate_frequency_pooled(&references, cfg.frequency_search_range())?;
    let k = frequency.k;

    let fits = pairs
        .par_iter()
        .map(|&(key, sig, reference)| {
            let signal = fit_fringe(sig, k)?;
            let reference = fit_fringe(reference, k)?;
            let phase = phase_difference(&signal, &reference)?;
            Ok((
                key,
                RepeatFit {
                    signal,
                    reference,
                    phase,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let theta2 = cfg.theta2.to_radians();
    let mut curves = Vec::with_capacity(cfg.purities.len());
    let per_curve = cfg.theta1_grid.len() * cfg.repeats;
    for (ri, chunk) in fits.chunks(per_curve).enumerate() {
        let state = cfg.prepare(cfg.purities[ri])?;
        let reference_visibility =
            chunk.iter().map(|(_, f)| f.reference.v_fit).sum::<f64>() / chunk.len() as f64;
        let points = chunk
            .chunks(cfg.repeats)
            .enumerate()
            .map(|(ti, reps)| {
                let theta1 = cfg.theta1_grid[ti].to_radians();
                let theory = mixed_phase_for(
                    state.r,
                    state.dominant_eigenvector,
                    solid_angle_from_waveplates(theta1, theta2),
                );
                let repeats = reps.iter().map(|(_, f)| *f).collect();
                combine(cfg.theta1_grid[ti], repeats, theory, reference_visibility)
            })
            .collect();
        let mut curve = CurveReport {
            r: cfg.purities[ri],
            r_state: state.r.value(),
            dominant: state.dominant_eigenvector,
            reference_visibility,
            points,
            chi2_phase: None,
            chi2_visibility: 0.0,
            retrodicted: None,
        };
        curve_statistics(&mut curve)?;
        let sign = curve.dominant.sign();
        let phase_points: Vec<PhasePoint> = curve
            .defined_points()
            .map(|p| PhasePoint {
                theta1: p.theta1_deg.to_radians() - theta2,
                gamma: sign * p.gamma,
                sigma: p.sigma_gamma,
            })
            .collect();
        curve.retrodicted = retrodict_purity(&phase_points).ok();
        curves.push(curve);
    }

    Ok(SweepReport {
        method: cfg.method,
        theta2_deg: cfg.theta2,
        baseline_visibility: cfg.interferometer.baseline_visibility,
        frequency,
        curves,
    })
}

/// Exact analytic row for `cmd_theory`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub theta1_deg: f64,
    pub omega: f64,
    pub r: f64,
    pub theory: PhaseVisibility,
}

pub const THEORY_CSV_HEADER: &str = "theta1_deg,omega_rad,r,gamma_rad,visibility";

/// Analytic phase and visibility (no baseline) for an R-dominant input, for
/// every `r` and `theta1` (degrees).
pub fn theory_table(
    purities: &[f64],
    theta1_grid_deg: &[f64],
    theta2_deg: f64,
) -> Result<Vec<TheoryRow>> {
    let mut rows = Vec::with_capacity(purities.len() * theta1_grid_deg.len());
    for &r in purities {
        let purity = Purity::new(r)?;
        for &t in theta1_grid_deg {
            let omega = solid_angle_from_waveplates(t.to_radians(), theta2_deg.to_radians());
            rows.push(TheoryRow {
                theta1_deg: t,
                omega: omega.0,
                r,
                theory: mixed_phase_for(purity, Handedness::R, omega),
            });
        }
    }
    Ok(rows)
}

/// Formats a float for CSV output; undefined values become `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

fn gamma_or_nan(pv: &PhaseVisibility) -> f64 {
    if pv.defined {
        pv.gamma
    } else {
        f64::NAN
    }
}

pub fn theory_csv(rows: &[TheoryRow]) -> String {
    let mut out = format!("{THEORY_CSV_HEADER}\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(row.theta1_deg),
            num(row.omega),
            num(row.r),
            num(gamma_or_nan(&row.theory)),
            num(row.theory.v)
        );
    }
    out
}

pub const CURVE_CSV_HEADER: &str = "theta1_deg,gamma_rad,sigma_gamma_rad,spread_gamma_rad,visibility,sigma_visibility,spread_visibility,gamma_theory_rad,visibility_theory,defined";

/// Extracted against theory for one curve; undefined phases are `nan`.
pub fn curve_csv(curve: &CurveReport) -> String {
    let mut out = format!("{CURVE_CSV_HEADER}\n");
    for p in &curve.points {
        let (g, sg, spg) = if p.defined {
            (p.gamma, p.sigma_gamma, p.spread_gamma)
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            num(p.theta1_deg),
            num(g),
            num(sg),
            num(spg),
            num(p.visibility),
            num(p.sigma_visibility),
            num(p.spread_visibility),
            num(gamma_or_nan(&p.theory)),
            num(p.visibility_theory),
            p.defined
        );
    }
    out
}

pub const SUMMARY_CSV_HEADER: &str = "method,r,r_state,dominant,reference_visibility,points,defined_points,chi2_phase,chi2_visibility,spread_ratio_phase,r_retrodicted,sigma_r";

pub fn summary_csv(report: &SweepReport) -> String {
    let mut out = format!("{SUMMARY_CSV_HEADER}\n");
    for c in &report.curves {
        let (rr, sr) = c
            .retrodicted
            .map_or((f64::NAN, f64::NAN), |e| (e.r, e.sigma_r));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            report.method,
            num(c.r),
            num(c.r_state),
            c.dominant,
            num(c.reference_visibility),
            c.points.len(),
            c.defined_points().count(),
            num(c.chi2_phase.unwrap_or(f64::NAN)),
            num(c.chi2_visibility),
            num(c.spread_ratio_phase().unwrap_or(f64::NAN)),
            num(rr),
            num(sr)
        );
    }
    out
}

/// Per-repeat fit parameters for every scan pair.
pub fn fits_csv(report: &SweepReport) -> String {
    let sig: Vec<String> = FIT_CSV_HEADER
        .split(',')
        .map(|c| format!("signal_{c}"))
        .collect();
    let reference: Vec<String> = FIT_CSV_HEADER
        .split(',')
        .map(|c| format!("reference_{c}"))
        .collect();
    let mut out = format!(
        "r,theta1_deg,repeat,{},{},{}\n",
        sig.join(","),
        reference.join(","),
        crate::fit::PHASE_DIFFERENCE_CSV_HEADER
    );
    for c in &report.curves {
        for p in &c.points {
            for (rep, f) in p.repeats.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    num(c.r),
                    num(p.theta1_deg),
                    rep,
                    f.signal.csv_row(),
                    f.reference.csv_row(),
                    f.phase.csv_row()
                );
            }
        }
    }
    out
}

/// Plain-text statistics summary.
pub fn report_text(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method: {}", report.method);
    let _ = writeln!(
        out,
        "fringe frequency: {:.6} +/- {:.2e} rad/V (period {:.3} V)",
        report.frequency.k,
        report.frequency.sigma_k,
        TAU / report.frequency.k
    );
    let _ = writeln!(
        out,
        "baseline visibility (configured): {}",
        report.baseline_visibility
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>7} {:>10} {:>10} {:>8} {:>16}",
        "r", "defined", "v_ref", "chi2_phase", "chi2_vis", "spread", "r_retro"
    );
    for c in &report.curves {
        let retro = c.retrodicted.map_or("-".to_string(), |e| {
            format!("{:.3} +/- {:.3}", e.r, e.sigma_r)
        });
        let _ = writeln!(
            out,
            "{:>6.3} {:>8} {:>7.4} {:>10} {:>10.3} {:>8} {:>16}",
            c.r,
            format!("{}/{}", c.defined_points().count(), c.points.len()),
            c.reference_visibility,
            c.chi2_phase.map_or("-".to_string(), |x| format!("{x:.3}")),
            c.chi2_visibility,
            c.spread_ratio_phase()
                .map_or("-".to_string(), |x| format!("{x:.2}")),
            retro
        );
    }
    let _ = writeln!(out);
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |x| format!("{x:.3}"));
    let _ = writeln!(
        out,
        "mean reduced chi2: phase {} visibility {}",
        fmt(report.mean_chi2_phase()),
        fmt(report.mean_chi2_visibility())
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_rows_match_examples() {
        let rows = theory_table(&[1.0, 0.5, 0.0], &[15.0, 45.0], 0.0).unwrap();
        assert!((rows[0].theory.gamma + std::f64::consts::FRAC_PI_6).abs() < 1e-4);
        assert!((rows[2].theory.gamma + 0.2810).abs() < 1e-4);
        assert!((rows[2].theory.v - 0.9014).abs() < 1e-4);
        assert_eq!(rows[4].theory.gamma, 0.0);
        assert!((rows[4].theory.v - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(!rows[5].theory.defined);
        let csv = theory_csv(&rows);
        assert!(csv.starts_with(THEORY_CSV_HEADER));
        assert!(csv.lines().last().unwrap().contains("nan"));
    }

    #[test]
    fn circular_statistics() {
        let a = [3.1, -3.1];
        assert!((circular_mean(&a).abs() - std::f64::consts::PI).abs() < 1e-12);
        assert!(standard_error(&[0.1]).is_nan());
        assert!((standard_error(&[1.0, -1.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn num_formats_nan() {
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.25), "0.25");
    }
}
