//! Photon-counting Mach-Zehnder model.
//!
//! A PZT scans the path difference `dL = gain * V + offset`; at each voltage
//! the detector accumulates Poisson counts with mean
//! `(rate * P(dL) + background) * T`, where
//! `P = (1 + v0 v cos(2 pi dL / lambda - gamma)) / 2`.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::phase::{arm_unitary, interferometric_oracle, PhaseVisibility};
use crate::prep::PreparedState;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterferometerConfig {
    /// Meters.
    pub wavelength: f64,
    /// Meters of path difference per volt.
    pub pzt_gain: f64,
    /// Meters.
    pub pzt_offset: f64,
    /// Fringe contrast of the empty interferometer (mode matching).
    pub baseline_visibility: f64,
    /// Counts per second reaching the output port with `P = 1`.
    pub mean_rate: f64,
    /// Seconds per voltage step.
    pub accumulation: f64,
    /// Flat counts per second (accidentals, dark counts).
    pub background_rate: f64,
    /// Volts.
    pub voltages: Vec<f64>,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        InterferometerConfig {
            wavelength: 670e-9,
            pzt_gain: 17.5e-9,
            pzt_offset: 0.0,
            baseline_visibility: 0.95,
            mean_rate: 500.0,
            accumulation: 2.0,
            background_rate: 0.0,
            voltages: default_voltages(),
        }
    }
}

/// 30 V to 70 V in 5 V steps.
pub fn default_voltages() -> Vec<f64> {
    (0..9).map(|i| 30.0 + 5.0 * i as f64).collect()
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.wavelength > 0.0) {
            return bad("wavelength must be positive");
        }
        if !(self.pzt_gain > 0.0) {
            return bad("pzt_gain must be positive");
        }
        if !(0.0..=1.0).contains(&self.baseline_visibility) {
            return bad("baseline_visibility must lie in [0, 1]");
        }
        if !(self.mean_rate >= 0.0) || !(self.background_rate >= 0.0) {
            return bad("rates must be non-negative");
        }
        if !(self.accumulation >= 0.0) {
            return bad("accumulation must be non-negative");
        }
        if self.voltages.len() < 5 {
            return bad("need at least 5 voltage points");
        }
        if !self.pzt_offset.is_finite() || self.voltages.iter().any(|v| !v.is_finite()) {
            return bad("non-finite voltage or offset");
        }
        Ok(())
    }

    /// Fringe angular frequency in radians per volt.
    pub fn angular_frequency(&self) -> f64 {
        TAU * self.pzt_gain / self.wavelength
    }

    /// Fringe period in volts.
    pub fn period_volts(&self) -> f64 {
        self.wavelength / self.pzt_gain
    }

    pub fn path_difference(&self, volts: f64) -> f64 {
        self.pzt_gain * volts + self.pzt_offset
    }

    /// Mean counts at `P = 1` per voltage step.
    pub fn counts_per_point(&self) -> f64 {
        self.mean_rate * self.accumulation
    }
}

/// Output-port probability for path difference `dl` (meters).
pub fn fringe_probability(dl: f64, pv: &PhaseVisibility, v0: f64, wavelength: f64) -> f64 {
    let p = 0.5 * (1.0 + v0 * pv.v * (TAU * dl / wavelength - pv.gamma).cos());
    p.clamp(0.0, 1.0)
}

/// One interferogram: counts versus PZT voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub voltages: Vec<f64>,
    pub expected_counts: Vec<f64>,
    pub counts: Vec<u64>,
    pub theta1: f64,
    pub seed: u64,
}

pub const SCAN_CSV_HEADER: &str = "voltage_V,expected_counts,counts";

impl FringeScan {
    pub fn len(&self) -> usize {
        self.voltages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voltages.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.len() + 1));
        out.push_str(SCAN_CSV_HEADER);
        out.push('\n');
        for ((v, e), c) in self
            .voltages
            .iter()
            .zip(&self.expected_counts)
            .zip(&self.counts)
        {
            out.push_str(&format!("{v},{e},{c}\n"));
        }
        out
    }

    /// Parses the CSV written by [`FringeScan::to_csv`]. `theta1` and `seed`
    /// are not stored in the file and come from the manifest.
    pub fn from_csv(text: &str, theta1: f64, seed: u64) -> std::result::Result<Self, String> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == SCAN_CSV_HEADER => {}
            other => return Err(format!("unexpected header {other:?}")),
        }
        let mut scan = FringeScan {
            voltages: Vec::new(),
            expected_counts: Vec::new(),
            counts: Vec::new(),
            theta1,
            seed,
        };
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(format!("line {}: expected 3 fields", n + 2));
            }
            let bad = |what: &str| format!("line {}: bad {what}", n + 2);
            scan.voltages
                .push(fields[0].parse().map_err(|_| bad("voltage"))?);
            scan.expected_counts
                .push(fields[1].parse().map_err(|_| bad("expected count"))?);
            scan.counts
                .push(fields[2].parse().map_err(|_| bad("count"))?);
        }
        Ok(scan)
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed derived from a parent seed and a list of indices.
pub fn derive_seed(parent: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(parent), |acc, &p| mix64(acc ^ mix64(p)))
}

fn sample_poisson(mean: f64, seed: u64, index: u64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let dist = Poisson::new(mean).expect("finite positive mean");
    dist.sample(&mut rng) as u64
}

/// Draws one scan. Point `i` uses ChaCha stream `i` of `seed`, so the result
/// depends only on `(cfg, pv, seed)`.
pub fn simulate_scan(
    cfg: &InterferometerConfig,
    pv: &PhaseVisibility,
    theta1: f64,
    seed: u64,
) -> FringeScan {
    let expected_counts: Vec<f64> = cfg
        .voltages
        .iter()
        .map(|&volts| {
            let p = fringe_probability(
                cfg.path_difference(volts),
                pv,
                cfg.baseline_visibility,
                cfg.wavelength,
            );
            (cfg.mean_rate * p + cfg.background_rate) * cfg.accumulation
        })
        .collect();
    let counts = expected_counts
        .iter()
        .enumerate()
        .map(|(i, &m)| sample_poisson(m, seed, i as u64))
        .collect();
    FringeScan {
        voltages: cfg.voltages.clone(),
        expected_counts,
        counts,
        theta1,
        seed,
    }
}

/// Seed of the reference scan paired with a signal scan seeded `seed`.
pub fn reference_seed(seed: u64) -> u64 {
    derive_seed(seed, &[u64::from_le_bytes(*b"refscan\0")])
}

/// Signal scan at `(theta1, theta2)` and reference scan at `(0, 0)`.
pub fn simulate_setting_pair(
    cfg: &InterferometerConfig,
    state: &PreparedState,
    theta1: f64,
    theta2: f64,
    seed: u64,
) -> Result<(FringeScan, FringeScan)> {
    let u_ref = arm_unitary(0.0, 0.0);
    let pv = interferometric_oracle(&arm_unitary(theta1, theta2), &u_ref, &state.rho)?;
    let pv_ref = interferometric_oracle(&u_ref, &u_ref, &state.rho)?;
    Ok((
        simulate_scan(cfg, &pv, theta1, seed),
        simulate_scan(cfg, &pv_ref, 0.0, reference_seed(seed)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{mixed_phase_analytic, SolidAngle};
    use crate::prep::prepare_decoherer;
    use crate::qubit::Purity;
    use std::f64::consts::FRAC_PI_4;

    fn pv(gamma: f64, v: f64) -> PhaseVisibility {
        PhaseVisibility {
            gamma,
            v,
            defined: v > 0.0,
        }
    }

    #[test]
    fn probability_examples() {
        for dl in [0.0, 1e-7, 3.3e-7] {
            assert_eq!(fringe_probability(dl, &pv(0.4, 0.0), 0.95, 670e-9), 0.5);
        }
        assert_eq!(fringe_probability(0.0, &pv(0.0, 1.0), 1.0, 670e-9), 1.0);

        let theory =
            mixed_phase_analytic(Purity::new(0.5).unwrap(), SolidAngle(60f64.to_radians()));
        let p = fringe_probability(0.0, &theory, 0.95, 670e-9);
        assert!((p - 0.9114).abs() < 5e-5, "{p}");
    }

    #[test]
    fn default_grid_spans_just_over_a_period() {
        let cfg = InterferometerConfig::default();
        assert_eq!(
            cfg.voltages,
            vec![30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0]
        );
        let period = cfg.period_volts();
        assert!((period - 38.2857).abs() < 1e-3);
        assert!(period < 40.0);
        assert_eq!(cfg.counts_per_point(), 1000.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let mut cfg = InterferometerConfig::default();
        cfg.voltages.truncate(4);
        assert!(cfg.validate().is_err());
        let cfg = InterferometerConfig {
            baseline_visibility: 1.2,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = InterferometerConfig {
            mean_rate: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_rate_gives_zero_counts() {
        let cfg = InterferometerConfig {
            mean_rate: 0.0,
            ..Default::default()
        };
        let scan = simulate_scan(&cfg, &pv(0.0, 1.0), 0.0, 9);
        assert!(scan.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = InterferometerConfig::default();
        let a = simulate_scan(&cfg, &pv(0.3, 0.8), 0.1, 42);
        let b = simulate_scan(&cfg, &pv(0.3, 0.8), 0.1, 42);
        let c = simulate_scan(&cfg, &pv(0.3, 0.8), 0.1, 43);
        assert_eq!(a, b);
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn expected_counts_bounds() {
        let cfg = InterferometerConfig {
            background_rate: 20.0,
            ..Default::default()
        };
        let scan = simulate_scan(&cfg, &pv(1.0, 1.0), 0.0, 1);
        let lo = cfg.background_rate * cfg.accumulation;
        let hi = (cfg.mean_rate + cfg.background_rate) * cfg.accumulation;
        assert!(scan.expected_counts.iter().all(|&e| e >= lo && e <= hi));
    }

    #[test]
    fn ensemble_mean_matches_expectation() {
        let cfg = InterferometerConfig::default();
        let p = pv(-0.4, 0.7);
        let n = 10_000;
        let mut sums = vec![0.0; cfg.voltages.len()];
        let mut expected = Vec::new();
        for seed in 0..n {
            let scan = simulate_scan(&cfg, &p, 0.0, seed);
            for (s, &c) in sums.iter_mut().zip(&scan.counts) {
                *s += c as f64;
            }
            expected = scan.expected_counts;
        }
        for (s, e) in sums.iter().zip(&expected) {
            let mean = s / n as f64;
            // Poisson: sigma = sqrt(e)
            assert!(
                (mean - e).abs() < 5.0 * e.sqrt() / (n as f64).sqrt(),
                "{mean} vs {e}"
            );
        }
    }

    #[test]
    fn csv_round_trip() {
        let scan = simulate_scan(&InterferometerConfig::default(), &pv(0.2, 0.9), 0.3, 5);
        let text = scan.to_csv();
        assert!(text.starts_with("voltage_V,expected_counts,counts\n"));
        let back = FringeScan::from_csv(&text, 0.3, 5).unwrap();
        assert_eq!(back, scan);
        assert!(FringeScan::from_csv("a,b\n", 0.0, 0).is_err());
    }

    #[test]
    fn setting_pair_reference_matches_at_zero() {
        let cfg = InterferometerConfig::default();
        let state = prepare_decoherer(0.3, 0.0, FRAC_PI_4).unwrap();
        let (sig, reference) = simulate_setting_pair(&cfg, &state, 0.0, 0.0, 11).unwrap();
        assert_eq!(sig.expected_counts, reference.expected_counts);
        assert_ne!(sig.seed, reference.seed);
    }

    #[test]
    fn seeds_are_distinct() {
        let a = derive_seed(1, &[0, 0, 0]);
        let b = derive_seed(1, &[0, 0, 1]);
        let c = derive_seed(1, &[0, 1, 0]);
        let d = derive_seed(2, &[0, 0, 0]);
        assert!(a != b && a != c && b != c && a != d);
        assert_eq!(a, derive_seed(1, &[0, 0, 0]));
    }
}
