use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::interferometer::InterferometerConfig;
use crate::prep::{
    angle_for_purity, prepare_decoherer, prepare_entangled, MethodKind, PreparedState,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Decoherer,
    Entangled,
    CoherentLaser,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Decoherer, Method::Entangled, Method::CoherentLaser];

    pub fn name(self) -> &'static str {
        match self {
            Method::Decoherer => "decoherer",
            Method::Entangled => "entangled",
            Method::CoherentLaser => "coherent-laser",
        }
    }

    /// Contrast of the empty interferometer for each setup.
    pub fn default_baseline_visibility(self) -> f64 {
        match self {
            Method::Decoherer => 0.95,
            Method::Entangled => 0.98,
            Method::CoherentLaser => 0.93,
        }
    }

    /// `(mean_rate, accumulation)`: 1000 counts per point for the photon
    /// sources, 1000x that for the laser.
    fn default_rate(self) -> (f64, f64) {
        match self {
            Method::Decoherer => (500.0, 2.0),
            Method::Entangled => (1000.0 / 6.0, 6.0),
            Method::CoherentLaser => (500.0 * COHERENT_COUNT_MULTIPLIER, 2.0),
        }
    }

    fn kind(self) -> MethodKind {
        match self {
            Method::Entangled => MethodKind::Entangled,
            Method::Decoherer | Method::CoherentLaser => MethodKind::Decoherer,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

pub const COHERENT_COUNT_MULTIPLIER: f64 = 1000.0;

/// Settings for one simulated sweep. On disk this is a flat TOML file whose
/// keys are the field names below plus the [`InterferometerConfig`] fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub purities: Vec<f64>,
    /// Degrees.
    pub theta1_grid: Vec<f64>,
    /// Degrees.
    pub theta2: f64,
    pub repeats: usize,
    /// Residual H/V coherence after the decoherers (decoherer and laser).
    pub coherence: f64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub interferometer: InterferometerConfig,
}

/// -45 deg to 45 deg in 2.5 deg steps.
pub fn default_theta1_grid() -> Vec<f64> {
    (-18..=18).map(|i| 2.5 * i as f64).collect()
}

/// Representative purities for the figure curves.
pub const DEFAULT_PURITIES: [f64; 5] = [1.0, 0.81, 0.57, 0.3, 0.0];

impl ExperimentConfig {
    pub fn for_method(method: Method) -> Self {
        let (mean_rate, accumulation) = method.default_rate();
        ExperimentConfig {
            method,
            purities: DEFAULT_PURITIES.to_vec(),
            theta1_grid: default_theta1_grid(),
            theta2: 0.0,
            repeats: 4,
            coherence: 0.0,
            master_seed: 1,
            output_dir: PathBuf::from("out"),
            interferometer: InterferometerConfig {
                baseline_visibility: method.default_baseline_visibility(),
                mean_rate,
                accumulation,
                ..InterferometerConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.purities.is_empty() {
            return Err(Error::Config("no purities configured".into()));
        }
        if let Some(r) = self.purities.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::Config(format!("purity {r} outside [0, 1]")));
        }
        if self.theta1_grid.is_empty() || self.theta1_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config(
                "theta1_grid must be non-empty and finite".into(),
            ));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.coherence) {
            return Err(Error::Config(format!(
                "coherence {} outside [0, 1]",
                self.coherence
            )));
        }
        if self.master_seed > i64::MAX as u64 {
            return Err(Error::Config("master_seed must be below 2^63".into()));
        }
        if !self.theta2.is_finite() {
            return Err(Error::Config("theta2 must be finite".into()));
        }
        self.interferometer.validate()
    }

    /// Parses a flat TOML config. Keys missing from the file take the
    /// defaults of its `method` (or of `method_override`, which wins).
    pub fn from_toml(text: &str, method_override: Option<Method>) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let file_method = match table.remove("method") {
            Some(toml::Value::String(s)) => Some(s.parse::<Method>()?),
            Some(other) => {
                return Err(Error::Config(format!(
                    "method must be a string, got {other}"
                )))
            }
            None => None,
        };
        let method = method_override.or(file_method).unwrap_or(Method::Decoherer);
        let base = Self::for_method(method);
        let mut merged = toml::Table::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        let known: BTreeSet<String> = merged.keys().cloned().collect();
        for (key, value) in table {
            if !known.contains(&key) {
                return Err(Error::Config(format!("unknown key {key:?}")));
            }
            // let integer literals stand in for floats
            let value = match (&merged[&key], value) {
                (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
                (toml::Value::Array(_), toml::Value::Array(items)) => toml::Value::Array(
                    items
                        .into_iter()
                        .map(|v| match v {
                            toml::Value::Integer(i) => toml::Value::Float(i as f64),
                            other => other,
                        })
                        .collect(),
                ),
                (_, v) => v,
            };
            merged.insert(key, value);
        }
        let cfg: ExperimentConfig = merged
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, method_override: Option<Method>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, method_override)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Prepared input state for purity `r`.
    pub fn prepare(&self, r: f64) -> Result<PreparedState> {
        let angle = angle_for_purity(r, self.method.kind())?;
        let qwp = std::f64::consts::FRAC_PI_4;
        match self.method.kind() {
            MethodKind::Decoherer => prepare_decoherer(angle, self.coherence, qwp),
            MethodKind::Entangled => prepare_entangled(angle, qwp),
        }
    }

    /// Search interval for the fringe frequency: half to one and a half times
    /// the nominal PZT calibration, kept below the grid Nyquist limit.
    pub fn frequency_search_range(&self) -> (f64, f64) {
        let k = self.interferometer.angular_frequency();
        let mut volts = self.interferometer.voltages.clone();
        volts.sort_by(f64::total_cmp);
        let spacing = volts
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        let nyquist = std::f64::consts::PI / spacing;
        (0.5 * k, (1.5 * k).min(0.98 * nyquist))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_method() {
        let d = ExperimentConfig::for_method(Method::Decoherer);
        assert_eq!(d.interferometer.counts_per_point(), 1000.0);
        assert_eq!(d.theta1_grid.len(), 37);
        assert_eq!(d.theta1_grid[0], -45.0);
        assert_eq!(d.repeats, 4);
        let e = ExperimentConfig::for_method(Method::Entangled);
        assert!((e.interferometer.counts_per_point() - 1000.0).abs() < 1e-9);
        assert_eq!(e.interferometer.accumulation, 6.0);
        let c = ExperimentConfig::for_method(Method::CoherentLaser);
        assert_eq!(c.interferometer.counts_per_point(), 1e6);
        let v0: Vec<f64> = Method::ALL
            .iter()
            .map(|m| m.default_baseline_visibility())
            .collect();
        assert_eq!(v0, vec![0.95, 0.98, 0.93]);
    }

    #[test]
    fn toml_round_trip_and_overrides() {
        let cfg = ExperimentConfig::for_method(Method::Entangled);
        let text = cfg.to_toml();
        // flat: no table headers
        assert!(!text.lines().any(|l| l.starts_with('[')));
        assert_eq!(ExperimentConfig::from_toml(&text, None).unwrap(), cfg);

        let cfg =
            ExperimentConfig::from_toml("purities = [0.5]\nrepeats = 2\nmean_rate = 100\n", None)
                .unwrap();
        assert_eq!(cfg.method, Method::Decoherer);
        assert_eq!(cfg.purities, vec![0.5]);
        assert_eq!(cfg.repeats, 2);
        assert_eq!(cfg.interferometer.mean_rate, 100.0);

        let cfg =
            ExperimentConfig::from_toml("method = \"decoherer\"\n", Some(Method::CoherentLaser))
                .unwrap();
        assert_eq!(cfg.method, Method::CoherentLaser);
        assert_eq!(cfg.interferometer.baseline_visibility, 0.93);

        let cfg = ExperimentConfig::from_toml(
            "theta1_grid = [0, 15, 30]\nvoltages = [30, 40, 50, 60, 70]\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.theta1_grid, vec![0.0, 15.0, 30.0]);
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_toml("bogus = 1\n", None).is_err());
        assert!(ExperimentConfig::from_toml("purities = [1.5]\n", None).is_err());
        assert!(ExperimentConfig::from_toml("repeats = 0\n", None).is_err());
        assert!(ExperimentConfig::from_toml("method = \"laser\"\n", None).is_err());
        assert!(ExperimentConfig::from_toml("voltages = [30, 40]\n", None).is_err());
        assert!(ExperimentConfig::from_toml("= broken", None).is_err());
    }

    #[test]
    fn prepared_purity_matches_config() {
        for m in Method::ALL {
            let cfg = ExperimentConfig::for_method(m);
            for r in [0.0, 0.57, 1.0] {
                let s = cfg.prepare(r).unwrap();
                assert!((s.r.value() - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn search_range_brackets_nominal() {
        let cfg = ExperimentConfig::for_method(Method::Decoherer);
        let (lo, hi) = cfg.frequency_search_range();
        let k = cfg.interferometer.angular_frequency();
        assert!(lo < k && k < hi && hi < std::f64::consts::PI / 5.0);
    }
}
