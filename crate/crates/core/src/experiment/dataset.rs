//! Simulated datasets: a directory with `config.toml`, `manifest.csv` and one
//! CSV per scan under `scans/`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::interferometer::{derive_seed, reference_seed, simulate_setting_pair, FringeScan};
use crate::prep::Handedness;
use crate::{Error, Result};

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.csv";
pub const SCAN_DIR: &str = "scans";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Signal,
    Reference,
}

impl Role {
    fn tag(self) -> &'static str {
        match self {
            Role::Signal => "sig",
            Role::Reference => "ref",
        }
    }
}

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub file: String,
    pub role: Role,
    pub method: Method,
    pub r_index: usize,
    pub r: f64,
    pub theta1_index: usize,
    pub theta1_deg: f64,
    pub theta2_deg: f64,
    pub repeat: usize,
    pub seed: u64,
    pub dominant: Handedness,
}

impl ScanRecord {
    fn key(&self) -> (usize, usize, usize, Role) {
        (self.r_index, self.theta1_index, self.repeat, self.role)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: ExperimentConfig,
    /// Manifest order: purity, then theta1, then repeat; signal before reference.
    pub entries: Vec<(ScanRecord, FringeScan)>,
}

pub fn scan_file_name(
    method: Method,
    r: f64,
    theta1_deg: f64,
    repeat: usize,
    role: Role,
) -> String {
    format!(
        "{method}_r{r:.3}_t{theta1_deg:+07.2}_rep{repeat}_{}.csv",
        role.tag()
    )
}

/// Seed of the signal scan at grid position `(r_index, theta1_index, repeat)`.
pub fn scan_seed(master_seed: u64, r_index: usize, theta1_index: usize, repeat: usize) -> u64 {
    derive_seed(
        master_seed,
        &[r_index as u64, theta1_index as u64, repeat as u64],
    )
}

/// Runs every `(r, theta1, repeat)` setting of `cfg`. Scans are generated in
/// parallel; each has its own seed so the result does not depend on
/// scheduling.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Dataset> {
    cfg.validate()?;
    let states = cfg
        .purities
        .iter()
        .map(|&r| cfg.prepare(r))
        .collect::<Result<Vec<_>>>()?;
    let mut tasks = Vec::new();
    for ri in 0..cfg.purities.len() {
        for ti in 0..cfg.theta1_grid.len() {
            for rep in 0..cfg.repeats {
                tasks.push((ri, ti, rep));
            }
        }
    }
    let theta2 = cfg.theta2.to_radians();
    let pairs = tasks
        .par_iter()
        .map(|&(ri, ti, rep)| {
            let seed = scan_seed(cfg.master_seed, ri, ti, rep);
            let theta1 = cfg.theta1_grid[ti].to_radians();
            let (sig, reference) =
                simulate_setting_pair(&cfg.interferometer, &states[ri], theta1, theta2, seed)?;
            let record = |role: Role, seed: u64| ScanRecord {
                file: scan_file_name(cfg.method, cfg.purities[ri], cfg.theta1_grid[ti], rep, role),
                role,
                method: cfg.method,
                r_index: ri,
                r: cfg.purities[ri],
                theta1_index: ti,
                theta1_deg: cfg.theta1_grid[ti],
                theta2_deg: cfg.theta2,
                repeat: rep,
                seed,
                dominant: states[ri].dominant_eigenvector,
            };
            Ok([
                (record(Role::Signal, seed), sig),
                (record(Role::Reference, reference_seed(seed)), reference),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config: cfg.clone(),
        entries: pairs.into_iter().flatten().collect(),
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn manifest_csv(records: impl Iterator<Item = ScanRecord>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in records {
        w.serialize(rec)
            .map_err(|e| Error::InvalidArgument(format!("manifest row: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidArgument(format!("manifest: {e}")))
}

/// Writes `ds` under `dir`, creating it if needed.
pub fn write_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    let scans = dir.join(SCAN_DIR);
    fs::create_dir_all(&scans).map_err(|e| Error::io(&scans, e))?;
    write_file(&dir.join(CONFIG_FILE), ds.config.to_toml().as_bytes())?;
    let manifest = manifest_csv(ds.entries.iter().map(|(r, _)| r.clone()))?;
    write_file(&dir.join(MANIFEST_FILE), &manifest)?;
    ds.entries
        .par_iter()
        .try_for_each(|(rec, scan)| write_file(&scans.join(&rec.file), scan.to_csv().as_bytes()))
}

fn read_manifest(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(text.as_slice())
        .deserialize()
        .collect::<std::result::Result<Vec<ScanRecord>, _>>()
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
}

/// Loads a dataset written by [`write_dataset`]. Scans listed in the config
/// grid but absent from the manifest or from disk are reported together as
/// [`Error::PartialDataset`].
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let config = ExperimentConfig::load(&dir.join(CONFIG_FILE), None)?;
    let records = read_manifest(&dir.join(MANIFEST_FILE))?;

    let listed: BTreeSet<_> = records.iter().map(ScanRecord::key).collect();
    let mut missing = Vec::new();
    for (ri, &r) in config.purities.iter().enumerate() {
        for (ti, &t) in config.theta1_grid.iter().enumerate() {
            for rep in 0..config.repeats {
                for role in [Role::Signal, Role::Reference] {
                    if !listed.contains(&(ri, ti, rep, role)) {
                        missing.push(scan_file_name(config.method, r, t, rep, role));
                    }
                }
            }
        }
    }
    let scan_dir = dir.join(SCAN_DIR);
    let loaded = records
        .into_par_iter()
        .map(|rec| {
            let path = scan_dir.join(&rec.file);
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Err(rec.file)),
                Err(e) => return Err(Error::io(&path, e)),
            };
            let theta1 = match rec.role {
                Role::Signal => rec.theta1_deg.to_radians(),
                Role::Reference => 0.0,
            };
            let scan = FringeScan::from_csv(&text, theta1, rec.seed)
                .map_err(|msg| Error::Parse { path, msg })?;
            Ok(Ok((rec, scan)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(loaded.len());
    for item in loaded {
        match item {
            Ok(e) => entries.push(e),
            Err(file) => missing.push(file),
        }
    }
    if !missing.is_empty() {
        return Err(Error::PartialDataset(missing));
    }
    entries.sort_by_key(|(rec, _)| rec.key());
    Ok(Dataset { config, entries })
}
