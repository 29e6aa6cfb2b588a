//! Configuration-driven sweeps: simulate a dataset, analyze it, plot it.

pub mod analysis;
pub mod config;
pub mod dataset;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

pub use analysis::{analyze, SweepReport};
pub use config::{ExperimentConfig, Method};
pub use dataset::{read_dataset, simulate, write_dataset, Dataset};

use crate::{Error, Result};

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `theory.csv` for every configured purity and theta1.
pub fn cmd_theory(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    let rows = analysis::theory_table(&cfg.purities, &cfg.theta1_grid, cfg.theta2)?;
    let path = out.join("theory.csv");
    write(&path, &analysis::theory_csv(&rows))?;
    Ok(path)
}

/// Simulates the sweep and writes it as a dataset directory.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Dataset> {
    let ds = simulate(cfg)?;
    write_dataset(&ds, out)?;
    Ok(ds)
}

pub fn curve_file_name(method: Method, r: f64) -> String {
    format!("curve_{method}_r{r:.3}.csv")
}

/// Writes curve CSVs, `summary.csv`, `fits.csv`, `report.txt` and the plot.
pub fn write_analysis(report: &SweepReport, out: &Path) -> Result<()> {
    for curve in &report.curves {
        write(
            &out.join(curve_file_name(report.method, curve.r)),
            &analysis::curve_csv(curve),
        )?;
    }
    write(&out.join("summary.csv"), &analysis::summary_csv(report))?;
    write(&out.join("fits.csv"), &analysis::fits_csv(report))?;
    write(&out.join("report.txt"), &analysis::report_text(report))?;
    write(
        &out.join(format!("{}.svg", report.method)),
        &plot::sweep_svg(report),
    )
}

/// Analyzes the dataset in `dataset_dir`, writing results to `out`.
pub fn cmd_analyze(dataset_dir: &Path, out: &Path) -> Result<SweepReport> {
    let ds = read_dataset(dataset_dir)?;
    let report = analyze(&ds)?;
    write_analysis(&report, out)?;
    Ok(report)
}

/// Simulation plus analysis for all three methods, and the six-panel figure.
///
/// `base` supplies the purities, grid, repeats and seed; each method keeps its
/// own rates and baseline visibility unless `base` is for that method.
pub fn cmd_reproduce_fig3(base: &ExperimentConfig, out: &Path) -> Result<Vec<SweepReport>> {
    let mut reports = Vec::new();
    for method in Method::ALL {
        let cfg = config_for(base, method);
        let dir = out.join(method.name());
        let ds = cmd_simulate(&cfg, &dir.join("data"))?;
        let report = analyze(&ds)?;
        write_analysis(&report, &dir)?;
        reports.push(report);
    }
    write(&out.join("fig3.svg"), &plot::fig3_svg(&reports))?;
    Ok(reports)
}

/// `base` moved to `method`, keeping the sweep definition.
pub fn config_for(base: &ExperimentConfig, method: Method) -> ExperimentConfig {
    if base.method == method {
        return base.clone();
    }
    let defaults = ExperimentConfig::for_method(method);
    ExperimentConfig {
        method,
        interferometer: crate::interferometer::InterferometerConfig {
            baseline_visibility: defaults.interferometer.baseline_visibility,
            mean_rate: defaults.interferometer.mean_rate,
            accumulation: defaults.interferometer.accumulation,
            ..base.interferometer.clone()
        },
        ..base.clone()
    }
}

/// Statistics report of the dataset in `dataset_dir` as text.
pub fn cmd_report(dataset_dir: &Path) -> Result<String> {
    let ds = read_dataset(dataset_dir)?;
    Ok(analysis::report_text(&analyze(&ds)?))
}
