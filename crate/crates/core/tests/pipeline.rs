use std::fs;

use geophase::experiment::dataset::{read_dataset, MANIFEST_FILE, SCAN_DIR};
use geophase::experiment::{
    analyze, cmd_analyze, cmd_simulate, cmd_theory, simulate, ExperimentConfig, Method,
};
use geophase::{wrap_angle, Error};
use rayon::prelude::*;

fn small(method: Method) -> ExperimentConfig {
    ExperimentConfig {
        purities: vec![0.81],
        theta1_grid: vec![20.0],
        repeats: 1,
        ..ExperimentConfig::for_method(method)
    }
}

#[test]
fn one_setting_gives_two_scans_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    cmd_simulate(&small(Method::Decoherer), tmp.path()).unwrap();
    let scans: Vec<_> = fs::read_dir(tmp.path().join(SCAN_DIR)).unwrap().collect();
    assert_eq!(scans.len(), 2);
    let manifest = fs::read_to_string(tmp.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.lines().count(), 3);
    assert!(manifest.starts_with(
        "file,role,method,r_index,r,theta1_index,theta1_deg,theta2_deg,repeat,seed,dominant"
    ));
}

#[test]
fn dataset_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        purities: vec![1.0, 0.3],
        theta1_grid: vec![-10.0, 30.0],
        repeats: 2,
        ..ExperimentConfig::for_method(Method::Entangled)
    };
    let ds = cmd_simulate(&cfg, tmp.path()).unwrap();
    let back = read_dataset(tmp.path()).unwrap();
    assert_eq!(back.config, ds.config);
    assert_eq!(back.entries.len(), ds.entries.len());
    for ((ra, sa), (rb, sb)) in ds.entries.iter().zip(&back.entries) {
        assert_eq!(ra, rb);
        assert_eq!(sa.counts, sb.counts);
        assert_eq!(sa.voltages, sb.voltages);
    }
    assert_eq!(analyze(&ds).unwrap(), analyze(&back).unwrap());
}

#[test]
fn missing_scans_are_listed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        theta1_grid: vec![0.0, 10.0],
        ..small(Method::Decoherer)
    };
    let ds = cmd_simulate(&cfg, tmp.path()).unwrap();
    let gone = &ds.entries[1].0.file;
    fs::remove_file(tmp.path().join(SCAN_DIR).join(gone)).unwrap();
    match read_dataset(tmp.path()) {
        Err(Error::PartialDataset(files)) => assert_eq!(files, vec![gone.clone()]),
        other => panic!("expected partial dataset, got {other:?}"),
    }
    let out = tempfile::tempdir().unwrap();
    assert!(matches!(
        cmd_analyze(tmp.path(), out.path()),
        Err(Error::PartialDataset(_))
    ));
}

#[test]
fn every_point_reported_once() {
    let cfg = ExperimentConfig {
        purities: vec![1.0, 0.0],
        repeats: 2,
        ..ExperimentConfig::for_method(Method::Decoherer)
    };
    let report = analyze(&simulate(&cfg).unwrap()).unwrap();
    assert_eq!(report.curves.len(), 2);
    for c in &report.curves {
        let thetas: Vec<f64> = c.points.iter().map(|p| p.theta1_deg).collect();
        assert_eq!(thetas, cfg.theta1_grid);
        assert!(c.chi2_visibility >= 0.0);
        assert!(c.chi2_phase.unwrap() >= 0.0);
    }
    // r = 0 at +-45 deg has no phase
    let mixed = &report.curves[1];
    assert!(!mixed.points.first().unwrap().defined);
    assert!(!mixed.points.last().unwrap().defined);
    assert!(report.curves[0].points.iter().all(|p| p.defined));
}

#[test]
fn undefined_points_written_as_nan() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        purities: vec![0.0],
        theta1_grid: vec![0.0, 45.0],
        repeats: 1,
        ..ExperimentConfig::for_method(Method::Decoherer)
    };
    cmd_simulate(&cfg, &tmp.path().join("data")).unwrap();
    cmd_analyze(&tmp.path().join("data"), &tmp.path().join("out")).unwrap();
    let csv = fs::read_to_string(tmp.path().join("out/curve_decoherer_r0.000.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("45,nan,nan,nan,"), "{last}");
    assert!(last.ends_with(",false"));
    let svg = fs::read_to_string(tmp.path().join("out/decoherer.svg")).unwrap();
    assert!(!svg.contains("NaN"));
}

#[test]
fn theory_csv_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        purities: vec![1.0, 0.5],
        theta1_grid: vec![15.0],
        ..ExperimentConfig::for_method(Method::Decoherer)
    };
    let path = cmd_theory(&cfg, tmp.path()).unwrap();
    let text = fs::read_to_string(path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!((rows[0][3] + std::f64::consts::FRAC_PI_6).abs() < 1e-4);
    assert!((rows[1][3] + 0.2810).abs() < 1e-4);
    assert!((rows[1][4] - 0.9014).abs() < 1e-4);
}

#[test]
fn laser_counts_scaled() {
    let photon = small(Method::Decoherer);
    let mut laser = small(Method::CoherentLaser);
    assert_eq!(
        laser.interferometer.counts_per_point(),
        1000.0 * photon.interferometer.counts_per_point()
    );
    // with equal baselines the expected fringes differ only by the count scale
    laser.interferometer.baseline_visibility = photon.interferometer.baseline_visibility;
    let a = simulate(&photon).unwrap();
    let b = simulate(&laser).unwrap();
    for (x, y) in a.entries[0]
        .1
        .expected_counts
        .iter()
        .zip(&b.entries[0].1.expected_counts)
    {
        assert!((y / x - 1000.0).abs() < 1e-9);
    }
}

#[test]
fn averaged_uncertainty_scales_with_repeats() {
    let spread = |repeats: usize| -> (f64, f64) {
        let results: Vec<(f64, f64)> = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let cfg = ExperimentConfig {
                    repeats,
                    master_seed: seed,
                    ..small(Method::Decoherer)
                };
                let p = &analyze(&simulate(&cfg).unwrap()).unwrap().curves[0].points[0];
                (p.gamma - p.theory.gamma, p.sigma_gamma)
            })
            .collect();
        let n = results.len() as f64;
        let devs: Vec<f64> = results.iter().map(|r| wrap_angle(r.0)).collect();
        let mean = devs.iter().sum::<f64>() / n;
        let sd = (devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        (sd, results.iter().map(|r| r.1).sum::<f64>() / n)
    };
    let (sd1, sig1) = spread(1);
    let (sd4, sig4) = spread(4);
    assert!(
        (sig1 / sig4 / 2.0 - 1.0).abs() < 0.2,
        "propagated {sig1} vs {sig4}"
    );
    assert!(
        (sd1 / sd4 / 2.0 - 1.0).abs() < 0.2,
        "empirical {sd1} vs {sd4}"
    );
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("exp.toml");
    fs::write(
        &path,
        "method = \"entangled\"\npurities = [0.5, 1]\nrepeats = 2\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path, None).unwrap();
    assert_eq!(cfg.method, Method::Entangled);
    assert_eq!(cfg.purities, vec![0.5, 1.0]);
    assert_eq!(cfg.interferometer.baseline_visibility, 0.98);
    assert!(matches!(
        ExperimentConfig::load(&tmp.path().join("absent.toml"), None),
        Err(Error::Io { .. })
    ));
}
