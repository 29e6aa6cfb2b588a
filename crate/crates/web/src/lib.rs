//! wasm-bindgen exports for `www/index.html`. Arrays cross the boundary as
//! flat `Float64Array`s.

use geophase::fit::{fit_fringe, phase_difference};
use geophase::interferometer::{simulate_setting_pair, InterferometerConfig};
use geophase::phase::{evolve_path, mixed_phase_analytic, solid_angle_from_path, SolidAngle};
use geophase::prep::{angle_for_purity, prepare_decoherer, Handedness, MethodKind};
use geophase::qubit::Purity;
use wasm_bindgen::prelude::*;

fn js_err(e: geophase::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[theta1_deg, gamma, v, ...]` for `samples` settings across -45..45 deg.
/// Undefined phases are NaN.
#[wasm_bindgen]
pub fn theory_curve(r: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let purity = Purity::new(r).map_err(js_err)?;
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let t = -45.0 + 90.0 * i as f64 / (samples - 1) as f64;
        let pv = mixed_phase_analytic(purity, SolidAngle(4.0 * t.to_radians()));
        out.extend([t, if pv.defined { pv.gamma } else { f64::NAN }, pv.v]);
    }
    Ok(out)
}

/// One simulated signal/reference pair and its fits.
#[wasm_bindgen]
pub struct FringeDemo {
    voltages: Vec<f64>,
    signal: Vec<f64>,
    reference: Vec<f64>,
    signal_model: Vec<f64>,
    reference_model: Vec<f64>,
    gamma: f64,
    sigma_gamma: f64,
    visibility: f64,
    sigma_visibility: f64,
    gamma_theory: f64,
}

#[wasm_bindgen]
impl FringeDemo {
    #[wasm_bindgen(getter)]
    pub fn voltages(&self) -> Vec<f64> {
        self.voltages.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn signal(&self) -> Vec<f64> {
        self.signal.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> Vec<f64> {
        self.reference.clone()
    }
    /// Fitted signal fringe sampled on `model_voltages`.
    #[wasm_bindgen(getter)]
    pub fn signal_model(&self) -> Vec<f64> {
        self.signal_model.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn reference_model(&self) -> Vec<f64> {
        self.reference_model.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    #[wasm_bindgen(getter)]
    pub fn sigma_gamma(&self) -> f64 {
        self.sigma_gamma
    }
    #[wasm_bindgen(getter)]
    pub fn visibility(&self) -> f64 {
        self.visibility
    }
    #[wasm_bindgen(getter)]
    pub fn sigma_visibility(&self) -> f64 {
        self.sigma_visibility
    }
    #[wasm_bindgen(getter)]
    pub fn gamma_theory(&self) -> f64 {
        self.gamma_theory
    }
}

const MODEL_SAMPLES: usize = 161;

/// Dense voltage grid the model curves are sampled on.
#[wasm_bindgen]
pub fn model_voltages() -> Vec<f64> {
    (0..MODEL_SAMPLES)
        .map(|i| 30.0 + 40.0 * i as f64 / (MODEL_SAMPLES - 1) as f64)
        .collect()
}

/// Simulates the PZT scan for a decoherer-prepared state of purity `r` at
/// `theta1_deg` (theta2 = 0), with `counts_per_point` mean counts, and fits
/// it at the nominal fringe frequency.
#[wasm_bindgen]
pub fn simulate_fringe(
    r: f64,
    theta1_deg: f64,
    counts_per_point: f64,
    seed: u64,
) -> Result<FringeDemo, JsError> {
    if counts_per_point.is_nan() || counts_per_point <= 0.0 {
        return Err(JsError::new("counts per point must be positive"));
    }
    let cfg = InterferometerConfig {
        mean_rate: counts_per_point / 2.0,
        accumulation: 2.0,
        ..InterferometerConfig::default()
    };
    let angle = angle_for_purity(r, MethodKind::Decoherer).map_err(js_err)?;
    let state = prepare_decoherer(angle, 0.0, std::f64::consts::FRAC_PI_4).map_err(js_err)?;
    let theta1 = theta1_deg.to_radians();
    let (sig, reference) =
        simulate_setting_pair(&cfg, &state, theta1, 0.0, seed).map_err(js_err)?;
    let k = cfg.angular_frequency();
    let fs = fit_fringe(&sig, k).map_err(js_err)?;
    let fr = fit_fringe(&reference, k).map_err(js_err)?;
    let pd = phase_difference(&fs, &fr).map_err(js_err)?;
    let model = model_voltages();
    Ok(FringeDemo {
        voltages: sig.voltages.clone(),
        signal: sig.counts.iter().map(|&c| c as f64).collect(),
        reference: reference.counts.iter().map(|&c| c as f64).collect(),
        signal_model: model.iter().map(|&v| fs.model(v)).collect(),
        reference_model: model.iter().map(|&v| fr.model(v)).collect(),
        gamma: pd.gamma,
        sigma_gamma: pd.sigma,
        visibility: fs.v_fit,
        sigma_visibility: fs.sigma_v,
        gamma_theory: mixed_phase_analytic(state.r, SolidAngle(4.0 * theta1)).gamma,
    })
}

/// Bloch trajectory of |R> through the two half-wave plates, flattened as
/// `[s1, s2, s3, ...]`.
#[wasm_bindgen]
pub fn bloch_path(theta1_deg: f64, theta2_deg: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let path = evolve_path(
        theta1_deg.to_radians(),
        theta2_deg.to_radians(),
        Handedness::R,
        steps,
    )
    .map_err(js_err)?;
    Ok(path.points().iter().flat_map(|b| b.as_array()).collect())
}

/// Solid angle (radians) enclosed by [`bloch_path`].
#[wasm_bindgen]
pub fn path_solid_angle(theta1_deg: f64, theta2_deg: f64, steps: usize) -> Result<f64, JsError> {
    let path = evolve_path(
        theta1_deg.to_radians(),
        theta2_deg.to_radians(),
        Handedness::R,
        steps,
    )
    .map_err(js_err)?;
    Ok(solid_angle_from_path(&path).map_err(js_err)?.radians())
}
