//! Browser bindings for the entanglement-time demo in `www/`.
//!
//! Every export takes and returns plain numbers or JSON strings so the page
//! needs no generated glue beyond `wasm-bindgen`'s own.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qsle_core::ent_time::tau_from_entanglement;
use qsle_core::qsl::{build_h_opt, evolve_opt};
use qsle_core::state_file::{parse_state, to_json};
use qsle_core::{assemble, inner_product, tau_m, OptConfig, PureState};

/// Restarts used by the page; the optimizer default is tuned for the CLI.
const DEMO_RESTARTS: usize = 8;

#[derive(Debug, Serialize)]
pub struct LevelRow {
    pub m: usize,
    pub e: f64,
    pub omega_tau: f64,
    pub tau: f64,
    pub partition: String,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct Trajectory {
    pub m: usize,
    pub tau: f64,
    pub t: Vec<f64>,
    /// `|<psi|psi(t)>|^2`
    pub start: Vec<f64>,
    /// `|<phi|psi(t)>|^2` for the closest m-separable `phi`.
    pub target: Vec<f64>,
}

fn demo_config() -> OptConfig {
    OptConfig {
        restarts: DEMO_RESTARTS,
        ..OptConfig::default()
    }
}

/// `sqrt(1-p) GHZ + sqrt(p) W` on three qubits.
pub fn ghz_w_mix(p: f64) -> Result<PureState, String> {
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("mixing weight must lie in [0, 1], got {p}"));
    }
    let g = (1.0 - p).sqrt() / 2f64.sqrt();
    let w = p.sqrt() / 3f64.sqrt();
    PureState::from_real(vec![2, 2, 2], &[g, w, w, 0.0, w, 0.0, 0.0, g]).map_err(|e| e.to_string())
}

/// `tau(E)` on `n + 1` evenly spaced values of E in [0, 1].
pub fn tau_curve(omega: f64, n: usize) -> Result<Vec<f64>, String> {
    let n = n.max(1);
    (0..=n)
        .map(|i| tau_from_entanglement(i as f64 / n as f64, omega).map_err(|e| e.to_string()))
        .collect()
}

pub fn levels(psi: &PureState, omega: f64) -> Result<Vec<LevelRow>, String> {
    let cfg = demo_config();
    (2..=psi.num_subsystems())
        .map(|m| {
            let r = tau_m(psi, m, omega, &cfg).map_err(|e| e.to_string())?;
            Ok(LevelRow {
                m,
                e: r.e_m,
                omega_tau: r.phase(),
                tau: r.tau_internal,
                partition: r.partition.to_string(),
                converged: r.converged,
            })
        })
        .collect()
}

/// Fidelities along the optimal path, sampled on `[0, tau_m]`.
pub fn trajectory(psi: &PureState, m: usize, omega: f64, samples: usize) -> Result<Trajectory, String> {
    let r = tau_m(psi, m, omega, &demo_config()).map_err(|e| e.to_string())?;
    let phi = assemble(&r.closest_separable);
    let samples = samples.max(2);
    let t: Vec<f64> = (0..samples)
        .map(|i| r.tau_internal * i as f64 / (samples - 1) as f64)
        .collect();
    let mut start = Vec::with_capacity(samples);
    let mut target = Vec::with_capacity(samples);
    if r.tau_internal == 0.0 {
        start.resize(samples, 1.0);
        target.resize(samples, inner_product(&phi, psi).map_err(|e| e.to_string())?.norm_sqr());
    } else {
        let h = build_h_opt(psi, &phi, omega).map_err(|e| e.to_string())?;
        for &ti in &t {
            let v = evolve_opt(&h, ti);
            start.push(inner_product(psi, &v).map_err(|e| e.to_string())?.norm_sqr());
            target.push(inner_product(&phi, &v).map_err(|e| e.to_string())?.norm_sqr());
        }
    }
    Ok(Trajectory {
        m,
        tau: r.tau_internal,
        t,
        start,
        target,
    })
}

fn js_err(e: String) -> JsValue {
    JsValue::from_str(&e)
}

fn json<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(|e| js_err(e.to_string()))
}

#[wasm_bindgen(js_name = tauCurve)]
pub fn tau_curve_js(omega: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    tau_curve(omega, n).map_err(js_err)
}

/// State file JSON for the GHZ/W family.
#[wasm_bindgen(js_name = ghzWState)]
pub fn ghz_w_state_js(p: f64) -> Result<String, JsValue> {
    ghz_w_mix(p).map(|s| to_json(&s)).map_err(js_err)
}

/// Takes a state file, returns a JSON array of per-level rows.
#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(state_json: &str, omega: f64) -> Result<String, JsValue> {
    let psi = parse_state(state_json).map_err(|e| js_err(e.to_string()))?;
    json(&levels(&psi, omega).map_err(js_err)?)
}

#[wasm_bindgen(js_name = trajectory)]
pub fn trajectory_js(state_json: &str, m: usize, omega: f64, samples: usize) -> Result<String, JsValue> {
    let psi = parse_state(state_json).map_err(|e| js_err(e.to_string()))?;
    json(&trajectory(&psi, m, omega, samples).map_err(js_err)?)
}
