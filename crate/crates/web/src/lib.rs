//! Browser demo: the scheme against its diffusion limit, the Eddington
//! factor, and the entropy trace of a run.
//!
//! The computations are plain functions so that they can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

use relaxsim::limits::{LimitRunner, LimitSolver};
use relaxsim::models::eddington_chi;
use relaxsim::presets::preset;
use relaxsim::scheme::{ApScheme, RunControl};

/// Longest final time the page may request; keeps runs interactive.
const MAX_T_FINAL: f64 = 0.05;

/// Final profiles of the first equilibrium variable from the scheme and
/// from the limit equation on the same grid.
#[wasm_bindgen]
pub struct Comparison {
    x: Vec<f64>,
    scheme: Vec<f64>,
    limit: Vec<f64>,
    entropy_t: Vec<f64>,
    entropy: Vec<f64>,
    steps: usize,
    label: String,
}

#[wasm_bindgen]
impl Comparison {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn scheme(&self) -> Vec<f64> {
        self.scheme.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn limit(&self) -> Vec<f64> {
        self.limit.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn entropy_t(&self) -> Vec<f64> {
        self.entropy_t.clone()
    }
    /// Empty for models without an entropy.
    #[wasm_bindgen(getter)]
    pub fn entropy(&self) -> Vec<f64> {
        self.entropy.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.steps
    }
    #[wasm_bindgen(getter)]
    pub fn label(&self) -> String {
        self.label.clone()
    }
    /// Relative L1 gap between the two profiles.
    #[wasm_bindgen(getter)]
    pub fn relative_l1(&self) -> f64 {
        let num: f64 = self.scheme.iter().zip(&self.limit).map(|(a, b)| (a - b).abs()).sum();
        let den: f64 = self.limit.iter().map(|b| b.abs()).sum();
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

pub fn compare_with_limit(preset_name: &str, epsilon: f64, t_final: f64) -> Result<Comparison, String> {
    if !(t_final > 0.0 && t_final <= MAX_T_FINAL) {
        return Err(format!("t_final must lie in (0, {MAX_T_FINAL}]"));
    }
    let p = preset(preset_name).map_err(|e| e.to_string())?;
    let mut cfg = p.config;
    cfg.epsilon = epsilon;
    cfg.t_final = t_final;
    cfg.validate().map_err(|e| e.to_string())?;
    let sys = cfg.model.build().map_err(|e| e.to_string())?;
    let grid = cfg.grid().map_err(|e| e.to_string())?;
    let init = cfg.initial_data().cells(sys.as_ref(), &grid).map_err(|e| e.to_string())?;
    let reduced: Vec<_> = init.iter().map(|c| sys.reduce(c)).collect();
    let control = RunControl::new(t_final);
    let ap = ApScheme::new(sys.as_ref(), grid, epsilon, cfg.scheme_options())
        .and_then(|s| s.run(init, &control))
        .map_err(|e| e.to_string())?;
    let limit = LimitRunner::new(sys.as_ref(), grid, LimitSolver::Reference, 0.9)
        .and_then(|r| r.run(reduced, &control))
        .map_err(|e| e.to_string())?;
    let q = sys.projector();
    let trace = ap.entropy_trace();
    Ok(Comparison {
        x: grid.centers(),
        scheme: ap.last().unwrap().values.iter().map(|c| q.mul_vec(c)[0]).collect(),
        limit: limit.last().unwrap().values.iter().map(|u| u[0]).collect(),
        entropy_t: trace.times,
        entropy: trace.values,
        steps: ap.steps.last().map_or(0, |s| s.step),
        label: sys.reduced_names()[0].to_string(),
    })
}

/// `χ` sampled at `n ≥ 2` evenly spaced points of `[−1, 1]`.
pub fn eddington_samples(n: usize) -> Result<Vec<f64>, String> {
    if n < 2 {
        return Err("need at least two points".into());
    }
    (0..n)
        .map(|k| eddington_chi(-1.0 + 2.0 * k as f64 / (n - 1) as f64).map_err(|e| e.to_string()))
        .collect()
}

/// Runs a preset at the given `ε` and compares it with the limit equation.
#[wasm_bindgen]
pub fn simulate(preset_name: &str, epsilon: f64, t_final: f64) -> Result<Comparison, JsError> {
    compare_with_limit(preset_name, epsilon, t_final).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn eddington_curve(n: usize) -> Result<Vec<f64>, JsError> {
    eddington_samples(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    relaxsim::presets::preset_names().into_iter().map(String::from).collect()
}
