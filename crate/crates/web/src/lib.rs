//! Browser bindings for the collinlab demo page (`www/index.html`).
//!
//! Every export returns a JSON string; errors come back as a thrown string.

use collinlab::augmentation::{predict_augmented, required_replication, CoefficientSet};
use collinlab::diagnostics::{condition_number, vif, CnScaling};
use collinlab::io::{york_analysis, YorkParams};
use collinlab::perturbation::{monte_carlo_stability, PerturbationConfig};
use collinlab::regression::fit_ols;
use collinlab::synthetic::correlated_pair;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper limits that keep a slider drag responsive in the browser.
const MAX_N: usize = 500;
const MAX_TRIALS: usize = 5000;
const MAX_H: usize = 200;

#[derive(Serialize)]
struct FitView {
    names: Vec<String>,
    beta: Vec<f64>,
    se: Vec<f64>,
    t: Vec<f64>,
    r2: f64,
    sigma2_hat: f64,
    f_stat: Option<f64>,
    n: usize,
}

#[derive(Serialize)]
struct AugmentView {
    rho: f64,
    h: usize,
    vif: Vec<f64>,
    cn: f64,
    h_required: usize,
    base: FitView,
    augmented: FitView,
}

#[derive(Serialize)]
struct RunView {
    mean: f64,
    sd: f64,
    min: f64,
    max: f64,
    failed: usize,
    shifts: Vec<f64>,
}

#[derive(Serialize)]
struct PerturbView {
    rho: f64,
    pct: f64,
    collinear: RunView,
    orthogonal: RunView,
}

fn check(name: &str, v: usize, lo: usize, hi: usize) -> Result<(), String> {
    if v < lo || v > hi {
        return Err(format!("{name} must be between {lo} and {hi}, got {v}"));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn york_json(m: usize) -> Result<String, String> {
    check("m", m, 1, 1000)?;
    let params = YorkParams::new(m).map_err(|e| e.to_string())?;
    to_json(&york_analysis(params).map_err(|e| e.to_string())?)
}

pub fn augment_json(n: usize, rho: f64, h: usize, seed: u64) -> Result<String, String> {
    check("n", n, 5, MAX_N)?;
    check("h", h, 1, MAX_H)?;
    let data = correlated_pair(n, rho, 1.0, seed).map_err(|e| e.to_string())?;
    let fit = fit_ols(&data).map_err(|e| e.to_string())?;
    let pred = predict_augmented(&fit, h).map_err(|e| e.to_string())?.to_fit(&fit);
    let plan = required_replication(&fit, 0.05, CoefficientSet::Slopes).map_err(|e| e.to_string())?;
    let view = |f: &collinlab::FitResult| FitView {
        names: f.names.clone(),
        beta: f.beta.clone(),
        se: f.se.clone(),
        t: f.t_stats.clone(),
        r2: f.r2,
        sigma2_hat: f.sigma2_hat,
        f_stat: f.f_stat,
        n: f.n,
    };
    to_json(&AugmentView {
        rho,
        h,
        vif: vif(&data).map_err(|e| e.to_string())?,
        cn: condition_number(&data, CnScaling::UnitLength).map_err(|e| e.to_string())?,
        h_required: plan.h_required,
        base: view(&fit),
        augmented: view(&pred),
    })
}

pub fn perturb_json(n: usize, rho: f64, pct: f64, trials: usize, seed: u64) -> Result<String, String> {
    check("n", n, 5, MAX_N)?;
    check("trials", trials, 1, MAX_TRIALS)?;
    let cfg = PerturbationConfig {
        pct,
        trials,
        seed,
        parallel: false,
        ..Default::default()
    };
    let run = |r: f64| -> Result<RunView, String> {
        let data = correlated_pair(n, r, 1.0, seed).map_err(|e| e.to_string())?;
        let s = monte_carlo_stability(&data, &cfg).map_err(|e| e.to_string())?;
        Ok(RunView {
            mean: s.mean,
            sd: s.sd,
            min: s.min,
            max: s.max,
            failed: s.failed,
            shifts: s.shifts,
        })
    };
    to_json(&PerturbView {
        rho,
        pct,
        collinear: run(rho)?,
        orthogonal: run(0.0)?,
    })
}

/// Eigenvalues and condition number of the York design with block multiplier `m`.
#[wasm_bindgen]
pub fn york(m: u32) -> Result<String, JsValue> {
    york_json(m as usize).map_err(|e| JsValue::from_str(&e))
}

/// Two regressors with sample correlation `rho`: base fit next to the fit
/// predicted for `h` stacked copies.
#[wasm_bindgen]
pub fn augment(n: u32, rho: f64, h: u32, seed: u32) -> Result<String, JsValue> {
    augment_json(n as usize, rho, h as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}

/// Monte-Carlo coefficient shifts for the correlated design and its
/// orthogonalized counterpart.
#[wasm_bindgen]
pub fn perturb(n: u32, rho: f64, pct: f64, trials: u32, seed: u32) -> Result<String, JsValue> {
    perturb_json(n as usize, rho, pct, trials as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}
