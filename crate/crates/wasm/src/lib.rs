//! Browser bindings. Every export returns a JSON string: `{"ok": ...}` or `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use crmodel::algebra::weight_to_string;
use crmodel::model::infer_weights as infer;
use crmodel::report::{analyze, parse_expr, parse_weight_list, AnalyzeOptions, ModelSource};
use crmodel::structure::lemtub_coefficients;

/// Largest `m` accepted by [`lemtub`]; the system is cheap but the page stays readable.
pub const LEMTUB_MAX: u32 = 24;

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => json!({ "ok": v }).to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn analyze_value(model: &str, weights: &str) -> Result<Value, String> {
    let mut opts = AnalyzeOptions { skip_embedding: true, ..AnalyzeOptions::default() };
    if !weights.trim().is_empty() {
        opts.weights = Some(parse_weight_list(weights).map_err(|e| e.to_string())?);
    }
    let r = analyze(&ModelSource::new(model), &opts).map_err(|e| e.to_string())?;
    let dims: Vec<Value> = r
        .dimensions
        .iter()
        .map(|d| json!({ "weight": weight_to_string(&d.weight), "dim": d.dim, "rigid": d.rigid, "nonrigid": d.nonrigid }))
        .collect();
    Ok(json!({
        "polynomial": r.polynomial.to_string(),
        "weights": r.weights.to_string(),
        "degenerate": r.is_degenerate(),
        "dimensions": dims,
        "total_dim": r.total_dim,
        "verdict": r.verdict,
        "text": r.to_text(),
    }))
}

pub fn infer_weights_value(model: &str) -> Result<Value, String> {
    let src = ModelSource::new(model);
    let p = parse_expr(src.rhs().map_err(|e| e.to_string())?, 0).map_err(|e| e.to_string())?;
    let vs = infer(&p).map_err(|e| e.to_string())?;
    Ok(Value::from(vs.iter().map(|w| w.to_string()).collect::<Vec<_>>()))
}

pub fn lemtub_value(m: u32) -> Result<Value, String> {
    if !(1..=LEMTUB_MAX).contains(&m) {
        return Err(format!("m must be between 1 and {LEMTUB_MAX}"));
    }
    let alpha = lemtub_coefficients(m).map_err(|e| e.to_string())?;
    Ok(Value::from(alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>()))
}

/// Per-weight dimensions, totals and the verdict for `Im w = ...`.
#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(model: &str, weights: &str) -> String {
    wrap(analyze_value(model, weights))
}

#[wasm_bindgen(js_name = inferWeights)]
pub fn infer_weights_js(model: &str) -> String {
    wrap(infer_weights_value(model))
}

#[wasm_bindgen(js_name = lemtub)]
pub fn lemtub_js(m: u32) -> String {
    wrap(lemtub_value(m))
}
