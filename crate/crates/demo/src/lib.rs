//! Browser front end for `harvestlab`.
//!
//! Three operations are exported to JavaScript: a single-point evaluation,
//! a small region map rendered as SVG, and the large-`c3` convergence curve
//! of the stationary-phase ratios. Each returns a JSON string. The plain
//! Rust functions are what the tests exercise; the `#[wasm_bindgen]` shims
//! only convert the error type.

use harvestlab::analysis::{extract_region, region_area, region_similarity, MaskKind};
use harvestlab::physics::{eval_e_sp, eval_x_sp, observe, sp_entangled, HarvestParams, KAPPA_X};
use harvestlab::plot::{render_svg, PlotStyle};
use harvestlab::quadrature::{QuadConfig, Strategy};
use harvestlab::sweep::{build_grid, evaluate_point, GridSpec, SweepOptions};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Coarsening factors offered for in-browser region maps; the finest is
/// 24 × 12 points.
pub const REGION_COARSENING: [u32; 3] = [10, 20, 40];

fn strategy(tag: &str) -> Result<Strategy, String> {
    Strategy::from_tag(tag).ok_or_else(|| format!("unknown strategy {tag:?} (expected global or local)"))
}

/// Evaluates one point; JSON with E, X, the negativity, errors and the
/// stationary-phase forms.
pub fn point_json(c1: f64, c2: f64, c3: f64, strategy_tag: &str) -> Result<String, String> {
    let cfg = QuadConfig::default().with_strategy(strategy(strategy_tag)?);
    let p = HarvestParams::new(c1, c2, c3).map_err(|e| e.to_string())?;
    let o = observe(&p, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({
        "c1": c1, "c2": c2, "c3": c3, "strategy": cfg.strategy.tag(),
        "E": o.e, "X_re": o.x.re, "X_im": o.x.im, "X_abs": o.x.norm(),
        "N": o.n, "signed_N": o.signed_n(),
        "err_E": o.err_e, "err_X": o.err_x, "converged": o.converged,
        "E_sp": eval_e_sp(&p), "X_sp": eval_x_sp(&p),
        "sp_entangled": sp_entangled(c1, c2),
        "n_evals": o.n_evals(),
    })
    .to_string())
}

/// Region map at `c3` on the default `(c1, c2)` axes coarsened by
/// `coarse`; JSON with the SVG and summary numbers.
pub fn region_json(c3: f64, coarse: u32) -> Result<String, String> {
    if !REGION_COARSENING.contains(&coarse) {
        return Err(format!("coarsening must be one of {REGION_COARSENING:?}"));
    }
    let spec = GridSpec::paper().coarsen(coarse as usize).with_c3(c3);
    let points = build_grid(&spec).map_err(|e| e.to_string())?;
    let opts = SweepOptions { record_timing: false, ..SweepOptions::default() };
    let cfg = QuadConfig::default();
    let records = points
        .iter()
        .map(|pt| evaluate_point(pt, &cfg, &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let grid = extract_region(&records, &spec.c1, &spec.c2, c3).map_err(|e| e.to_string())?;
    // 2·coarse pixels per cell keeps the plot 480 px wide at every coarsening
    let style = PlotStyle { cell_px: 2 * coarse, ..PlotStyle::default() };
    let svg = render_svg(&grid, &style).map_err(|e| e.to_string())?;
    Ok(json!({
        "c3": c3,
        "cells": [grid.c1_axis.len(), grid.c2_axis.len()],
        "numeric_area": region_area(&grid, MaskKind::Numeric),
        "sp_area": region_area(&grid, MaskKind::StationaryPhase),
        "jaccard": region_similarity(&grid.numeric_mask, &grid.sp_mask).map_err(|e| e.to_string())?,
        "unconverged": records.iter().filter(|r| !r.converged).count(),
        "svg": svg,
    })
    .to_string())
}

/// `E/E_sp` and `|X|/X_sp` at fixed `(c1, c2)` for `c3 = 1, 1.5, …, 5`.
pub fn convergence_json(c1: f64, c2: f64) -> Result<String, String> {
    let cfg = QuadConfig::default();
    let mut c3s = Vec::new();
    let mut e_ratio = Vec::new();
    let mut x_ratio = Vec::new();
    for k in 2..=10 {
        let c3 = 0.5 * k as f64;
        let p = HarvestParams::new(c1, c2, c3).map_err(|e| e.to_string())?;
        let o = observe(&p, &cfg).map_err(|e| e.to_string())?;
        c3s.push(c3);
        e_ratio.push(o.e / eval_e_sp(&p));
        x_ratio.push(o.x.norm() / eval_x_sp(&p));
    }
    Ok(json!({ "c1": c1, "c2": c2, "c3": c3s, "E_ratio": e_ratio, "X_ratio": x_ratio, "kappa_X": KAPPA_X })
        .to_string())
}

#[wasm_bindgen(js_name = evaluatePoint)]
pub fn evaluate_point_js(c1: f64, c2: f64, c3: f64, strategy: &str) -> Result<String, JsValue> {
    point_json(c1, c2, c3, strategy).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = regionMap)]
pub fn region_map_js(c3: f64, coarse: u32) -> Result<String, JsValue> {
    region_json(c3, coarse).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = convergenceCurve)]
pub fn convergence_curve_js(c1: f64, c2: f64) -> Result<String, JsValue> {
    convergence_json(c1, c2).map_err(|e| JsValue::from_str(&e))
}
