//! Browser demo: domain coloring of a finite Blaschke product, the family
//! classifier, and the matrix analyzer, all over JSON strings.

use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

use symcontract::blaschke::FiniteBlaschke;
use symcontract::charfun::{classify, Contraction};
use symcontract::family::{build_t, cross_validate, FamilySpec};
use symcontract::grid::disk_grid;
use symcontract::io::{matrix_to_rows, parse_matrix, SCHEMA};

const TOL: f64 = 1e-8;
const GRID: usize = 24;
const SEED: u64 = 0;

/// RGBA pixels of `φ` on `[-1, 1]²`, `size × size`, row-major from the top.
#[wasm_bindgen]
pub fn blaschke_image(spec: &str, size: u32) -> Result<Vec<u8>, JsError> {
    blaschke_pixels(spec, size as usize).map_err(|e| JsError::new(&e))
}

/// Symbolic and numeric classification of `{u, v, Y}`.
#[wasm_bindgen]
pub fn classify_family(spec: &str) -> Result<String, JsError> {
    family_report(spec).map_err(|e| JsError::new(&e))
}

/// Complex-symmetry report for a square matrix.
#[wasm_bindgen]
pub fn analyze_matrix(matrix: &str) -> Result<String, JsError> {
    matrix_report(matrix).map_err(|e| JsError::new(&e))
}

pub fn blaschke_pixels(spec: &str, size: usize) -> Result<Vec<u8>, String> {
    if !(16..=1024).contains(&size) {
        return Err(format!("image size {size} is outside 16..=1024"));
    }
    let phi: FiniteBlaschke = serde_json::from_str(spec).map_err(|e| e.to_string())?;
    let mut out = vec![0u8; size * size * 4];
    let step = 2.0 / (size - 1) as f64;
    for row in 0..size {
        for col in 0..size {
            let z = Complex64::new(-1.0 + col as f64 * step, 1.0 - row as f64 * step);
            let px = &mut out[4 * (row * size + col)..][..4];
            if z.norm() >= 1.0 {
                px.copy_from_slice(&[0, 0, 0, 0]);
                continue;
            }
            let w = phi.eval(z).map_err(|e| e.to_string())?;
            px.copy_from_slice(&shade(w));
        }
    }
    Ok(out)
}

/// Hue from the argument, with dark rings at |w| = k/8.
fn shade(w: Complex64) -> [u8; 4] {
    let hue = (w.arg() / std::f64::consts::TAU).rem_euclid(1.0);
    let rings = (w.norm() * 8.0).fract();
    let value = 0.7 + 0.3 * rings;
    let [r, g, b] = hsv(hue, 0.85, value);
    [r, g, b, 255]
}

fn hsv(h: f64, s: f64, v: f64) -> [u8; 3] {
    let sector = h * 6.0;
    let i = sector.floor() as i32 % 6;
    let f = sector - sector.floor();
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let byte = |x: f64| (x * 255.0).round().clamp(0.0, 255.0) as u8;
    [byte(r), byte(g), byte(b)]
}

pub fn family_report(spec: &str) -> Result<String, String> {
    let spec: FamilySpec = serde_json::from_str(spec).map_err(|e| e.to_string())?;
    let cv = cross_validate(&spec, GRID, TOL, SEED).map_err(|e| e.to_string())?;
    let t = build_t(&spec).map_err(|e| e.to_string())?;
    let report = json!({
        "schema": SCHEMA,
        "symbolic": cv.symbolic,
        "numeric_verdict": cv.numeric.verdict,
        "agreement": cv.agreement,
        "defects": [cv.numeric.d_t, cv.numeric.d_t_star],
        "matrix": matrix_to_rows(t.matrix()),
    });
    Ok(report.to_string())
}

pub fn matrix_report(text: &str) -> Result<String, String> {
    let m = parse_matrix(text).map_err(|e| e.to_string())?;
    let t = Contraction::new(m).map_err(|e| e.to_string())?;
    let grid = disk_grid(GRID, t.dim(), SEED).map_err(|e| e.to_string())?;
    let r = classify(&t, &grid, TOL, SEED).map_err(|e| e.to_string())?;
    let mut report = serde_json::to_value(&r).map_err(|e| e.to_string())?;
    report["schema"] = json!(SCHEMA);
    Ok(report.to_string())
}
