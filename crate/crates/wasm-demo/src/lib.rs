//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes plain strings/numbers and returns a JSON string; errors come back
//! as a thrown string. The `*_json` functions are the same operations for native callers.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use nonosc_core::exppoly::{count_zeros_rect, QuasiPolynomial, Rect, Term};
use nonosc_core::majorant::{
    excluded_boxes_multiple, excluded_boxes_simple, gap_dominance_check, is_dominant_at, term_majorant,
};
use nonosc_core::ode::parse_polynomial;
use nonosc_core::{analyze, Complex, Tolerances};

/// Largest heat-map side accepted from the page.
const MAX_GRID: usize = 400;

/// Parses one term per line as `lambda | amplitude`, e.g. `-1+2i | z - 3`; a missing
/// amplitude means 1. Blank lines and `#` comments are skipped.
pub fn parse_terms(text: &str) -> Result<QuasiPolynomial, String> {
    let mut terms = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (l, a) = line.split_once('|').unwrap_or((line, "1"));
        let lambda = parse_polynomial(l).map_err(|e| format!("line {}: {e}", n + 1))?;
        let lambda = match lambda.degree() {
            None => Complex::new(0.0, 0.0),
            Some(0) => lambda.coeffs()[0],
            Some(_) => return Err(format!("line {}: exponent must be a constant", n + 1)),
        };
        let amplitude = parse_polynomial(a).map_err(|e| format!("line {}: {e}", n + 1))?;
        terms.push(Term { lambda, amplitude });
    }
    QuasiPolynomial::new(terms).map_err(|e| e.to_string())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("demo payloads serialize")
}

pub fn analyze_json(equation: &str) -> Result<String, String> {
    analyze(equation, &Tolerances::default())
        .map(|r| to_json(&r))
        .map_err(|e| e.to_string())
}

/// `ln|f(z)| - max_j ln|term_j(z)|`: at most `ln k`, very negative near zeros.
fn relative_log_modulus(qp: &QuasiPolynomial, z: Complex) -> f64 {
    let parts: Vec<(Complex, Complex)> = qp
        .terms()
        .iter()
        .map(|t| (t.amplitude.eval(z), t.lambda * z))
        .collect();
    let shift = parts
        .iter()
        .map(|(a, e)| a.norm().ln() + e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: Complex = parts.iter().map(|(a, e)| a * (e - shift).exp()).sum();
    sum.norm().ln()
}

/// Majorant at abscissa `u`, dominance, both box covers over `|Im z| <= alpha`, and a
/// `nx × ny` heat map of the relative modulus over the window.
#[allow(clippy::too_many_arguments)]
pub fn explore_json(
    terms: &str,
    alpha: f64,
    u: f64,
    u_lo: f64,
    u_hi: f64,
    v_lo: f64,
    v_hi: f64,
    nx: usize,
    ny: usize,
) -> Result<String, String> {
    let qp = parse_terms(terms)?;
    let tol = Tolerances::default();
    let err = |e: nonosc_core::Error| e.to_string();
    let stats = qp.spectrum_stats(&tol).map_err(err)?;
    let simple = qp.is_simple();

    let majorant = if simple { Some(term_majorant(&qp, u, 0.0).map_err(err)?) } else { None };
    let gap = if simple { Some(gap_dominance_check(&qp, u, &tol).map_err(err)?) } else { None };
    let simple_cover = if simple { Some(excluded_boxes_simple(&qp, alpha, &tol).map_err(err)?) } else { None };
    let multiple_cover = excluded_boxes_multiple(&qp, alpha, &tol).map_err(err)?;
    let points: Vec<[f64; 2]> = qp
        .terms()
        .iter()
        .map(|t| [t.lambda.re, t.amplitude.coeffs()[0].norm().ln() + t.lambda.re * u])
        .collect();

    let (nx, ny) = (nx.clamp(2, MAX_GRID), ny.clamp(2, MAX_GRID));
    let mut heat = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let v = v_hi - (v_hi - v_lo) * iy as f64 / (ny - 1) as f64;
        for ix in 0..nx {
            let x = u_lo + (u_hi - u_lo) * ix as f64 / (nx - 1) as f64;
            let r = relative_log_modulus(&qp, Complex::new(x, v));
            heat.push(if r.is_finite() { r } else { -60.0 });
        }
    }

    Ok(to_json(&json!({
        "dimension": qp.dimension(),
        "simple": simple,
        "theta": stats.theta,
        "xi": stats.xi,
        "path_length": stats.path_length,
        "points": points,
        "majorant": majorant,
        "gap_check": gap,
        "dominant_at_u": is_dominant_at(&qp, Complex::new(u, 0.0)),
        "simple_cover": simple_cover,
        "multiple_cover": multiple_cover,
        "heat": { "nx": nx, "ny": ny, "values": heat },
    })))
}

pub fn count_json(terms: &str, u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Result<String, String> {
    let qp = parse_terms(terms)?;
    let rect = Rect::new(u_lo, u_hi, v_lo, v_hi).map_err(|e| e.to_string())?;
    let c = count_zeros_rect(&qp, &rect, &Tolerances::default()).map_err(|e| e.to_string())?;
    Ok(to_json(&c))
}

#[wasm_bindgen]
pub fn analyze_equation(equation: &str) -> Result<String, JsValue> {
    analyze_json(equation).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn explore(
    terms: &str,
    alpha: f64,
    u: f64,
    u_lo: f64,
    u_hi: f64,
    v_lo: f64,
    v_hi: f64,
    nx: usize,
    ny: usize,
) -> Result<String, JsValue> {
    explore_json(terms, alpha, u, u_lo, u_hi, v_lo, v_hi, nx, ny).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn count_zeros(terms: &str, u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Result<String, JsValue> {
    count_json(terms, u_lo, u_hi, v_lo, v_hi).map_err(|e| JsValue::from_str(&e))
}
