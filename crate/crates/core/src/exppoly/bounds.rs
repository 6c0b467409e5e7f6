use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::path::shortest_path_length;
use crate::tolerances::Tolerances;

use super::{QuasiPolynomial, SpectrumStats};

/// `ln 4`, kept bit-exact as `2 ln 2`.
pub const LN_4: f64 = 2.0 * LN_2;

/// Zero bound in `Π_α` for simple exponents:
/// `(k-1)^2 + (2/π)(k-1) L [α(Ξ+2) + Θ ln 4]`.
pub fn strip_bound_simple(qp: &QuasiPolynomial, alpha: f64, tol: &Tolerances) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidInput(format!("strip half-height {alpha} must be >= 0")));
    }
    if !qp.is_simple() {
        return Err(Error::NotSimpleExponents);
    }
    let stats = qp.spectrum_stats(tol)?;
    Ok(strip_bound_from_stats(qp.dimension(), &stats, alpha))
}

pub(crate) fn strip_bound_from_stats(k: usize, stats: &SpectrumStats, alpha: f64) -> f64 {
    let km1 = (k - 1) as f64;
    km1 * km1 + 2.0 / PI * km1 * stats.path_length * (alpha * (stats.xi + 2.0) + stats.theta * LN_4)
}

/// Zero bound in a convex domain of diameter `diam`: `k - 1 + L diam / π`.
pub fn ky_bound(qp: &QuasiPolynomial, diam: f64) -> Result<f64> {
    if !(diam >= 0.0) {
        return Err(Error::InvalidInput(format!("diameter {diam} must be >= 0")));
    }
    let path = shortest_path_length(&qp.lambdas()).length;
    Ok((qp.dimension() - 1) as f64 + path * diam / PI)
}

/// Zero bound from the argument-variation estimate over boxes of total perimeter `ell`
/// for a monic equation with coefficients bounded by `c`:
/// `2(k+1) + (k+1) ℓ C / ln(9/4)`.
pub fn vallee_poussin_box_bound(k: usize, ell: f64, c: f64) -> Result<f64> {
    if k == 0 || !(ell >= 0.0) || !(c >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need k >= 1, ell >= 0, C >= 0 (got {k}, {ell}, {c})"
        )));
    }
    let kp1 = (k + 1) as f64;
    Ok(2.0 * kp1 + kp1 * ell * c / (9.0f64 / 4.0).ln())
}
