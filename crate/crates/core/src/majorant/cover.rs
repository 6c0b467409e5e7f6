//! Finite unions of boxes `[u_lo, u_hi] × [-α, α]` outside of which one term dominates.

use serde::{Deserialize, Serialize};

use super::{merge_intervals, slope_set, stats_for_cover};
use crate::error::{Error, Result};
use crate::exppoly::{QuasiPolynomial, Rect, LN_4};
use crate::roots::poly_roots;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    Simple,
    Multiple,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCover {
    pub kind: CoverKind,
    /// Disjoint boxes sorted by `u_lo`.
    pub boxes: Vec<Rect>,
    pub total_width: f64,
    /// Theoretical cap on the number of boxes.
    pub count_bound: usize,
    /// Theoretical cap on the total width.
    pub width_bound: f64,
    pub padding: f64,
    /// Additive threshold from the perturbation term (0 unless perturbed).
    pub perturbation: f64,
}

impl BoxCover {
    fn from_intervals(
        kind: CoverKind,
        raw: Vec<(f64, f64)>,
        alpha: f64,
        count_bound: usize,
        width_bound: f64,
        perturbation: f64,
    ) -> Self {
        let merged = merge_intervals(raw, 0.0);
        let boxes: Vec<Rect> = merged
            .iter()
            .map(|&(lo, hi)| Rect {
                u_lo: lo,
                u_hi: hi,
                v_lo: 0.0 - alpha,
                v_hi: alpha,
            })
            .collect();
        let total_width = merged.iter().map(|(lo, hi)| hi - lo).fold(0.0, |a, b| a + b);
        Self {
            kind,
            boxes,
            total_width,
            count_bound,
            width_bound,
            padding: 0.0,
            perturbation,
        }
    }

    /// Whether `u` lies in the horizontal projection of some box.
    pub fn covers_abscissa(&self, u: f64) -> bool {
        self.boxes.iter().any(|b| b.u_lo <= u && u <= b.u_hi)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha = {alpha} must be finite and >= 0")))
    }
}

/// Cover for constant amplitudes: slopes of the majorant, reflected and padded by `Θ ln 4`.
pub fn excluded_boxes_simple(qp: &QuasiPolynomial, alpha: f64, tol: &Tolerances) -> Result<BoxCover> {
    check_alpha(alpha)?;
    let slopes = slope_set(qp, alpha, tol)?;
    let stats = stats_for_cover(qp, tol)?;
    let k = qp.dimension();
    let pad = stats.theta * LN_4;
    let raw = slopes
        .intervals
        .iter()
        .map(|&(lo, hi)| (-hi - pad, -lo + pad))
        .collect();
    let km1 = (k - 1) as f64;
    let width_bound = 2.0 * alpha * km1 * stats.xi + 2.0 * km1 * stats.theta * LN_4;
    let mut cover = BoxCover::from_intervals(CoverKind::Simple, raw, alpha, k - 1, width_bound, 0.0);
    cover.padding = slopes.padding;
    Ok(cover)
}

/// Cover for polynomial amplitudes.
pub fn excluded_boxes_multiple(qp: &QuasiPolynomial, alpha: f64, tol: &Tolerances) -> Result<BoxCover> {
    check_alpha(alpha)?;
    multiple_cover(qp, alpha, 0.0, CoverKind::Multiple, tol)
}

/// Cover for `qp + ε` with `|ε(z)| <= C e^{Re z}` on the semi-strip `u <= β`.
pub fn excluded_boxes_perturbed(
    qp: &QuasiPolynomial,
    alpha: f64,
    beta: f64,
    c: f64,
    tol: &Tolerances,
) -> Result<BoxCover> {
    check_alpha(alpha)?;
    let c_eq = perturbation_constant(qp, alpha, beta, c, tol)?;
    let mut cover = multiple_cover(qp, alpha, c_eq, CoverKind::Perturbed, tol)?;
    cover.boxes.retain_mut(|b| {
        b.u_hi = b.u_hi.min(beta);
        b.u_lo <= b.u_hi
    });
    cover.total_width = cover.boxes.iter().map(Rect::width).fold(0.0, |a, b| a + b);
    Ok(cover)
}

fn multiple_cover(
    qp: &QuasiPolynomial,
    alpha: f64,
    c_eq: f64,
    kind: CoverKind,
    tol: &Tolerances,
) -> Result<BoxCover> {
    let stats = stats_for_cover(qp, tol)?;
    let k = qp.dimension();
    let kf = k as f64;
    let theta = stats.theta;
    let half = 4.0 * kf * theta;

    let mut centers = Vec::new();
    for t in qp.terms() {
        for r in &poly_roots(&t.amplitude, tol)?.entries {
            centers.push(r.location.re);
        }
    }
    let strips = merge_intervals(
        centers.iter().map(|&c| (c - half, c + half)).collect(),
        0.0,
    );

    // Complement of the strips, as open components (possibly unbounded).
    let mut components = Vec::with_capacity(strips.len() + 1);
    let mut left = f64::NEG_INFINITY;
    for &(lo, hi) in &strips {
        if lo > left {
            components.push((left, lo));
        }
        left = hi;
    }
    components.push((left, f64::INFINITY));

    let mut raw = strips.clone();
    let terms = qp.terms();
    for (j, tj) in terms.iter().enumerate() {
        for tl in &terms[j + 1..] {
            let d = tj.lambda - tl.lambda;
            let th = d.re;
            let xi = d.im / th;
            let threshold = kf.ln() + alpha * (xi * th).abs() + alpha * th.abs() + c_eq;
            let h = |u: f64| {
                tj.amplitude.eval(u.into()).norm().ln() - tl.amplitude.eval(u.into()).norm().ln() + th * u
            };
            for &(a, b) in &components {
                if let Some(iv) = level_band(&h, th, a, b, threshold) {
                    raw.push(iv);
                }
            }
        }
    }

    let count_bound = k + k * k + k * k * k;
    let k2 = kf * kf;
    let width_bound = k2 * (kf + 1.0)
        * (4.0 * theta * kf.ln() + 4.0 * alpha * stats.xi + 4.0 * alpha + 4.0 * c_eq * theta.max(1.0))
        + 8.0 * k2 * theta;
    Ok(BoxCover::from_intervals(kind, raw, alpha, count_bound, width_bound, c_eq))
}

const BISECTION_TOL: f64 = 1e-9;

/// `{u ∈ [a, b] : |h(u)| <= t}` for `h` strictly monotone with `|h'| >= |θ|/2` on the component.
fn level_band(h: &impl Fn(f64) -> f64, theta: f64, a: f64, b: f64, t: f64) -> Option<(f64, f64)> {
    let rate = 0.5 * theta.abs();
    // Finite bracket that contains every solution of |h| <= t inside the component.
    let anchor = match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    };
    let reach = (h(anchor).abs() + t) / rate + 1.0;
    let lo = if a.is_finite() { a } else { anchor - reach };
    let hi = if b.is_finite() { b } else { anchor + reach };
    let increasing = theta > 0.0;
    let (h_lo, h_hi) = (h(lo), h(hi));
    let (min_v, max_v) = if increasing { (h_lo, h_hi) } else { (h_hi, h_lo) };
    if max_v < -t || min_v > t {
        return None;
    }
    // Solve h = ±t; outward rounding keeps the band conservative.
    let solve = |target: f64, outward_left: bool| -> f64 {
        let (mut x0, mut x1) = (lo, hi);
        while x1 - x0 > BISECTION_TOL * (1.0 + x0.abs().max(x1.abs())) {
            let mid = 0.5 * (x0 + x1);
            if (h(mid) < target) == increasing {
                x0 = mid;
            } else {
                x1 = mid;
            }
        }
        if outward_left { x0 } else { x1 }
    };
    let (start_target, end_target) = if increasing { (-t, t) } else { (t, -t) };
    let starts_inside = if increasing { h_lo >= -t } else { h_lo <= t };
    let ends_inside = if increasing { h_hi <= t } else { h_hi >= -t };
    let start = if starts_inside {
        lo
    } else {
        solve(start_target, true)
    };
    let end = if ends_inside {
        hi
    } else {
        solve(end_target, false)
    };
    (start <= end).then_some((start, end))
}

/// Equation-level perturbation constant `C · max_ℓ (3/(4kΘ))^ℓ 3^{k-ℓ} M_ℓ`.
pub fn perturbation_constant(
    qp: &QuasiPolynomial,
    alpha: f64,
    beta: f64,
    c: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if !(beta < 0.0) {
        return Err(Error::BetaNotNegative(beta));
    }
    check_alpha(alpha)?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("perturbation constant {c} must be >= 0")));
    }
    let stats = stats_for_cover(qp, tol)?;
    Ok(perturbation_constant_unchecked(qp.dimension(), stats.theta, alpha, beta, c))
}

pub(crate) fn perturbation_constant_unchecked(k: usize, theta: f64, alpha: f64, beta: f64, c: f64) -> f64 {
    let top = if theta > 0.0 { k } else { 0 };
    let mut best = 0.0f64;
    for l in 0..=top {
        let log_m = log_sup_weight(l, alpha, beta);
        let log_scale = if l == 0 { 0.0 } else { l as f64 * (3.0 / (4.0 * k as f64 * theta)).ln() };
        let log_factor = log_scale + (k - l) as f64 * 3f64.ln() + log_m;
        best = best.max(log_factor.exp());
    }
    c * best
}

/// `ln sup_{u <= β} e^u (u² + α²)^{ℓ/2}`.
fn log_sup_weight(l: usize, alpha: f64, beta: f64) -> f64 {
    let lf = l as f64;
    let g = |u: f64| u + 0.5 * lf * (u * u + alpha * alpha).ln();
    if l == 0 {
        return beta;
    }
    let mut best = g(beta);
    let disc = lf * lf - 4.0 * alpha * alpha;
    if disc >= 0.0 {
        for u in [(-lf - disc.sqrt()) / 2.0, (-lf + disc.sqrt()) / 2.0] {
            if u <= beta {
                best = best.max(g(u));
            }
        }
    }
    best
}
