//! Least concave majorants of the term log-moduli, central index, dominance predicates
//! and the slope sets that drive the box covers.

mod cover;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{QuasiPolynomial, SpectrumStats, LN_4};
use crate::poly::Complex;
use crate::tolerances::Tolerances;

pub use cover::{
    excluded_boxes_multiple, excluded_boxes_perturbed, excluded_boxes_simple,
    perturbation_constant, BoxCover, CoverKind,
};
pub(crate) use cover::perturbation_constant_unchecked;

/// Piecewise-linear concave function through a subset of the input points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcaveMajorant {
    /// `(mu, phi)` vertices, increasing in `mu`.
    pub breakpoints: Vec<(f64, f64)>,
    /// Position of each breakpoint in the input sorted by `mu`.
    pub indices: Vec<usize>,
    /// One slope per segment, strictly decreasing.
    pub slopes: Vec<f64>,
}

/// Upper convex hull of the points, read as a concave function of `mu`.
pub fn least_concave_majorant(points: &[(f64, f64)]) -> Result<ConcaveMajorant> {
    if points.is_empty() {
        return Err(Error::InvalidInput("majorant of an empty point set".into()));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0));
    for w in order.windows(2) {
        if points[w[0]].0 == points[w[1]].0 {
            return Err(Error::DuplicateAbscissa(points[w[0]].0));
        }
    }
    let sorted: Vec<(f64, f64)> = order.iter().map(|&i| points[i]).collect();
    let mut hull: Vec<usize> = Vec::with_capacity(sorted.len());
    for (i, &(x, y)) in sorted.iter().enumerate() {
        while hull.len() >= 2 {
            let (x1, y1) = sorted[hull[hull.len() - 2]];
            let (x2, y2) = sorted[hull[hull.len() - 1]];
            // Drop the middle vertex unless it makes a strict right turn.
            let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let breakpoints: Vec<(f64, f64)> = hull.iter().map(|&i| sorted[i]).collect();
    let slopes = breakpoints
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    Ok(ConcaveMajorant {
        breakpoints,
        indices: hull,
        slopes,
    })
}

impl ConcaveMajorant {
    /// Value at `mu`, which must lie within the breakpoint range.
    pub fn eval(&self, mu: f64) -> f64 {
        let bp = &self.breakpoints;
        if bp.len() == 1 || mu <= bp[0].0 {
            return bp[0].1;
        }
        let seg = bp
            .windows(2)
            .position(|w| mu <= w[1].0)
            .unwrap_or(bp.len() - 2);
        let (x0, y0) = bp[seg];
        if mu == bp[seg + 1].0 {
            return bp[seg + 1].1;
        }
        y0 + self.slopes[seg] * (mu - x0)
    }

    /// The majorant of the points shifted by `u mu`.
    pub fn shifted(&self, u: f64) -> Self {
        Self {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|&(mu, phi)| (mu, phi + u * mu))
                .collect(),
            indices: self.indices.clone(),
            slopes: self.slopes.iter().map(|s| s + u).collect(),
        }
    }

    /// Position (in the mu-sorted input) of the global maximum; ties go to the larger `mu`.
    pub fn central_index(&self) -> usize {
        let rising = self.slopes.iter().take_while(|&&s| s >= 0.0).count();
        self.indices[rising]
    }
}

/// Term indices of `qp` sorted by the real part of their exponent.
fn real_part_order(qp: &QuasiPolynomial) -> Vec<usize> {
    let mut order: Vec<usize> = (0..qp.terms().len()).collect();
    order.sort_by(|&a, &b| qp.terms()[a].lambda.re.total_cmp(&qp.terms()[b].lambda.re));
    order
}

/// Index `j` with `|term_j(z)| >= Σ_{i≠j} |term_i(z)|` and `term_j(z) ≠ 0`; lowest index wins ties.
pub fn is_dominant_at(qp: &QuasiPolynomial, z: Complex) -> Option<usize> {
    let moduli = relative_moduli(qp, z)?;
    let total = moduli.iter().fold(0.0, |a, b| a + b);
    moduli
        .iter()
        .position(|&m| m > 0.0 && m >= total - m)
}

/// Term moduli divided by the largest one; `None` if every term vanishes.
fn relative_moduli(qp: &QuasiPolynomial, z: Complex) -> Option<Vec<f64>> {
    let logs = qp.term_logmods(z);
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return None;
    }
    Some(logs.iter().map(|l| (l - top).exp()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    /// All consecutive majorant gaps are at least `ln 4`.
    pub holds: bool,
    /// Term index of the central index of the shifted majorant.
    pub central: usize,
    /// `Σ_{i≠central} |term_i(u)| / |term_central(u)|`.
    pub margin: f64,
}

fn majorant_points(qp: &QuasiPolynomial, order: &[usize], u: f64, v: f64) -> Vec<(f64, f64)> {
    order
        .iter()
        .map(|&j| {
            let t = &qp.terms()[j];
            let a = t.amplitude.coeffs()[0];
            (t.lambda.re, a.norm().ln() + t.lambda.re * u - t.lambda.im * v)
        })
        .collect()
}

/// Checks the `ln 4` gap condition between consecutive majorant values at `z = u`.
pub fn gap_dominance_check(qp: &QuasiPolynomial, u: f64, tol: &Tolerances) -> Result<GapCheck> {
    if !qp.is_simple() {
        return Err(Error::NotSimpleExponents);
    }
    qp.spectrum_stats(tol)?;
    let order = real_part_order(qp);
    let majorant = least_concave_majorant(&majorant_points(qp, &order, u, 0.0))?;
    let values: Vec<f64> = order
        .iter()
        .map(|&j| majorant.eval(qp.terms()[j].lambda.re))
        .collect();
    let holds = values.windows(2).all(|w| (w[1] - w[0]).abs() >= LN_4);
    let central = order[majorant.central_index()];
    let moduli = relative_moduli(qp, Complex::new(u, 0.0)).expect("simple terms never vanish");
    let others: f64 = moduli
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != central)
        .fold(0.0, |a, (_, m)| a + m);
    Ok(GapCheck {
        holds,
        central,
        margin: others / moduli[central],
    })
}

/// Union over `|v| <= α` of the slopes of the majorant at `u = 0`, as closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSet {
    pub intervals: Vec<(f64, f64)>,
    /// Extra width added beyond the exact set (always 0 for the event-based construction).
    pub padding: f64,
}

impl SlopeSet {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).fold(0.0, |s, l| s + l)
    }
}

/// Exact slope set: the hull combinatorics only change where three points become collinear,
/// and between such events every hull slope is affine in `v`.
pub fn slope_set(qp: &QuasiPolynomial, alpha: f64, tol: &Tolerances) -> Result<SlopeSet> {
    if !qp.is_simple() {
        return Err(Error::NotSimpleExponents);
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} must be >= 0")));
    }
    qp.spectrum_stats(tol)?;
    let order = real_part_order(qp);
    let mu: Vec<f64> = order.iter().map(|&j| qp.terms()[j].lambda.re).collect();
    let base: Vec<f64> = order
        .iter()
        .map(|&j| qp.terms()[j].amplitude.coeffs()[0].norm().ln())
        .collect();
    let drift: Vec<f64> = order.iter().map(|&j| qp.terms()[j].lambda.im).collect();
    let n = mu.len();

    let mut cuts = vec![-alpha, alpha];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                // (φ_b - φ_a)(μ_c - μ_a) - (φ_c - φ_a)(μ_b - μ_a) with φ = base - v drift.
                let e0 = (base[b] - base[a]) * (mu[c] - mu[a]) - (base[c] - base[a]) * (mu[b] - mu[a]);
                let e1 = -(drift[b] - drift[a]) * (mu[c] - mu[a]) + (drift[c] - drift[a]) * (mu[b] - mu[a]);
                if e1 != 0.0 {
                    let v = -e0 / e1;
                    if v > -alpha && v < alpha {
                        cuts.push(v);
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let slope = |j: usize, l: usize, v: f64| {
        ((base[l] - base[j]) - v * (drift[l] - drift[j])) / (mu[l] - mu[j])
    };
    let hull_edges = |v: f64| -> Result<Vec<(usize, usize)>> {
        let pts: Vec<(f64, f64)> = (0..n).map(|j| (mu[j], base[j] - v * drift[j])).collect();
        let m = least_concave_majorant(&pts)?;
        Ok(m.indices.windows(2).map(|w| (w[0], w[1])).collect())
    };

    let mut raw: Vec<(f64, f64)> = Vec::new();
    if cuts.len() == 1 {
        for (j, l) in hull_edges(0.0)? {
            let s = slope(j, l, 0.0);
            raw.push((s, s));
        }
    } else {
        for w in cuts.windows(2) {
            let (v0, v1) = (w[0], w[1]);
            for (j, l) in hull_edges(0.5 * (v0 + v1))? {
                let (s0, s1) = (slope(j, l, v0), slope(j, l, v1));
                raw.push((s0.min(s1), s0.max(s1)));
            }
        }
    }
    Ok(SlopeSet {
        intervals: merge_intervals(raw, 1e-12),
        padding: 0.0,
    })
}

/// Union of closed intervals; intervals closer than `rel_gap` (relative) are joined.
pub(crate) fn merge_intervals(mut raw: Vec<(f64, f64)>, rel_gap: f64) -> Vec<(f64, f64)> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    for (lo, hi) in raw {
        match out.last_mut() {
            Some(last) if lo <= last.1 + rel_gap * (1.0 + last.1.abs()) => {
                last.1 = last.1.max(hi);
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Least concave majorant of the term points `(Re λ_j, ln|a_j e^{λ_j (u + iv)}|)`.
pub fn term_majorant(qp: &QuasiPolynomial, u: f64, v: f64) -> Result<ConcaveMajorant> {
    if !qp.is_simple() {
        return Err(Error::NotSimpleExponents);
    }
    let order = real_part_order(qp);
    least_concave_majorant(&majorant_points(qp, &order, u, v))
}

pub(crate) fn stats_for_cover(qp: &QuasiPolynomial, tol: &Tolerances) -> Result<SpectrumStats> {
    qp.spectrum_stats(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn cosh2() -> QuasiPolynomial {
        QuasiPolynomial::simple(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn majorant_examples() {
        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_eq!(m.breakpoints.len(), 3);
        assert_eq!(m.slopes, vec![2.0, -2.0]);

        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, -5.0), (2.0, 0.0)]).unwrap();
        assert_eq!(m.breakpoints, vec![(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(m.slopes, vec![0.0]);
        assert_eq!(m.eval(1.0), 0.0);

        let single = least_concave_majorant(&[(3.0, 1.0)]).unwrap();
        assert!(single.slopes.is_empty());
        assert_eq!(single.central_index(), 0);

        assert!(matches!(
            least_concave_majorant(&[(1.0, 0.0), (1.0, 2.0)]),
            Err(Error::DuplicateAbscissa(_))
        ));
    }

    #[test]
    fn collinear_points_are_not_vertices() {
        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 0.0)]).unwrap();
        assert_eq!(m.indices, vec![0, 2, 3]);
    }

    #[test]
    fn shift_examples() {
        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_eq!(m.shifted(0.0), m);
        assert_eq!(m.shifted(3.0).slopes, vec![5.0, 1.0]);
        let back = m.shifted(0.7).shifted(-0.7);
        for (a, b) in back.breakpoints.iter().zip(&m.breakpoints) {
            assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn central_index_examples() {
        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_eq!(m.central_index(), 1);
        assert_eq!(m.shifted(-5.0).central_index(), 0);
        assert_eq!(m.shifted(1e6).central_index(), 2);
        // Flat top: tie goes to the larger mu.
        let flat = least_concave_majorant(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(flat.central_index(), 1);
    }

    #[test]
    fn dominance_examples() {
        let qp = cosh2();
        assert_eq!(is_dominant_at(&qp, c(2.0, 0.0)), Some(0));
        assert_eq!(is_dominant_at(&qp, c(-2.0, 0.0)), Some(1));
        // Equal moduli: the closed inequality holds for both, lowest index wins.
        assert_eq!(is_dominant_at(&qp, c(0.0, 0.0)), Some(0));
        let vanishing = QuasiPolynomial::new(vec![crate::exppoly::Term {
            lambda: c(0.0, 0.0),
            amplitude: crate::Polynomial::from_real(&[1.0, 1.0]),
        }])
        .unwrap();
        assert_eq!(is_dominant_at(&vanishing, c(-1.0, 0.0)), None);
    }

    #[test]
    fn gap_check_examples() {
        let tol = Tolerances::default();
        let qp = cosh2();
        let at = gap_dominance_check(&qp, std::f64::consts::LN_2, &tol).unwrap();
        assert!(at.holds);
        assert!(at.margin <= 2.0 / 3.0);
        assert!(!gap_dominance_check(&qp, 0.0, &tol).unwrap().holds);
        let far = gap_dominance_check(&qp, 10.0, &tol).unwrap();
        assert!(far.holds);
        assert_eq!(far.central, 0);
        assert_eq!(is_dominant_at(&qp, c(10.0, 0.0)), Some(far.central));
    }

    #[test]
    fn slope_set_examples() {
        let tol = Tolerances::default();
        let qp = QuasiPolynomial::simple(
            &[c(-1.0, 0.3), c(0.5, 2.0), c(2.0, -1.0)],
            &[c(1.0, 0.0), c(3.0, 1.0), c(0.2, 0.0)],
        )
        .unwrap();
        let at_zero = slope_set(&qp, 0.0, &tol).unwrap();
        let m = term_majorant(&qp, 0.0, 0.0).unwrap();
        assert_eq!(at_zero.intervals.len(), m.slopes.len());
        for ((lo, hi), s) in at_zero.intervals.iter().zip(m.slopes.iter().rev()) {
            assert_eq!(lo, hi);
            assert!((lo - s).abs() < 1e-12);
        }

        let flat = slope_set(&cosh2(), 1.0, &tol).unwrap();
        assert_eq!(flat.intervals, vec![(0.0, 0.0)]);

        // Two terms: slope(v) = (ln|a2| - ln|a1| - v) / 1, so |v| <= 1 sweeps an interval of length 2.
        let tilted = QuasiPolynomial::simple(&[c(0.0, 0.0), c(1.0, 1.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let s = slope_set(&tilted, 1.0, &tol).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!((s.total_length() - 2.0).abs() < 1e-12);
        assert_eq!(s.padding, 0.0);
    }
}
