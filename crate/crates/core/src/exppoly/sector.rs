//! Zero bound in a sector at a Fuchsian point, via the logarithmic chart `z - p = e^t`.

use serde::{Deserialize, Serialize};

use super::{vallee_poussin_box_bound, SpectrumStats};
use crate::error::{Error, Result};
use crate::fuchs::{characteristic_exponents, classify_point, PointKind};
use crate::majorant::perturbation_constant_unchecked;
use crate::ode::{moebius_invert, LinearODE, Point};
use crate::poly::{Complex, Polynomial};
use crate::tolerances::Tolerances;

/// Samples per axis of the coefficient grid over `[β-40, β] × [-α, α]`.
const GRID: usize = 64;
const DEPTH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorParams {
    /// Half-opening `|arg(z - p)| <= α`.
    pub alpha: f64,
    /// Radius `|z - p| <= e^β`.
    pub beta: f64,
    /// Constant in `|ε(t)| <= C_ε e^{Re t}` for the deviation of the coefficients from their
    /// limits; estimated on the grid when absent.
    pub eps_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorBound {
    pub value: f64,
    pub order: usize,
    pub theta: f64,
    pub xi: f64,
    /// Sup of the reduced coefficients on the semi-strip (sampled).
    pub coefficient_sup: f64,
    pub eps_bound: f64,
    pub perturbation: f64,
    pub ell: f64,
    /// The sampled constants are estimates, not certified bounds.
    pub rigorous: bool,
}

/// Signed Stirling numbers of the first kind `s(n, m)` for `n, m <= k`.
fn stirling_first(k: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; k + 1]; k + 1];
    s[0][0] = 1.0;
    for n in 0..k {
        for m in 1..=n + 1 {
            s[n + 1][m] = s[n][m - 1] - n as f64 * s[n][m];
        }
    }
    s
}

/// Numerators of the chart coefficients: `N_m(x) = Σ_{j>=m} s(j,m) P_j(p+x) x^{k-j}`,
/// so that the equation reads `Σ_m N_m(e^t) d^m y/dt^m = 0` with `N_k = P_k(p+x)`.
fn chart_numerators(ode: &LinearODE, p: Complex) -> Vec<Polynomial> {
    let k = ode.order();
    let s = stirling_first(k);
    let shifted: Vec<Polynomial> = ode.coeffs().iter().map(|c| c.taylor_shift(p)).collect();
    (0..=k)
        .map(|m| {
            (m..=k).fold(Polynomial::zero(), |acc, j| {
                &acc + &shifted[j].shift_up(k - j).scaled(Complex::new(s[j][m], 0.0))
            })
        })
        .collect()
}

/// Bound on the number of zeros of any solution in `{|z-p| <= e^β, |arg(z-p)| <= α}`.
pub fn sector_zero_bound(
    ode: &LinearODE,
    p: Point,
    params: &SectorParams,
    tol: &Tolerances,
) -> Result<SectorBound> {
    let SectorParams { alpha, beta, eps_bound } = *params;
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("invalid sector alpha = {alpha}, beta = {beta}")));
    }
    if let Some(e) = eps_bound {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::InvalidInput(format!("eps bound {e} must be >= 0")));
        }
    }
    let (chart_ode, center) = match p {
        Point::Finite(c) => (ode.clone(), c),
        Point::Infinity => (moebius_invert(ode), Complex::new(0.0, 0.0)),
    };
    if classify_point(&chart_ode, Point::Finite(center), tol)?.kind == PointKind::Irregular {
        return Err(Error::NotFuchsianAtPoint { point: p.to_string() });
    }
    let exponents = characteristic_exponents(&chart_ode, Point::Finite(center), tol)?;
    let stats = SpectrumStats::from_lambdas(&exponents.values(), tol)?;
    let k = chart_ode.order();

    let numerators = chart_numerators(&chart_ode, center);
    let lead = &numerators[k];
    let lead_val = lead.valuation();
    // Fuchsian limits at x -> 0: ratio of the coefficients at the leading valuation.
    let limits: Vec<Complex> = (0..k)
        .map(|m| numerators[m].coeffs().get(lead_val).copied().unwrap_or_default() / lead.coeffs()[lead_val])
        .collect();

    let mut sup = limits.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut eps_est: f64 = 0.0;
    for iu in 0..GRID {
        let u = beta - DEPTH + DEPTH * iu as f64 / (GRID - 1) as f64;
        for iv in 0..GRID {
            let v = if GRID == 1 { 0.0 } else { -alpha + 2.0 * alpha * iv as f64 / (GRID - 1) as f64 };
            let x = Complex::new(u, v).exp();
            let denom = lead.eval(x);
            for m in 0..k {
                let b = numerators[m].eval(x) / denom;
                sup = sup.max(b.norm());
                eps_est = eps_est.max((b - limits[m]).norm() / u.exp());
            }
        }
    }
    if !(sup.is_finite() && eps_est.is_finite()) {
        return Err(Error::InvalidInput(
            "leading coefficient vanishes inside the sector".into(),
        ));
    }
    let eps = eps_bound.unwrap_or(eps_est);
    let c_eq = perturbation_constant_unchecked(k, stats.theta, alpha, beta, eps);

    let kf = k as f64;
    let k2 = kf * kf;
    let ell = 2.0 * k2 * (kf + 1.0)
        * (4.0 * stats.theta * kf.ln() + 4.0 * alpha * stats.xi + 4.0 * alpha + 4.0 * c_eq)
        + 16.0 * k2 * stats.theta
        + 4.0 * (kf + k2 + k2 * kf) * alpha;
    let value = vallee_poussin_box_bound(k, ell, sup)?;
    Ok(SectorBound {
        value,
        order: k,
        theta: stats.theta,
        xi: stats.xi,
        coefficient_sup: sup,
        eps_bound: eps,
        perturbation: c_eq,
        ell,
        rigorous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::parse_ode;

    #[test]
    fn stirling_rows() {
        let s = stirling_first(4);
        assert_eq!(s[3][1..=3], [2.0, -3.0, 1.0]);
        assert_eq!(s[4][1..=4], [-6.0, 11.0, -6.0, 1.0]);
    }

    #[test]
    fn euler_chart_is_constant_coefficient() {
        // z²y'' + zy' - y = 0 becomes y_tt - y = 0.
        let ode = parse_ode("z^2*y'' + z*y' - y = 0").unwrap();
        let n = chart_numerators(&ode, Complex::new(0.0, 0.0));
        let lead = n[2].coeffs()[2];
        assert!(n[1].is_zero());
        assert_eq!(n[0].coeffs()[2] / lead, Complex::new(-1.0, 0.0));
    }

    #[test]
    fn euler_sector_bound() {
        let ode = parse_ode("z^2*y'' + z*y' - y = 0").unwrap();
        let params = SectorParams { alpha: std::f64::consts::PI, beta: 0.0, eps_bound: None };
        let b = sector_zero_bound(&ode, Point::Finite(Complex::new(0.0, 0.0)), &params, &Tolerances::default()).unwrap();
        assert!(b.value.is_finite());
        assert_eq!(b.theta, 0.5);
        assert_eq!(b.xi, 0.0);
        assert!((b.coefficient_sup - 1.0).abs() < 1e-12);
        assert_eq!(b.eps_bound, 0.0);
        assert!(!b.rigorous);
    }

    #[test]
    fn exponents_zero_and_one() {
        // z y'' = 0 has exponents {0, 1} at the origin.
        let ode = parse_ode("z^2*y'' = 0").unwrap();
        let params = SectorParams { alpha: 0.1, beta: -1.0, eps_bound: None };
        let b = sector_zero_bound(&ode, Point::Finite(Complex::new(0.0, 0.0)), &params, &Tolerances::default()).unwrap();
        assert_eq!(b.theta, 1.0);
        assert_eq!(b.xi, 0.0);
    }

    #[test]
    fn first_order_is_theta_free() {
        let ode = parse_ode("z*y' - 0.5*y = 0").unwrap();
        let params = SectorParams { alpha: 1.0, beta: 0.0, eps_bound: None };
        let b = sector_zero_bound(&ode, Point::Finite(Complex::new(0.0, 0.0)), &params, &Tolerances::default()).unwrap();
        assert_eq!(b.theta, 0.0);
        assert!(b.value >= 0.0);
    }

    #[test]
    fn irregular_point_rejected() {
        let ode = parse_ode("z^3*y'' + y = 0").unwrap();
        let params = SectorParams { alpha: 1.0, beta: 0.0, eps_bound: None };
        assert!(matches!(
            sector_zero_bound(&ode, Point::Finite(Complex::new(0.0, 0.0)), &params, &Tolerances::default()),
            Err(Error::NotFuchsianAtPoint { .. })
        ));
    }
}
