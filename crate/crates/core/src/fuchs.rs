//! Point classification, indicial equations, characteristic exponents and the
//! global non-oscillation verdict.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{moebius_invert, singular_points, LinearODE, Point};
use crate::poly::{Complex, Polynomial};
use crate::roots::poly_roots;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    Ordinary,
    RegularSingular,
    Irregular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClassification {
    pub kind: PointKind,
    /// `pole_orders[j-1]` is the pole order of `P_{k-j}/P_k` at the point (0 if none).
    pub pole_orders: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub value: Complex,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentSet {
    pub exponents: Vec<Exponent>,
}

impl ExponentSet {
    pub fn total_multiplicity(&self) -> usize {
        self.exponents.iter().map(|e| e.multiplicity).sum()
    }

    pub fn sum(&self) -> Complex {
        self.exponents
            .iter()
            .map(|e| e.value * e.multiplicity as f64)
            .sum()
    }

    pub fn values(&self) -> Vec<Complex> {
        self.exponents.iter().map(|e| e.value).collect()
    }
}

/// Coefficients expanded in the local variable at `p` (`z - p`, or `w = 1/z` at infinity).
fn local_coefficients(ode: &LinearODE, p: Point) -> Vec<Polynomial> {
    match p {
        Point::Finite(c) => ode.coeffs().iter().map(|q| q.taylor_shift(c)).collect(),
        Point::Infinity => moebius_invert(ode).coeffs().to_vec(),
    }
}

/// Vanishing order of a local expansion, with numerically negligible low coefficients
/// treated as zero.
fn local_order(q: &Polynomial, tol: &Tolerances) -> Option<usize> {
    if q.is_zero() {
        return None;
    }
    let scale = q.scale();
    Some(
        q.coeffs()
            .iter()
            .take_while(|c| c.norm() <= tol.cluster_radius * scale)
            .count(),
    )
}

struct LocalData {
    coeffs: Vec<Polynomial>,
    lead_order: usize,
    pole_orders: Vec<usize>,
}

fn local_data(ode: &LinearODE, p: Point, tol: &Tolerances) -> LocalData {
    let coeffs = local_coefficients(ode, p);
    let k = coeffs.len() - 1;
    let lead_order = local_order(&coeffs[k], tol).expect("leading coefficient is nonzero");
    let pole_orders = (1..=k)
        .map(|j| match local_order(&coeffs[k - j], tol) {
            None => 0,
            Some(m) => lead_order.saturating_sub(m),
        })
        .collect();
    LocalData {
        coeffs,
        lead_order,
        pole_orders,
    }
}

pub fn classify_point(ode: &LinearODE, p: Point, tol: &Tolerances) -> Result<PointClassification> {
    let data = local_data(ode, p, tol);
    let kind = if data.lead_order == 0 {
        PointKind::Ordinary
    } else if data
        .pole_orders
        .iter()
        .enumerate()
        .all(|(i, &order)| order <= i + 1)
    {
        PointKind::RegularSingular
    } else {
        PointKind::Irregular
    };
    Ok(PointClassification {
        kind,
        pole_orders: data.pole_orders,
    })
}

/// `λ(λ-1)...(λ-n+1)`.
fn falling_factorial(n: usize) -> Polynomial {
    (0..n).fold(Polynomial::one(), |acc, i| {
        &acc * &Polynomial::new(vec![Complex::new(-(i as f64), 0.0), Complex::new(1.0, 0.0)])
    })
}

/// Indicial polynomial in the exponent variable.
pub fn indicial_polynomial(ode: &LinearODE, p: Point, tol: &Tolerances) -> Result<Polynomial> {
    let data = local_data(ode, p, tol);
    let k = data.coeffs.len() - 1;
    if data
        .pole_orders
        .iter()
        .enumerate()
        .any(|(i, &order)| order > i + 1)
    {
        return Err(Error::NotFuchsianAtPoint {
            point: p.to_string(),
        });
    }
    let lead = data.coeffs[k].coeffs()[data.lead_order];
    let mut indicial = falling_factorial(k);
    for j in 1..=k {
        if data.pole_orders[j - 1] != j {
            continue;
        }
        // (x^j P_{k-j}/P_k)(0) is the ratio of the first surviving Taylor coefficients.
        let beta = data.coeffs[k - j].coeffs()[data.lead_order - j] / lead;
        indicial = &indicial + &falling_factorial(k - j).scaled(beta);
    }
    Ok(indicial)
}

pub fn characteristic_exponents(ode: &LinearODE, p: Point, tol: &Tolerances) -> Result<ExponentSet> {
    let indicial = indicial_polynomial(ode, p, tol)?;
    let roots = poly_roots(&indicial, tol)?;
    Ok(ExponentSet {
        exponents: roots
            .entries
            .into_iter()
            .map(|r| Exponent {
                value: r.location,
                multiplicity: r.multiplicity,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    GloballyNonOscillating,
    Oscillating,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    /// Regular singular, distinct exponents have distinct real parts.
    Separated,
    Irregular,
    /// Two distinct exponents share a real part.
    EqualRealParts,
    /// A real-part comparison fell inside the tolerance band.
    Indeterminate,
}

/// Step-1 witness: zeros of the leading term `x^(a+i(b1+b2)/2) cos((b1-b2)/2 ln x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationWitness {
    pub real_part: f64,
    pub b1: f64,
    pub b2: f64,
    /// Zeros in the local coordinate, approaching the singular point.
    pub local_zeros: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEvidence {
    pub point: Point,
    pub classification: PointClassification,
    pub exponents: Option<ExponentSet>,
    /// Smallest |Δ Re| over pairs of distinct exponents.
    pub min_real_gap: Option<f64>,
    pub status: PointStatus,
    pub note: String,
    pub witness: Option<OscillationWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuchsRelation {
    pub expected: f64,
    pub actual: Complex,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonOscillationVerdict {
    pub verdict: Verdict,
    pub points: Vec<PointEvidence>,
    /// Diagnostic only; present when every singular point is regular.
    pub fuchs_relation: Option<FuchsRelation>,
    pub warnings: Vec<String>,
}

fn point_order(a: &Point, b: &Point) -> std::cmp::Ordering {
    match (a, b) {
        (Point::Finite(x), Point::Finite(y)) => x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)),
        (Point::Finite(_), Point::Infinity) => std::cmp::Ordering::Less,
        (Point::Infinity, Point::Finite(_)) => std::cmp::Ordering::Greater,
        (Point::Infinity, Point::Infinity) => std::cmp::Ordering::Equal,
    }
}

/// Status, smallest real gap, note and the `(real part, b1, b2)` of a tied pair.
type Judgement = (PointStatus, Option<f64>, String, Option<(f64, f64, f64)>);

fn judge_exponents(set: &ExponentSet, tol: &Tolerances) -> Judgement {
    let values = set.values();
    let spread = values
        .iter()
        .flat_map(|a| values.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let band = tol.real_part_tie_tol * spread.max(1.0);
    let mut min_gap: Option<f64> = None;
    let mut status = PointStatus::Separated;
    let mut note = String::from("distinct exponents have distinct real parts");
    let mut tie = None;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let gap = (a.re - b.re).abs();
            min_gap = Some(min_gap.map_or(gap, |g: f64| g.min(gap)));
            if gap > band {
                continue;
            }
            if (a.im - b.im).abs() > band {
                if status != PointStatus::EqualRealParts {
                    note = format!(
                        "exponents {} and {} share real part {}",
                        crate::poly::fmt_complex(*a),
                        crate::poly::fmt_complex(*b),
                        a.re
                    );
                    let (hi, lo) = if a.im > b.im { (a.im, b.im) } else { (b.im, a.im) };
                    tie = Some((0.5 * (a.re + b.re), hi, lo));
                }
                status = PointStatus::EqualRealParts;
            } else if status == PointStatus::Separated {
                status = PointStatus::Indeterminate;
                note = "exponent comparison inside the tolerance band".into();
            }
        }
    }
    (status, min_gap, note, tie)
}

/// Global non-oscillation verdict with per-point evidence.
pub fn decide(ode: &LinearODE, tol: &Tolerances) -> Result<NonOscillationVerdict> {
    tol.validate()?;
    let mut points = singular_points(ode, tol)?.points;
    points.sort_by(point_order);
    let mut evidence = Vec::with_capacity(points.len());
    for p in points {
        let classification = classify_point(ode, p, tol)?;
        if classification.kind == PointKind::Irregular {
            let note = match p {
                Point::Infinity => "irregular singular point at infinity".to_string(),
                Point::Finite(_) => format!("irregular singular point at {p}"),
            };
            evidence.push(PointEvidence {
                point: p,
                classification,
                exponents: None,
                min_real_gap: None,
                status: PointStatus::Irregular,
                note,
                witness: None,
            });
            continue;
        }
        let exponents = characteristic_exponents(ode, p, tol)?;
        let (status, min_gap, note, tie) = judge_exponents(&exponents, tol);
        let witness = tie.map(|(a, b1, b2)| OscillationWitness {
            real_part: a,
            b1,
            b2,
            local_zeros: witness_zeros(b1, b2, -3, -1).expect("b1 > b2"),
        });
        evidence.push(PointEvidence {
            point: p,
            classification,
            exponents: Some(exponents),
            min_real_gap: min_gap,
            status,
            note: format!("{note} at {p}"),
            witness,
        });
    }
    let verdict = if evidence
        .iter()
        .any(|e| matches!(e.status, PointStatus::Irregular | PointStatus::EqualRealParts))
    {
        Verdict::Oscillating
    } else if evidence.iter().any(|e| e.status == PointStatus::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::GloballyNonOscillating
    };
    let mut warnings = Vec::new();
    let fuchs_relation = if evidence.iter().all(|e| e.exponents.is_some()) {
        let k = ode.order() as f64;
        let d = evidence.len() as f64;
        let expected = (d - 2.0) * k * (k - 1.0) / 2.0;
        let actual: Complex = evidence
            .iter()
            .filter_map(|e| e.exponents.as_ref())
            .map(ExponentSet::sum)
            .sum();
        let consistent = (actual - Complex::new(expected, 0.0)).norm() <= 1e-6 * (1.0 + expected.abs());
        if !consistent {
            warnings.push(format!(
                "Fuchs relation mismatch: exponent sum {actual} vs expected {expected}"
            ));
        }
        Some(FuchsRelation {
            expected,
            actual,
            consistent,
        })
    } else {
        None
    };
    Ok(NonOscillationVerdict {
        verdict,
        points: evidence,
        fuchs_relation,
        warnings,
    })
}

/// Positive reals `exp((2n+1)π/(b1-b2))`, `n_lo <= n <= n_hi`, where the cosine factor of
/// the leading term vanishes.
pub fn witness_zeros(b1: f64, b2: f64, n_lo: i64, n_hi: i64) -> Result<Vec<Complex>> {
    if b1 == b2 {
        return Err(Error::DegenerateExponents(b1));
    }
    Ok((n_lo..=n_hi)
        .map(|n| Complex::new(((2 * n + 1) as f64 * PI / (b1 - b2)).exp(), 0.0))
        .collect())
}

/// `x^(a + i(b1+b2)/2) cos((b1-b2)/2 ln x)` on the principal branch.
pub fn witness_leading_term(a: f64, b1: f64, b2: f64, x: Complex) -> Complex {
    let log = x.ln();
    let power = (log * Complex::new(a, 0.5 * (b1 + b2))).exp();
    power * (log * (0.5 * (b1 - b2))).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::parse_ode;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn origin() -> Point {
        Point::Finite(c(0.0, 0.0))
    }

    #[test]
    fn classification_examples() {
        let tol = Tolerances::default();
        let euler = parse_ode("z^2*y'' + z*y' - y = 0").unwrap();
        let cls = classify_point(&euler, origin(), &tol).unwrap();
        assert_eq!(cls.kind, PointKind::RegularSingular);
        assert_eq!(cls.pole_orders, vec![1, 2]);

        let airy = parse_ode("y'' - z*y = 0").unwrap();
        let cls = classify_point(&airy, Point::Infinity, &tol).unwrap();
        assert_eq!(cls.kind, PointKind::Irregular);
        // y~'' + (2/w) y~' - w^-5 y~ = 0
        assert_eq!(cls.pole_orders, vec![1, 5]);

        let harmonic = parse_ode("y'' + y = 0").unwrap();
        assert_eq!(classify_point(&harmonic, origin(), &tol).unwrap().kind, PointKind::Ordinary);
    }

    #[test]
    fn indicial_examples() {
        let tol = Tolerances::default();
        let minus = parse_ode("z^2*y'' + z*y' - y = 0").unwrap();
        assert_eq!(indicial_polynomial(&minus, origin(), &tol).unwrap(), Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        let plus = parse_ode("z^2*y'' + z*y' + y = 0").unwrap();
        assert_eq!(indicial_polynomial(&plus, origin(), &tol).unwrap(), Polynomial::from_real(&[1.0, 0.0, 1.0]));
        let third = parse_ode("y^(3) + z*y = 0").unwrap();
        let ordinary = indicial_polynomial(&third, Point::Finite(c(1.0, 2.0)), &tol).unwrap();
        assert_eq!(ordinary, falling_factorial(3));
        let airy = parse_ode("y'' - z*y = 0").unwrap();
        assert!(matches!(
            indicial_polynomial(&airy, Point::Infinity, &tol),
            Err(Error::NotFuchsianAtPoint { .. })
        ));
    }

    #[test]
    fn exponent_examples() {
        let tol = Tolerances::default();
        let minus = parse_ode("z^2*y'' + z*y' - y = 0").unwrap();
        let set = characteristic_exponents(&minus, origin(), &tol).unwrap();
        assert_eq!(set.values().len(), 2);
        assert!((set.values()[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((set.values()[1] - c(1.0, 0.0)).norm() < 1e-12);

        let plus = parse_ode("z^2*y'' + z*y' + y = 0").unwrap();
        let set = characteristic_exponents(&plus, origin(), &tol).unwrap();
        let mut ims: Vec<f64> = set.values().iter().map(|v| v.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);

        // Hypergeometric with a = 0.25, b = 0.75, c = 0.4: exponents {0, 1-c} at 0.
        let hyper = parse_ode("z*(1-z)*y'' + (0.4 - 2*z)*y' - 0.1875*y = 0").unwrap();
        let set = characteristic_exponents(&hyper, origin(), &tol).unwrap();
        assert!((set.values()[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((set.values()[1] - c(0.6, 0.0)).norm() < 1e-12);
        let inf = characteristic_exponents(&hyper, Point::Infinity, &tol).unwrap();
        assert!((inf.values()[0] - c(0.25, 0.0)).norm() < 1e-12);
        assert!((inf.values()[1] - c(0.75, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn verdict_examples() {
        let tol = Tolerances::default();
        let gno = decide(&parse_ode("z^2*y'' + z*y' - y = 0").unwrap(), &tol).unwrap();
        assert_eq!(gno.verdict, Verdict::GloballyNonOscillating);
        assert_eq!(gno.points.len(), 2);
        assert!(gno.fuchs_relation.as_ref().unwrap().consistent);

        let osc = decide(&parse_ode("z^2*y'' + z*y' + y = 0").unwrap(), &tol).unwrap();
        assert_eq!(osc.verdict, Verdict::Oscillating);
        assert_eq!(osc.points[0].status, PointStatus::EqualRealParts);
        let witness = osc.points[0].witness.as_ref().unwrap();
        for &x in &witness.local_zeros {
            let value = witness_leading_term(witness.real_part, witness.b1, witness.b2, x);
            assert!(value.norm() <= 1e-9 * x.norm().powf(witness.real_part).max(1.0));
        }

        let airy = decide(&parse_ode("y'' - z*y = 0").unwrap(), &tol).unwrap();
        assert_eq!(airy.verdict, Verdict::Oscillating);
        assert_eq!(airy.points[0].note, "irregular singular point at infinity");
    }

    #[test]
    fn witness_zero_examples() {
        let zs = witness_zeros(1.0, -1.0, 0, 2).unwrap();
        let expected = [PI / 2.0, 3.0 * PI / 2.0, 5.0 * PI / 2.0];
        for (z, e) in zs.iter().zip(expected) {
            assert!((z.re.ln() - e).abs() < 1e-12);
            assert!(witness_leading_term(0.0, 1.0, -1.0, *z).norm() < 1e-9);
        }
        let zs = witness_zeros(2.0 * PI, 0.0, -1, 1).unwrap();
        assert!((zs[1].re / zs[0].re - std::f64::consts::E).abs() < 1e-12);
        assert!((zs[2].re / zs[1].re - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(witness_zeros(0.3, 0.1, 4, 4).unwrap().len(), 1);
        assert!(matches!(witness_zeros(1.0, 1.0, 0, 1), Err(Error::DegenerateExponents(_))));
    }
}
