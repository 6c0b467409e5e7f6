use crate::error::Result;
use crate::fuchs::{classify_point, PointKind};
use crate::poly::{Complex, Polynomial};
use crate::roots::{common_roots, poly_roots};
use crate::tolerances::Tolerances;

use super::{LinearODE, Point, SingularSet};

/// Remove every root shared by all coefficients.
pub fn normalize(ode: &LinearODE, tol: &Tolerances) -> Result<LinearODE> {
    let shared = common_roots(ode.coeffs(), tol)?;
    if shared.is_empty() {
        return Ok(ode.clone());
    }
    let coeffs = ode
        .coeffs()
        .iter()
        .map(|p| {
            shared
                .entries
                .iter()
                .fold(p.clone(), |q, root| q.deflate(root.location, root.multiplicity))
        })
        .collect();
    LinearODE::new(coeffs)
}

/// The equation satisfied by `y(1/w)`, with the common power of `w` divided out.
pub fn moebius_invert(ode: &LinearODE) -> LinearODE {
    let k = ode.order();
    // d/dz = -w^2 d/dw; ops[j][m] is the w-polynomial multiplying d^m/dw^m in d^j/dz^j.
    let minus_w2 = Polynomial::monomial(Complex::new(-1.0, 0.0), 2);
    let mut ops: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one()]];
    for j in 0..k {
        let prev = &ops[j];
        let mut next = vec![Polynomial::zero(); j + 2];
        for (m, c) in prev.iter().enumerate() {
            next[m] = &next[m] + &(&minus_w2 * &c.derivative());
            next[m + 1] = &next[m + 1] + &(&minus_w2 * c);
        }
        ops.push(next);
    }
    let pad = ode
        .coeffs()
        .iter()
        .filter_map(Polynomial::degree)
        .max()
        .unwrap_or(0);
    let mut out = vec![Polynomial::zero(); k + 1];
    for (j, p) in ode.coeffs().iter().enumerate() {
        let reversed = p.reversed_padded(pad);
        for (m, c) in ops[j].iter().enumerate() {
            out[m] = &out[m] + &(&reversed * c);
        }
    }
    let common = out
        .iter()
        .filter(|p| !p.is_zero())
        .map(Polynomial::valuation)
        .min()
        .unwrap_or(0);
    let out = out.iter().map(|p| p.shift_down(common)).collect();
    LinearODE::new(out).expect("leading coefficient survives inversion")
}

/// Distinct roots of the leading coefficient, plus infinity when it is not an ordinary point.
pub fn singular_points(ode: &LinearODE, tol: &Tolerances) -> Result<SingularSet> {
    let mut points: Vec<Point> = poly_roots(ode.leading(), tol)?
        .locations()
        .map(Point::Finite)
        .collect();
    if classify_point(ode, Point::Infinity, tol)?.kind != PointKind::Ordinary {
        points.push(Point::Infinity);
    }
    Ok(SingularSet { points })
}
