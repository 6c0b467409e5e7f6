//! Argument-principle zero counting on rectangles.
//!
//! The logarithmic derivative `f'/f` is integrated along each edge with adaptive trapezoid
//! halving. Every accepted segment is snapped to the branch of `arg f(b) - arg f(a)`
//! nearest to its quadrature estimate, so the snapped total is an exact multiple of 2π;
//! the raw quadrature total must land within 0.25 of the same integer.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Complex;
use crate::tolerances::Tolerances;

use super::{QuasiPolynomial, Rect};

const NUDGE_ATTEMPTS: usize = 3;
const MAX_DEPTH: u32 = 48;
const SEGMENT_TOL: f64 = 1e-2;
const EVALUATION_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    /// Zeros inside `rect`, with multiplicity.
    pub count: usize,
    /// The contour actually used (inflated if the requested one touched a zero).
    pub rect: Rect,
    pub nudges: usize,
    pub evaluations: usize,
}

/// Number of zeros of `qp` inside `rect`, counted with multiplicity.
pub fn count_zeros_rect(qp: &QuasiPolynomial, rect: &Rect, tol: &Tolerances) -> Result<ZeroCount> {
    if !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(Error::InvalidInput(format!("counting box must have positive area: {rect:?}")));
    }
    let base_nudge = 1e-6 * rect.width().max(rect.height()).max(1.0);
    let mut last_err = Error::BoundaryZero { attempts: 0 };
    for attempt in 0..=NUDGE_ATTEMPTS {
        let current = if attempt == 0 {
            *rect
        } else {
            rect.inflated(base_nudge * 10f64.powi(attempt as i32 - 1))
        };
        if !boundary_clear(qp, &current, tol) {
            last_err = Error::BoundaryZero { attempts: attempt };
            continue;
        }
        let mut counter = Counter {
            qp,
            tol,
            evaluations: 0,
        };
        match counter.winding(&current) {
            Ok(count) => {
                return Ok(ZeroCount {
                    count,
                    rect: current,
                    nudges: attempt,
                    evaluations: counter.evaluations,
                })
            }
            Err(e @ Error::NonIntegerWinding { .. }) | Err(e @ Error::BoundaryZero { .. }) => {
                last_err = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(match last_err {
        Error::BoundaryZero { .. } => Error::BoundaryZero {
            attempts: NUDGE_ATTEMPTS,
        },
        other => other,
    })
}

fn spectral_radius(qp: &QuasiPolynomial) -> f64 {
    qp.terms()
        .iter()
        .map(|t| t.lambda.norm())
        .fold(0.0, f64::max)
}

fn boundary_clear(qp: &QuasiPolynomial, rect: &Rect, tol: &Tolerances) -> bool {
    let corners = rect.corners();
    let rate = spectral_radius(qp) + 1.0;
    (0..4).all(|e| {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let samples = ((b - a).norm() * rate * 8.0).ceil().clamp(64.0, 20_000.0) as usize;
        (0..=samples).all(|s| {
            let z = a + (b - a) * (s as f64 / samples as f64);
            let ev = qp.eval_scaled(z);
            ev.value.norm() > tol.contour_min_modulus * ev.term_mass
        })
    })
}

struct Sample {
    z: Complex,
    value: Complex,
    log_derivative: Complex,
}

struct Counter<'a> {
    qp: &'a QuasiPolynomial,
    tol: &'a Tolerances,
    evaluations: usize,
}

impl Counter<'_> {
    fn sample(&mut self, z: Complex) -> Result<Sample> {
        self.evaluations += 1;
        if self.evaluations > EVALUATION_BUDGET {
            return Err(Error::NonIntegerWinding { estimate: f64::NAN });
        }
        let ev = self.qp.eval_scaled(z);
        if !(ev.value.norm() > self.tol.contour_min_modulus * ev.term_mass) {
            return Err(Error::BoundaryZero { attempts: 0 });
        }
        Ok(Sample {
            z,
            value: ev.value,
            log_derivative: ev.derivative / ev.value,
        })
    }

    fn winding(&mut self, rect: &Rect) -> Result<usize> {
        let corners = rect.corners();
        let rate = spectral_radius(self.qp) + 1.0;
        let mut snapped = 0.0;
        let mut raw = 0.0;
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let pieces = ((b - a).norm() * rate * 2.0).ceil().max(8.0) as usize;
            let mut left = self.sample(a)?;
            for p in 1..=pieces {
                let z = if p == pieces {
                    b
                } else {
                    a + (b - a) * (p as f64 / pieces as f64)
                };
                let right = self.sample(z)?;
                let (s, r) = self.segment(&left, &right, 0)?;
                snapped += s;
                raw += r;
                left = right;
            }
        }
        let turns = snapped / TAU;
        let count = turns.round();
        let estimate = raw / TAU;
        if (estimate - count).abs() >= 0.25 || count < 0.0 {
            return Err(Error::NonIntegerWinding { estimate });
        }
        Ok(count as usize)
    }

    /// Returns (snapped argument increment, raw quadrature increment).
    fn segment(&mut self, a: &Sample, b: &Sample, depth: u32) -> Result<(f64, f64)> {
        let mid = self.sample(0.5 * (a.z + b.z))?;
        let h = b.z - a.z;
        let coarse = 0.5 * (a.log_derivative + b.log_derivative) * h;
        let fine = 0.25 * (a.log_derivative + 2.0 * mid.log_derivative + b.log_derivative) * h;
        let settled = (coarse - fine).norm() <= SEGMENT_TOL && fine.im.abs() <= 0.5 * PI;
        if !settled {
            if depth >= MAX_DEPTH {
                return Err(Error::NonIntegerWinding {
                    estimate: fine.im / TAU,
                });
            }
            let (s1, r1) = self.segment(a, &mid, depth + 1)?;
            let (s2, r2) = self.segment(&mid, b, depth + 1)?;
            return Ok((s1 + s2, r1 + r2));
        }
        let principal = (b.value * a.value.conj()).arg();
        let snapped = principal + TAU * ((fine.im - principal) / TAU).round();
        Ok((snapped, fine.im))
    }
}
