//! Exponential polynomials `Σ A_j(z) e^{λ_j z}`: evaluation, spectrum statistics,
//! closed-form zero bounds and the argument-principle zero counter.

mod bounds;
mod count;
mod sector;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::shortest_path_length;
use crate::poly::{fmt_complex, Complex, Polynomial};
use crate::roots::poly_roots;
use crate::tolerances::Tolerances;

pub use bounds::{ky_bound, strip_bound_simple, vallee_poussin_box_bound, LN_4};
pub use count::{count_zeros_rect, ZeroCount};
pub use sector::{sector_zero_bound, SectorBound, SectorParams};


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub lambda: Complex,
    pub amplitude: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct QuasiPolynomial {
    terms: Vec<Term>,
}

impl TryFrom<Vec<Term>> for QuasiPolynomial {
    type Error = Error;

    fn try_from(terms: Vec<Term>) -> Result<Self> {
        QuasiPolynomial::new(terms)
    }
}

impl From<QuasiPolynomial> for Vec<Term> {
    fn from(qp: QuasiPolynomial) -> Self {
        qp.terms
    }
}

/// Term values rescaled by a common positive factor `e^{-shift}`.
pub(crate) struct ScaledEval {
    pub value: Complex,
    pub derivative: Complex,
    /// Sum of the moduli of the rescaled terms.
    pub term_mass: f64,
}

impl QuasiPolynomial {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("quasi-polynomial needs at least one term".into()));
        }
        if terms.iter().any(|t| t.amplitude.is_zero()) {
            return Err(Error::InvalidInput("quasi-polynomial term with zero amplitude".into()));
        }
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i + 1..] {
                if a.lambda == b.lambda {
                    return Err(Error::InvalidInput(format!(
                        "repeated exponent {}",
                        fmt_complex(a.lambda)
                    )));
                }
            }
        }
        if terms
            .iter()
            .any(|t| !(t.lambda.re.is_finite() && t.lambda.im.is_finite()))
        {
            return Err(Error::InvalidInput("exponents must be finite".into()));
        }
        Ok(Self { terms })
    }

    /// `Σ a_j e^{λ_j z}` with constant amplitudes.
    pub fn simple(lambdas: &[Complex], amplitudes: &[Complex]) -> Result<Self> {
        if lambdas.len() != amplitudes.len() {
            return Err(Error::InvalidInput("one amplitude per exponent required".into()));
        }
        Self::new(
            lambdas
                .iter()
                .zip(amplitudes)
                .map(|(&lambda, &a)| Term {
                    lambda,
                    amplitude: Polynomial::constant(a),
                })
                .collect(),
        )
    }

    /// General solution of `Σ a_j y^(j) = 0` with the given weights on the basis
    /// `z^r e^{λ z}` (roots in canonical order, powers ascending).
    pub fn from_characteristic(
        eq_coeffs: &[Complex],
        basis_weights: &[Complex],
        tol: &Tolerances,
    ) -> Result<Self> {
        let characteristic = Polynomial::new(eq_coeffs.to_vec());
        let k = characteristic.degree().unwrap_or(0);
        if k == 0 {
            return Err(Error::InvalidInput("equation must have order at least 1".into()));
        }
        if basis_weights.len() != k {
            return Err(Error::InvalidInput(format!(
                "expected {k} basis weights, got {}",
                basis_weights.len()
            )));
        }
        let mut weights = basis_weights.iter();
        let mut terms = Vec::new();
        for root in poly_roots(&characteristic, tol)?.entries {
            let amplitude =
                Polynomial::new(weights.by_ref().take(root.multiplicity).copied().collect());
            if !amplitude.is_zero() {
                terms.push(Term {
                    lambda: root.location,
                    amplitude,
                });
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn lambdas(&self) -> Vec<Complex> {
        self.terms.iter().map(|t| t.lambda).collect()
    }

    /// Dimension `Σ (deg A_j + 1)`.
    pub fn dimension(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.amplitude.degree().unwrap_or(0) + 1)
            .sum()
    }

    pub fn is_simple(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude.degree() == Some(0))
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.terms
            .iter()
            .map(|t| t.amplitude.eval(z) * (t.lambda * z).exp())
            .sum()
    }

    /// `ln|A_j(z) e^{λ_j z}|` per term; `-∞` where the amplitude vanishes.
    pub fn term_logmods(&self, z: Complex) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| t.amplitude.eval(z).norm().ln() + (t.lambda * z).re)
            .collect()
    }

    pub(crate) fn eval_scaled(&self, z: Complex) -> ScaledEval {
        let shift = self
            .terms
            .iter()
            .map(|t| (t.lambda * z).re)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut value = Complex::new(0.0, 0.0);
        let mut derivative = Complex::new(0.0, 0.0);
        let mut term_mass = 0.0;
        for t in &self.terms {
            let e = (t.lambda * z - shift).exp();
            let (a, da) = t.amplitude.eval_with_derivative(z);
            value += a * e;
            derivative += (da + t.lambda * a) * e;
            term_mass += (a * e).norm();
        }
        ScaledEval {
            value,
            derivative,
            term_mass,
        }
    }

    /// Complex conjugate function `conj(f(conj z))`.
    pub fn conjugate(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    lambda: t.lambda.conj(),
                    amplitude: Polynomial::new(t.amplitude.coeffs().iter().map(|c| c.conj()).collect()),
                })
                .collect(),
        }
    }

    /// Spectrum statistics over the distinct exponents sorted by real part.
    pub fn spectrum_stats(&self, tol: &Tolerances) -> Result<SpectrumStats> {
        SpectrumStats::from_lambdas(&self.lambdas(), tol)
    }
}

/// Θ (max inverse consecutive real gap), Ξ (max consecutive |ΔIm/ΔRe|) and the
/// shortest path length L through the exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStats {
    pub theta: f64,
    pub xi: f64,
    pub path_length: f64,
    pub path_exact: bool,
    pub sorted_real_parts: Vec<f64>,
}

impl SpectrumStats {
    pub fn from_lambdas(lambdas: &[Complex], tol: &Tolerances) -> Result<Self> {
        let mut sorted = lambdas.to_vec();
        sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let spread = sorted
            .iter()
            .flat_map(|a| sorted.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        let band = tol.real_part_tie_tol * spread.max(1.0);
        let mut theta: f64 = 0.0;
        let mut xi: f64 = 0.0;
        for w in sorted.windows(2) {
            let d = w[1] - w[0];
            if d.re.abs() <= band {
                return Err(Error::EqualRealParts {
                    first: fmt_complex(w[0]),
                    second: fmt_complex(w[1]),
                });
            }
            theta = theta.max(1.0 / d.re.abs());
            xi = xi.max((d.im / d.re).abs());
        }
        let path = shortest_path_length(&sorted);
        Ok(Self {
            theta,
            xi,
            path_length: path.length,
            path_exact: path.exact,
            sorted_real_parts: sorted.iter().map(|l| l.re).collect(),
        })
    }
}

/// Axis-aligned box `[u_lo, u_hi] × [v_lo, v_hi]` in `z = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u_lo: f64,
    pub u_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Rect {
    pub fn new(u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Result<Self> {
        let r = Self { u_lo, u_hi, v_lo, v_hi };
        if [u_lo, u_hi, v_lo, v_hi].iter().all(|x| x.is_finite()) && u_lo <= u_hi && v_lo <= v_hi {
            Ok(r)
        } else {
            Err(Error::InvalidInput(format!("malformed box {r:?}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.u_hi - self.u_lo
    }

    pub fn height(&self) -> f64 {
        self.v_hi - self.v_lo
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn contains(&self, z: Complex, slack: f64) -> bool {
        z.re >= self.u_lo - slack
            && z.re <= self.u_hi + slack
            && z.im >= self.v_lo - slack
            && z.im <= self.v_hi + slack
    }

    pub fn inflated(&self, by: f64) -> Self {
        Self {
            u_lo: self.u_lo - by,
            u_hi: self.u_hi + by,
            v_lo: self.v_lo - by,
            v_hi: self.v_hi + by,
        }
    }

    /// Corners counter-clockwise from the lower left.
    pub fn corners(&self) -> [Complex; 4] {
        [
            Complex::new(self.u_lo, self.v_lo),
            Complex::new(self.u_hi, self.v_lo),
            Complex::new(self.u_hi, self.v_hi),
            Complex::new(self.u_lo, self.v_hi),
        ]
    }
}

/// `Π_α = {|Im z| <= α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub alpha: f64,
}

/// `Π_{α,β} = {|Im z| <= α, Re z <= β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiStrip {
    pub alpha: f64,
    pub beta: f64,
}
