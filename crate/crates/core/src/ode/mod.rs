//! Linear ODEs with polynomial coefficients.

mod parse;
mod transform;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{fmt_complex, Complex, Polynomial};

pub use parse::{parse_ode, parse_polynomial};
pub use transform::{moebius_invert, normalize, singular_points};

/// `Σ_j coeffs[j](z) y^(j) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OdeJson", into = "OdeJson")]
pub struct LinearODE {
    coeffs: Vec<Polynomial>,
}

#[derive(Serialize, Deserialize)]
struct OdeJson {
    coefficients: Vec<Polynomial>,
}

impl TryFrom<OdeJson> for LinearODE {
    type Error = Error;

    fn try_from(value: OdeJson) -> Result<Self> {
        LinearODE::new(value.coefficients)
    }
}

impl From<LinearODE> for OdeJson {
    fn from(ode: LinearODE) -> Self {
        OdeJson {
            coefficients: ode.coeffs,
        }
    }
}

impl LinearODE {
    /// Trailing zero coefficients are dropped; at least one derivative must remain.
    pub fn new(mut coeffs: Vec<Polynomial>) -> Result<Self> {
        while coeffs.last().is_some_and(Polynomial::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::OrderZero);
        }
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `y^(j)`.
    pub fn coeff(&self, j: usize) -> &Polynomial {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Polynomial {
        &self.coeffs[self.order()]
    }

    pub fn scaled(&self, c: Complex) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|p| p.scaled(c)).collect(),
        }
    }

    /// The equation satisfied by `y(a z + b)`.
    pub fn affine_pullback(&self, a: Complex, b: Complex) -> Self {
        // y_new(z) = y(az+b): y_new^(j)(z) = a^j y^(j)(az+b).
        let mut power = Complex::new(1.0, 0.0);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for p in &self.coeffs {
            coeffs.push(p.compose_affine(a, b).scaled(power.inv()));
            power *= a;
        }
        Self { coeffs }
    }

    /// Exact textual form; `parse_ode(&ode.to_canonical_string())` reproduces `ode`.
    pub fn to_canonical_string(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| format!("({})*{}", p.to_canonical_string(), derivative_symbol(j)))
            .collect();
        format!("{} = 0", terms.join(" + "))
    }
}

fn derivative_symbol(j: usize) -> String {
    match j {
        0 => "y".to_string(),
        1 => "y'".to_string(),
        2 => "y''".to_string(),
        _ => format!("y^({j})"),
    }
}

impl fmt::Display for LinearODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, p) in self.coeffs.iter().enumerate().rev() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *p == Polynomial::one() {
                write!(f, "{}", derivative_symbol(j))?;
            } else {
                write!(f, "({p})*{}", derivative_symbol(j))?;
            }
        }
        write!(f, " = 0")
    }
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(c) => write!(f, "{}", fmt_complex(*c)),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

/// Singular points of an equation on the Riemann sphere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SingularSet {
    pub points: Vec<Point>,
}

impl SingularSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_infinity(&self) -> bool {
        self.points.contains(&Point::Infinity)
    }
}
