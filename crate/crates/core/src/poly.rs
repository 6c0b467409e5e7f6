//! Dense univariate polynomials with complex coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

/// Dense polynomial, `coeffs[i]` multiplies `z^i`.
///
/// The leading stored coefficient is never exactly zero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Complex>", into = "Vec<Complex>")]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl From<Vec<Complex>> for Polynomial {
    fn from(coeffs: Vec<Complex>) -> Self {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn monomial(c: Complex, power: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    /// `∏ (z - r)` over the given roots.
    pub fn from_roots(roots: &[Complex]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            &acc * &Self::new(vec![-r, Complex::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    /// Largest coefficient modulus; zero for the zero polynomial.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let zero = Complex::new(0.0, 0.0);
        self.coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| {
            (p * z + c, dp * z + p)
        })
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scaled(&self, c: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Number of exactly vanishing low-order coefficients (multiplicity of the root at 0).
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| **c == Complex::new(0.0, 0.0))
            .count()
    }

    /// Divide by `z^n`, dropping the low coefficients.
    pub fn shift_down(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().skip(n).copied().collect())
    }

    /// Multiply by `z^n`.
    pub fn shift_up(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex::new(0.0, 0.0); n];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Coefficients of `q(x) = p(center + x)`.
    pub fn taylor_shift(&self, center: Complex) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = c[j + 1];
                c[j] += center * next;
            }
        }
        Self::new(c)
    }

    /// `p(a z + b)`.
    pub fn compose_affine(&self, a: Complex, b: Complex) -> Self {
        let shifted = self.taylor_shift(b);
        let mut power = Complex::new(1.0, 0.0);
        let coeffs = shifted
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * power;
                power *= a;
                out
            })
            .collect();
        Self::new(coeffs)
    }

    /// `w^n p(1/w)` for `n >= deg p`.
    pub fn reversed_padded(&self, n: usize) -> Self {
        let Some(d) = self.degree() else {
            return Self::zero();
        };
        assert!(n >= d, "padding {n} below degree {d}");
        let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[n - i] = c;
        }
        Self::new(coeffs)
    }

    /// Synthetic division by `(z - root)`; returns quotient and remainder.
    pub fn div_linear(&self, root: Complex) -> (Self, Complex) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Complex::new(0.0, 0.0));
        }
        let n = self.coeffs.len();
        let mut quotient = vec![Complex::new(0.0, 0.0); n - 1];
        let mut carry = Complex::new(0.0, 0.0);
        for i in (0..n).rev() {
            let value = self.coeffs[i] + carry * root;
            if i == 0 {
                return (Self::new(quotient), value);
            }
            quotient[i - 1] = value;
            carry = value;
        }
        unreachable!()
    }

    /// Divide by `(z - root)^mult`, discarding the (numerically tiny) remainders.
    pub fn deflate(&self, root: Complex, mult: usize) -> Self {
        (0..mult).fold(self.clone(), |p, _| p.div_linear(root).0)
    }

    /// Exact textual form that the ODE grammar parses back bit-for-bit.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex::new(0.0, 0.0))
            .map(|(i, c)| {
                let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                let coeff = format!("({:?}{}{:?}i)", c.re, sign, c.im.abs());
                match i {
                    0 => coeff,
                    1 => format!("{coeff}*z"),
                    _ => format!("{coeff}*z^{i}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub(crate) fn fmt_complex(c: Complex) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == Complex::new(0.0, 0.0) {
                continue;
            }
            let real = c.im == 0.0;
            let negative = real && c.re < 0.0;
            let shown = if negative { -c } else { c };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let is_one = shown == Complex::new(1.0, 0.0);
            let body = if real {
                fmt_complex(shown)
            } else {
                format!("({})", fmt_complex(shown))
            };
            match (i, is_one) {
                (0, _) => write!(f, "{body}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{body}*z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{body}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}
