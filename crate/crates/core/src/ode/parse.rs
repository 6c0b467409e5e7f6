//! Recursive-descent parser for the equation grammar.
//!
//! ```text
//! equation   := expr "=" expr        (the right side is usually "0")
//! expr       := ["+"|"-"] term (("+"|"-") term)*
//! term       := unary (("*"|"/") unary)*
//! unary      := "-" unary | power
//! power      := atom ["^" integer]
//! atom       := number | number "i" | "i" | "z" | "(" expr ")" | derivative
//! derivative := "y" "'"* | "y^(" integer ")"
//! ```
//!
//! The parsed form must be linear and homogeneous in `y`.

use crate::error::{Error, Result};
use crate::poly::{Complex, Polynomial};

use super::LinearODE;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Z,
    Deriv(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn error(&self, position: usize, expected: &[&str], message: impl Into<String>) -> Error {
        Error::Parse {
            position,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: message.into(),
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(c) = self.peek_char() else {
                out.push((start, Tok::End));
                return Ok(out);
            };
            let tok = match c {
                '+' => self.single(Tok::Plus),
                '-' | '−' => self.single(Tok::Minus),
                '*' | '·' => self.single(Tok::Star),
                '/' => self.single(Tok::Slash),
                '^' => self.single(Tok::Caret),
                '(' => self.single(Tok::LParen),
                ')' => self.single(Tok::RParen),
                '=' => self.single(Tok::Eq),
                'z' | 'x' => self.single(Tok::Z),
                'i' | 'I' => self.single(Tok::Imag(1.0)),
                'y' => self.derivative()?,
                c if c.is_ascii_digit() || c == '.' => self.number()?,
                other => {
                    return Err(self.error(
                        start,
                        &["number", "z", "y", "(", "operator"],
                        format!("unexpected character {other:?}"),
                    ))
                }
            };
            out.push((start, tok));
        }
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.pos += self.peek_char().map_or(0, char::len_utf8);
        tok
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp = end + 1;
            if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                exp += 1;
            }
            if exp < bytes.len() && bytes[exp].is_ascii_digit() {
                while exp < bytes.len() && bytes[exp].is_ascii_digit() {
                    exp += 1;
                }
                end = exp;
            }
        }
        let text = &self.src[start..end];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(start, &["number"], format!("malformed number {text:?}")))?;
        self.pos = end;
        if matches!(self.peek_char(), Some('i' | 'I')) {
            self.pos += 1;
            return Ok(Tok::Imag(value));
        }
        Ok(Tok::Num(value))
    }

    fn derivative(&mut self) -> Result<Tok> {
        self.pos += 1;
        let rest = &self.src[self.pos..];
        if rest.starts_with("^(") {
            let start = self.pos;
            self.pos += 2;
            let digits: String = self.src[self.pos..]
                .chars()
                .take_while(|c| c.is_ascii_digit())
                .collect();
            if digits.is_empty() {
                return Err(self.error(self.pos, &["integer"], "derivative order expected"));
            }
            self.pos += digits.len();
            if self.peek_char() != Some(')') {
                return Err(self.error(self.pos, &[")"], "unterminated derivative order"));
            }
            self.pos += 1;
            let order = digits
                .parse()
                .map_err(|_| self.error(start, &["integer"], "derivative order too large"))?;
            return Ok(Tok::Deriv(order));
        }
        let mut order = 0;
        while let Some(c) = self.peek_char() {
            match c {
                '\'' | '′' => order += 1,
                '″' => order += 2,
                '‴' => order += 3,
                _ => break,
            }
            self.pos += c.len_utf8();
        }
        Ok(Tok::Deriv(order))
    }
}

/// A partial parse: `constant + Σ_j lin[j] y^(j)`.
#[derive(Debug, Clone, Default)]
struct Form {
    constant: Polynomial,
    lin: Vec<Polynomial>,
}

impl Form {
    fn constant(p: Polynomial) -> Self {
        Self {
            constant: p,
            lin: Vec::new(),
        }
    }

    fn derivative(order: usize) -> Self {
        let mut lin = vec![Polynomial::zero(); order + 1];
        lin[order] = Polynomial::one();
        Self {
            constant: Polynomial::zero(),
            lin,
        }
    }

    fn has_y(&self) -> bool {
        self.lin.iter().any(|p| !p.is_zero())
    }

    fn add(mut self, rhs: Form, sign: f64) -> Form {
        let s = Complex::new(sign, 0.0);
        self.constant = &self.constant + &rhs.constant.scaled(s);
        if rhs.lin.len() > self.lin.len() {
            self.lin.resize(rhs.lin.len(), Polynomial::zero());
        }
        for (j, p) in rhs.lin.into_iter().enumerate() {
            self.lin[j] = &self.lin[j] + &p.scaled(s);
        }
        self
    }

    fn mul_poly(self, p: &Polynomial) -> Form {
        Form {
            constant: &self.constant * p,
            lin: self.lin.iter().map(|q| q * p).collect(),
        }
    }
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].1.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str], message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<Form> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            Tok::Minus => {
                self.bump();
                Form::default().add(self.term()?, -1.0)
            }
            _ => self.term()?,
        };
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term()?;
            acc = acc.add(rhs, sign);
        }
    }

    fn term(&mut self) -> Result<Form> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = multiply(acc, rhs).ok_or_else(|| Error::Parse {
                        position: pos,
                        expected: vec!["polynomial factor".into()],
                        message: "product of two y terms is not linear".into(),
                    })?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    let divisor = constant_value(&rhs).filter(|c| *c != Complex::new(0.0, 0.0));
                    let Some(divisor) = divisor else {
                        return Err(Error::Parse {
                            position: pos,
                            expected: vec!["nonzero constant".into()],
                            message: "only division by nonzero constants is supported".into(),
                        });
                    };
                    acc = acc.mul_poly(&Polynomial::constant(divisor.inv()));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Form> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Form::default().add(self.unary()?, -1.0));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Form> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = match self.bump() {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1024.0 => v as u32,
            _ => {
                self.at -= 1;
                return Err(self.error(&["non-negative integer"], "invalid exponent"));
            }
        };
        if base.has_y() {
            return Err(self.error(&["polynomial base"], "powers of y are not linear"));
        }
        Ok(Form::constant(base.constant.pow(exponent)))
    }

    fn atom(&mut self) -> Result<Form> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(Form::constant(Polynomial::constant(Complex::new(v, 0.0)))),
            Tok::Imag(v) => Ok(Form::constant(Polynomial::constant(Complex::new(0.0, v)))),
            Tok::Z => Ok(Form::constant(Polynomial::identity())),
            Tok::Deriv(order) => Ok(Form::derivative(order)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    self.at -= 1;
                    return Err(self.error(&[")"], "unbalanced parenthesis"));
                }
                Ok(inner)
            }
            _ => Err(Error::Parse {
                position: pos,
                expected: ["number", "i", "z", "y", "("].map(String::from).to_vec(),
                message: "expected an operand".into(),
            }),
        }
    }
}

fn constant_value(form: &Form) -> Option<Complex> {
    if form.has_y() || form.constant.degree().unwrap_or(0) > 0 {
        return None;
    }
    Some(form.constant.coeffs().first().copied().unwrap_or_default())
}

fn multiply(a: Form, b: Form) -> Option<Form> {
    match (a.has_y(), b.has_y()) {
        (true, true) => None,
        (false, _) => Some(b.mul_poly(&a.constant)),
        (true, false) => Some(a.mul_poly(&b.constant)),
    }
}

/// Parse an equation such as `z^2*y'' + z*y' - y = 0`.
pub fn parse_ode(text: &str) -> Result<LinearODE> {
    let tokens = Lexer { src: text, pos: 0 }.tokens()?;
    let mut parser = Parser { tokens, at: 0 };
    let lhs = parser.expr()?;
    if parser.bump() != Tok::Eq {
        parser.at -= 1;
        return Err(parser.error(&["=", "+", "-", "*"], "expected '=' after the left-hand side"));
    }
    let rhs = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["end of input"], "trailing input"));
    }
    let form = lhs.add(rhs, -1.0);
    if !form.has_y() {
        return Err(Error::OrderZero);
    }
    if !form.constant.is_zero() {
        return Err(Error::Parse {
            position: 0,
            expected: vec!["terms containing y".into()],
            message: format!("equation is inhomogeneous (free term {})", form.constant),
        });
    }
    LinearODE::new(form.lin)
}

/// Parse a bare polynomial expression in `z` (no `y`, no `=`).
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let tokens = Lexer { src: text, pos: 0 }.tokens()?;
    let mut parser = Parser { tokens, at: 0 };
    let form = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(&["end of input", "+", "-", "*"], "trailing input"));
    }
    if form.has_y() {
        return Err(Error::Parse {
            position: 0,
            expected: vec!["polynomial in z".into()],
            message: "y is not allowed here".into(),
        });
    }
    Ok(form.constant)
}
