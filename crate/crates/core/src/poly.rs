//! Exact bivariate polynomials in the local parameters `x`, `y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exponent pair `(m, n)` of the monomial `x^m y^n`.
pub type Exponent = (u32, u32);

#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<Exponent, Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, m: u32, n: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((m, n), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Exponent> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, m: u32, n: u32) -> Rational {
        self.terms.get(&(m, n)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Order of vanishing at the origin.
    pub fn multiplicity(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(|&(m, n)| m + n)
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Homogeneous part of degree `d`.
    pub fn form(&self, d: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(m, n), _)| m + n == d)
                .map(|(&e, c)| (e, c.clone())),
        )
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(m, n)| m + n).max()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(m, _), _)| m > 0)
                .map(|(&(m, n), c)| ((m - 1, n), c * Rational::from_integer(BigInt::from(m)))),
        )
    }

    pub fn derivative_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, n), _)| n > 0)
                .map(|(&(m, n), c)| ((m, n - 1), c * Rational::from_integer(BigInt::from(n)))),
        )
    }

    pub fn swap_variables(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(m, n), c)| ((n, m), c.clone())))
    }

    /// Monomial substitution `x^m y^n -> x^(a m + b n) y^(c m + d n)`.
    pub fn substitute_monomial(&self, a: u32, b: u32, c: u32, d: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(&(m, n), k)| ((a * m + b * n, c * m + d * n), k.clone())),
        )
    }

    /// Divides every term by `x^i y^j`; fails if some term is not divisible.
    pub fn divide_monomial(&self, i: u32, j: u32) -> Option<Self> {
        let mut out = Self::zero();
        for (&(m, n), c) in &self.terms {
            if m < i || n < j {
                return None;
            }
            out.terms.insert((m - i, n - j), c.clone());
        }
        Some(out)
    }

    /// Largest `k` with `y^k` dividing the polynomial.
    pub fn y_adic_order(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, n)| n).min()
    }

    /// Largest `k` with `x^k` dividing the polynomial.
    pub fn x_adic_order(&self) -> Option<u32> {
        self.terms.keys().map(|&(m, _)| m).min()
    }

    /// `p(x, y + s)`.
    pub fn translate_y(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return self.clone();
        }
        let mut out = Self::zero();
        let max_n = self.terms.keys().map(|&(_, n)| n).max().unwrap_or(0) as usize;
        // powers of s and binomial rows, built once
        let mut s_pow = vec![Rational::one()];
        for i in 1..=max_n {
            let next = &s_pow[i - 1] * s;
            s_pow.push(next);
        }
        for (&(m, n), c) in &self.terms {
            let mut binom = BigInt::one();
            for k in 0..=n {
                // term c * C(n,k) * y^k * s^(n-k)
                let coeff = c * Rational::from_integer(binom.clone()) * &s_pow[(n - k) as usize];
                out.add_term((m, k), coeff);
                binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
            }
        }
        out
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&(m, n), c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), m as usize) * num_traits::pow(y.clone(), n as usize);
        }
        acc
    }

    /// Coefficients of `p(1, s)` indexed by the power of `s`, for a form.
    pub fn dehomogenize_at_x(&self) -> Vec<Rational> {
        let deg = self.terms.keys().map(|&(_, n)| n).max().unwrap_or(0) as usize;
        let mut v = vec![Rational::zero(); deg + 1];
        for (&(_, n), c) in &self.terms {
            v[n as usize] += c;
        }
        v
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: Self) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: Self) -> BivariatePolynomial {
        let mut out = BivariatePolynomial::zero();
        for (&(m1, n1), c1) in &self.terms {
            for (&(m2, n2), c2) in &rhs.terms {
                out.add_term((m1 + m2, n1 + n2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn neg(self) -> BivariatePolynomial {
        BivariatePolynomial::from_terms(self.terms.iter().map(|(&e, c)| (e, -c.clone())))
    }
}

impl Add for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// Canonical text form: terms by decreasing total degree, then decreasing
/// x-exponent; `*` between factors, `^` for powers.
impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.0 + k.1, k.0)));
        for (i, &&(m, n)) in keys.iter().enumerate() {
            let c = &self.terms[&(m, n)];
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            if !abs.is_one() || (m == 0 && n == 0) {
                factors.push(abs.to_string());
            }
            match m {
                0 => {}
                1 => factors.push("x".into()),
                _ => factors.push(format!("x^{m}")),
            }
            match n {
                0 => {}
                1 => factors.push("y".into()),
                _ => factors.push(format!("y^{n}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivariatePolynomial({self})")
    }
}

impl std::str::FromStr for BivariatePolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parses `(x^3 - y^2)^2 - x^5*y`, also with implicit products (`x^5y`, `2x`)
/// and rational literals (`3/2*x`, `x/2`).
pub fn parse(src: &str) -> Result<BivariatePolynomial> {
    let mut p = Parser { src, chars: src.char_indices().collect(), pos: 0 };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let column = self.pos + 1;
        let found = self
            .chars
            .get(self.pos)
            .map(|&(_, c)| format!(" {c:?}"))
            .unwrap_or_else(|| " end of input".into());
        Error::Parse {
            column,
            message: format!("{message}, found{found}"),
            source_line: self.src.to_string(),
            caret: format!("{}^", " ".repeat(self.pos)),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<BivariatePolynomial> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BivariatePolynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.power()?;
                    let c = match (d.len(), d.coeff(0, 0)) {
                        (1, c) if !c.is_zero() => c,
                        _ => {
                            self.pos = at;
                            return Err(self.error("division only by a nonzero constant"));
                        }
                    };
                    acc = &acc * &BivariatePolynomial::constant(c.recip());
                }
                // implicit multiplication: `2x`, `x^5y`, `x(y+1)`
                Some(c) if c == 'x' || c == 'y' || c == '(' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<BivariatePolynomial> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| {
                self.pos = at;
                self.error("exponent too large")
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<BivariatePolynomial> {
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(BivariatePolynomial::x())
            }
            Some('y') => {
                self.pos += 1;
                Ok(BivariatePolynomial::y())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(BivariatePolynomial::constant(Rational::from_integer(n)))
            }
            _ => Err(self.error("expected a number, x, y or '('")),
        }
    }
}
