//! Dense univariate polynomials over the integers, in the indeterminate `q`.
//!
//! Coefficients are arbitrary precision. The representation is canonical: the
//! highest stored coefficient is nonzero, and the zero polynomial has no
//! coefficients at all (its degree is `None`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division is not exact (nonzero remainder)")]
    NonZeroRemainder,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `c * q^e`
    pub fn monomial(c: impl Into<BigInt>, e: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    /// Builds a polynomial from coefficients indexed by exponent (index 0 is
    /// the constant term). Trailing zeros are trimmed.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^e`; zero beyond the degree.
    pub fn coeff(&self, e: usize) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn eval_at(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Multiplies by `q^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Exact division. Fails with [`PolyError::NonZeroRemainder`] unless
    /// `self = quotient * divisor` for some integer polynomial `quotient`.
    ///
    /// This is long division over the rationals, stopped at the first
    /// quotient coefficient that is not an integer: such a coefficient can
    /// never belong to an integral quotient.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let nd = self.degree().unwrap_or(0);
        if nd < dd {
            return Err(PolyError::NonZeroRemainder);
        }
        let lead = &divisor.coeffs[dd];
        // Only the nonzero lower terms of the divisor take part in the update,
        // which keeps division by sparse factors such as q^j - 1 linear.
        let lower: Vec<(usize, &BigInt)> = divisor.coeffs[..dd]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();

        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(PolyError::NonZeroRemainder);
            }
            for &(j, dj) in &lower {
                rem[k + j] -= &c * dj;
            }
            rem[k + dd] = BigInt::zero();
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(PolyError::NonZeroRemainder);
        }
        Ok(Self::from_coeffs(quot))
    }

    /// True when every coefficient is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// JSON object mapping exponent to coefficient, both as decimal strings,
    /// in descending exponent order. Zero coefficients are omitted.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if !c.is_zero() {
                map.insert(e.to_string(), Value::String(c.to_string()));
            }
        }
        Value::Object(map)
    }

    /// Inverse of [`IntPolynomial::to_json`].
    pub fn from_json(value: &Value) -> Option<Self> {
        let map = value.as_object()?;
        let mut terms = Vec::with_capacity(map.len());
        for (e, c) in map {
            let e: usize = e.parse().ok()?;
            let c: BigInt = c.as_str()?.parse().ok()?;
            terms.push((e, c));
        }
        let deg = terms.iter().map(|(e, _)| *e).max();
        let mut coeffs = vec![BigInt::zero(); deg.map_or(0, |d| d + 1)];
        for (e, c) in terms {
            coeffs[e] += c;
        }
        Some(Self::from_coeffs(coeffs))
    }
}

/// `|GL_n(q)| = prod_{i=0}^{n-1} (q^n - q^i)`.
pub fn gl_order_poly(n: usize) -> IntPolynomial {
    let qn = IntPolynomial::monomial(1, n);
    (0..n).fold(IntPolynomial::one(), |acc, i| {
        acc * (&qn - &IntPolynomial::monomial(1, i))
    })
}

impl fmt::Display for IntPolynomial {
    /// Descending exponents, e.g. `q^4 - q^3 - q^2 + q` or `2*q^598 + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, d) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += d;
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Add for IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: IntPolynomial) -> IntPolynomial {
        &self + &rhs
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        -&self
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Sub for IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: IntPolynomial) -> IntPolynomial {
        &self - &rhs
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: IntPolynomial) -> IntPolynomial {
        &self * &rhs
    }
}

impl std::iter::Sum for IntPolynomial {
    fn sum<I: Iterator<Item = IntPolynomial>>(iter: I) -> Self {
        iter.fold(IntPolynomial::zero(), |acc, p| &acc + &p)
    }
}
