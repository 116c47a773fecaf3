//! Exact arithmetic in the field Q(sqrt 3) and truncated power series over it.
//!
//! All series reversion and expansion-coefficient work is done here without
//! floating point, so downstream comparisons against rational targets such as
//! 23/324 are exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A number of the form `rat + irr * sqrt(3)` with rational `rat`, `irr`.
#[derive(Clone, PartialEq, Eq)]
pub struct Sqrt3Rational {
    pub rat: BigRational,
    pub irr: BigRational,
}

impl Sqrt3Rational {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        Self { rat, irr }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The rational `p/q`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(big_ratio(p, q), BigRational::zero())
    }

    /// The pure multiple `p/q * sqrt(3)`.
    pub fn sqrt3_ratio(p: i64, q: i64) -> Self {
        Self::new(BigRational::zero(), big_ratio(p, q))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn inverse(&self) -> Self {
        // (p + q sqrt3)^-1 = (p - q sqrt3) / (p^2 - 3 q^2)
        let three = BigRational::from_integer(BigInt::from(3));
        let norm = &self.rat * &self.rat - three * &self.irr * &self.irr;
        assert!(!norm.is_zero(), "division by zero in Q(sqrt 3)");
        Self::new(&self.rat / &norm, -&self.irr / &norm)
    }

    pub fn to_f64(&self) -> f64 {
        let sqrt3 = 3.0_f64.sqrt();
        rational_to_f64(&self.rat) + sqrt3 * rational_to_f64(&self.irr)
    }
}

fn big_ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // Convert numer/denom separately; exact for the magnitudes we use.
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

impl fmt::Debug for Sqrt3Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Sqrt3Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            write!(f, "{}", self.rat)
        } else if self.rat.is_zero() {
            write!(f, "{}*sqrt(3)", self.irr)
        } else if self.irr.is_negative() {
            write!(f, "{} - {}*sqrt(3)", self.rat, -&self.irr)
        } else {
            write!(f, "{} + {}*sqrt(3)", self.rat, self.irr)
        }
    }
}

impl Add for &Sqrt3Rational {
    type Output = Sqrt3Rational;
    fn add(self, rhs: &Sqrt3Rational) -> Sqrt3Rational {
        Sqrt3Rational::new(&self.rat + &rhs.rat, &self.irr + &rhs.irr)
    }
}

impl Sub for &Sqrt3Rational {
    type Output = Sqrt3Rational;
    fn sub(self, rhs: &Sqrt3Rational) -> Sqrt3Rational {
        Sqrt3Rational::new(&self.rat - &rhs.rat, &self.irr - &rhs.irr)
    }
}

impl Mul for &Sqrt3Rational {
    type Output = Sqrt3Rational;
    fn mul(self, rhs: &Sqrt3Rational) -> Sqrt3Rational {
        let three = BigRational::from_integer(BigInt::from(3));
        Sqrt3Rational::new(
            &self.rat * &rhs.rat + three * &self.irr * &rhs.irr,
            &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        )
    }
}

impl Div for &Sqrt3Rational {
    type Output = Sqrt3Rational;
    fn div(self, rhs: &Sqrt3Rational) -> Sqrt3Rational {
        self * &rhs.inverse()
    }
}

impl Neg for &Sqrt3Rational {
    type Output = Sqrt3Rational;
    fn neg(self) -> Sqrt3Rational {
        Sqrt3Rational::new(-&self.rat, -&self.irr)
    }
}

/// A power series truncated at a fixed order, with coefficients in Q(sqrt 3).
///
/// `coeffs[k]` is the coefficient of `x^k`; every series carries exactly
/// `order + 1` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    pub coeffs: Vec<Sqrt3Rational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Sqrt3Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Sqrt3Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The identity series `x`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Sqrt3Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// cos(x) truncated: sum (-1)^k x^(2k) / (2k)!.
    pub fn cos(order: usize) -> Self {
        let mut s = Self::zero(order);
        let mut fact = BigRational::one();
        for k in 0..=order {
            if k > 0 {
                fact *= BigRational::from_integer(BigInt::from(k as i64));
            }
            if k % 2 == 0 {
                let sign = if k % 4 == 0 { 1 } else { -1 };
                s.coeffs[k] = Sqrt3Rational::new(
                    BigRational::from_integer(BigInt::from(sign)) / &fact,
                    BigRational::zero(),
                );
            }
        }
        s
    }

    /// sin(x) truncated: sum (-1)^k x^(2k+1) / (2k+1)!.
    pub fn sin(order: usize) -> Self {
        let mut s = Self::zero(order);
        let mut fact = BigRational::one();
        for k in 0..=order {
            if k > 0 {
                fact *= BigRational::from_integer(BigInt::from(k as i64));
            }
            if k % 2 == 1 {
                let sign = if k % 4 == 1 { 1 } else { -1 };
                s.coeffs[k] = Sqrt3Rational::new(
                    BigRational::from_integer(BigInt::from(sign)) / &fact,
                    BigRational::zero(),
                );
            }
        }
        s
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.order(), rhs.order());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.order(), rhs.order());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Sqrt3Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.order(), rhs.order());
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &self.coeffs[i] * &rhs.coeffs[j];
                out.coeffs[i + j] = &out.coeffs[i + j] + &prod;
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Self {
        let n = self.order();
        assert!(!self.coeffs[0].is_zero(), "reciprocal of series with zero constant term");
        let inv0 = self.coeffs[0].inverse();
        let mut out = Self::zero(n);
        out.coeffs[0] = inv0.clone();
        for k in 1..=n {
            // coefficient of x^k in self * out must vanish
            let mut acc = Sqrt3Rational::zero();
            for j in 0..k {
                let term = &self.coeffs[k - j] * &out.coeffs[j];
                acc = &acc + &term;
            }
            out.coeffs[k] = &(-&acc) * &inv0;
        }
        out
    }

    /// Composition self(inner); `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(self.order(), inner.order());
        assert!(inner.coeffs[0].is_zero(), "composition requires inner(0) = 0");
        let n = self.order();
        // Horner evaluation over truncated series.
        let mut out = Self::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            out = out.mul(inner);
            out.coeffs[0] = &out.coeffs[0] + &self.coeffs[k];
        }
        out
    }

    /// Integer power.
    pub fn powi(&self, mut e: usize) -> Self {
        let n = self.order();
        let mut base = self.clone();
        let mut out = Self::constant(Sqrt3Rational::one(), n);
        while e > 0 {
            if e % 2 == 1 {
                out = out.mul(&base);
            }
            e /= 2;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Divide the series by `x^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        for j in 0..k {
            assert!(self.coeffs[j].is_zero(), "shift_down would drop a nonzero coefficient");
        }
        let n = self.order();
        let mut out = Self::zero(n);
        for j in k..=n {
            out.coeffs[j - k] = self.coeffs[j].clone();
        }
        out
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64();
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_roundtrip() {
        let a = Sqrt3Rational::new(big_ratio(2, 3), big_ratio(-1, 5));
        let b = &a * &a.inverse();
        assert_eq!(b, Sqrt3Rational::one());
    }

    #[test]
    fn sin_cos_pythagoras() {
        let n = 10;
        let s = PowerSeries::sin(n);
        let c = PowerSeries::cos(n);
        let sum = s.mul(&s).add(&c.mul(&c));
        assert_eq!(sum, PowerSeries::constant(Sqrt3Rational::one(), n));
    }

    #[test]
    fn reciprocal_inverts() {
        let n = 8;
        let c = PowerSeries::cos(n);
        let prod = c.mul(&c.reciprocal());
        assert_eq!(prod, PowerSeries::constant(Sqrt3Rational::one(), n));
    }

    #[test]
    fn compose_sin_with_negation() {
        // sin(-x) = -sin(x)
        let n = 9;
        let s = PowerSeries::sin(n);
        let neg_x = PowerSeries::identity(n).scale(&Sqrt3Rational::from_integer(-1));
        let left = s.compose(&neg_x);
        let right = s.scale(&Sqrt3Rational::from_integer(-1));
        assert_eq!(left, right);
    }
}
