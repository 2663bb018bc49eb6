//! Exact scalars: rationals, optionally extended to `a + b√d` for a single
//! square-free radicand `d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LinError;

/// Largest prime used when splitting an integer into square and square-free parts.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 20;

/// An exact real number.
///
/// `Surd` always has `b != 0` and a square-free `d > 1`; anything else is
/// normalized to `Rational`, so structural equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Surd { a: BigRational, b: BigRational, d: u64 },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` in lowest terms. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `a + b√d`, normalized. `d` must be square-free.
    pub fn surd(a: BigRational, b: BigRational, d: u64) -> Result<Self, LinError> {
        if d == 0 {
            return Ok(Scalar::Rational(a));
        }
        if !is_square_free(d) {
            return Err(LinError::NotSquareFree(d));
        }
        Ok(Self::surd_unchecked(a, b, d))
    }

    fn surd_unchecked(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            Scalar::Rational(a)
        } else if d == 1 {
            Scalar::Rational(a + b)
        } else {
            Scalar::Surd { a, b, d }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(q) if q.is_one())
    }

    /// The radicand, if this value is irrational.
    pub fn radicand(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Surd { d, .. } => Some(*d),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Surd { .. } => None,
        }
    }

    /// The value as a machine integer, if it is one.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.to_integer().to_i64(),
            _ => None,
        }
    }

    fn parts(&self) -> (BigRational, BigRational, Option<u64>) {
        match self {
            Scalar::Rational(q) => (q.clone(), BigRational::zero(), None),
            Scalar::Surd { a, b, d } => (a.clone(), b.clone(), Some(*d)),
        }
    }

    fn common_radicand(&self, other: &Self) -> Result<Option<u64>, LinError> {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) if x != y => Err(LinError::RadicandMismatch(x, y)),
            (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
            (None, None) => Ok(None),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinError> {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, other) {
            return Ok(Scalar::Rational(x + y));
        }
        let d = self.common_radicand(other)?.unwrap_or(0);
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Ok(Self::surd_unchecked(a1 + a2, b1 + b2, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinError> {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, other) {
            return Ok(Scalar::Rational(x * y));
        }
        let d = self.common_radicand(other)?.unwrap_or(0);
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &a1 * &a2 + &b1 * &b2 * dd;
        let b = a1 * b2 + b1 * a2;
        Ok(Self::surd_unchecked(a, b, d))
    }

    /// Conjugate `a - b√d`.
    pub fn conj(&self) -> Self {
        match self {
            Scalar::Rational(_) => self.clone(),
            Scalar::Surd { a, b, d } => Scalar::Surd { a: a.clone(), b: -b.clone(), d: *d },
        }
    }

    /// Field norm `a² - d b²`, always rational.
    pub fn field_norm(&self) -> BigRational {
        match self {
            Scalar::Rational(q) => q * q,
            Scalar::Surd { a, b, d } => a * a - b * b * BigRational::from_integer(BigInt::from(*d)),
        }
    }

    pub fn inv(&self) -> Result<Self, LinError> {
        if self.is_zero() {
            return Err(LinError::DivisionByZero);
        }
        match self {
            Scalar::Rational(q) => Ok(Scalar::Rational(q.recip())),
            Scalar::Surd { .. } => {
                let n = Scalar::Rational(self.field_norm().recip());
                self.conj().checked_mul(&n)
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, LinError> {
        self.checked_mul(&other.inv()?)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Rational(q) => sign_of(q),
            Scalar::Surd { a, b, d } => {
                let sa = sign_of(a);
                let sb = sign_of(b);
                if sa == 0 || sa == sb {
                    return sb;
                }
                // Opposite signs: compare a² with d b².
                let lhs = a * a;
                let rhs = b * b * BigRational::from_integer(BigInt::from(*d));
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => 0,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    /// Square root of a non-negative rational, as a rational or `b√d`.
    pub fn sqrt_rational(q: &BigRational) -> Result<Self, LinError> {
        if q.is_negative() {
            return Err(LinError::NegativeRadicand);
        }
        // √(p/r) = √(p r) / r
        let p = q.numer();
        let r = q.denom();
        let (k, d) = split_square(&(p * r))?;
        let coeff = BigRational::new(k, r.clone());
        Ok(Self::surd_unchecked(BigRational::zero(), coeff, d))
    }

    /// Float approximation, for display only.
    pub fn approx(&self) -> f64 {
        let (a, b, d) = self.parts();
        let f = |q: &BigRational| q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN);
        f(&a) + f(&b) * (d.unwrap_or(0) as f64).sqrt()
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Trial-division square-free test; exact for all `u64`.
pub fn is_square_free(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Write a non-negative integer `n` as `k² d` with `d` square-free.
/// Returns `(k, d)` with `d == 1` when `n` is a perfect square.
pub fn split_square(n: &BigInt) -> Result<(BigInt, u64), LinError> {
    if n.is_zero() {
        return Ok((BigInt::zero(), 1));
    }
    let mut rest = n.abs();
    let mut k = BigInt::one();
    let mut d = 1u64;
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= &bp;
        }
        if e % 2 == 1 {
            d = d.checked_mul(p).ok_or(LinError::RadicandTooLarge)?;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok((k, d));
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        return Ok((k * root, d));
    }
    // No factor below the limit remains, so a remainder below limit² is prime.
    let limit = BigInt::from(TRIAL_DIVISION_LIMIT);
    if rest < &limit * &limit {
        let r = rest.to_u64().ok_or(LinError::RadicandTooLarge)?;
        d = d.checked_mul(r).ok_or(LinError::RadicandTooLarge)?;
        return Ok((k, d));
    }
    Err(LinError::RadicandTooLarge)
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Surd { a, b, d } => {
                if a.is_zero() {
                    write!(f, "{b}*sqrt({d})")
                } else if b.is_negative() {
                    write!(f, "{a}-{}*sqrt({d})", -b)
                } else {
                    write!(f, "{a}+{b}*sqrt({d})")
                }
            }
        }
    }
}

// Operator traits panic on a radicand mismatch; use the `checked_*` methods
// where operands may come from different computations.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x: &Scalar, y: &Scalar| x.checked_add(y).expect("scalar add"));
forward_binop!(Sub, sub, |x: &Scalar, y: &Scalar| x.checked_add(&-y).expect("scalar sub"));
forward_binop!(Mul, mul, |x: &Scalar, y: &Scalar| x.checked_mul(y).expect("scalar mul"));
forward_binop!(Div, div, |x: &Scalar, y: &Scalar| x.checked_div(y).expect("scalar div"));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Surd { a, b, d } => Scalar::Surd { a: -a, b: -b, d: *d },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn rationals_are_reduced() {
        assert_eq!(Scalar::ratio(2, -4), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::ratio(6, 3).to_i64(), Some(2));
    }

    #[test]
    fn zero_surd_part_collapses() {
        let s = Scalar::surd(q(3, 2), q(0, 1), 5).unwrap();
        assert_eq!(s, Scalar::ratio(3, 2));
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let r = Scalar::sqrt_rational(&q(2, 1)).unwrap();
        assert_eq!(r.radicand(), Some(2));
        assert_eq!(&r * &r, Scalar::int(2));
    }

    #[test]
    fn sqrt_of_fraction() {
        // √(9/8) = 3/(2√2) = (3/4)√2
        let r = Scalar::sqrt_rational(&q(9, 8)).unwrap();
        assert_eq!(r, Scalar::surd(q(0, 1), q(3, 4), 2).unwrap());
        assert_eq!(Scalar::sqrt_rational(&q(25, 4)).unwrap(), Scalar::ratio(5, 2));
    }

    #[test]
    fn inverse_of_surd() {
        let x = Scalar::surd(q(1, 1), q(1, 1), 2).unwrap();
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(y, Scalar::surd(q(-1, 1), q(1, 1), 2).unwrap());
    }

    #[test]
    fn sign_of_surds() {
        let s = |a, b| Scalar::surd(q(a, 1), q(b, 1), 2).unwrap();
        assert_eq!(s(1, 1).signum(), 1);
        assert_eq!(s(-2, 1).signum(), -1); // -2 + 1.414
        assert_eq!(s(2, -1).signum(), 1);
        assert_eq!(s(-1, 1).signum(), 1);
        assert_eq!(s(1, -1).signum(), -1);
    }

    #[test]
    fn mismatched_radicands_are_rejected() {
        let x = Scalar::sqrt_rational(&q(2, 1)).unwrap();
        let y = Scalar::sqrt_rational(&q(3, 1)).unwrap();
        assert!(matches!(x.checked_add(&y), Err(LinError::RadicandMismatch(2, 3))));
    }

    #[test]
    fn square_splitting() {
        assert_eq!(split_square(&BigInt::from(72)).unwrap(), (BigInt::from(6), 2));
        assert_eq!(split_square(&BigInt::from(49)).unwrap(), (BigInt::from(7), 1));
        assert!(is_square_free(30));
        assert!(!is_square_free(12));
    }
}
