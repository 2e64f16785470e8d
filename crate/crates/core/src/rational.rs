//! Exact rational arithmetic used for every coefficient summation.
//!
//! Values are kept in lowest terms with a positive denominator; conversion to
//! `f64` happens once, at the end, with round-to-nearest-even.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always reduced.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn pow(&self, exp: i32) -> Self {
        Self(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn recip(&self) -> Self {
        Self(self.0.recip())
    }

    /// Nearest `f64` (ties to even). Overflow saturates to ±inf.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Natural log of |self|, valid far outside the `f64` exponent range.
    pub fn ln_abs(&self) -> f64 {
        ln_big(self.numer()) - ln_big(self.denom())
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a fraction: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Self::new(n, d)
            }
            None => Ok(Self::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl MulAssign<&ExactRational> for ExactRational {
    fn mul_assign(&mut self, rhs: &ExactRational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// Numerator of the fixed rational stand-in for pi.
pub const PI_NUMERATOR: &str = "314159265358979323846";
/// Denominator of the fixed rational stand-in for pi (10^20).
pub const PI_DENOMINATOR: &str = "100000000000000000000";

static PI_RATIONAL: LazyLock<ExactRational> = LazyLock::new(|| {
    ExactRational::new(
        BigInt::from_str(PI_NUMERATOR).unwrap(),
        BigInt::from_str(PI_DENOMINATOR).unwrap(),
    )
    .unwrap()
});

/// The 21-digit rational approximation of pi used inside coefficient sums.
pub fn pi_rational() -> &'static ExactRational {
    &PI_RATIONAL
}

/// ln|x| for a big integer of any size; -inf for zero.
pub fn ln_big(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_keeps_denominator_positive() {
        let r = ExactRational::new(6, -4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert!(ExactRational::new(1, 0).is_err());
    }

    #[test]
    fn pi_constant_is_exact() {
        let pi = pi_rational();
        assert_eq!(pi.to_string(), "157079632679489661923/50000000000000000000");
        assert_eq!(pi.to_f64(), std::f64::consts::PI);
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["14/15", "-7/3", "5", "0"] {
            let r: ExactRational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("1/x".parse::<ExactRational>().is_err());
    }

    #[test]
    fn float_conversion_rounds_to_nearest() {
        // 1/3 has no exact binary representation; the nearest double is 1.0/3.0
        let third = ExactRational::new(1, 3).unwrap();
        assert_eq!(third.to_f64(), 1.0 / 3.0);
        let big =
            ExactRational::new(BigInt::from(10).pow(400) + 1, BigInt::from(10).pow(400)).unwrap();
        assert_eq!(big.to_f64(), 1.0);
    }

    #[test]
    fn ln_of_huge_values() {
        let x = BigInt::from(10).pow(2000);
        assert!((ln_big(&x) - 2000.0 * 10f64.ln()).abs() < 1e-9);
        let r = ExactRational::new(1, BigInt::from(10).pow(3000)).unwrap();
        assert!((r.ln_abs() + 3000.0 * 10f64.ln()).abs() < 1e-9);
    }
}
