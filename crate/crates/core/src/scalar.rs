//! Scalar abstraction shared by every module.
//!
//! All algorithms are written against [`Scalar`]. Exactness (and therefore every
//! equality-based decision such as canonical forms, law checks and LP
//! optimality) is only guaranteed for [`BigRational`]; the `f64` instance exists
//! for quick numerical experiments on dyadic data.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `num / den` as a scalar. Panics on a zero denominator.
    fn ratio(num: i64, den: i64) -> Self;

    /// Parses `"p/q"` or an integer string.
    fn parse_scalar(text: &str) -> Option<Self>;

    /// Textual form accepted back by [`Scalar::parse_scalar`].
    fn to_text(&self) -> String;

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits scalar")
    }
}

impl Scalar for BigRational {
    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_scalar(text: &str) -> Option<Self> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn parse_scalar(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let d: f64 = d.trim().parse().ok()?;
                if d == 0.0 {
                    return None;
                }
                Some(n.trim().parse::<f64>().ok()? / d)
            }
            None => text.parse().ok(),
        }
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

/// `base^exp` by repeated squaring.
pub fn pow<T: Scalar>(base: &T, exp: usize) -> T {
    num_traits::pow(base.clone(), exp)
}

pub fn half<T: Scalar>() -> T {
    T::ratio(1, 2)
}

/// Sign as -1, 0 or 1.
pub fn sign<T: Scalar>(x: &T) -> T {
    if x.is_zero() {
        T::zero()
    } else {
        x.signum()
    }
}

pub fn is_one<T: Scalar>(x: &T) -> bool {
    *x == T::one()
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    num_integer::lcm(a, b)
}
