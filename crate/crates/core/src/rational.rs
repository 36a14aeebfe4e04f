//! Exact rationals and their canonical text form `p/q`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::str::FromStr;

use crate::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `p/q` in lowest terms with positive denominator; integers print without `/1`.
pub fn format(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Integer power with possibly negative exponent. Fails on `0^k`, `k < 0`.
pub(crate) fn pow(x: &Rational, k: i64) -> Option<Rational> {
    if k >= 0 {
        Some(num_traits::pow(x.clone(), k as usize))
    } else if x.is_zero() {
        None
    } else {
        Some(num_traits::pow(x.recip(), k.unsigned_abs() as usize))
    }
}
