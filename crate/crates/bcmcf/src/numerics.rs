//! Exact rational arithmetic. All flow values, step lengths, and
//! reduced-cost comparisons in this crate are carried by [`Rat`], a
//! rational over arbitrary-precision integers. There are no epsilon
//! tolerances anywhere; every comparison is exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

use crate::{Error, Result};

/// Exact rational number in canonical form: positive denominator,
/// gcd(|num|, den) = 1. Backed by arbitrary-precision integers, so
/// overflow is impossible.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// Rational num/den in canonical form. Errors on a zero denominator.
pub fn rat_make<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Result<Rat> {
    let den = den.into();
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rat::new(num.into(), den))
}

/// True iff the value is an integer (denominator 1 in canonical form).
pub fn is_integral(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Serializes as "num/den", or plain "num" for integral values.
pub fn format_rat(r: &Rat) -> String {
    if is_integral(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "num/den" or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        BigInt::from_str(t.trim()).map_err(|_| Error::Invalid(format!("bad rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => rat_make(parse_int(n)?, parse_int(d)?),
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Fractional part in [0, 1): r - floor(r).
pub fn fract(r: &Rat) -> Rat {
    r - r.floor()
}

/// Sign of a rational as -1, 0, or +1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
