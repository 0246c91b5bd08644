//! Shared exact-number aliases and small helpers on top of `num`.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type QInt = BigInt;
pub type QRat = BigRational;

pub fn qint(n: i64) -> QInt {
    QInt::from(n)
}

pub fn qrat(n: i64) -> QRat {
    QRat::from_integer(qint(n))
}

pub fn qrat_frac(num: i64, den: i64) -> QRat {
    QRat::new(qint(num), qint(den))
}

/// Parse "a" or "a/b" with optional sign, exact.
pub fn parse_qrat(s: &str) -> Result<QRat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<QInt> {
        t.trim().parse::<QInt>().map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(QRat::from_integer(parse_int(s)?)),
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(QRat::new(parse_int(a)?, den))
        }
    }
}

/// Render reduced, "a" for integers and "a/b" otherwise.
pub fn fmt_qrat(x: &QRat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn qrat_to_f64(x: &QRat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// True when the rational is exactly representable as an f64
/// (the f64 round-trips back to the same rational).
pub fn qrat_fits_f64(x: &QRat) -> bool {
    let approx = qrat_to_f64(x);
    if !approx.is_finite() {
        return false;
    }
    match QRat::from_float(approx) {
        Some(back) => &back == x,
        None => false,
    }
}

pub fn qint_pow(base: &QInt, exp: u32) -> QInt {
    base.pow(exp)
}

/// q^e for possibly negative e, as an exact rational.
pub fn qrat_pow(base: &QRat, exp: i64) -> QRat {
    if exp >= 0 {
        qrat_pow_u(base, exp as u32)
    } else {
        qrat_pow_u(base, (-exp) as u32).recip()
    }
}

fn qrat_pow_u(base: &QRat, exp: u32) -> QRat {
    let mut acc = QRat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn is_integer(x: &QRat) -> bool {
    x.denom().is_one()
}

pub fn abs(x: &QRat) -> QRat {
    x.abs()
}
