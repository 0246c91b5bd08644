//! Check reports: one row per verified cell, exact values on both sides,
//! and a machine-friendly serialization.
//!
//! Cyclotomic values serialize as `{"p": ..., "coeffs": ["a/b", ...],
//! "approx": ...}` with the coefficients in the power basis 1, z, ...,
//! z^(p-2); plain rationals serialize as `"a/b"` strings. Exactness is the
//! point: `approx` is advisory output only and never feeds back into any
//! comparison.

use crate::cyclo::CyclotomicValue;
use crate::rat::{fmt_qrat, qrat_to_f64, QRat};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

impl Serialize for CyclotomicValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CyclotomicValue", 3)?;
        s.serialize_field("p", &self.conductor())?;
        let coeffs: Vec<String> = self.coeffs().iter().map(fmt_qrat).collect();
        s.serialize_field("coeffs", &coeffs)?;
        s.serialize_field("approx", &self.approx_re())?;
        s.end()
    }
}

/// Either side of a verified identity.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactValue {
    Cyclotomic(CyclotomicValue),
    Rational(QRat),
}

impl ExactValue {
    /// Mathematical equality across representations: a cyclotomic value
    /// that happens to be rational equals the same plain rational.
    pub fn eq_math(&self, other: &ExactValue) -> bool {
        match (self, other) {
            (ExactValue::Cyclotomic(a), ExactValue::Cyclotomic(b)) => a == b,
            (ExactValue::Rational(a), ExactValue::Rational(b)) => a == b,
            (ExactValue::Cyclotomic(a), ExactValue::Rational(b))
            | (ExactValue::Rational(b), ExactValue::Cyclotomic(a)) => {
                a.as_rational().as_ref() == Some(b)
            }
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            ExactValue::Cyclotomic(c) => c.approx_re(),
            ExactValue::Rational(r) => qrat_to_f64(r),
        }
    }

    /// Whether `approx` loses nothing: the value is rational and fits an
    /// f64 without rounding.
    pub fn float_is_exact(&self) -> bool {
        match self {
            ExactValue::Cyclotomic(c) => {
                c.as_rational().map_or(false, |r| crate::rat::qrat_fits_f64(&r))
            }
            ExactValue::Rational(r) => crate::rat::qrat_fits_f64(r),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Cyclotomic(c) => write!(f, "{c}"),
            ExactValue::Rational(r) => write!(f, "{}", fmt_qrat(r)),
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExactValue::Cyclotomic(c) => c.serialize(serializer),
            ExactValue::Rational(r) => serializer.serialize_str(&fmt_qrat(r)),
        }
    }
}

impl From<CyclotomicValue> for ExactValue {
    fn from(c: CyclotomicValue) -> Self {
        ExactValue::Cyclotomic(c)
    }
}

impl From<QRat> for ExactValue {
    fn from(r: QRat) -> Self {
        ExactValue::Rational(r)
    }
}

/// One verified cell: an (n, k) slot with both routes' values.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: i64,
    pub k: u32,
    pub lhs: ExactValue,
    pub rhs: ExactValue,
    pub equal: bool,
    pub ms: u64,
}

impl Row {
    pub fn new(n: i64, k: u32, lhs: ExactValue, rhs: ExactValue) -> Row {
        let equal = lhs.eq_math(&rhs);
        Row { n, k, lhs, rhs, equal, ms: 0 }
    }
}

/// A full check run: parameters, per-cell rows, and the verdict.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    /// All rows equal (and at least one row was produced).
    pub pass: bool,
    /// Set when a budget stop truncated the grid: `pass` then refers to
    /// the rows that were actually computed.
    pub partial: bool,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            params: BTreeMap::new(),
            rows: Vec::new(),
            pass: false,
            partial: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Recompute the verdict from the rows.
    pub fn finish(&mut self) {
        self.pass = !self.rows.is_empty() && self.rows.iter().all(|r| r.equal);
    }
}

impl Serialize for CheckReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(5))?;
        m.serialize_entry("check", &self.check)?;
        m.serialize_entry("params", &self.params)?;
        m.serialize_entry("rows", &self.rows)?;
        m.serialize_entry("pass", &self.pass)?;
        m.serialize_entry("partial", &self.partial)?;
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::gauss_sum;
    use crate::rat::{qrat, qrat_frac};

    #[test]
    fn mixed_equality() {
        let g = gauss_sum(5, 2).unwrap(); // rational: -5
        let a = ExactValue::Cyclotomic(g);
        let b = ExactValue::Rational(qrat(-5));
        assert!(a.eq_math(&b));
        assert!(b.eq_math(&a));
        let c = ExactValue::Rational(qrat(5));
        assert!(!a.eq_math(&c));
        let g1 = ExactValue::Cyclotomic(gauss_sum(5, 1).unwrap());
        assert!(!g1.eq_math(&b));
        assert!(g1.eq_math(&g1.clone()));
    }

    #[test]
    fn report_verdicts() {
        let mut r = CheckReport::new("demo");
        r.param("p", 5).param("d", 2);
        r.finish();
        assert!(!r.pass, "no rows is not a pass");
        r.push(Row::new(1, 1, qrat(3).into(), qrat(3).into()));
        r.finish();
        assert!(r.pass);
        r.push(Row::new(2, 1, qrat(3).into(), qrat_frac(1, 3).into()));
        r.finish();
        assert!(!r.pass);
        assert!(!r.rows[1].equal);
        assert_eq!(r.rows[0].ms, 0);
    }

    #[test]
    fn display_forms() {
        assert_eq!(ExactValue::Rational(qrat_frac(44, 3)).to_string(), "44/3");
        let g = ExactValue::Cyclotomic(gauss_sum(5, 1).unwrap());
        assert_eq!(g.to_string(), "-1 - 2*z^2 - 2*z^3");
    }
}
