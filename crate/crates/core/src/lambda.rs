//! The lambda-ring machinery: Adams operations, sigma (symmetric-power)
//! operations, and the plethystic exponential and logarithm on truncated
//! power series.
//!
//! Everything is generic over the coefficient through [`PlethCoeff`], so the
//! same EXP/LOG code runs over three very different rings:
//! - level sequences of cyclotomic values (point counts twisted by psi_k),
//!   where the m-th Adams operation is index dilation k -> mk;
//! - level sequences of rationals (plain point counts), same dilation;
//! - symbolic motive classes, where Adams is a substitution.
//!
//! A level sequence stores the values at levels 1..=L. Binary operations
//! truncate to the shorter operand, which is exactly how far the result is
//! known; asking past the stored range is a [`crate::Error::LevelOverflow`],
//! never an extrapolation. The constants are the one exception: a sequence
//! that is identically 0 (resp. 1) over a nonempty range is treated as the
//! exact constant, so structural zeros and ones inside EXP do not eat the
//! lengths of real data.

use crate::cyclo::CyclotomicValue;
use crate::rat::{qrat_frac, QRat};
use crate::{Error, Result};
use num_traits::{One, Zero};

/// Slot-level arithmetic for level sequences.
pub trait LevelScalar: Clone + std::fmt::Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, r: &QRat) -> Self;
}

impl LevelScalar for QRat {
    fn zero_like(&self) -> Self {
        QRat::zero()
    }
    fn one_like(&self) -> Self {
        QRat::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, r: &QRat) -> Self {
        self * r
    }
}

impl LevelScalar for CyclotomicValue {
    fn zero_like(&self) -> Self {
        CyclotomicValue::zero(self.conductor()).expect("conductor already validated")
    }
    fn one_like(&self) -> Self {
        CyclotomicValue::one(self.conductor()).expect("conductor already validated")
    }
    fn is_zero(&self) -> bool {
        CyclotomicValue::is_zero(self)
    }
    fn is_one(&self) -> bool {
        self.as_rational().map(|r| One::is_one(&r)).unwrap_or(false)
    }
    fn add(&self, other: &Self) -> Self {
        CyclotomicValue::add(self, other)
    }
    fn neg(&self) -> Self {
        CyclotomicValue::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        CyclotomicValue::mul(self, other)
    }
    fn scale(&self, r: &QRat) -> Self {
        CyclotomicValue::scale(self, r)
    }
}

/// Values of one quantity at finite-field levels k = 1..=len.
///
/// `vals[i]` is the value at level i+1. The m-th Adams operation is the
/// dilation that keeps every m-th entry, which is why lengths shrink to
/// floor(len/m): that is all the data determines.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSeq<T> {
    vals: Vec<T>,
}

pub type AdamsSequence = LevelSeq<CyclotomicValue>;
pub type RationalLevels = LevelSeq<QRat>;

impl<T: LevelScalar> LevelSeq<T> {
    pub fn new(vals: Vec<T>) -> Self {
        LevelSeq { vals }
    }

    /// Values at levels 1..=levels from a generator.
    pub fn generate(levels: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<Self> {
        let vals = (1..=levels).map(&mut f).collect::<Result<Vec<T>>>()?;
        Ok(LevelSeq { vals })
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn vals(&self) -> &[T] {
        &self.vals
    }

    pub fn at_level(&self, k: u32) -> Result<&T> {
        if k == 0 {
            return Err(Error::InvalidParameter("levels are 1-based".into()));
        }
        self.vals.get(k as usize - 1).ok_or(Error::LevelOverflow {
            needed: k as usize,
            available: self.vals.len(),
        })
    }
}

/// Arithmetic interface the plethystic machinery needs from a coefficient.
pub trait PlethCoeff: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn scale(&self, r: &QRat) -> Self;
    /// The m-th Adams operation, m >= 1.
    fn adams(&self, m: u32) -> Result<Self>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<T: LevelScalar> PlethCoeff for LevelSeq<T> {
    fn zero_like(&self) -> Self {
        LevelSeq { vals: self.vals.iter().map(|v| v.zero_like()).collect() }
    }

    fn one_like(&self) -> Self {
        LevelSeq { vals: self.vals.iter().map(|v| v.one_like()).collect() }
    }

    fn is_zero(&self) -> bool {
        !self.vals.is_empty() && self.vals.iter().all(|v| v.is_zero())
    }

    fn is_one(&self) -> bool {
        !self.vals.is_empty() && self.vals.iter().all(|v| v.is_one())
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let vals = self.vals.iter().zip(&other.vals).map(|(a, b)| a.add(b)).collect();
        LevelSeq { vals }
    }

    fn neg(&self) -> Self {
        LevelSeq { vals: self.vals.iter().map(|v| v.neg()).collect() }
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_zero() {
            let longer = if self.len() >= other.len() { self } else { other };
            return Ok(longer.zero_like());
        }
        let vals = self.vals.iter().zip(&other.vals).map(|(a, b)| a.mul(b)).collect();
        Ok(LevelSeq { vals })
    }

    fn scale(&self, r: &QRat) -> Self {
        LevelSeq { vals: self.vals.iter().map(|v| v.scale(r)).collect() }
    }

    fn adams(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("Adams index must be >= 1".into()));
        }
        let m = m as usize;
        let vals = (1..=self.vals.len() / m).map(|i| self.vals[i * m - 1].clone()).collect();
        Ok(LevelSeq { vals })
    }
}

/// Free-function form of the Adams operation.
pub fn adams<C: PlethCoeff>(c: &C, m: u32) -> Result<C> {
    c.adams(m)
}

/// sigma^0(c), ..., sigma^n(c) via the Newton-style recurrence
/// i * sigma^i = sum_{m=1}^{i} psi_m(c) * sigma^(i-m)(c).
pub fn sigma_list<C: PlethCoeff>(c: &C, n: usize) -> Result<Vec<C>> {
    let mut out = vec![c.one_like()];
    let mut psi: Vec<C> = Vec::with_capacity(n);
    for i in 1..=n {
        psi.push(c.adams(i as u32)?);
        let mut acc = psi[0].mul(&out[i - 1])?;
        for m in 2..=i {
            acc = acc.add(&psi[m - 1].mul(&out[i - m])?);
        }
        out.push(acc.scale(&qrat_frac(1, i as i64)));
    }
    Ok(out)
}

/// The n-th symmetric power operation applied to c.
pub fn sigma_n<C: PlethCoeff>(c: &C, n: usize) -> Result<C> {
    Ok(sigma_list(c, n)?.swap_remove(n))
}

/// A power series in T truncated at degree `coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: PlethCoeff> TruncatedSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("series needs at least the constant term".into()));
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&C> {
        self.coeffs.get(n).ok_or(Error::LevelOverflow { needed: n, available: self.order() })
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// The constant-one series shaped like `template`, truncated at `order`.
    pub fn one_from(template: &C, order: usize) -> Self {
        let mut coeffs = vec![template.zero_like(); order + 1];
        coeffs[0] = template.one_like();
        TruncatedSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        TruncatedSeries { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc: Option<C> = None;
            for i in 0..=n {
                if self.coeffs[i].is_zero() || other.coeffs[n - i].is_zero() {
                    continue;
                }
                let term = self.coeffs[i].mul(&other.coeffs[n - i])?;
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            coeffs.push(acc.unwrap_or_else(|| self.coeffs[0].zero_like()));
        }
        Ok(TruncatedSeries { coeffs })
    }
}

/// Plethystic exponential: EXP(sum_j S_j T^j) = prod_j sum_i sigma^i(S_j) T^(ij).
/// Requires a vanishing constant term.
pub fn pleth_exp<C: PlethCoeff>(s: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    if !s.coeffs[0].is_zero() {
        return Err(Error::ConstantTerm("plethystic EXP needs constant term 0"));
    }
    let order = s.order();
    let mut acc = TruncatedSeries::one_from(&s.coeffs[0], order);
    for j in 1..=order {
        if s.coeffs[j].is_zero() {
            continue;
        }
        let sigmas = sigma_list(&s.coeffs[j], order / j)?;
        let mut fac = vec![s.coeffs[j].zero_like(); order + 1];
        for (i, sig) in sigmas.into_iter().enumerate() {
            fac[i * j] = sig;
        }
        acc = acc.mul(&TruncatedSeries { coeffs: fac })?;
    }
    Ok(acc)
}

/// Plethystic logarithm, the inverse of [`pleth_exp`]: peels one degree at a
/// time using EXP(S_(<n))_n = (EXP S)_n - S_n. Requires constant term 1.
pub fn pleth_log<C: PlethCoeff>(z: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    if !z.coeffs[0].is_one() {
        return Err(Error::ConstantTerm("plethystic LOG needs constant term 1"));
    }
    let order = z.order();
    let mut s: Vec<C> = z.coeffs.iter().map(|c| c.zero_like()).collect();
    for n in 1..=order {
        let partial = TruncatedSeries { coeffs: s.clone() };
        let e = pleth_exp(&partial)?;
        s[n] = z.coeffs[n].sub(e.coeff(n)?);
    }
    TruncatedSeries::new(s)
}
