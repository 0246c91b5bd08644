//! The symbolic ring the checks compute in before realization: rational
//! functions in x = L^(1/2) (the half Lefschetz class), extended by the
//! monodromic power classes <d>.
//!
//! Conventions, fixed once here and relied on everywhere:
//! - x realizes at level k to the quadratic Gauss sum g_k, so L = x^2
//!   realizes to q = p^k. Realizing x needs p = 1 mod 4; otherwise no
//!   square root of q is compatible with Adams operations across levels.
//! - The m-th Adams operation substitutes x -> -(-x)^m. Equivalently -x is
//!   the sigma-effective line: sigma^m((-x)^n) = (-x)^(mn).
//! - <d> is the class of the affine line weighted by t^d. <1> collapses to
//!   0 and <2> to x (their realizations at every level force this); only
//!   d >= 3 is stored. Products of two such classes leave the span and are
//!   rejected, as are Adams operations on them.

use crate::cyclo::{gauss_sum, power_character_sum, CyclotomicValue};
use crate::lambda::{AdamsSequence, LevelSeq, PlethCoeff};
use crate::rat::{qrat, QRat};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Dense univariate polynomial over Q, coefficients low-degree-first,
/// trailing zeros trimmed (zero is the empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<QRat>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn constant(c: QRat) -> Self {
        let mut p = QPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn one() -> Self {
        Self::constant(QRat::one())
    }

    pub fn x() -> Self {
        QPoly { coeffs: vec![QRat::zero(), QRat::one()] }
    }

    pub fn monomial(deg: usize, c: QRat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![QRat::zero(); deg + 1];
        coeffs[deg] = c;
        QPoly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<QRat>) -> Self {
        let mut p = QPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[QRat] {
        &self.coeffs
    }

    pub fn lead(&self) -> Option<&QRat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = vec![QRat::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            if let Some(a) = self.coeffs.get(i) {
                *slot += a;
            }
            if let Some(b) = other.coeffs.get(i) {
                *slot += b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        QPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![QRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, r: &QRat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lead_inv = d.lead().unwrap().recip();
        let mut rem = self.clone();
        let mut quo = vec![QRat::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let f = rem.lead().unwrap() * &lead_inv;
            let shift = rd - dd;
            quo[shift] = f.clone();
            for i in 0..=dd {
                let t = &d.coeffs[i] * &f;
                rem.coeffs[shift + i] -= t;
            }
            rem.trim();
        }
        (Self::from_coeffs(quo), rem)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        match a.lead() {
            Some(l) if !l.is_one() => {
                let inv = l.recip();
                a.scale(&inv)
            }
            _ => a,
        }
    }

    pub fn eval(&self, at: &QRat) -> QRat {
        let mut acc = QRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// p(x) = e(x^2) + x * o(x^2).
    pub fn even_odd_split(&self) -> (QPoly, QPoly) {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % 2 == 0 {
                even.push(c.clone());
            } else {
                odd.push(c.clone());
            }
        }
        (Self::from_coeffs(even), Self::from_coeffs(odd))
    }

    /// Substitute x -> -(-x)^m, the m-th Adams operation on the half
    /// Lefschetz variable: x^n -> (-1)^(n(m+1)) x^(mn).
    pub fn substitute_signed_power(&self, m: u32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let m = m as usize;
        let mut coeffs = vec![QRat::zero(); (self.coeffs.len() - 1) * m + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            if (n * (m + 1)) % 2 == 1 {
                coeffs[n * m] -= c;
            } else {
                coeffs[n * m] += c;
            }
        }
        Self::from_coeffs(coeffs)
    }
}

/// A reduced fraction of [`QPoly`]s: denominator monic and coprime to the
/// numerator, zero stored as 0/1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunc {
    num: QPoly,
    den: QPoly,
}

impl RationalFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalFunc { num, den: QPoly::one() });
        }
        let g = QPoly::gcd(&num, &den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let lead_inv = den.lead().unwrap().recip();
        Ok(RationalFunc { num: num.scale(&lead_inv), den: den.scale(&lead_inv) })
    }

    pub fn from_poly(p: QPoly) -> Self {
        RationalFunc { num: p, den: QPoly::one() }
    }

    pub fn constant(c: QRat) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(QPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(QPoly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(QPoly::x())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == QPoly::one() && self.den == QPoly::one()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("denominators stay nonzero")
    }

    pub fn neg(&self) -> Self {
        RationalFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("denominators stay nonzero")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::InvalidParameter("division by zero rational function".into()));
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, r: &QRat) -> Self {
        Self::new(self.num.scale(r), self.den.clone()).expect("denominator unchanged")
    }

    /// Integer powers, negative allowed for nonzero functions.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e >= 0 {
            self.clone()
        } else {
            Self::one().div(self)?
        };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn substitute_signed_power(&self, m: u32) -> Self {
        Self::new(self.num.substitute_signed_power(m), self.den.substitute_signed_power(m))
            .expect("substitution keeps denominators nonzero")
    }
}

/// An element of the Tate-monodromic ring: a rational function of x plus a
/// finite sum of rational-function multiples of the power classes <d>,
/// d >= 3.
#[derive(Debug, Clone, PartialEq)]
pub struct MotiveClass {
    tate: RationalFunc,
    mono: BTreeMap<u64, RationalFunc>,
}

impl MotiveClass {
    pub fn zero() -> Self {
        MotiveClass { tate: RationalFunc::zero(), mono: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_tate(RationalFunc::one())
    }

    pub fn from_tate(tate: RationalFunc) -> Self {
        MotiveClass { tate, mono: BTreeMap::new() }
    }

    pub fn from_rational(c: QRat) -> Self {
        Self::from_tate(RationalFunc::constant(c))
    }

    /// x, the half Lefschetz class (realizes to the Gauss sum).
    pub fn l_half() -> Self {
        Self::from_tate(RationalFunc::x())
    }

    /// L = x^2, the Lefschetz class (realizes to q).
    pub fn lefschetz() -> Self {
        Self::from_tate(RationalFunc::from_poly(QPoly::monomial(2, QRat::one())))
    }

    /// The power class <d>: the affine line weighted by d-th powers.
    /// <1> is 0 and <2> is x; d >= 3 is kept symbolic.
    pub fn mono_power(d: u64) -> Result<Self> {
        match d {
            0 => Err(Error::InvalidParameter("power class needs d >= 1".into())),
            1 => Ok(Self::zero()),
            2 => Ok(Self::l_half()),
            _ => {
                let mut mono = BTreeMap::new();
                mono.insert(d, RationalFunc::one());
                Ok(MotiveClass { tate: RationalFunc::zero(), mono })
            }
        }
    }

    pub fn tate(&self) -> &RationalFunc {
        &self.tate
    }

    pub fn mono(&self) -> &BTreeMap<u64, RationalFunc> {
        &self.mono
    }

    pub fn is_pure_tate(&self) -> bool {
        self.mono.is_empty()
    }

    fn prune(mut self) -> Self {
        self.mono.retain(|_, f| !f.is_zero());
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut mono = self.mono.clone();
        for (&d, f) in &other.mono {
            let slot = mono.entry(d).or_insert_with(RationalFunc::zero);
            *slot = slot.add(f);
        }
        MotiveClass { tate: self.tate.add(&other.tate), mono }.prune()
    }

    pub fn neg(&self) -> Self {
        MotiveClass {
            tate: self.tate.neg(),
            mono: self.mono.iter().map(|(&d, f)| (d, f.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &QRat) -> Self {
        MotiveClass {
            tate: self.tate.scale(r),
            mono: self.mono.iter().map(|(&d, f)| (d, f.scale(r))).collect(),
        }
        .prune()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.mono.is_empty() && !other.mono.is_empty() {
            return Err(Error::UnsupportedProduct);
        }
        let mut mono = BTreeMap::new();
        for (&d, f) in &self.mono {
            mono.insert(d, f.mul(&other.tate));
        }
        for (&d, f) in &other.mono {
            mono.insert(d, f.mul(&self.tate));
        }
        Ok(MotiveClass { tate: self.tate.mul(&other.tate), mono }.prune())
    }

    /// The m-th Adams operation: x -> -(-x)^m on the Tate part. Monodromic
    /// classes <d> do not stay in the span under Adams operations, so any
    /// present is an error.
    pub fn adams(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("Adams index must be >= 1".into()));
        }
        if !self.mono.is_empty() {
            return Err(Error::InvalidParameter(
                "Adams operations on monodromic classes <d>, d >= 3 are not supported".into(),
            ));
        }
        Ok(Self::from_tate(self.tate.substitute_signed_power(m)))
    }

    /// Values of this class at levels 1..=kmax over F_p.
    pub fn realize_levels(&self, p: u64, kmax: u32) -> Result<AdamsSequence> {
        LevelSeq::generate(kmax, |k| realize(self, p, k))
    }
}

/// Product in the Tate-monodromic ring.
pub fn motive_mul(a: &MotiveClass, b: &MotiveClass) -> Result<MotiveClass> {
    a.mul(b)
}

/// 1 - <d>, the standard twist appearing in monodromic partition functions.
pub fn translate_muhat(d: u64) -> Result<MotiveClass> {
    Ok(MotiveClass::one().sub(&MotiveClass::mono_power(d)?))
}

/// Level-k realization over F_p: x -> g_k, L -> q = p^k, <d> -> the power
/// character sum. A ring homomorphism into Q(zeta_p) wherever it is defined;
/// odd powers of x require p = 1 mod 4.
pub fn realize(a: &MotiveClass, p: u64, k: u32) -> Result<CyclotomicValue> {
    let mut total = realize_rf(&a.tate, p, k)?;
    for (&d, f) in &a.mono {
        let fv = realize_rf(f, p, k)?;
        let pcs = power_character_sum(d, p, k)?;
        total = total.add(&fv.mul(&pcs));
    }
    Ok(total)
}

fn realize_rf(f: &RationalFunc, p: u64, k: u32) -> Result<CyclotomicValue> {
    let q = qrat((p as i64).pow(k));
    let (ne, no) = f.num().even_odd_split();
    let (de, dd) = f.den().even_odd_split();
    let (a_e, a_o) = (ne.eval(&q), no.eval(&q));
    let (d_e, d_o) = (de.eval(&q), dd.eval(&q));
    if (!a_o.is_zero() || !d_o.is_zero()) && p % 4 != 1 {
        return Err(Error::Parity(p));
    }
    let g = gauss_sum(p, k)?;
    match g.as_rational() {
        Some(gr) => {
            // Even level: the Gauss sum is itself rational and plain
            // rational arithmetic is exact.
            let dv = &d_e + &d_o * &gr;
            if dv.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "denominator vanishes at p={p}, k={k}"
                )));
            }
            let nv = &a_e + &a_o * &gr;
            CyclotomicValue::from_rational(p, nv / dv)
        }
        None => {
            // g is irrational, so d_e + d_o g = 0 forces d_e = d_o = 0.
            let gsq = g.mul(&g).as_rational().expect("Gauss sum squares are rational");
            let norm = &d_e * &d_e - &d_o * &d_o * gsq;
            if norm.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "denominator vanishes at p={p}, k={k}"
                )));
            }
            // (a_e + a_o g)(d_e - d_o g) / (d_e^2 - d_o^2 g^2).
            let num_val = CyclotomicValue::from_rational(p, a_e)?.add(&g.scale(&a_o));
            let den_conj = CyclotomicValue::from_rational(p, d_e)?.sub(&g.scale(&d_o));
            Ok(num_val.mul(&den_conj).scale(&norm.recip()))
        }
    }
}

impl PlethCoeff for MotiveClass {
    fn zero_like(&self) -> Self {
        MotiveClass::zero()
    }
    fn one_like(&self) -> Self {
        MotiveClass::one()
    }
    fn is_zero(&self) -> bool {
        self.tate.is_zero() && self.mono.is_empty()
    }
    fn is_one(&self) -> bool {
        self.tate.is_one() && self.mono.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        MotiveClass::add(self, other)
    }
    fn neg(&self) -> Self {
        MotiveClass::neg(self)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        MotiveClass::mul(self, other)
    }
    fn scale(&self, r: &QRat) -> Self {
        MotiveClass::scale(self, r)
    }
    fn adams(&self, m: u32) -> Result<Self> {
        MotiveClass::adams(self, m)
    }
}
