//! Prime fields F_p and their extensions F_{p^k}.
//!
//! A [`FieldTower`] fixes a deterministic modulus for F_{p^k} (the monic
//! irreducible of degree k whose coefficient vector has the smallest base-p
//! index), so element indices mean the same thing across runs and platforms.
//! Elements are coefficient vectors in the power basis; the only maps out of
//! a tower that the rest of the crate needs are the trace to F_p and the
//! index encoding.
//!
//! Hot counting loops never touch [`ExtFieldElement`]; they run over u32
//! element indices through the [`Fq`] trait, either with precomputed tables
//! ([`TableField`], for q up to [`TABLE_FIELD_MAX_Q`]) or computing on the
//! fly ([`TowerField`]).

use crate::{Error, ExecCfg, Result};

/// Largest q for which [`TableField`] will materialize q-by-q tables.
pub const TABLE_FIELD_MAX_Q: u64 = 2048;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense polynomials over F_p, coefficients low-degree-first, trailing zeros
/// trimmed. Only used for modulus search; field elements use fixed-length
/// vectors instead.
mod fp_poly {
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn sub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, slot) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *slot = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    pub fn mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder mod a monic divisor.
    pub fn rem(p: u64, a: &[u64], f: &[u64]) -> Vec<u64> {
        debug_assert_eq!(*f.last().unwrap(), 1, "divisor must be monic");
        let mut r = a.to_vec();
        trim(&mut r);
        let d = f.len() - 1;
        while r.len() > d {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - d;
            if lead != 0 {
                for j in 0..d {
                    r[shift + j] = (r[shift + j] + lead * (p - f[j])) % p;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // Make b monic so `rem` applies.
            let lead_inv = scalar_inv(p, *b.last().unwrap());
            let monic: Vec<u64> = b.iter().map(|&c| c * lead_inv % p).collect();
            let r = rem(p, &a, &monic);
            a = monic;
            b = r;
        }
        a
    }

    pub fn powmod(p: u64, base: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
        let mut acc = vec![1];
        let mut sq = rem(p, base, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(p, &mul(p, &acc, &sq), f);
            }
            sq = rem(p, &mul(p, &sq, &sq), f);
            e >>= 1;
        }
        acc
    }

    fn scalar_inv(p: u64, c: u64) -> u64 {
        // p is prime and c != 0, so Fermat applies.
        let mut acc = 1u64;
        let mut sq = c % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq % p;
            }
            sq = sq * sq % p;
            e >>= 1;
        }
        acc
    }
}

/// The lowest-index monic irreducible of degree k over F_p.
///
/// Candidates x^k + c_{k-1}x^{k-1} + ... + c_0 are scanned in increasing
/// order of the index c_0 + c_1 p + ... + c_{k-1} p^{k-1}. Irreducibility is
/// the classical criterion: f divides x^(p^k) - x and shares no factor with
/// x^(p^j) - x for any proper divisor j of k.
pub fn find_irreducible(p: u64, k: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
    }
    if k == 1 {
        return Ok(vec![0, 1]);
    }
    let count = p.checked_pow(k as u32).ok_or_else(|| {
        Error::InvalidParameter(format!("p^k overflows u64 for p={p}, k={k}"))
    })?;
    let x = [0u64, 1];
    for idx in 0..count {
        let mut f: Vec<u64> = Vec::with_capacity(k + 1);
        let mut rest = idx;
        for _ in 0..k {
            f.push(rest % p);
            rest /= p;
        }
        f.push(1);
        // Build x^(p^j) mod f for j = 1..k by iterated p-th powers.
        let mut h = x.to_vec();
        let mut ok = true;
        for j in 1..=k {
            h = fp_poly::powmod(p, &h, p, &f);
            if j < k && k % j == 0 {
                let g = fp_poly::gcd(p, &fp_poly::sub(p, &h, &x), &f);
                if g.len() > 1 {
                    ok = false;
                    break;
                }
            }
        }
        if ok && fp_poly::sub(p, &h, &x).is_empty() {
            return Ok(f);
        }
    }
    unreachable!("an irreducible of every degree exists over F_p")
}

/// A concrete model of F_{p^k}: the prime, the degree, and the fixed modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTower {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
}

impl FieldTower {
    pub fn new(p: u64, k: usize) -> Result<Self> {
        let modulus = find_irreducible(p, k)?;
        Ok(FieldTower { p, k, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn deg(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    /// Modulus coefficients, low-degree-first, length k+1, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> ExtFieldElement<'_> {
        ExtFieldElement { tower: self, coeffs: vec![0; self.k] }
    }

    pub fn one(&self) -> ExtFieldElement<'_> {
        self.scalar(1)
    }

    /// The image of the integer c under Z -> F_p -> F_{p^k}.
    pub fn scalar(&self, c: u64) -> ExtFieldElement<'_> {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = c % self.p;
        ExtFieldElement { tower: self, coeffs }
    }

    /// The class of x, a generator of the power basis. Only distinct from a
    /// scalar when k >= 2 (for k = 1 the modulus is x, so x maps to 0).
    pub fn gen(&self) -> ExtFieldElement<'_> {
        self.element_from_index(if self.k >= 2 { self.p } else { 0 })
    }

    /// Decode an index in [0, q) as base-p digits c_0 + c_1 p + ...
    pub fn element_from_index(&self, index: u64) -> ExtFieldElement<'_> {
        debug_assert!(index < self.q());
        let mut coeffs = Vec::with_capacity(self.k);
        let mut rest = index;
        for _ in 0..self.k {
            coeffs.push(rest % self.p);
            rest /= self.p;
        }
        ExtFieldElement { tower: self, coeffs }
    }

    pub fn index_of(&self, e: &ExtFieldElement<'_>) -> u64 {
        debug_assert!(std::ptr::eq(self, e.tower) || *self == *e.tower);
        let mut idx = 0;
        for &c in e.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    /// All q elements in index order. Fails rather than silently starting an
    /// enumeration larger than the configured budget.
    pub fn enumerate(&self, cfg: &ExecCfg) -> Result<impl Iterator<Item = ExtFieldElement<'_>>> {
        cfg.check_budget(self.q() as u128)?;
        Ok((0..self.q()).map(|i| self.element_from_index(i)))
    }

    fn add_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    fn sub_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    fn neg_vec(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    fn mul_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, k) = (self.p, self.k);
        let mut buf = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                buf[i + j] = (buf[i + j] + x * y) % p;
            }
        }
        // Fold degrees >= k using x^k = -(modulus - x^k).
        for i in (k..2 * k - 1).rev() {
            let c = buf[i];
            if c != 0 {
                buf[i] = 0;
                for j in 0..k {
                    buf[i - k + j] = (buf[i - k + j] + c * (p - self.modulus[j])) % p;
                }
            }
        }
        buf.truncate(k);
        buf
    }

    fn pow_vec(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one().coeffs;
        let mut sq = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_vec(&acc, &sq);
            }
            sq = self.mul_vec(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    fn trace_vec(&self, a: &[u64]) -> u64 {
        let mut acc = a.to_vec();
        let mut frob = a.to_vec();
        for _ in 1..self.k {
            frob = self.pow_vec(&frob, self.p);
            acc = self.add_vec(&acc, &frob);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must land in F_p");
        acc[0]
    }
}

/// An element of a [`FieldTower`], as a length-k coefficient vector over F_p.
///
/// Binary operations assert both operands live in the same tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtFieldElement<'a> {
    tower: &'a FieldTower,
    coeffs: Vec<u64>,
}

impl<'a> ExtFieldElement<'a> {
    pub fn tower(&self) -> &'a FieldTower {
        self.tower
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn index(&self) -> u64 {
        self.tower.index_of(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_tower(&self, other: &Self) {
        assert!(
            std::ptr::eq(self.tower, other.tower) || self.tower == other.tower,
            "elements of different towers cannot be combined"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_tower(other);
        ExtFieldElement { tower: self.tower, coeffs: self.tower.add_vec(&self.coeffs, &other.coeffs) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_tower(other);
        ExtFieldElement { tower: self.tower, coeffs: self.tower.sub_vec(&self.coeffs, &other.coeffs) }
    }

    pub fn neg(&self) -> Self {
        ExtFieldElement { tower: self.tower, coeffs: self.tower.neg_vec(&self.coeffs) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_tower(other);
        ExtFieldElement { tower: self.tower, coeffs: self.tower.mul_vec(&self.coeffs, &other.coeffs) }
    }

    pub fn pow(&self, e: u64) -> Self {
        ExtFieldElement { tower: self.tower, coeffs: self.tower.pow_vec(&self.coeffs, e) }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "zero has no inverse");
        self.pow(self.tower.q() - 2)
    }

    pub fn frobenius(&self) -> Self {
        self.pow(self.tower.p)
    }

    /// Trace down to F_p, returned as a residue in [0, p).
    pub fn trace(&self) -> u64 {
        self.tower.trace_vec(&self.coeffs)
    }
}

/// Finite-field arithmetic on u32 element indices, the interface the counting
/// backends are generic over. Indices follow the base-p digit encoding of
/// [`FieldTower::element_from_index`]; in particular 0 and 1 are the field's
/// zero and one, and indices below p are exactly the prime field.
pub trait Fq: Sync {
    fn p(&self) -> u64;
    fn deg(&self) -> usize;
    fn q(&self) -> u64;
    fn add(&self, a: u32, b: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    /// Multiplicative inverse of a nonzero index.
    fn inv(&self, a: u32) -> u32;
    /// Trace to F_p as a residue in [0, p).
    fn trace(&self, a: u32) -> u32;

    fn scalar(&self, c: u64) -> u32 {
        (c % self.p()) as u32
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        let mut sq = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }
}

/// F_q with full q-by-q add and mul tables; the backend for every hot loop.
pub struct TableField {
    p: u64,
    k: usize,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u16>,
}

impl TableField {
    pub fn new(tower: &FieldTower) -> Result<Self> {
        let q64 = tower.q();
        if q64 > TABLE_FIELD_MAX_Q {
            return Err(Error::InvalidParameter(format!(
                "q = {q64} exceeds table-field cap {TABLE_FIELD_MAX_Q}"
            )));
        }
        let q = q64 as usize;
        let elems: Vec<Vec<u64>> =
            (0..q64).map(|i| tower.element_from_index(i).coeffs).collect();
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            for b in a..q {
                let s = tower.index_of(&ExtFieldElement {
                    tower,
                    coeffs: tower.add_vec(&elems[a], &elems[b]),
                }) as u16;
                add[a * q + b] = s;
                add[b * q + a] = s;
                let m = tower.index_of(&ExtFieldElement {
                    tower,
                    coeffs: tower.mul_vec(&elems[a], &elems[b]),
                }) as u16;
                mul[a * q + b] = m;
                mul[b * q + a] = m;
            }
        }
        let neg: Vec<u16> = (0..q64)
            .map(|i| tower.index_of(&tower.element_from_index(i).neg()) as u16)
            .collect();
        let mut inv = vec![0u16; q];
        for (a, slot) in inv.iter_mut().enumerate().skip(1) {
            let e = tower.element_from_index(a as u64);
            *slot = e.inv().index() as u16;
        }
        let trace: Vec<u16> =
            (0..q64).map(|i| tower.element_from_index(i).trace() as u16).collect();
        Ok(TableField { p: tower.p(), k: tower.deg(), q, add, mul, neg, inv, trace })
    }
}

impl Fq for TableField {
    fn p(&self) -> u64 {
        self.p
    }
    fn deg(&self) -> usize {
        self.k
    }
    fn q(&self) -> u64 {
        self.q as u64
    }
    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize] as u32
    }
    #[inline(always)]
    fn sub(&self, a: u32, b: u32) -> u32 {
        let nb = self.neg[b as usize] as usize;
        self.add[a as usize * self.q + nb] as u32
    }
    #[inline(always)]
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize] as u32
    }
    #[inline(always)]
    fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "zero has no inverse");
        self.inv[a as usize] as u32
    }
    #[inline(always)]
    fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize] as u32
    }
}

/// F_q computing through the tower on every call. Slow, but has no size cap;
/// used only on cold paths where q exceeds [`TABLE_FIELD_MAX_Q`].
pub struct TowerField {
    tower: FieldTower,
}

impl TowerField {
    pub fn new(tower: &FieldTower) -> Self {
        TowerField { tower: tower.clone() }
    }

    fn decode(&self, a: u32) -> Vec<u64> {
        self.tower.element_from_index(a as u64).coeffs
    }

    fn encode(&self, coeffs: Vec<u64>) -> u32 {
        self.tower.index_of(&ExtFieldElement { tower: &self.tower, coeffs }) as u32
    }
}

impl Fq for TowerField {
    fn p(&self) -> u64 {
        self.tower.p()
    }
    fn deg(&self) -> usize {
        self.tower.deg()
    }
    fn q(&self) -> u64 {
        self.tower.q()
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        let v = self.tower.add_vec(&self.decode(a), &self.decode(b));
        self.encode(v)
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        let v = self.tower.sub_vec(&self.decode(a), &self.decode(b));
        self.encode(v)
    }
    fn neg(&self, a: u32) -> u32 {
        let v = self.tower.neg_vec(&self.decode(a));
        self.encode(v)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        let v = self.tower.mul_vec(&self.decode(a), &self.decode(b));
        self.encode(v)
    }
    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        let v = self.tower.pow_vec(&self.decode(a), self.tower.q() - 2);
        self.encode(v)
    }
    fn trace(&self, a: u32) -> u32 {
        self.tower.trace_vec(&self.decode(a)) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_the_frozen_ones() {
        assert_eq!(find_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(5, 1).unwrap(), vec![0, 1]);
        // F_4: t^2 + t + 1 is the only irreducible quadratic over F_2.
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        // F_25: t^2 + 2 beats t^2 + t + 1 in index order (index 2 vs 6).
        assert_eq!(find_irreducible(5, 2).unwrap(), vec![2, 0, 1]);
        // F_169: -1 is a square mod 13 but -2 is not.
        assert_eq!(find_irreducible(13, 2).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn moduli_have_no_subfield_roots() {
        // Independent irreducibility check: no roots in F_{p^j} for any
        // j < k, found by exhaustive evaluation inside the degree-k tower
        // (every subfield sits inside it as the x^(p^j) = x fixed points).
        for (p, k) in [(2u64, 4usize), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let tower = FieldTower::new(p, k).unwrap();
            let f = tower.modulus().to_vec();
            for i in 0..tower.q() {
                let e = tower.element_from_index(i);
                let in_proper_subfield =
                    (1..k).any(|j| k % j == 0 && e.pow(p.pow(j as u32)) == e);
                if !in_proper_subfield {
                    continue;
                }
                let mut val = tower.zero();
                let mut x_pow = tower.one();
                for &c in &f {
                    val = val.add(&x_pow.mul(&tower.scalar(c)));
                    x_pow = x_pow.mul(&e);
                }
                assert!(!val.is_zero(), "modulus has a root in a subfield of F_{{{p}^{k}}}");
            }
        }
    }

    #[test]
    fn field_axioms_small_towers() {
        for (p, k) in [(2u64, 2usize), (3, 2), (5, 2), (2, 3)] {
            let t = FieldTower::new(p, k).unwrap();
            let q = t.q();
            for i in 0..q {
                let a = t.element_from_index(i);
                assert_eq!(a.index(), i, "index round trip");
                assert_eq!(a.add(&a.neg()), t.zero());
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv()), t.one());
                }
                for j in 0..q {
                    let b = t.element_from_index(j);
                    assert_eq!(a.add(&b), b.add(&a));
                    assert_eq!(a.mul(&b), b.mul(&a));
                }
            }
        }
    }

    #[test]
    fn frobenius_is_a_hom_fixing_exactly_the_prime_field() {
        for (p, k) in [(2u64, 2usize), (3, 2), (5, 2), (2, 4)] {
            let t = FieldTower::new(p, k).unwrap();
            let mut fixed = 0;
            for i in 0..t.q() {
                let a = t.element_from_index(i);
                if a.frobenius() == a {
                    fixed += 1;
                }
                for j in 0..t.q() {
                    let b = t.element_from_index(j);
                    assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
                    assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
                }
            }
            assert_eq!(fixed, p, "Frobenius must fix exactly F_p");
        }
    }

    #[test]
    fn power_map_q_is_identity() {
        // x^(p^k) = x on every tower with at most 625 elements.
        for (p, k) in [(2u64, 2), (2, 4), (2, 9), (3, 4), (5, 4), (23, 2), (601, 1)] {
            let t = FieldTower::new(p, k as usize).unwrap();
            if t.q() > 625 {
                continue;
            }
            for i in 0..t.q() {
                let a = t.element_from_index(i);
                assert_eq!(a.pow(t.q()), a);
            }
        }
    }

    #[test]
    fn trace_of_omega_in_f4_is_one() {
        let t = FieldTower::new(2, 2).unwrap();
        let omega = t.gen();
        assert_eq!(omega.trace(), 1);
        assert_eq!(t.zero().trace(), 0);
        assert_eq!(t.one().trace(), 0); // 1 + 1 = 0 in F_2
    }

    #[test]
    fn trace_matches_multiplication_matrix_trace() {
        // Independent oracle: Tr(a) equals the matrix trace of y -> a*y in
        // the power basis.
        for (p, k) in [(2u64, 2usize), (2, 3), (3, 2), (3, 3), (5, 2)] {
            let t = FieldTower::new(p, k).unwrap();
            for i in 0..t.q() {
                let a = t.element_from_index(i);
                let mut mat_trace = 0u64;
                for col in 0..k {
                    let mut basis = vec![0u64; k];
                    basis[col] = 1;
                    let b = ExtFieldElement { tower: &t, coeffs: basis };
                    mat_trace = (mat_trace + a.mul(&b).coeffs()[col]) % p;
                }
                assert_eq!(a.trace(), mat_trace);
            }
        }
    }

    #[test]
    fn trace_is_linear_and_balanced() {
        for (p, k) in [(2u64, 2usize), (3, 2), (2, 4), (5, 2)] {
            let t = FieldTower::new(p, k).unwrap();
            let mut hits = vec![0u64; p as usize];
            for i in 0..t.q() {
                let a = t.element_from_index(i);
                hits[a.trace() as usize] += 1;
                let b = t.element_from_index((i * 7 + 3) % t.q());
                assert_eq!(a.add(&b).trace(), (a.trace() + b.trace()) % p);
            }
            // Surjective with equal fibers of size q/p.
            assert!(hits.iter().all(|&h| h == t.q() / p));
        }
    }

    #[test]
    fn table_field_agrees_with_tower() {
        for (p, k) in [(2u64, 3usize), (5, 2), (7, 1)] {
            let t = FieldTower::new(p, k).unwrap();
            let tf = TableField::new(&t).unwrap();
            let slow = TowerField::new(&t);
            let q = t.q() as u32;
            for a in 0..q {
                assert_eq!(tf.neg(a), slow.neg(a));
                assert_eq!(tf.trace(a), slow.trace(a));
                if a != 0 {
                    assert_eq!(tf.inv(a), slow.inv(a));
                    assert_eq!(tf.mul(a, tf.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(tf.add(a, b), slow.add(a, b));
                    assert_eq!(tf.sub(a, b), slow.sub(a, b));
                    assert_eq!(tf.mul(a, b), slow.mul(a, b));
                }
            }
            assert_eq!(tf.pow(2 % q, 5), slow.pow(2 % q, 5));
        }
    }

    #[test]
    fn table_field_respects_cap() {
        let t = FieldTower::new(13, 4).unwrap();
        assert!(TableField::new(&t).is_err());
        // The tower path still works for the same field.
        let slow = TowerField::new(&t);
        assert_eq!(slow.q(), 28561);
        assert_eq!(slow.mul(slow.inv(123), 123), 1);
    }

    #[test]
    fn enumerate_is_budgeted_and_complete() {
        let t = FieldTower::new(3, 2).unwrap();
        let cfg = ExecCfg::default();
        let all: Vec<u64> = t.enumerate(&cfg).unwrap().map(|e| e.index()).collect();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
        let tight = ExecCfg { max_points: 8, threads: 1 };
        assert!(matches!(t.enumerate(&tight), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldTower::new(6, 2).is_err());
        assert!(FieldTower::new(5, 0).is_err());
        assert!(is_prime(2) && is_prime(13) && !is_prime(1) && !is_prime(91));
    }
}
