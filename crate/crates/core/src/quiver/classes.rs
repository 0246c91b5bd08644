//! Conjugacy classes of Mat_n(F_q) in rational-canonical terms: a class is
//! a multiset of (monic irreducible, partition) pairs with total degree n.
//!
//! For each class we carry a block-companion representative, the exact
//! centralizer orders in GL_n and in Mat_n (the latter as a dimension:
//! the commutant is a linear space of size q^dim_z), and the class size.
//! dim_z is computed by row reduction of the commutator operator
//! X -> CX - XC; the closed-form value from the partition data is kept as
//! an independent cross-check in the tests.

use crate::ffield::Fq;
use crate::quiver::linalg;
use crate::quiver::gl_order;
use crate::rat::QInt;
use crate::Result;
use num_traits::Zero;

/// Monic irreducible polynomials of exact degree d over F_q, coefficients
/// low-first (length d + 1, leading entry 1), sorted by coefficient vector.
///
/// Degrees 2 and 3 use a value sieve: a monic polynomial of degree <= 3 is
/// irreducible iff it has no root, so for each choice of the upper
/// coefficients we mark every constant term that creates a root and keep
/// the rest. Higher degrees fall back to the x^(q^j) criterion.
pub fn irreducible_polys<F: Fq>(f: &F, d: usize) -> Vec<Vec<u32>> {
    let q = f.q();
    assert!(d >= 1);
    let mut out: Vec<Vec<u32>> = Vec::new();
    match d {
        1 => {
            for a in 0..q as u32 {
                out.push(vec![f.neg(a), 1]);
            }
        }
        2 => {
            for b in 0..q as u32 {
                let mut attained = vec![false; q as usize];
                for v in 0..q as u32 {
                    let val = f.neg(f.add(f.mul(v, v), f.mul(b, v)));
                    attained[val as usize] = true;
                }
                for c in 0..q as u32 {
                    if !attained[c as usize] {
                        out.push(vec![c, b, 1]);
                    }
                }
            }
        }
        3 => {
            for b in 0..q as u32 {
                for c in 0..q as u32 {
                    let mut attained = vec![false; q as usize];
                    for v in 0..q as u32 {
                        let v2 = f.mul(v, v);
                        let val =
                            f.neg(f.add(f.mul(v, v2), f.add(f.mul(b, v2), f.mul(c, v))));
                        attained[val as usize] = true;
                    }
                    for c0 in 0..q as u32 {
                        if !attained[c0 as usize] {
                            out.push(vec![c0, c, b, 1]);
                        }
                    }
                }
            }
        }
        _ => {
            let total = (q as u128).pow(d as u32);
            let mut idx: u128 = 0;
            while idx < total {
                let mut coeffs = vec![0u32; d + 1];
                let mut rest = idx;
                for c in coeffs.iter_mut().take(d) {
                    *c = (rest % q as u128) as u32;
                    rest /= q as u128;
                }
                coeffs[d] = 1;
                if is_irreducible(f, &coeffs) {
                    out.push(coeffs);
                }
                idx += 1;
            }
        }
    }
    out.sort();
    out
}

/// x^(q^j) test: monic f of degree d is irreducible iff x^(q^d) = x mod f
/// and gcd(x^(q^(d/r)) - x, f) = 1 for every prime r dividing d.
fn is_irreducible<F: Fq>(f: &F, poly: &[u32]) -> bool {
    let d = poly.len() - 1;
    let q = f.q();
    let x = vec![0u32, 1];
    let mut h = poly_rem(f, &x, poly);
    let mut powers = Vec::with_capacity(d);
    for _ in 0..d {
        h = poly_powmod(f, &h, q, poly);
        powers.push(h.clone());
    }
    if powers[d - 1] != poly_rem(f, &x, poly) {
        return false;
    }
    let mut primes = Vec::new();
    let mut m = d;
    let mut r = 2;
    while r * r <= m {
        if m % r == 0 {
            primes.push(r);
            while m % r == 0 {
                m /= r;
            }
        }
        r += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let diff = poly_sub(f, &powers[d / r - 1], &x);
        if poly_gcd(f, &diff, poly).len() > 1 {
            return false;
        }
    }
    true
}

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn poly_mul<F: Fq>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    poly_trim(out)
}

fn poly_sub<F: Fq>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(x, y);
    }
    poly_trim(out)
}

/// Remainder of a modulo m, m monic. The top coefficient cancels exactly on
/// every pass, so the trimmed length strictly decreases.
fn poly_rem<F: Fq>(f: &F, a: &[u32], m: &[u32]) -> Vec<u32> {
    debug_assert_eq!(*m.last().unwrap(), 1);
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            let t = f.mul(lead, mi);
            r[shift + i] = f.sub(r[shift + i], t);
        }
        r = poly_trim(r);
    }
    r
}

fn poly_powmod<F: Fq>(f: &F, base: &[u32], e: u64, m: &[u32]) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = poly_rem(f, base, m);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

fn poly_gcd<F: Fq>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut x = poly_trim(a.to_vec());
    let mut y = poly_trim(b.to_vec());
    while !y.is_empty() {
        // make y monic so poly_rem applies
        let inv = f.inv(*y.last().unwrap());
        let monic: Vec<u32> = y.iter().map(|&c| f.mul(c, inv)).collect();
        let r = poly_rem(f, &x, &monic);
        x = monic;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let inv = f.inv(lead);
        x = x.iter().map(|&c| f.mul(c, inv)).collect();
    }
    x
}

fn poly_pow<F: Fq>(f: &F, a: &[u32], e: usize) -> Vec<u32> {
    let mut acc = vec![1u32];
    for _ in 0..e {
        acc = poly_mul(f, &acc, a);
    }
    acc
}

/// Partitions of m as weakly decreasing part lists, m >= 0.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(m)).rev() {
            prefix.push(part);
            rec(m - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m.max(1), &mut Vec::new(), &mut out);
    out
}

pub fn conjugate_partition(lambda: &[usize]) -> Vec<usize> {
    let Some(&first) = lambda.first() else { return vec![] };
    (1..=first).map(|j| lambda.iter().filter(|&&p| p >= j).count()).collect()
}

/// Centralizer order in GL of a single primary block: partition lambda over
/// the degree-d extension, Q = q^d. Exact integer value of
/// Q^(sum of squared conjugate parts) * prod_j prod_{l<=m_j} (1 - Q^(-l)).
fn centralizer_factor(q_ext: &QInt, lambda: &[usize]) -> QInt {
    let conj = conjugate_partition(lambda);
    let s2: usize = conj.iter().map(|c| c * c).sum();
    let max_part = lambda.first().copied().unwrap_or(0);
    let mut mult_exp = 0usize;
    let mut prod = QInt::from(1);
    for j in 1..=max_part {
        let m_j = lambda.iter().filter(|&&p| p == j).count();
        mult_exp += m_j * (m_j + 1) / 2;
        for l in 1..=m_j {
            prod *= q_ext.pow(l as u32) - 1;
        }
    }
    debug_assert!(s2 >= mult_exp);
    q_ext.pow((s2 - mult_exp) as u32) * prod
}

#[derive(Debug, Clone)]
pub struct ConjClass {
    pub n: usize,
    /// Distinct (monic irreducible, partition) pairs; sum of
    /// deg * |partition| equals n.
    pub factors: Vec<(Vec<u32>, Vec<usize>)>,
    /// Block-companion representative, flat n x n row-major.
    pub rep: Vec<u32>,
    /// Dimension of the full matrix commutant {X : CX = XC}.
    pub dim_z: usize,
    pub centralizer_order: QInt,
    pub size: QInt,
}

/// The commutator operator X -> CX - XC as an n^2 x n^2 matrix: row (i,j),
/// column (k,l), entry C_ik [j=l] - C_lj [i=k].
pub(crate) fn ad_matrix<F: Fq>(f: &F, c: &[u32], n: usize) -> Vec<Vec<u32>> {
    let nn = n * n;
    let mut rows = vec![vec![0u32; nn]; nn];
    for i in 0..n {
        for j in 0..n {
            let row = &mut rows[i * n + j];
            for k in 0..n {
                for l in 0..n {
                    let mut e = 0u32;
                    if j == l {
                        e = f.add(e, c[i * n + k]);
                    }
                    if i == k {
                        e = f.sub(e, c[l * n + j]);
                    }
                    row[k * n + l] = e;
                }
            }
        }
    }
    rows
}

fn companion_into<F: Fq>(f: &F, g: &[u32], rep: &mut [u32], n: usize, offset: usize) {
    let m = g.len() - 1;
    debug_assert_eq!(*g.last().unwrap(), 1);
    for i in 0..m {
        // last column: -g_i
        rep[(offset + i) * n + offset + m - 1] = f.neg(g[i]);
        if i + 1 < m {
            rep[(offset + i + 1) * n + offset + i] = 1;
        }
    }
}

/// Stream every conjugacy class of Mat_n(F_q) through the visitor. Classes
/// are emitted in a fixed canonical order (factors sorted by degree then
/// coefficients). The visitor can abort by returning an error.
pub fn conj_classes<F, V>(f: &F, n: usize, visit: &mut V) -> Result<()>
where
    F: Fq,
    V: FnMut(&ConjClass) -> Result<()>,
{
    assert!(n >= 1, "conjugacy classes need n >= 1");
    let irr: Vec<Vec<Vec<u32>>> = (1..=n).map(|d| irreducible_polys(f, d)).collect();
    let parts: Vec<Vec<Vec<usize>>> = (0..=n).map(partitions).collect();
    let gl = gl_order(n, f.q());
    let mut stack: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    rec_classes(f, n, &irr, &parts, &gl, &mut stack, (1, 0), n, visit)
}

#[allow(clippy::too_many_arguments)]
fn rec_classes<F, V>(
    f: &F,
    n: usize,
    irr: &[Vec<Vec<u32>>],
    parts: &[Vec<Vec<usize>>],
    gl: &QInt,
    stack: &mut Vec<(usize, usize, Vec<usize>)>,
    start: (usize, usize),
    remaining: usize,
    visit: &mut V,
) -> Result<()>
where
    F: Fq,
    V: FnMut(&ConjClass) -> Result<()>,
{
    if remaining == 0 {
        let class = assemble_class(f, n, irr, gl, stack);
        return visit(&class);
    }
    for deg in start.0..=remaining {
        let idx0 = if deg == start.0 { start.1 } else { 0 };
        for idx in idx0..irr[deg - 1].len() {
            for m in 1..=remaining / deg {
                for lambda in &parts[m] {
                    stack.push((deg, idx, lambda.clone()));
                    rec_classes(f, n, irr, parts, gl, stack, (deg, idx + 1), remaining - deg * m, visit)?;
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

fn assemble_class<F: Fq>(
    f: &F,
    n: usize,
    irr: &[Vec<Vec<u32>>],
    gl: &QInt,
    stack: &[(usize, usize, Vec<usize>)],
) -> ConjClass {
    let mut rep = vec![0u32; n * n];
    let mut offset = 0usize;
    let mut centralizer = QInt::from(1);
    let mut factors = Vec::with_capacity(stack.len());
    for (deg, idx, lambda) in stack {
        let poly = &irr[deg - 1][*idx];
        for &part in lambda {
            let g = poly_pow(f, poly, part);
            companion_into(f, &g, &mut rep, n, offset);
            offset += deg * part;
        }
        let q_ext = QInt::from(f.q()).pow(*deg as u32);
        centralizer *= centralizer_factor(&q_ext, lambda);
        factors.push((poly.clone(), lambda.clone()));
    }
    debug_assert_eq!(offset, n);
    let ad = ad_matrix(f, &rep, n);
    let dim_z = n * n - linalg::rank(f, ad, n * n);
    let size = {
        let (quot, rem) = num_integer::Integer::div_rem(gl, &centralizer);
        debug_assert!(rem.is_zero(), "centralizer order must divide |GL|");
        quot
    };
    ConjClass { n, factors, rep, dim_z, centralizer_order: centralizer, size }
}

pub fn conj_classes_vec<F: Fq>(f: &F, n: usize) -> Result<Vec<ConjClass>> {
    let mut out = Vec::new();
    conj_classes(f, n, &mut |c: &ConjClass| {
        out.push(c.clone());
        Ok(())
    })?;
    Ok(out)
}
