//! Character-twisted point counts over matrix spaces: commuting pairs,
//! framed cyclic triples, and symmetric powers of a weighted line.
//!
//! Each count has at least two independent routes (direct enumeration and a
//! structured one), and the checks downstream always compare routes rather
//! than trusting either alone.
//!
//! Arrow conventions for the twists: a potential passed to the commuting
//! counts is a word algebra in the two loops (b, c) = indices (0, 1); for
//! the framed triple counts it is words in (a, b, c) = (0, 1, 2).

use crate::cyclo::{CyclotomicValue, ResidueCounters};
use crate::ffield::{FieldTower, Fq, TableField, TowerField};
use crate::quiver::classes::{ad_matrix, conj_classes};
use crate::quiver::linalg;
use crate::quiver::{gl_order, Potential};
use crate::rat::{QInt, QRat};
use crate::{parallel_fold, Error, ExecCfg, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Enumerate every matrix tuple.
    Brute,
    /// Walk conjugacy classes and enumerate only centralizer data.
    Classes,
}

impl Backend {
    pub fn parse(s: &str) -> Result<Backend> {
        match s {
            "brute" => Ok(Backend::Brute),
            "classes" => Ok(Backend::Classes),
            other => Err(Error::Parse(format!(
                "unknown backend {other:?}, expected 'brute' or 'classes'"
            ))),
        }
    }
}

fn check_letters(w: &Potential, max_arrow: usize) -> Result<()> {
    for t in w.terms() {
        for &l in &t.word {
            if l > max_arrow {
                return Err(Error::InvalidParameter(format!(
                    "potential letter {l} out of range for this count"
                )));
            }
        }
    }
    Ok(())
}

/// Number of commuting pairs (B, C) in Mat_n(F_{p^k}), exact. Works for
/// every prime p including 2.
pub fn commuting_count(
    n: usize,
    p: u64,
    k: u32,
    backend: Backend,
    cfg: &ExecCfg,
) -> Result<QInt> {
    if n == 0 {
        return Ok(QInt::from(1));
    }
    let tower = FieldTower::new(p, k as usize)?;
    match TableField::new(&tower) {
        Ok(f) => commuting_count_engine(&f, n, backend, cfg),
        Err(_) => commuting_count_engine(&TowerField::new(&tower), n, backend, cfg),
    }
}

fn commuting_count_engine<F: Fq>(f: &F, n: usize, backend: Backend, cfg: &ExecCfg) -> Result<QInt> {
    let q = f.q();
    match backend {
        Backend::Classes => {
            let mut total = QInt::from(0);
            conj_classes(f, n, &mut |c| {
                total += &c.size * QInt::from(q).pow(c.dim_z as u32);
                Ok(())
            })?;
            Ok(total)
        }
        Backend::Brute => {
            let nn = n * n;
            let points = (q as u128)
                .checked_pow(2 * nn as u32)
                .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
            cfg.check_budget(points)?;
            let fold = |lo: u64, hi: u64| -> u64 {
                let mut b = vec![0u32; nn];
                let mut c = vec![0u32; nn];
                let mut count = 0u64;
                for idx in lo..hi {
                    decode_two(idx, q, &mut b, &mut c);
                    if linalg::matmul(f, &b, n, n, &c, n) == linalg::matmul(f, &c, n, n, &b, n) {
                        count += 1;
                    }
                }
                count
            };
            let total = parallel_fold(points as u64, cfg.threads, fold, |a, b| a + b).unwrap_or(0);
            Ok(QInt::from(total))
        }
    }
}

/// Sum of psi_k(Tr W(B, C)) over commuting pairs (B, C) in Mat_n(F_{p^k}).
/// W is a potential in the loops (b, c) = (0, 1); p must be odd.
pub fn commuting_twisted_count(
    n: usize,
    p: u64,
    k: u32,
    twist: &Potential,
    backend: Backend,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    check_letters(twist, 1)?;
    crate::cyclo::validate_conductor(p)?;
    if n == 0 {
        return CyclotomicValue::from_integer(p, 1);
    }
    let tower = FieldTower::new(p, k as usize)?;
    match TableField::new(&tower) {
        Ok(f) => commuting_twisted_engine(&f, n, twist, backend, cfg),
        Err(_) => commuting_twisted_engine(&TowerField::new(&tower), n, twist, backend, cfg),
    }
}

fn commuting_twisted_engine<F: Fq>(
    f: &F,
    n: usize,
    twist: &Potential,
    backend: Backend,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    let p = f.p();
    let q = f.q();
    let nn = n * n;
    match backend {
        Backend::Brute => {
            let points = (q as u128)
                .checked_pow(2 * nn as u32)
                .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
            cfg.check_budget(points)?;
            let fold = |lo: u64, hi: u64| -> ResidueCounters {
                let mut counters = ResidueCounters::new(p).expect("odd prime");
                let mut b = vec![0u32; nn];
                let mut c = vec![0u32; nn];
                for idx in lo..hi {
                    decode_two(idx, q, &mut b, &mut c);
                    if linalg::matmul(f, &b, n, n, &c, n) == linalg::matmul(f, &c, n, n, &b, n) {
                        let val = twist.trace_eval(f, &[&b, &c], n);
                        counters.bump(f.trace(val));
                    }
                }
                counters
            };
            let counters = parallel_fold(points as u64, cfg.threads, fold, ResidueCounters::merge)
                .unwrap_or(ResidueCounters::new(p)?);
            Ok(counters.to_cyclotomic())
        }
        Backend::Classes => {
            // Group the pairs by the conjugacy class of C: trace words are
            // conjugation invariant, so each class contributes size(C)
            // times a sum over B in the commutant of the representative.
            // When the twist only mentions c that inner sum is just
            // q^dim_z times a constant character value.
            let c_only = twist.terms().iter().all(|t| t.word.iter().all(|&l| l == 1));
            let zero_mat = vec![0u32; nn];
            let mut counts = vec![QInt::from(0); p as usize];
            let mut used: u128 = 0;
            conj_classes(f, n, &mut |class| {
                if c_only {
                    let val = twist.trace_eval(f, &[&zero_mat, &class.rep], n);
                    let r = f.trace(val) as usize;
                    counts[r] += &class.size * QInt::from(q).pow(class.dim_z as u32);
                    return Ok(());
                }
                let inner = (q as u128).pow(class.dim_z as u32);
                used += inner;
                cfg.check_budget(used)?;
                let basis = linalg::kernel_basis(f, ad_matrix(f, &class.rep, n), nn);
                debug_assert_eq!(basis.len(), class.dim_z);
                let mut local = vec![0i64; p as usize];
                let mut b = vec![0u32; nn];
                for idx in 0..inner as u64 {
                    b.iter_mut().for_each(|e| *e = 0);
                    let mut rest = idx;
                    for basis_vec in &basis {
                        let digit = (rest % q) as u32;
                        rest /= q;
                        if digit != 0 {
                            linalg::mat_add_scaled(f, &mut b, digit, basis_vec);
                        }
                    }
                    let val = twist.trace_eval(f, &[&b, &class.rep], n);
                    local[f.trace(val) as usize] += 1;
                }
                for (slot, cnt) in counts.iter_mut().zip(&local) {
                    if *cnt != 0 {
                        *slot += &class.size * QInt::from(*cnt);
                    }
                }
                Ok(())
            })?;
            CyclotomicValue::from_exponent_counts_big(p, &counts)
        }
    }
}

/// Sum of psi_k(Tr W(A, B, C)) over framed cyclic points: all
/// (A, B, C) in Mat_n(F_{p^k})^3 together with a vector v whose iterated
/// images under A, B, C span F^n, divided by |GL_n| (the action on cyclic
/// framed tuples is free, so this is an honest variety count: integral
/// when W = 0). W is a potential in (a, b, c) = (0, 1, 2).
pub fn nc_hilb_twisted_count(
    n: usize,
    p: u64,
    k: u32,
    w: &Potential,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    check_letters(w, 2)?;
    crate::cyclo::validate_conductor(p)?;
    let tower = FieldTower::new(p, k as usize)?;
    let raw = match TableField::new(&tower) {
        Ok(f) => nc_hilb_engine(&f, n, w, cfg)?,
        Err(_) => nc_hilb_engine(&TowerField::new(&tower), n, w, cfg)?,
    };
    Ok(raw.scale(&QRat::new(QInt::from(1), gl_order(n, (p as u128).pow(k) as u64))))
}

fn nc_hilb_engine<F: Fq>(f: &F, n: usize, w: &Potential, cfg: &ExecCfg) -> Result<CyclotomicValue> {
    let p = f.p();
    let q = f.q();
    match n {
        0 => {
            // The empty representation with the zero framing is cyclic.
            CyclotomicValue::from_integer(p, 1)
        }
        1 => {
            let points = (q as u128).pow(3);
            cfg.check_budget(points)?;
            let mut counters = ResidueCounters::new(p)?;
            for a in 0..q as u32 {
                for b in 0..q as u32 {
                    for c in 0..q as u32 {
                        let val = w.trace_eval(f, &[&[a], &[b], &[c]], 1);
                        counters.bump_by(f.trace(val), (q - 1) as i64);
                    }
                }
            }
            Ok(counters.to_cyclotomic())
        }
        2 => nc_hilb_n2(f, w, cfg),
        _ => nc_hilb_generic(f, n, w, cfg),
    }
}

/// Split the potential by how many times the letter `a` appears in each
/// word: none (constant on the inner A-loop), one (rotate a to the front,
/// the rest multiplies out to a coefficient matrix K with Tr(A K) linear
/// in A), more (full evaluation per triple).
struct SplitPotential {
    zero_a: Vec<(u32, Vec<usize>)>,
    one_a: Vec<(u32, Vec<usize>)>,
    general: Potential,
}

fn split_potential<F: Fq>(f: &F, w: &Potential) -> SplitPotential {
    let mut zero_a = Vec::new();
    let mut one_a = Vec::new();
    let mut general_terms = Vec::new();
    for t in w.terms() {
        let scalar = linalg::scalar_of(f, t.coeff);
        let a_count = t.word.iter().filter(|&&l| l == 0).count();
        match a_count {
            0 => zero_a.push((scalar, t.word.clone())),
            1 => {
                let pos = t.word.iter().position(|&l| l == 0).unwrap();
                let mut rest: Vec<usize> = t.word[pos + 1..].to_vec();
                rest.extend_from_slice(&t.word[..pos]);
                one_a.push((scalar, rest));
            }
            _ => general_terms.push((t.coeff, t.word.clone())),
        }
    }
    SplitPotential {
        zero_a,
        one_a,
        general: Potential::from_raw(general_terms),
    }
}

fn eval_words<F: Fq>(
    f: &F,
    terms: &[(u32, Vec<usize>)],
    mats: &[&[u32]],
    n: usize,
) -> u32 {
    let mut acc = 0u32;
    for (scalar, word) in terms {
        let mut prod = mats[word[0]].to_vec();
        for &l in &word[1..] {
            prod = linalg::matmul(f, &prod, n, n, mats[l], n);
        }
        acc = f.add(acc, f.mul(*scalar, linalg::mat_trace(f, &prod, n)));
    }
    acc
}

/// Product of the matrices of a word (already a-free), for the linear
/// coefficient K of a one-a term.
fn word_product<F: Fq>(f: &F, word: &[usize], mats: &[&[u32]], n: usize) -> Vec<u32> {
    if word.is_empty() {
        let mut id = vec![0u32; n * n];
        for i in 0..n {
            id[i * n + i] = 1;
        }
        return id;
    }
    let mut prod = mats[word[0]].to_vec();
    for &l in &word[1..] {
        prod = linalg::matmul(f, &prod, n, n, mats[l], n);
    }
    prod
}

fn nc_hilb_n2<F: Fq>(f: &F, w: &Potential, cfg: &ExecCfg) -> Result<CyclotomicValue> {
    let p = f.p();
    let q = f.q();
    cfg.check_budget((q as u128).pow(12))?;
    let split = split_potential(f, w);
    let outer = (q as u128).pow(8) as u64;

    let fold = |lo: u64, hi: u64| -> ResidueCounters {
        let mut counters = ResidueCounters::new(p).expect("odd prime");
        let mut bm = vec![0u32; 4];
        let mut cm = vec![0u32; 4];
        let mut hard: Vec<(u32, u32)> = Vec::new();
        let zero_mat = [0u32; 4];
        for idx in lo..hi {
            decode_two(idx, q, &mut bm, &mut cm);
            let mats: [&[u32]; 3] = [&zero_mat, &bm, &cm];
            let w0 = eval_words(f, &split.zero_a, &mats, 2);
            // K = sum of coeff * (rotated tail product)
            let mut kk = [0u32; 4];
            for (scalar, rest) in &split.one_a {
                let m = word_product(f, rest, &mats, 2);
                for (slot, &mi) in kk.iter_mut().zip(&m) {
                    *slot = f.add(*slot, f.mul(*scalar, mi));
                }
            }
            // classify nonzero v: v is "easy" when Bv or Cv already leaves
            // the line through v, so every A makes it cyclic.
            hard.clear();
            let mut easy: i64 = 0;
            for vidx in 1..(q * q) as u32 {
                let v0 = vidx % q as u32;
                let v1 = vidx / q as u32;
                let bv0 = f.add(f.mul(bm[0], v0), f.mul(bm[1], v1));
                let bv1 = f.add(f.mul(bm[2], v0), f.mul(bm[3], v1));
                let det_b = f.sub(f.mul(bv0, v1), f.mul(bv1, v0));
                if det_b != 0 {
                    easy += 1;
                    continue;
                }
                let cv0 = f.add(f.mul(cm[0], v0), f.mul(cm[1], v1));
                let cv1 = f.add(f.mul(cm[2], v0), f.mul(cm[3], v1));
                let det_c = f.sub(f.mul(cv0, v1), f.mul(cv1, v0));
                if det_c != 0 {
                    easy += 1;
                } else {
                    hard.push((v0, v1));
                }
            }
            let has_general = !split.general.terms().is_empty();
            for a0 in 0..q as u32 {
                for a1 in 0..q as u32 {
                    for a2 in 0..q as u32 {
                        for a3 in 0..q as u32 {
                            let mut val = f.add(
                                w0,
                                f.add(
                                    f.add(f.mul(a0, kk[0]), f.mul(a1, kk[2])),
                                    f.add(f.mul(a2, kk[1]), f.mul(a3, kk[3])),
                                ),
                            );
                            if has_general {
                                let am = [a0, a1, a2, a3];
                                let gm: [&[u32]; 3] = [&am, &bm, &cm];
                                val = f.add(val, split.general.trace_eval(f, &gm, 2));
                            }
                            let mut cyc = easy;
                            for &(v0, v1) in &hard {
                                let av0 = f.add(f.mul(a0, v0), f.mul(a1, v1));
                                let av1 = f.add(f.mul(a2, v0), f.mul(a3, v1));
                                if f.sub(f.mul(av0, v1), f.mul(av1, v0)) != 0 {
                                    cyc += 1;
                                }
                            }
                            if cyc != 0 {
                                counters.bump_by(f.trace(val), cyc);
                            }
                        }
                    }
                }
            }
        }
        counters
    };
    let counters = parallel_fold(outer, cfg.threads, fold, ResidueCounters::merge)
        .unwrap_or(ResidueCounters::new(p)?);
    Ok(counters.to_cyclotomic())
}

fn nc_hilb_generic<F: Fq>(f: &F, n: usize, w: &Potential, cfg: &ExecCfg) -> Result<CyclotomicValue> {
    let p = f.p();
    let q = f.q();
    let nn = n * n;
    let triples = (q as u128)
        .checked_pow(3 * nn as u32)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
    let work = triples
        .checked_mul((q as u128).pow(n as u32))
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
    cfg.check_budget(work)?;
    let fold = |lo: u64, hi: u64| -> ResidueCounters {
        let mut counters = ResidueCounters::new(p).expect("odd prime");
        let mut am = vec![0u32; nn];
        let mut bm = vec![0u32; nn];
        let mut cm = vec![0u32; nn];
        for idx in lo..hi {
            let mut rest = idx;
            for m in [&mut am, &mut bm, &mut cm] {
                for e in m.iter_mut() {
                    *e = (rest % q) as u32;
                    rest /= q;
                }
            }
            let mats: [&[u32]; 3] = [&am, &bm, &cm];
            let mut cyc = 0i64;
            for vidx in 1..(q as u64).pow(n as u32) {
                let mut v = vec![0u32; n];
                let mut rv = vidx;
                for e in v.iter_mut() {
                    *e = (rv % q) as u32;
                    rv /= q;
                }
                if span_is_full(f, n, &mats, &v) {
                    cyc += 1;
                }
            }
            if cyc != 0 {
                let val = w.trace_eval(f, &mats, n);
                counters.bump_by(f.trace(val), cyc);
            }
        }
        counters
    };
    let counters = parallel_fold(triples as u64, cfg.threads, fold, ResidueCounters::merge)
        .unwrap_or(ResidueCounters::new(p)?);
    Ok(counters.to_cyclotomic())
}

/// Does the iterated image of v under the given matrices span F^n? Breadth
/// first closure with on-the-fly echelonization.
fn span_is_full<F: Fq>(f: &F, n: usize, mats: &[&[u32]], v: &[u32]) -> bool {
    let mut basis: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut queue: Vec<Vec<u32>> = vec![v.to_vec()];
    while let Some(u) = queue.pop() {
        let mut u = u;
        // reduce against current echelon basis (each basis vector stored
        // with its leading position normalized to 1)
        for b in &basis {
            let lead = b.iter().position(|&x| x != 0).unwrap();
            if u[lead] != 0 {
                let s = u[lead];
                for (ui, bi) in u.iter_mut().zip(b) {
                    let t = f.mul(s, *bi);
                    *ui = f.sub(*ui, t);
                }
            }
        }
        let Some(lead) = u.iter().position(|&x| x != 0) else { continue };
        let inv = f.inv(u[lead]);
        for e in u.iter_mut() {
            *e = f.mul(*e, inv);
        }
        // enqueue images of the new basis vector
        for m in mats {
            let mut img = vec![0u32; n];
            for (i, slot) in img.iter_mut().enumerate() {
                let mut acc = 0u32;
                for (j, &uj) in u.iter().enumerate() {
                    acc = f.add(acc, f.mul(m[i * n + j], uj));
                }
                *slot = acc;
            }
            queue.push(img);
        }
        basis.push(u);
        if basis.len() == n {
            return true;
        }
    }
    false
}

/// Sum over monic degree-n polynomials over F_{p^k} of psi_k applied to the
/// d-th power sum of their roots (with multiplicity), computed from the
/// coefficients by the Newton recurrence. This is the level-k point count
/// of the n-th symmetric power of the line weighted by t^d.
pub fn sym_line_twisted_count(
    d: u64,
    n: usize,
    p: u64,
    k: u32,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    if d == 0 {
        return Err(Error::InvalidParameter("power sum exponent must be >= 1".into()));
    }
    crate::cyclo::validate_conductor(p)?;
    let tower = FieldTower::new(p, k as usize)?;
    match TableField::new(&tower) {
        Ok(f) => sym_line_engine(&f, d as usize, n, cfg),
        Err(_) => sym_line_engine(&TowerField::new(&tower), d as usize, n, cfg),
    }
}

fn sym_line_engine<F: Fq>(f: &F, d: usize, n: usize, cfg: &ExecCfg) -> Result<CyclotomicValue> {
    let p = f.p();
    let q = f.q();
    let points = (q as u128)
        .checked_pow(n as u32)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
    cfg.check_budget(points.saturating_mul(d as u128))?;
    // scalars 1..=d as field elements, for the j * e_j term
    let j_scalars: Vec<u32> = (0..=d).map(|j| f.scalar((j as u64) % p)).collect();
    let fold = |lo: u64, hi: u64| -> ResidueCounters {
        let mut counters = ResidueCounters::new(p).expect("odd prime");
        let mut a = vec![0u32; n];
        let mut e = vec![0u32; d + 1];
        let mut ps = vec![0u32; d + 1];
        for idx in lo..hi {
            let mut rest = idx;
            for ai in a.iter_mut() {
                *ai = (rest % q) as u32;
                rest /= q;
            }
            // elementary symmetric functions of the roots: e_j =
            // (-1)^j a_{n-j}, zero beyond degree n
            for (j, ej) in e.iter_mut().enumerate().skip(1) {
                *ej = if j <= n {
                    let c = a[n - j];
                    if j % 2 == 1 {
                        f.neg(c)
                    } else {
                        c
                    }
                } else {
                    0
                };
            }
            // Newton: p_j = sum_{i<j} (-1)^(i-1) e_i p_{j-i}
            //               + (-1)^(j-1) j e_j
            for j in 1..=d {
                let mut acc = 0u32;
                for i in 1..j {
                    let t = f.mul(e[i], ps[j - i]);
                    acc = if i % 2 == 1 { f.add(acc, t) } else { f.sub(acc, t) };
                }
                let tail = f.mul(j_scalars[j], e[j]);
                acc = if j % 2 == 1 { f.add(acc, tail) } else { f.sub(acc, tail) };
                ps[j] = acc;
            }
            counters.bump(f.trace(ps[d]));
        }
        counters
    };
    let counters = parallel_fold(points as u64, cfg.threads, fold, ResidueCounters::merge)
        .unwrap_or(ResidueCounters::new(p)?);
    Ok(counters.to_cyclotomic())
}

/// Sum over all A in Mat_n(F_q) of psi(Tr(A M)) for a fixed M: q^(n^2)
/// when M = 0 and exactly 0 otherwise. The brute sum is the oracle side of
/// that statement.
pub fn trace_pairing_sum<F: Fq>(
    f: &F,
    m: &[u32],
    n: usize,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    if m.len() != n * n {
        return Err(Error::InvalidParameter(format!(
            "matrix has {} entries, expected {}",
            m.len(),
            n * n
        )));
    }
    crate::cyclo::validate_conductor(f.p())?;
    let p = f.p();
    let q = f.q();
    let nn = n * n;
    let points = (q as u128)
        .checked_pow(nn as u32)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, cap: cfg.max_points })?;
    cfg.check_budget(points)?;
    // Tr(A M) = sum_(i,j) A_ij M_ji: flatten M transposed once.
    let mt: Vec<u32> = (0..nn).map(|e| m[(e % n) * n + e / n]).collect();
    let fold = |lo: u64, hi: u64| -> ResidueCounters {
        let mut counters = ResidueCounters::new(p).expect("odd prime");
        let mut a = vec![0u32; nn];
        for idx in lo..hi {
            let mut rest = idx;
            let mut val = 0u32;
            for (ai, &mi) in a.iter_mut().zip(&mt) {
                *ai = (rest % q) as u32;
                rest /= q;
                val = f.add(val, f.mul(*ai, mi));
            }
            counters.bump(f.trace(val));
        }
        counters
    };
    let counters = parallel_fold(points as u64, cfg.threads, fold, ResidueCounters::merge)
        .unwrap_or(ResidueCounters::new(p)?);
    Ok(counters.to_cyclotomic())
}

#[inline(always)]
fn decode_two(idx: u64, q: u64, first: &mut [u32], second: &mut [u32]) {
    let mut rest = idx;
    for e in first.iter_mut() {
        *e = (rest % q) as u32;
        rest /= q;
    }
    for e in second.iter_mut() {
        *e = (rest % q) as u32;
        rest /= q;
    }
}
