//! Integer polynomials in named variables split into base and fiber
//! coordinates, plus the exact feasibility test for quasihomogeneity
//! weights.
//!
//! Variables whose name starts with `t` are fiber coordinates; everything
//! else is base. The text syntax is sums of terms like `2*x1^2*t3 - x0*x1`:
//! an optional integer coefficient and `*`-separated factors `var` or
//! `var^exp`.

use crate::ffield::Fq;
use crate::quiver::{Potential, QuiverSpec};
use crate::rat::{qrat, QInt, QRat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedFunction {
    /// Variable names in first-appearance order.
    vars: Vec<String>,
    /// Marks fiber (t-) variables.
    fiber: Vec<bool>,
    /// (coefficient, exponent vector) with like monomials combined and
    /// zero coefficients dropped.
    terms: Vec<(i64, Vec<u32>)>,
}

impl WeightedFunction {
    pub fn new(vars: Vec<String>, terms: Vec<(i64, Vec<u32>)>) -> Result<Self> {
        for v in &vars {
            if v.is_empty()
                || !v.chars().next().unwrap().is_ascii_alphabetic()
                || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Parse(format!("bad variable name {v:?}")));
            }
        }
        for i in 1..vars.len() {
            if vars[..i].contains(&vars[i]) {
                return Err(Error::InvalidParameter(format!("duplicate variable {}", vars[i])));
            }
        }
        let fiber = vars.iter().map(|v| v.starts_with('t')).collect();
        let mut combined: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for (c, exps) in terms {
            if exps.len() != vars.len() {
                return Err(Error::InvalidParameter(format!(
                    "exponent vector of length {} for {} variables",
                    exps.len(),
                    vars.len()
                )));
            }
            *combined.entry(exps).or_insert(0) += c;
        }
        let terms = combined.into_iter().filter(|(_, c)| *c != 0).map(|(e, c)| (c, e)).collect();
        Ok(WeightedFunction { vars, fiber, terms })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &[(i64, Vec<u32>)] {
        &self.terms
    }

    pub fn fiber_mask(&self) -> &[bool] {
        &self.fiber
    }

    pub fn fiber_count(&self) -> usize {
        self.fiber.iter().filter(|&&b| b).count()
    }

    pub fn base_count(&self) -> usize {
        self.vars.len() - self.fiber_count()
    }

    /// Evaluate at a full point (one element index per variable).
    pub fn eval<F: Fq>(&self, f: &F, point: &[u32]) -> u32 {
        debug_assert_eq!(point.len(), self.vars.len());
        let mut acc = 0u32;
        for (c, exps) in &self.terms {
            let mut m = crate::quiver::linalg::scalar_of(f, *c);
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    m = f.mul(m, f.pow(*x, e as u64));
                }
            }
            acc = f.add(acc, m);
        }
        acc
    }

    /// Split as f = g_0(x) + sum_i t_i g_i(x) over the fiber variables.
    /// Fails unless every term has fiber degree 0 or 1. Returns the base
    /// part and one summand per fiber variable, all as polynomials in the
    /// base variables only.
    pub fn linear_fiber_split(&self) -> Result<(WeightedFunction, Vec<WeightedFunction>)> {
        let base_vars: Vec<String> =
            self.vars.iter().zip(&self.fiber).filter(|(_, &f)| !f).map(|(v, _)| v.clone()).collect();
        let base_slots: Vec<usize> =
            (0..self.vars.len()).filter(|&i| !self.fiber[i]).collect();
        let fiber_slots: Vec<usize> =
            (0..self.vars.len()).filter(|&i| self.fiber[i]).collect();
        let mut g0: Vec<(i64, Vec<u32>)> = Vec::new();
        let mut gi: Vec<Vec<(i64, Vec<u32>)>> = vec![Vec::new(); fiber_slots.len()];
        for (c, exps) in &self.terms {
            let fiber_deg: u32 = fiber_slots.iter().map(|&s| exps[s]).sum();
            let base_exps: Vec<u32> = base_slots.iter().map(|&s| exps[s]).collect();
            match fiber_deg {
                0 => g0.push((*c, base_exps)),
                1 => {
                    let which = fiber_slots
                        .iter()
                        .position(|&s| exps[s] == 1)
                        .expect("degree-1 fiber term has a fiber variable");
                    gi[which].push((*c, base_exps));
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "function is not linear in the fiber variables".into(),
                    ))
                }
            }
        }
        let g0 = WeightedFunction::new(base_vars.clone(), g0)?;
        let gi = gi
            .into_iter()
            .map(|terms| WeightedFunction::new(base_vars.clone(), terms))
            .collect::<Result<Vec<_>>>()?;
        Ok((g0, gi))
    }

    /// Nonnegative rational weights giving every monomial total weight 1,
    /// if any exist.
    pub fn quasihomogeneous_weights(&self) -> Option<Vec<QRat>> {
        let rows: Vec<Vec<u32>> = self.terms.iter().map(|(_, e)| e.clone()).collect();
        solve_unit_weights(&rows, self.vars.len())
    }

    /// The same certificate cleared to integers: nonnegative weights and a
    /// positive degree so every monomial has that exact total weight.
    pub fn integer_weights(&self) -> Option<(Vec<u64>, u64)> {
        let w = self.quasihomogeneous_weights()?;
        Some(integerize_weights(&w))
    }
}

/// Scale rational unit weights to integers by the denominator lcm; returns
/// (weights, common degree).
pub(crate) fn integerize_weights(w: &[QRat]) -> (Vec<u64>, u64) {
    let mut scale = QInt::from(1);
    for wi in w {
        scale = num_integer::lcm(scale, wi.denom().clone());
    }
    let ints = w
        .iter()
        .map(|wi| {
            let v = (wi * QRat::from_integer(scale.clone())).to_integer();
            u64::try_from(v).expect("nonnegative small weight")
        })
        .collect();
    (ints, u64::try_from(scale).expect("small degree"))
}

/// Parse the `2*x^2*t - x*y + 3` syntax. Variables are collected in order
/// of first appearance.
pub fn parse_weighted(text: &str) -> Result<WeightedFunction> {
    let mut vars: Vec<String> = Vec::new();
    let mut terms: Vec<(i64, BTreeMap<usize, u32>)> = Vec::new();
    let src = text.trim();
    if src.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed chunks at top level (no parentheses in this format)
    let mut chunks: Vec<(i64, String)> = Vec::new();
    let mut current = String::new();
    let mut sign = 1i64;
    for ch in src.chars() {
        match ch {
            '+' | '-' => {
                if current.trim().is_empty() {
                    // leading or repeated sign folds into the pending one
                    if ch == '-' {
                        sign = -sign;
                    }
                } else {
                    chunks.push((sign, std::mem::take(&mut current)));
                    sign = if ch == '-' { -1 } else { 1 };
                }
            }
            _ => current.push(ch),
        }
    }
    if current.trim().is_empty() {
        return Err(Error::Parse("trailing operator".into()));
    }
    chunks.push((sign, current));

    for (sgn, chunk) in chunks {
        let mut coeff: i64 = sgn;
        let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
        let mut saw_factor = false;
        for factor in chunk.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {chunk:?}")));
            }
            if factor.chars().next().unwrap().is_ascii_digit() {
                let n = factor
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
                coeff = coeff
                    .checked_mul(n)
                    .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
                saw_factor = true;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                None => (factor, 1u32),
                Some((n, e)) => {
                    let exp = e
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
                    (n.trim(), exp)
                }
            };
            let idx = match vars.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vars.push(name.to_string());
                    vars.len() - 1
                }
            };
            *exps.entry(idx).or_insert(0) += exp;
            saw_factor = true;
        }
        if !saw_factor {
            return Err(Error::Parse(format!("empty term in {text:?}")));
        }
        terms.push((coeff, exps));
    }
    let nvars = vars.len();
    let dense: Vec<(i64, Vec<u32>)> = terms
        .into_iter()
        .map(|(c, sparse)| {
            let mut row = vec![0u32; nvars];
            for (i, e) in sparse {
                row[i] = e;
            }
            (c, row)
        })
        .collect();
    WeightedFunction::new(vars, dense)
}

/// Expand a quiver potential at a square dimension into explicit matrix
/// entry coordinates. Entries of arrows listed in `fiber_arrows` are named
/// `t<arrow>_<i>_<j>` (fiber), the rest `x<arrow>_<i>_<j>` (base).
pub fn expand_quiver_potential(
    quiver: &QuiverSpec,
    w: &Potential,
    n: usize,
    fiber_arrows: &[&str],
) -> Result<WeightedFunction> {
    if quiver.vertices() != 1 {
        return Err(Error::InvalidParameter(
            "coordinate expansion expects a one-vertex quiver".into(),
        ));
    }
    for name in fiber_arrows {
        if quiver.arrow_index(name).is_none() {
            return Err(Error::InvalidParameter(format!("unknown fiber arrow {name:?}")));
        }
    }
    let arrows = quiver.arrows();
    let mut vars = Vec::with_capacity(arrows.len() * n * n);
    for a in arrows {
        let is_fiber = fiber_arrows.contains(&a.name.as_str());
        let prefix = if is_fiber { "t" } else { "x" };
        for i in 0..n {
            for j in 0..n {
                vars.push(format!("{prefix}{}_{i}_{j}", a.name));
            }
        }
    }
    let var_of = |arrow: usize, i: usize, j: usize| arrow * n * n + i * n + j;
    let mut terms: Vec<(i64, Vec<u32>)> = Vec::new();
    for t in w.terms() {
        let l = t.word.len();
        // Tr(M_{w_0} ... M_{w_{l-1}}) = sum over index cycles of the
        // product of entries.
        let mut cycle = vec![0usize; l];
        loop {
            let mut exps = vec![0u32; vars.len()];
            for (pos, &arrow) in t.word.iter().enumerate() {
                let i = cycle[pos];
                let j = cycle[(pos + 1) % l];
                exps[var_of(arrow, i, j)] += 1;
            }
            terms.push((t.coeff, exps));
            // odometer over the l-fold index cycle
            let mut pos = 0;
            loop {
                if pos == l {
                    break;
                }
                cycle[pos] += 1;
                if cycle[pos] < n {
                    break;
                }
                cycle[pos] = 0;
                pos += 1;
            }
            if pos == l {
                break;
            }
        }
    }
    WeightedFunction::new(vars, terms)
}

/// Find w >= 0 with E w = 1 (componentwise) by a phase-one simplex with
/// Bland's rule, in exact rational arithmetic. Returns None when the
/// system is infeasible.
pub fn solve_unit_weights(rows: &[Vec<u32>], nvars: usize) -> Option<Vec<QRat>> {
    let m = rows.len();
    if m == 0 {
        return Some(vec![QRat::zero(); nvars]);
    }
    // tableau: columns [w_0..w_{n-1} | a_0..a_{m-1} | rhs], one row per
    // equation, artificials start basic with value 1.
    let ncols = nvars + m + 1;
    let mut tab: Vec<Vec<QRat>> = Vec::with_capacity(m);
    for (r, row) in rows.iter().enumerate() {
        let mut line = vec![QRat::zero(); ncols];
        for (c, &e) in row.iter().enumerate() {
            line[c] = qrat(e as i64);
        }
        line[nvars + r] = QRat::one();
        line[ncols - 1] = QRat::one();
        tab.push(line);
    }
    let mut basis: Vec<usize> = (nvars..nvars + m).collect();
    // objective: minimize the sum of artificials; reduced costs start as
    // minus the column sums of the constraint rows (artificial columns net
    // to zero).
    let mut obj = vec![QRat::zero(); ncols];
    for line in &tab {
        for (o, v) in obj.iter_mut().zip(line.iter()) {
            *o -= v;
        }
    }
    for c in nvars..nvars + m {
        obj[c] = QRat::zero();
    }
    loop {
        // Bland: smallest-index column with negative reduced cost
        let Some(enter) = (0..nvars + m).find(|&c| obj[c].is_negative()) else {
            break;
        };
        // ratio test, ties broken by smallest basic variable index
        let mut best: Option<(QRat, usize)> = None;
        for (r, line) in tab.iter().enumerate() {
            if line[enter].is_positive() {
                let ratio = &line[ncols - 1] / &line[enter];
                let better = match &best {
                    None => true,
                    Some((b, br)) => ratio < *b || (ratio == *b && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((ratio, r));
                }
            }
        }
        let Some((_, pivot_row)) = best else {
            // unbounded phase-one objective cannot happen (bounded below
            // by 0), but guard anyway
            return None;
        };
        // pivot
        let pivot_val = tab[pivot_row][enter].clone();
        for v in tab[pivot_row].iter_mut() {
            *v /= &pivot_val;
        }
        for r in 0..m {
            if r != pivot_row && !tab[r][enter].is_zero() {
                let factor = tab[r][enter].clone();
                for c in 0..ncols {
                    let t = &factor * &tab[pivot_row][c];
                    tab[r][c] -= t;
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for c in 0..ncols {
                let t = &factor * &tab[pivot_row][c];
                obj[c] -= t;
            }
        }
        basis[pivot_row] = enter;
    }
    // objective value is -obj[rhs]; feasible iff it reached zero
    if !obj[ncols - 1].is_zero() {
        return None;
    }
    let mut w = vec![QRat::zero(); nvars];
    for (r, &b) in basis.iter().enumerate() {
        if b < nvars {
            w[b] = tab[r][ncols - 1].clone();
        } else if !tab[r][ncols - 1].is_zero() {
            // an artificial stuck in the basis at a nonzero level
            return None;
        }
    }
    Some(w)
}
