//! Quivers with potential: the combinatorial data, the text format, and the
//! twisted point count of a whole representation space.
//!
//! The text format, one header per line, comments with '#':
//!
//! ```text
//! vertices: 1
//! arrows: a 1 1, b 1 1, c 1 1
//! potential: +1 a b c, -1 a c b, +1 c c c
//! ```
//!
//! A potential term is an integer coefficient and a cyclic word of arrows;
//! the word `a b c` stands for Tr(A B C). Words must close up cyclically:
//! reading left to right as matrix factors, each factor consumes the target
//! of the one after it, so source(w_i) = target(w_{i+1}) cyclically.

pub mod classes;
pub mod counts;
pub(crate) mod linalg;

use crate::cyclo::{CyclotomicValue, ResidueCounters};
use crate::ffield::{FieldTower, Fq, TableField, TowerField};
use crate::rat::QInt;
use crate::{parallel_fold, Error, ExecCfg, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    /// Vertex indices, 0-based.
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverSpec {
    vertices: usize,
    arrows: Vec<Arrow>,
}

impl QuiverSpec {
    pub fn new(vertices: usize, arrows: Vec<Arrow>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidParameter("a quiver needs at least one vertex".into()));
        }
        for a in &arrows {
            if a.source >= vertices || a.target >= vertices {
                return Err(Error::InvalidParameter(format!(
                    "arrow {} has endpoints outside 0..{vertices}",
                    a.name
                )));
            }
            if a.name.is_empty() || !a.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("bad arrow name {:?}", a.name)));
            }
        }
        for i in 1..arrows.len() {
            if arrows[..i].iter().any(|b| b.name == arrows[i].name) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate arrow name {}",
                    arrows[i].name
                )));
            }
        }
        Ok(QuiverSpec { vertices, arrows })
    }

    /// One vertex, all arrows loops: the setting of every matrix count here.
    pub fn loops(names: &[&str]) -> Self {
        let arrows = names
            .iter()
            .map(|n| Arrow { name: n.to_string(), source: 0, target: 0 })
            .collect();
        QuiverSpec::new(1, arrows).expect("loops are always valid")
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialTerm {
    pub coeff: i64,
    /// Arrow indices; the term is coeff * Tr(product of the arrow matrices
    /// left to right).
    pub word: Vec<usize>,
}

/// An integer combination of cyclic words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: Vec<PotentialTerm>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential { terms: vec![] }
    }

    pub fn new(quiver: &QuiverSpec, terms: Vec<(i64, Vec<usize>)>) -> Result<Self> {
        for (_, word) in &terms {
            if word.is_empty() {
                return Err(Error::InvalidParameter("empty potential word".into()));
            }
            for &w in word {
                if w >= quiver.arrows().len() {
                    return Err(Error::InvalidParameter(format!("arrow index {w} out of range")));
                }
            }
            for i in 0..word.len() {
                let here = &quiver.arrows()[word[i]];
                let next = &quiver.arrows()[word[(i + 1) % word.len()]];
                if here.source != next.target {
                    return Err(Error::InvalidParameter(format!(
                        "word does not compose cyclically: {} then {}",
                        here.name, next.name
                    )));
                }
            }
        }
        Ok(Potential {
            terms: terms.into_iter().map(|(coeff, word)| PotentialTerm { coeff, word }).collect(),
        })
    }

    pub fn from_names(quiver: &QuiverSpec, terms: &[(i64, &[&str])]) -> Result<Self> {
        let resolved = terms
            .iter()
            .map(|(c, names)| {
                let word = names
                    .iter()
                    .map(|n| {
                        quiver
                            .arrow_index(n)
                            .ok_or_else(|| Error::Parse(format!("unknown arrow {n:?}")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                Ok((*c, word))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(quiver, resolved)
    }

    /// Internal constructor for already-validated term lists.
    pub(crate) fn from_raw(terms: Vec<(i64, Vec<usize>)>) -> Potential {
        Potential {
            terms: terms.into_iter().map(|(coeff, word)| PotentialTerm { coeff, word }).collect(),
        }
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluate sum of coeff * Tr(word) on square matrices over F_q, one
    /// n-by-n flat matrix per arrow.
    pub fn trace_eval<F: Fq>(&self, f: &F, mats: &[&[u32]], n: usize) -> u32 {
        let mut acc = 0u32;
        for t in &self.terms {
            let mut prod = mats[t.word[0]].to_vec();
            for &w in &t.word[1..] {
                prod = linalg::matmul(f, &prod, n, n, mats[w], n);
            }
            let tr = linalg::mat_trace(f, &prod, n);
            acc = f.add(acc, f.mul(linalg::scalar_of(f, t.coeff), tr));
        }
        acc
    }
}

/// Parse the header text format into a quiver and its potential (the
/// potential line may be omitted, giving the zero potential).
pub fn parse_quiver(text: &str) -> Result<(QuiverSpec, Potential)> {
    let mut vertices: Option<usize> = None;
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut potential_src: Option<String> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected 'key: value' in {line:?}")))?;
        match key.trim() {
            "vertices" => {
                let v = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad vertex count {rest:?}")))?;
                vertices = Some(v);
            }
            "arrows" => {
                for item in rest.split(',') {
                    let parts: Vec<&str> = item.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse(format!(
                            "arrow needs 'name source target', got {item:?}"
                        )));
                    }
                    let parse_vertex = |s: &str| -> Result<usize> {
                        let v = s
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad vertex id {s:?}")))?;
                        if v == 0 {
                            return Err(Error::Parse("vertex ids are 1-based".into()));
                        }
                        Ok(v - 1)
                    };
                    arrows.push(Arrow {
                        name: parts[0].to_string(),
                        source: parse_vertex(parts[1])?,
                        target: parse_vertex(parts[2])?,
                    });
                }
            }
            "potential" => potential_src = Some(rest.to_string()),
            other => return Err(Error::Parse(format!("unknown key {other:?}"))),
        }
    }
    let vertices =
        vertices.ok_or_else(|| Error::Parse("missing 'vertices:' line".into()))?;
    let quiver = QuiverSpec::new(vertices, arrows)?;
    let potential = match potential_src {
        None => Potential::zero(),
        Some(src) => {
            let mut terms: Vec<(i64, Vec<&str>)> = Vec::new();
            for item in src.split(',') {
                let parts: Vec<&str> = item.split_whitespace().collect();
                if parts.len() < 2 {
                    return Err(Error::Parse(format!(
                        "potential term needs 'coeff arrow...', got {item:?}"
                    )));
                }
                let coeff = parts[0]
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {:?}", parts[0])))?;
                terms.push((coeff, parts[1..].to_vec()));
            }
            let borrowed: Vec<(i64, &[&str])> =
                terms.iter().map(|(c, w)| (*c, w.as_slice())).collect();
            Potential::from_names(&quiver, &borrowed)?
        }
    };
    Ok((quiver, potential))
}

/// |GL_n(F_q)| = prod_{i<n} (q^n - q^i), exactly. n = 0 gives 1.
pub fn gl_order(n: usize, q: u64) -> QInt {
    let qb = QInt::from(q);
    let qn = qb.pow(n as u32);
    let mut acc = QInt::from(1);
    for i in 0..n {
        acc *= &qn - qb.pow(i as u32);
    }
    acc
}

/// Sum of psi_k(Tr W) over the whole representation space of the quiver
/// with dimension vector gamma over F_{p^k}. This is the direct, unreduced
/// route: every matrix entry is enumerated.
pub fn rep_space_twisted_sum(
    quiver: &QuiverSpec,
    w: &Potential,
    gamma: &[usize],
    p: u64,
    k: u32,
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    if gamma.len() != quiver.vertices() {
        return Err(Error::InvalidParameter(format!(
            "dimension vector has {} entries for {} vertices",
            gamma.len(),
            quiver.vertices()
        )));
    }
    let tower = FieldTower::new(p, k as usize)?;
    match TableField::new(&tower) {
        Ok(f) => rep_space_engine(&f, quiver, w, gamma, cfg),
        Err(_) => rep_space_engine(&TowerField::new(&tower), quiver, w, gamma, cfg),
    }
}

fn rep_space_engine<F: Fq>(
    f: &F,
    quiver: &QuiverSpec,
    w: &Potential,
    gamma: &[usize],
    cfg: &ExecCfg,
) -> Result<CyclotomicValue> {
    let q = f.q();
    let shapes: Vec<(usize, usize)> = quiver
        .arrows()
        .iter()
        .map(|a| (gamma[a.target], gamma[a.source]))
        .collect();
    let entries: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let points = (q as u128).checked_pow(entries as u32).ok_or(Error::BudgetExceeded {
        needed: u128::MAX,
        cap: cfg.max_points,
    })?;
    cfg.check_budget(points)?;
    let points = points as u64;
    let scalars: Vec<u32> = w.terms().iter().map(|t| linalg::scalar_of(f, t.coeff)).collect();

    let fold = |lo: u64, hi: u64| -> ResidueCounters {
        let mut counters = ResidueCounters::new(f.p()).expect("p validated by tower");
        let mut mats: Vec<Vec<u32>> = shapes.iter().map(|(r, c)| vec![0u32; r * c]).collect();
        for idx in lo..hi {
            let mut rest = idx;
            for m in mats.iter_mut() {
                for e in m.iter_mut() {
                    *e = (rest % q) as u32;
                    rest /= q;
                }
            }
            let mut val = 0u32;
            for (t, &cscal) in w.terms().iter().zip(&scalars) {
                let first = t.word[0];
                let mut prod = mats[first].clone();
                let (rows, mut cols) = shapes[first];
                for &wi in &t.word[1..] {
                    let (br, bc) = shapes[wi];
                    debug_assert_eq!(cols, br);
                    prod = linalg::matmul(f, &prod, rows, cols, &mats[wi], bc);
                    cols = bc;
                }
                debug_assert_eq!(rows, cols);
                let tr = linalg::mat_trace(f, &prod, rows);
                val = f.add(val, f.mul(cscal, tr));
            }
            counters.bump(f.trace(val));
        }
        counters
    };
    let counters = parallel_fold(points, cfg.threads, fold, ResidueCounters::merge)
        .unwrap_or(ResidueCounters::new(f.p())?);
    Ok(counters.to_cyclotomic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{gauss_sum, power_character_sum};
    use crate::rat::qrat;

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(0, 5), QInt::from(1));
        assert_eq!(gl_order(1, 7), QInt::from(6));
        assert_eq!(gl_order(2, 2), QInt::from(6));
        assert_eq!(gl_order(3, 2), QInt::from(168));
        assert_eq!(gl_order(2, 3), QInt::from(48));
        // (q^n - q^i) product, checked against the subgroup-index identity
        // |GL_n| = (q^n - 1) q^(n-1) |GL_(n-1)|.
        for n in 1..=4usize {
            for q in [2u64, 3, 5] {
                let expect = (QInt::from(q).pow(n as u32) - 1)
                    * QInt::from(q).pow((n - 1) as u32)
                    * gl_order(n - 1, q);
                assert_eq!(gl_order(n, q), expect);
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let text = "# three loops\nvertices: 1\narrows: a 1 1, b 1 1, c 1 1\npotential: +1 a b c, -1 a c b, +1 c c c\n";
        let (q, w) = parse_quiver(text).unwrap();
        assert_eq!(q.vertices(), 1);
        assert_eq!(q.arrows().len(), 3);
        assert_eq!(q.arrow_index("b"), Some(1));
        assert_eq!(w.terms().len(), 3);
        assert_eq!(w.terms()[0], PotentialTerm { coeff: 1, word: vec![0, 1, 2] });
        assert_eq!(w.terms()[1], PotentialTerm { coeff: -1, word: vec![0, 2, 1] });
        assert_eq!(w.terms()[2], PotentialTerm { coeff: 1, word: vec![2, 2, 2] });
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(parse_quiver("arrows: a 1 1").is_err());
        assert!(parse_quiver("vertices: 1\narrows: a 1 2").is_err());
        assert!(parse_quiver("vertices: 1\narrows: a 1 1, a 1 1").is_err());
        assert!(parse_quiver("vertices: 1\narrows: a 1 1\npotential: +1 zz").is_err());
        assert!(parse_quiver("vertices: 1\narrows: a 0 1").is_err());
        assert!(parse_quiver("vertices: 2\nedges: a 1 1").is_err());
        // Non-composable word on a two-vertex quiver.
        let bad = "vertices: 2\narrows: a 1 2, b 1 2\npotential: +1 a b";
        assert!(parse_quiver(bad).is_err());
        let good = "vertices: 2\narrows: a 1 2, b 2 1\npotential: +1 a b";
        assert!(parse_quiver(good).is_ok());
    }

    #[test]
    fn rep_space_one_loop_values() {
        let cfg = ExecCfg::default();
        let q1 = QuiverSpec::loops(&["c"]);
        // Zero potential: the count of all n x n matrices.
        let zero = Potential::zero();
        let total = rep_space_twisted_sum(&q1, &zero, &[2], 5, 1, &cfg).unwrap();
        assert_eq!(total.as_rational(), Some(qrat(625)));
        // Tr(c) over 1 x 1 matrices is the full character sum: 0.
        let tr_c = Potential::from_names(&q1, &[(1, &["c"])]).unwrap();
        assert!(rep_space_twisted_sum(&q1, &tr_c, &[1], 5, 1, &cfg).unwrap().is_zero());
        // Tr(c^2) over 1 x 1 matrices is the Gauss sum.
        let tr_c2 = Potential::from_names(&q1, &[(1, &["c", "c"])]).unwrap();
        assert_eq!(
            rep_space_twisted_sum(&q1, &tr_c2, &[1], 5, 1, &cfg).unwrap(),
            gauss_sum(5, 1).unwrap()
        );
        // And at level 2 with d = 3.
        let tr_c3 = Potential::from_names(&q1, &[(1, &["c", "c", "c"])]).unwrap();
        assert_eq!(
            rep_space_twisted_sum(&q1, &tr_c3, &[1], 7, 2, &cfg).unwrap(),
            power_character_sum(3, 7, 2).unwrap()
        );
    }

    #[test]
    fn rep_space_trace_of_matrix_power_splits() {
        // Sum over 2 x 2 matrices of psi(Tr(c^2)): rows and columns couple,
        // value = sum_{a,d,b,c} psi(a^2 + d^2 + 2bc)
        //       = gauss^2 * sum_{b,c} psi(2bc) = gauss^2 * q
        // (the bc-sum is q at any odd p: psi(2bc) sums to q for b = 0 and
        // to 0 otherwise).
        let cfg = ExecCfg::default();
        let q1 = QuiverSpec::loops(&["c"]);
        let tr_c2 = Potential::from_names(&q1, &[(1, &["c", "c"])]).unwrap();
        for p in [5u64, 7, 13] {
            let got = rep_space_twisted_sum(&q1, &tr_c2, &[2], p, 1, &cfg).unwrap();
            let g = gauss_sum(p, 1).unwrap();
            assert_eq!(got, g.mul(&g).scale(&qrat(p as i64)), "p={p}");
        }
    }

    #[test]
    fn rep_space_multi_vertex_shapes() {
        // Two vertices, arrows a: 1 -> 2 and b: 2 -> 1, gamma = (1, 2):
        // Tr(a b) over rectangular pairs. a is 2x1, b is 1x2; Tr(ab) = b.a
        // runs over all bilinear pairings: sum = q^(2*2 - ...) computed
        // directly against a hand enumeration.
        let cfg = ExecCfg::default();
        let (quiver, pot) =
            parse_quiver("vertices: 2\narrows: a 1 2, b 2 1\npotential: +1 a b").unwrap();
        let got = rep_space_twisted_sum(&quiver, &pot, &[1, 2], 3, 1, &cfg).unwrap();
        // By orthogonality: sum over a in F^2, b in F^2 of psi(<a, b>) = q^2.
        assert_eq!(got.as_rational(), Some(qrat(9)));
    }

    #[test]
    fn rep_space_budget() {
        let q3 = QuiverSpec::loops(&["a", "b", "c"]);
        let tight = ExecCfg { max_points: 100, threads: 1 };
        assert!(matches!(
            rep_space_twisted_sum(&q3, &Potential::zero(), &[2], 5, 1, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
