//! End-to-end gate: every identity the library claims, checked exactly at
//! the sizes the tooling is built for. One test per claim; each prints a
//! single summary line on success and panics with context on any mismatch.

use quiverdt::classes::conj_classes_vec;
use quiverdt::counts::{
    commuting_count, commuting_twisted_count, sym_line_twisted_count, trace_pairing_sum, Backend,
};
use quiverdt::cyclo::{gauss_sum, power_character_sum, CyclotomicValue};
use quiverdt::dt;
use quiverdt::ffield::{FieldTower, Fq, TableField};
use quiverdt::lambda::{
    pleth_exp, pleth_log, sigma_list, sigma_n, LevelSeq, RationalLevels, TruncatedSeries,
};
use quiverdt::motive::MotiveClass;
use quiverdt::quiver::{gl_order, rep_space_twisted_sum, Potential, QuiverSpec};
use quiverdt::rat::{qrat, QInt, QRat};
use quiverdt::report::{ExactValue, Row};
use quiverdt::weights::parse_weighted;
use quiverdt::ExecCfg;

fn cyc(row_value: &ExactValue) -> &CyclotomicValue {
    match row_value {
        ExactValue::Cyclotomic(v) => v,
        ExactValue::Rational(v) => panic!("expected a cyclotomic entry, got {v}"),
    }
}

fn rat(row_value: &ExactValue) -> &QRat {
    match row_value {
        ExactValue::Rational(v) => v,
        ExactValue::Cyclotomic(v) => panic!("expected a rational entry, got {v}"),
    }
}

fn int(p: u64, v: i64) -> CyclotomicValue {
    CyclotomicValue::from_integer(p, v).unwrap()
}

/// The commuting-pair series equals the plethystic product form for
/// n <= 3 over F_2, F_3, F_5 (classes backend), with every n <= 2 cell
/// re-counted by brute force, including the 44/3 coefficient at q = 2.
#[test]
fn commuting_pairs_product_formula() {
    let cfg = ExecCfg::default();
    for q in [2u64, 3, 5] {
        let report = dt::check_feit_fine(q, 3, &cfg).unwrap();
        assert!(report.pass, "product formula fails over F_{q}");
        let (p, k0) = dt::prime_power_split(q).unwrap();
        for (n, l) in [(1usize, 1u32), (1, 2), (1, 3), (2, 1)] {
            let brute = commuting_count(n, p, k0 * l, Backend::Brute, &cfg).unwrap();
            let classes = commuting_count(n, p, k0 * l, Backend::Classes, &cfg).unwrap();
            assert_eq!(brute, classes, "backends disagree at n={n}, q={q}, level {l}");
        }
    }
    let report = dt::check_feit_fine(2, 3, &cfg).unwrap();
    let cell = report
        .rows
        .iter()
        .find(|r| r.n == 2 && r.k == 1)
        .expect("degree-2 cell present");
    let frozen = qrat(44) / qrat(3);
    assert_eq!(rat(&cell.lhs), &frozen);
    assert_eq!(rat(&cell.rhs), &frozen);
    println!("PASS commuting-pair product formula: n <= 3, q in {{2,3,5}}, brute-checked n <= 2");
}

fn rows_at(rows: &[Row], n: i64, k: u32) -> Vec<&Row> {
    rows.iter().filter(|r| r.n == n && r.k == k).collect()
}

/// Square twist over F_5: extracted invariants match the character-sum
/// form on the whole grid, with the frozen values 5, -5, -5, 25, 125, and
/// on every level-2 cell the residue condition holds and the value is the
/// n-independent 25.
#[test]
fn quadratic_twist_invariants_over_f5() {
    let cfg = ExecCfg::default();
    let report = dt::check_cmps(2, 5, 3, 3, Backend::Classes, &cfg).unwrap();
    assert!(report.pass);
    for (n, k, v) in [(1, 1, 5i64), (2, 1, -5), (3, 1, -5), (1, 2, 25), (1, 3, 125)] {
        let rows = rows_at(&report.rows, n, k);
        assert!(!rows.is_empty(), "missing cell ({n}, {k})");
        for row in rows {
            assert_eq!(cyc(&row.lhs), &int(5, v), "invariant at ({n}, {k})");
        }
    }
    // Deeper level budget so every n reaches level 2: each n <= 3 is a
    // square in F_25, so each cell carries the power-character row too,
    // and all of them equal 25.
    let wide = dt::check_cmps(2, 5, 3, 6, Backend::Classes, &cfg).unwrap();
    assert!(wide.pass);
    for n in 1..=3i64 {
        let rows = rows_at(&wide.rows, n, 2);
        assert_eq!(rows.len(), 2, "expected both routes at ({n}, 2)");
        for row in rows {
            assert_eq!(cyc(&row.lhs), &int(5, 25));
            assert_eq!(cyc(&row.rhs), &int(5, 25));
        }
    }
    println!("PASS square-twist invariants over F_5: grid n <= 3, frozen values, level-2 value 25");
}

/// Cube twist over F_13: the grid n <= 2, k <= 2 is exact, and the
/// n-independent power-character row appears exactly where n is a cube
/// (n = 1 at every level; n = 2 is not a cube in F_13 or F_169).
#[test]
fn cubic_twist_invariants_over_f13() {
    let cfg = ExecCfg::default();
    let report = dt::check_cmps(3, 13, 2, 4, Backend::Classes, &cfg).unwrap();
    assert!(report.pass);
    for k in 1..=4u32 {
        assert_eq!(rows_at(&report.rows, 1, k).len(), 2, "n=1 carries both routes at level {k}");
    }
    for k in 1..=2u32 {
        let rows = rows_at(&report.rows, 2, k);
        assert_eq!(rows.len(), 1, "n=2 is not a cube at level {k}");
        let g = gauss_sum(13, k).unwrap();
        let expected = g.mul(&power_character_sum(3, 13, k).unwrap());
        assert_ne!(cyc(&rows[0].lhs), &expected, "cube form must fail at n=2, level {k}");
    }
    println!("PASS cube-twist invariants over F_13: n <= 2, k <= 2, cube-residue rows exact");
}

/// Summing the character over all of Mat_2(F_5)^3 with the three-loop
/// potential a[b,c] + c^2 equals 5^4 times the twisted commuting-pair
/// count: the linear variable integrates out exactly.
#[test]
fn triple_enumeration_reduces_to_commuting_pairs() {
    let cfg = ExecCfg::parallel();
    let (quiver, w) = dt::three_loop_potential(2);
    let lhs = rep_space_twisted_sum(&quiver, &w, &[2], 5, 1, &cfg).unwrap();
    let two_loop = QuiverSpec::loops(&["b", "c"]);
    let twist = Potential::from_names(&two_loop, &[(1, &["c", "c"][..])]).unwrap();
    let pairs = commuting_twisted_count(2, 5, 1, &twist, Backend::Classes, &cfg).unwrap();
    let rhs = int(5, 625).mul(&pairs);
    assert_eq!(lhs, rhs);
    println!("PASS triple enumeration over Mat_2(F_5)^3 equals 5^4 x twisted commuting pairs");
}

/// The two-monomial family x^a t + x^b: reduction holds exactly for all
/// 1 <= a, b <= 4, p in {3, 5}, k <= 2, and the weight certificate exists
/// precisely when b >= a.
#[test]
fn monomial_family_dimensional_reduction() {
    let cfg = ExecCfg::default();
    let xp = |e: u32| if e == 1 { "x".to_string() } else { format!("x^{e}") };
    for a in 1..=4u32 {
        for b in 1..=4u32 {
            let text = format!("{}*t + {}", xp(a), xp(b));
            let f = parse_weighted(&text).unwrap();
            for p in [3u64, 5] {
                let report = dt::check_dimred(&f, p, 2, &cfg).unwrap();
                assert!(report.pass, "reduction fails for {text} over F_{p}");
                assert_eq!(
                    report.params["quasihomogeneous"],
                    (b >= a).to_string(),
                    "weight flag wrong for {text}"
                );
            }
        }
    }
    println!("PASS monomial family x^a t + x^b: exact for a,b <= 4, p in {{3,5}}, k <= 2");
}

/// Symmetric powers of the weighted line: the Newton recurrence applied to
/// the power-character values matches the direct count over monic
/// polynomials for n <= 5, d <= 4, p in {5, 7}, k <= 2; and the square of
/// the half Lefschetz class vanishes, symbolically and realized.
#[test]
fn symmetric_powers_match_newton_sigma() {
    let cfg = ExecCfg::parallel();
    for d in 1..=4u64 {
        for p in [5u64, 7] {
            let base = LevelSeq::generate(10, |k| power_character_sum(d, p, k)).unwrap();
            for n in 1..=5usize {
                let sig = sigma_n(&base, n).unwrap();
                for k in 1..=2u32 {
                    let lhs = sig.at_level(k).unwrap();
                    let rhs = sym_line_twisted_count(d, n, p, k, &cfg).unwrap();
                    assert_eq!(lhs, &rhs, "d={d}, p={p}, n={n}, k={k}");
                }
            }
        }
    }
    let half = MotiveClass::l_half();
    assert_eq!(sigma_n(&half, 2).unwrap(), MotiveClass::zero());
    let realized = half.realize_levels(5, 6).unwrap();
    let square = sigma_n(&realized, 2).unwrap();
    for k in 1..=square.len() as u32 {
        assert_eq!(square.at_level(k).unwrap(), &CyclotomicValue::zero(5).unwrap());
    }
    println!("PASS symmetric powers: Newton sigma = direct count, n <= 5, d <= 4, p in {{5,7}}");
}

fn motive_pow(base: &MotiveClass, e: usize) -> MotiveClass {
    let mut acc = MotiveClass::one();
    for _ in 0..e {
        acc = acc.mul(base).unwrap();
    }
    acc
}

/// Ring-level identities: EXP and LOG invert each other to order 6 on
/// sampled series, sigma is additive, and sigma^m sends (-x)^n to
/// (-x)^(mn), symbolically and after realization over F_5.
#[test]
fn lambda_ring_exp_log_and_sigma_identities() {
    // EXP then LOG on a sampled series with the level profile floor(6/n).
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 17) as i64 - 8
    };
    let mut coeffs: Vec<RationalLevels> = vec![LevelSeq::new(vec![QRat::from(QInt::from(0)); 6])];
    for n in 1..=6usize {
        coeffs.push(LevelSeq::new((0..6 / n).map(|_| qrat(next())).collect()));
    }
    let s = TruncatedSeries::new(coeffs).unwrap();
    let z = pleth_exp(&s).unwrap();
    let back = pleth_log(&z).unwrap();
    for n in 1..=6usize {
        assert_eq!(back.coeff(n).unwrap(), s.coeff(n).unwrap(), "LOG(EXP(S)) at T^{n}");
    }
    let z2 = pleth_exp(&back).unwrap();
    for n in 0..=6usize {
        let a = z.coeff(n).unwrap();
        let b = z2.coeff(n).unwrap();
        for k in 1..=a.len().min(b.len()) as u32 {
            assert_eq!(a.at_level(k).unwrap(), b.at_level(k).unwrap(), "EXP(LOG(Z)) at T^{n}");
        }
    }

    // sigma^n(a + b) = sum of sigma^i(a) sigma^(n-i)(b) in the symbolic ring.
    let a = MotiveClass::l_half();
    let b = MotiveClass::lefschetz().add(&MotiveClass::one());
    for n in 1..=4usize {
        let lhs = sigma_n(&a.add(&b), n).unwrap();
        let sa = sigma_list(&a, n).unwrap();
        let sb = sigma_list(&b, n).unwrap();
        let mut rhs = MotiveClass::zero();
        for i in 0..=n {
            rhs = rhs.add(&sa[i].mul(&sb[n - i]).unwrap());
        }
        assert_eq!(lhs, rhs, "sigma additivity at n={n}");
    }

    // sigma^m((-x)^n) = (-x)^(mn).
    let neg_x = MotiveClass::l_half().neg();
    for n in 1..=3usize {
        let base = motive_pow(&neg_x, n);
        let sigmas = sigma_list(&base, 4).unwrap();
        for m in 1..=4usize {
            let expected = motive_pow(&neg_x, m * n);
            assert_eq!(sigmas[m], expected, "sigma^{m} of (-x)^{n}");
            assert_eq!(
                sigmas[m].realize_levels(5, 3).unwrap(),
                expected.realize_levels(5, 3).unwrap(),
                "realized sigma^{m} of (-x)^{n}"
            );
        }
    }
    println!("PASS lambda-ring identities: EXP/LOG inverse to order 6, sigma additive, line powers");
}

/// Framed counts factor: the full framed partition data at T^n for n <= 2
/// over F_5 equals the convolution of the framed-cyclic terms with the
/// unframed invariant terms.
#[test]
fn framed_count_factors_through_invariants() {
    let cfg = ExecCfg::parallel();
    let report = dt::check_wallcross(5, 2, 2, &cfg).unwrap();
    assert!(report.pass);
    for n in 0..=2i64 {
        assert_eq!(rows_at(&report.rows, n, 1).len(), 1, "degree {n} row present");
    }
    println!("PASS framed/unframed factorization: T-coefficients equal for n <= 2 over F_5");
}

/// The deformed preprojective potential a[b,c] - cb^2 over F_5: the
/// counting series matches its exponential form, and the extracted
/// invariants are the level Gauss sums, independent of n.
#[test]
fn deformed_preprojective_gauss_invariants() {
    let cfg = ExecCfg::default();
    let two_loop = QuiverSpec::loops(&["b", "c"]);
    let w = Potential::from_names(&two_loop, &[(-1, &["c", "b", "b"][..])]).unwrap();
    let report = dt::check_preprojective(&w, 5, 2, 4, Backend::Classes, &cfg).unwrap();
    assert!(report.pass);
    // Each cell appears twice: the series comparison first, then the
    // extracted-invariant row for the same (n, k).
    for n in 1..=2i64 {
        for k in 1..=2u32 {
            let g = gauss_sum(5, k).unwrap();
            let pair = rows_at(&report.rows, n, k);
            assert_eq!(pair.len(), 2, "series and invariant rows at ({n}, {k})");
            assert_eq!(cyc(&pair[1].lhs), &g, "invariant is the Gauss sum at n={n}, k={k}");
            assert_eq!(cyc(&pair[1].rhs), &g);
        }
    }
    println!("PASS deformed preprojective a[b,c] - cb^2: invariants = Gauss sums, n-uniform");
}

/// Ground-level structure: class sizes partition the matrix space, the
/// general-linear order formula matches brute force, and the trace pairing
/// is orthogonal, exhaustively over small sizes.
#[test]
fn class_partition_gl_order_and_orthogonality() {
    let cfg = ExecCfg::default();
    for q in [2u64, 3, 5] {
        let tower = FieldTower::new(q, 1).unwrap();
        let f = TableField::new(&tower).unwrap();
        for n in 1..=3usize {
            let classes = conj_classes_vec(&f, n).unwrap();
            let mut mass = QInt::from(0);
            let gl = gl_order(n, q);
            for c in &classes {
                mass += &c.size;
                assert_eq!(&c.size * &c.centralizer_order, gl, "orbit relation at n={n}, q={q}");
            }
            assert_eq!(mass, QInt::from(q).pow((n * n) as u32), "partition at n={n}, q={q}");
        }
    }
    // Invertible-count oracle for the order formula, including one
    // extension field.
    for q in [2u64, 3, 4, 5] {
        let (p, k) = dt::prime_power_split(q).unwrap();
        let tower = FieldTower::new(p, k as usize).unwrap();
        let f = TableField::new(&tower).unwrap();
        let q32 = q as u32;
        let mut count1 = 0u64;
        for x in 0..q32 {
            if x != 0 {
                count1 += 1;
            }
        }
        assert_eq!(QInt::from(count1), gl_order(1, q));
        let mut count2 = 0u64;
        for a in 0..q32 {
            for b in 0..q32 {
                for c in 0..q32 {
                    for d in 0..q32 {
                        if f.sub(f.mul(a, d), f.mul(b, c)) != 0 {
                            count2 += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(QInt::from(count2), gl_order(2, q));
    }
    // Character orthogonality, every matrix M checked.
    for p in [3u64, 5] {
        let tower = FieldTower::new(p, 1).unwrap();
        let f = TableField::new(&tower).unwrap();
        for n in 1..=2usize {
            let nn = n * n;
            let total = (p as u64).pow(nn as u32);
            for code in 0..total {
                let mut m = vec![0u32; nn];
                let mut rest = code;
                for e in m.iter_mut() {
                    *e = (rest % p) as u32;
                    rest /= p;
                }
                let sum = trace_pairing_sum(&f, &m, n, &cfg).unwrap();
                let expected =
                    if code == 0 { int(p, total as i64) } else { CyclotomicValue::zero(p).unwrap() };
                assert_eq!(sum, expected, "pairing at p={p}, n={n}, M code {code}");
            }
        }
    }
    println!("PASS structural counts: class partition, order formula vs brute force, orthogonality");
}
