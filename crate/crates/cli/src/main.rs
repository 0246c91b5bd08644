//! Command-line front end: runs the identity checks at chosen sizes and
//! emits machine-readable reports.
//!
//! Exit codes: 0 when every report passes, 1 when a row disagrees, 2 for
//! usage or precondition errors, 3 when the point budget was exceeded
//! (with a partial report when any rows finished).

use clap::{Args, Parser, Subcommand};
use quiverdt::classes::{conj_classes_vec, ConjClass};
use quiverdt::counts::Backend;
use quiverdt::dt;
use quiverdt::ffield::{FieldTower, TableField, TowerField};
use quiverdt::quiver::{gl_order, parse_quiver, Potential, QuiverSpec};
use quiverdt::rat::QInt;
use quiverdt::report::{CheckReport, ExactValue, Row};
use quiverdt::weights::{expand_quiver_potential, parse_weighted};
use quiverdt::{Error, ExecCfg};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "quiverdt",
    version,
    about = "Exact finite-field checks for motivic DT identities of quivers with potential"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunOpts {
    /// Point-count cap for the enumeration loops.
    #[arg(long, default_value_t = 1u64 << 36)]
    budget: u64,
    /// Worker threads for the heavy counts; results are thread-count
    /// independent.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json, csv, or pretty.
    #[arg(long, default_value = "json")]
    format: String,
    /// Keep per-row wall-clock milliseconds. Off by default so identical
    /// runs produce identical bytes.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// DT invariants of the power potential Tr(C^d) on the commuting
    /// variety versus the closed character-sum form.
    Cmps {
        /// Power in the twist Tr(C^d).
        #[arg(long, default_value_t = 2)]
        d: u64,
        /// Field characteristic; must be a prime with p = 1 mod 4.
        #[arg(long, default_value_t = 5)]
        p: u64,
        /// Largest T-degree of the partition function.
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        /// Level budget: the T^n coefficient carries levels k <= kmax/n.
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Counting backend: classes or brute.
        #[arg(long, default_value = "classes")]
        backend: String,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Commuting-variety count series versus its plethystic product form,
    /// one report per field size.
    FeitFine {
        /// Comma-separated prime powers.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        q: Vec<u64>,
        /// Largest T-degree; levels follow n*k <= nmax.
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Exponential-sum dimensional reduction for a function linear in its
    /// fiber variables.
    Dimred {
        /// Polynomial text such as "x^2*t + x"; variables starting with
        /// 't' are fiber coordinates.
        #[arg(long, conflicts_with_all = ["quiver", "preset"])]
        poly: Option<String>,
        /// Quiver file in the text format; its potential trace is
        /// expanded over nmax x nmax matrices.
        #[arg(long, conflicts_with = "preset")]
        quiver: Option<PathBuf>,
        /// Built-in input; "quiver" is the three-loop Tr(A[B,C] + C^d).
        #[arg(long)]
        preset: Option<String>,
        /// Arrows whose matrix entries become fiber variables when
        /// expanding a quiver input.
        #[arg(long, value_delimiter = ',', default_value = "a")]
        fiber: Vec<String>,
        /// Power in the preset potential.
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 5)]
        p: u64,
        /// Matrix size for quiver input.
        #[arg(long, default_value_t = 2)]
        nmax: usize,
        /// One row per level k <= kmax.
        #[arg(long, default_value_t = 1)]
        kmax: u32,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Framed wall-crossing for the three-loop quiver at level 1: direct
    /// framed enumeration against the cyclic-times-unframed product.
    Wallcross {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        nmax: usize,
        /// Power in the potential a[b,c] + c^d.
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Deformed preprojective potential a[b,c] + W'(b,c): commuting-count
    /// series against the abelian-shadow exponential.
    Preproj {
        /// W' as signed words in b, c: e.g. "-1 c b b" or "+1 c c c".
        #[arg(long, default_value = "-1 c b b", allow_hyphen_values = true)]
        wprime: String,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        nmax: usize,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value = "classes")]
        backend: String,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Sigma operations on the d-th power character sum against direct
    /// symmetric-power point counts.
    SigmaOracle {
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Conjugacy classes of Mat_n(F_q): one row per class checking
    /// size * centralizer = |GL_n|, plus the mass row summing to q^(n^2).
    Classes {
        /// Matrix size.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Field size (prime power).
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[command(flatten)]
        run: RunOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}

fn run(cmd: Cmd) -> quiverdt::Result<i32> {
    let (mut reports, table, run) = dispatch(cmd)?;
    if !run.timings {
        for r in &mut reports {
            for row in &mut r.rows {
                row.ms = 0;
            }
        }
    }
    let rendered = match run.format.as_str() {
        "json" => render_json(&reports),
        "csv" => render_csv(&reports),
        "pretty" => render_pretty(&reports, table.as_deref()),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown format {other:?}, expected json, csv, or pretty"
            )))
        }
    };
    match &run.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    let partial = reports.iter().any(|r| r.partial);
    let pass = reports.iter().all(|r| r.pass);
    Ok(if partial {
        3
    } else if pass {
        0
    } else {
        1
    })
}

fn dispatch(cmd: Cmd) -> quiverdt::Result<(Vec<CheckReport>, Option<String>, RunOpts)> {
    match cmd {
        Cmd::Cmps { d, p, nmax, kmax, backend, run } => {
            let cfg = exec_cfg(&run);
            let backend = Backend::parse(&backend)?;
            let report = dt::check_cmps(d, p, nmax, kmax, backend, &cfg)?;
            Ok((vec![report], None, run))
        }
        Cmd::FeitFine { q, nmax, run } => {
            let cfg = exec_cfg(&run);
            if q.is_empty() {
                return Err(Error::InvalidParameter("need at least one field size".into()));
            }
            let mut reports = Vec::with_capacity(q.len());
            for qi in q {
                reports.push(dt::check_feit_fine(qi, nmax, &cfg)?);
            }
            Ok((reports, None, run))
        }
        Cmd::Dimred { poly, quiver, preset, fiber, d, p, nmax, kmax, run } => {
            let cfg = exec_cfg(&run);
            let f = match (poly, quiver, preset) {
                (Some(text), None, None) => parse_weighted(&text)?,
                (None, Some(path), None) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Parse(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let (qv, pot) = parse_quiver(&text)?;
                    let fiber_refs: Vec<&str> = fiber.iter().map(|s| s.as_str()).collect();
                    expand_quiver_potential(&qv, &pot, nmax, &fiber_refs)?
                }
                (None, None, Some(name)) if name == "quiver" => {
                    let (qv, pot) = dt::three_loop_potential(d);
                    expand_quiver_potential(&qv, &pot, nmax, &["a"])?
                }
                (None, None, Some(other)) => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown preset {other:?}, the built-in preset is \"quiver\""
                    )))
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "dimred needs exactly one of --poly, --quiver, --preset".into(),
                    ))
                }
            };
            let report = dt::check_dimred(&f, p, kmax, &cfg)?;
            Ok((vec![report], None, run))
        }
        Cmd::Wallcross { p, nmax, d, run } => {
            let cfg = exec_cfg(&run);
            let report = dt::check_wallcross(p, nmax, d, &cfg)?;
            Ok((vec![report], None, run))
        }
        Cmd::Preproj { wprime, p, nmax, kmax, backend, run } => {
            let cfg = exec_cfg(&run);
            let backend = Backend::parse(&backend)?;
            let w = parse_two_loop_potential(&wprime)?;
            let report = dt::check_preprojective(&w, p, nmax, kmax, backend, &cfg)?;
            Ok((vec![report], None, run))
        }
        Cmd::SigmaOracle { d, p, nmax, kmax, run } => {
            let cfg = exec_cfg(&run);
            let report = dt::check_sigma_oracle(d, p, nmax, kmax, &cfg)?;
            Ok((vec![report], None, run))
        }
        Cmd::Classes { n, q, run } => {
            let (report, table) = classes_report(n, q)?;
            Ok((vec![report], Some(table), run))
        }
    }
}

fn exec_cfg(run: &RunOpts) -> ExecCfg {
    ExecCfg { max_points: run.budget, threads: run.threads.max(1) }
}

/// Signed words in the loops b, c: "-1 c b b, +1 c c". "0" is the zero
/// potential.
fn parse_two_loop_potential(text: &str) -> quiverdt::Result<Potential> {
    let t = text.trim();
    if t == "0" {
        return Ok(Potential::zero());
    }
    let quiver = QuiverSpec::loops(&["b", "c"]);
    let mut terms: Vec<(i64, Vec<&str>)> = Vec::new();
    for item in t.split(',') {
        let parts: Vec<&str> = item.split_whitespace().collect();
        if parts.len() < 2 {
            return Err(Error::Parse(format!(
                "potential term needs 'coeff arrow arrow ...', got {item:?}"
            )));
        }
        let coeff: i64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {:?}", parts[0])))?;
        terms.push((coeff, parts[1..].to_vec()));
    }
    let borrowed: Vec<(i64, &[&str])> = terms.iter().map(|(c, w)| (*c, w.as_slice())).collect();
    Potential::from_names(&quiver, &borrowed)
}

fn classes_report(n: usize, q: u64) -> quiverdt::Result<(CheckReport, String)> {
    if n == 0 {
        return Err(Error::InvalidParameter("class listing needs n >= 1".into()));
    }
    let (p, k) = dt::prime_power_split(q)?;
    let tower = FieldTower::new(p, k as usize)?;
    let classes = match TableField::new(&tower) {
        Ok(f) => conj_classes_vec(&f, n)?,
        Err(_) => conj_classes_vec(&TowerField::new(&tower), n)?,
    };
    let gl = gl_order(n, q);
    let mut report = CheckReport::new("classes");
    report.param("n", n).param("q", q).param("count", classes.len());
    let mut mass = QInt::from(0);
    for (i, c) in classes.iter().enumerate() {
        mass += &c.size;
        let lhs = ExactValue::Rational((&c.size * &c.centralizer_order).into());
        let rhs = ExactValue::Rational(gl.clone().into());
        report.push(Row::new(i as i64, c.dim_z as u32, lhs, rhs));
    }
    let total = ExactValue::Rational(mass.into());
    let expected = ExactValue::Rational(QInt::from(q).pow((n * n) as u32).into());
    report.push(Row::new(-1, 0, total, expected));
    report.finish();
    let table = render_class_table(&classes);
    Ok((report, table))
}

fn render_class_table(classes: &[ConjClass]) -> String {
    let mut rows: Vec<[String; 4]> = Vec::with_capacity(classes.len() + 1);
    rows.push([
        "invariant factors".into(),
        "dim Z".into(),
        "size".into(),
        "centralizer".into(),
    ]);
    for c in classes {
        let factors = c
            .factors
            .iter()
            .map(|(poly, lambda)| format!("({})^{:?}", fmt_poly(poly), lambda))
            .collect::<Vec<_>>()
            .join(" ");
        rows.push([
            factors,
            c.dim_z.to_string(),
            c.size.to_string(),
            c.centralizer_order.to_string(),
        ]);
    }
    let mut width = [0usize; 4];
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let _ = writeln!(
            out,
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            row[0],
            row[1],
            row[2],
            row[3],
            w0 = width[0],
            w1 = width[1],
            w2 = width[2],
            w3 = width[3]
        );
    }
    out
}

/// Monic polynomial from low-first coefficients over a prime field,
/// rendered in t.
fn fmt_poly(coeffs: &[u32]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        let part = match (c, i) {
            (_, 0) => format!("{c}"),
            (1, _) => var,
            _ => format!("{c}*{var}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn render_json(reports: &[CheckReport]) -> String {
    let body = if reports.len() == 1 {
        serde_json::to_string(&reports[0]).expect("report serializes")
    } else {
        serde_json::to_string(reports).expect("reports serialize")
    };
    body + "\n"
}

fn render_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check,n,k,lhs,rhs,exact,equal,ms\n");
    for r in reports {
        for row in &r.rows {
            let exact = row.lhs.float_is_exact() && row.rhs.float_is_exact();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.check,
                row.n,
                row.k,
                row.lhs.approx(),
                row.rhs.approx(),
                exact,
                row.equal,
                row.ms
            );
        }
    }
    out
}

fn render_pretty(reports: &[CheckReport], table: Option<&str>) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "== {} ==", r.check);
        for (k, v) in &r.params {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let mut cells: Vec<[String; 6]> = Vec::with_capacity(r.rows.len() + 1);
        cells.push([
            "n".into(),
            "k".into(),
            "lhs".into(),
            "rhs".into(),
            "equal".into(),
            "ms".into(),
        ]);
        for row in &r.rows {
            cells.push([
                row.n.to_string(),
                row.k.to_string(),
                row.lhs.to_string(),
                row.rhs.to_string(),
                row.equal.to_string(),
                row.ms.to_string(),
            ]);
        }
        let mut width = [0usize; 6];
        for row in &cells {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        for row in &cells {
            let _ = writeln!(
                out,
                "  {:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}  {:>w4$}  {:>w5$}",
                row[0],
                row[1],
                row[2],
                row[3],
                row[4],
                row[5],
                w0 = width[0],
                w1 = width[1],
                w2 = width[2],
                w3 = width[3],
                w4 = width[4],
                w5 = width[5]
            );
        }
        let verdict = if r.partial {
            "PARTIAL (budget exceeded)"
        } else if r.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(out, "  {verdict}");
    }
    if let Some(t) = table {
        out.push('\n');
        out.push_str(t);
    }
    out
}
