//! Exact motivic Donaldson-Thomas calculus for quivers with potential.
//!
//! Everything is computed in exact arithmetic: the value ring for exponential
//! sums is the cyclotomic field Q(zeta_p) with rational coordinates, series
//! coefficients are exact level-indexed sums, and every identity check is an
//! exact equality. Floats appear only as advisory approximations in reports.
//!
//! Module layout:
//! - [`ffield`]: prime fields, extension towers, trace, enumeration.
//! - [`cyclo`]: Q(zeta_p) arithmetic, Gauss sums, power character sums.
//! - [`lambda`]: Adams sequences, sigma operations, plethystic EXP/LOG.
//! - [`motive`]: the symbolic Tate-with-monodromy ring and its realization.
//! - [`quiver`]: quivers, potentials, GL orders, representation-space sums.
//! - [`classes`]: conjugacy classes of Mat_n(F_q) with centralizer orders.
//! - [`counts`]: commuting-variety, Hilbert-scheme and symmetric-power counts.
//! - [`weights`]: quasihomogeneity checker (exact rational feasibility).
//! - [`dt`]: partition functions, DT-invariant extraction, identity checks.
//! - [`report`]: check reports with exact values and a stable JSON schema.

pub mod cyclo;
pub mod dt;
pub mod ffield;
pub mod lambda;
pub mod motive;
pub mod quiver;
pub mod rat;
pub mod report;
pub mod weights;

pub use quiver::{classes, counts};

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: needs {needed} points, cap is {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error("level overflow: needs level {needed}, only {available} available")]
    LevelOverflow { needed: usize, available: usize },
    #[error("unsupported product: <a>*<b> with a,b >= 3 leaves the Tate-monodromic span")]
    UnsupportedProduct,
    #[error("constant term violation: {0}")]
    ConstantTerm(&'static str),
    #[error("parity violation: odd powers of L^(1/2) need p = 1 mod 4, got p = {0}")]
    Parity(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("backend inapplicable: {0}")]
    BackendInapplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Execution limits for the enumeration backends.
///
/// Budgets are explicit point-count caps, never time limits, so runs are
/// deterministic. `threads` sizes the worker pool used by the heavy counting
/// loops; results are identical for any thread count (exact commutative sums).
#[derive(Debug, Clone, Copy)]
pub struct ExecCfg {
    pub max_points: u64,
    pub threads: usize,
}

impl Default for ExecCfg {
    fn default() -> Self {
        ExecCfg { max_points: 1 << 36, threads: 1 }
    }
}

impl ExecCfg {
    /// Default budget, all available cores.
    pub fn parallel() -> Self {
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        ExecCfg { threads, ..ExecCfg::default() }
    }

    pub fn check_budget(&self, needed: u128) -> Result<()> {
        if needed > self.max_points as u128 {
            return Err(Error::BudgetExceeded { needed, cap: self.max_points });
        }
        Ok(())
    }
}

/// Split `[0, total)` into chunks, fold each (possibly on its own thread),
/// and merge the partial results in ascending chunk order.
///
/// The merge order is fixed, so any associative-commutative `merge` gives
/// results independent of the thread count.
pub fn parallel_fold<T, F, M>(total: u64, threads: usize, fold: F, merge: M) -> Option<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
    M: Fn(T, T) -> T,
{
    if total == 0 {
        return None;
    }
    let threads = threads.max(1).min(total as usize).min(512);
    if threads == 1 {
        return Some(fold(0, total));
    }
    let chunk = total.div_ceil(threads as u64);
    let parts: Vec<T> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads as u64)
            .map(|i| {
                let lo = i * chunk;
                let hi = (lo + chunk).min(total);
                let fold = &fold;
                scope.spawn(move || fold(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    parts.into_iter().reduce(&merge)
}
