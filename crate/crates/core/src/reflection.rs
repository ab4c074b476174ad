//! Skorohod reflection of a grid path at the running infimum.
//!
//! For a càdlàg `f` with nonnegative jumps, the pair `(r, l)` with
//! `l(t) = sup_{s≤t}(−f(s) ∨ 0)` and `r = f + l` is the unique one with `r`
//! nonnegative and `l` continuous, nondecreasing, growing only where `r = 0`.
//! On a grid both components come out of a single left-to-right pass, and the
//! defining axioms hold exactly in f64 arithmetic — `r` hits zero as a stored
//! `0.0`, not within a tolerance — which is what lets the clock construction
//! downstream use exact comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPath;

/// Output of [`reflect`]: the reflected path and its regulator.
///
/// `l` is stored at grid resolution; consumers treat it as linearly
/// interpolated between grid times, the minimal continuous extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPair {
    pub r: GridPath,
    pub l: GridPath,
    pub source_mesh: f64,
}

/// Axiom check outcome: either a pass or the first violated axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ReflectionVerdict {
    Pass,
    /// `r − (f + l)` exceeds the tolerance at some cell.
    DecompositionViolated { cell: usize, residual: f64 },
    /// `r` takes a negative value.
    NonnegativityViolated { cell: usize, value: f64 },
    /// `l` decreases.
    MonotonicityViolated { cell: usize },
    /// `l(0) ≠ 0` although `f(0) ≥ 0`.
    StartViolated { l0: f64 },
    /// `l` grows on a cell where `r` is not exactly zero.
    GrowthSupportViolated { cell: usize, r_value: f64 },
}

impl ReflectionVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, ReflectionVerdict::Pass)
    }
}

/// Reflects `f` at its running infimum: `l_k = max_{j≤k}(−f_j ∨ 0)`,
/// `r = f + l`. Single pass, O(length).
pub fn reflect(f: &GridPath) -> ReflectionPair {
    let n = f.len();
    let mut l = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut running = 0.0f64;
    for &v in f.values() {
        if -v > running {
            running = -v;
        }
        l.push(running);
        r.push(v + running);
    }
    ReflectionPair {
        r: GridPath::new(f.step(), r).expect("reflection preserves grid validity"),
        l: GridPath::new(f.step(), l).expect("reflection preserves grid validity"),
        source_mesh: f.step(),
    }
}

/// Verifies the reflection axioms for an arbitrary candidate pair.
///
/// The decomposition `r = f + l` is checked cellwise within `tolerance`; the
/// growth-support condition (`l` grows ⇒ `r = 0`) is exact, since `l` comes
/// out of max/comparison operations that introduce no rounding.
pub fn check_reflection_axioms(f: &GridPath, pair: &ReflectionPair, tolerance: f64) -> Result<ReflectionVerdict> {
    if pair.r.step() != f.step() || pair.l.step() != f.step() || pair.r.len() != f.len() || pair.l.len() != f.len() {
        return Err(Error::Config("reflection pair and source path use different grids".into()));
    }
    let (fv, rv, lv) = (f.values(), pair.r.values(), pair.l.values());
    if fv[0] >= 0.0 && lv[0] != 0.0 {
        return Ok(ReflectionVerdict::StartViolated { l0: lv[0] });
    }
    for k in 0..fv.len() {
        let residual = (rv[k] - (fv[k] + lv[k])).abs();
        if residual > tolerance {
            return Ok(ReflectionVerdict::DecompositionViolated { cell: k, residual });
        }
        if rv[k] < 0.0 {
            return Ok(ReflectionVerdict::NonnegativityViolated { cell: k, value: rv[k] });
        }
        if k > 0 {
            if lv[k] < lv[k - 1] {
                return Ok(ReflectionVerdict::MonotonicityViolated { cell: k });
            }
            if lv[k] > lv[k - 1] && rv[k] != 0.0 {
                return Ok(ReflectionVerdict::GrowthSupportViolated { cell: k, r_value: rv[k] });
            }
        }
    }
    Ok(ReflectionVerdict::Pass)
}
