//! Continuous nondecreasing piecewise-linear time changes.
//!
//! One type carries every clock-like object in the crate: the positive-time
//! clock `C` and its discrete counterparts `C^n` (1-Lipschitz by
//! construction), and the sticky clock `a(t) = t + L(t)/γ` whose slopes are
//! at least one. Values are stored at breakpoints rather than as slopes so
//! that evaluation and inversion are exact at breakpoints: inverting swaps
//! the two coordinate arrays and never touches a quotient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeChange {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TimeChange {
    /// Builds a time change from matched breakpoint/value arrays.
    ///
    /// Breakpoints must start at 0 and increase strictly; values must be
    /// nondecreasing with a nonnegative start.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::Config(format!(
                "time change needs matched nonempty arrays, got {} breakpoints and {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::Config(format!("time change must start at t = 0, got {}", breakpoints[0])));
        }
        if values[0] < 0.0 {
            return Err(Error::Config(format!("value at zero must be nonnegative, got {}", values[0])));
        }
        for w in breakpoints.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(format!("breakpoints must increase strictly: {} then {}", w[0], w[1])));
            }
        }
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(Error::Config(format!("values must be nondecreasing: {} then {}", w[0], w[1])));
            }
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite breakpoint or value".into()));
        }
        Ok(TimeChange { breakpoints, values })
    }

    /// The identity clock on `[0, horizon]`.
    pub fn identity(horizon: f64) -> Result<Self> {
        TimeChange::new(vec![0.0, horizon], vec![0.0, horizon])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right end of the covered domain.
    pub fn domain_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at the right end of the domain.
    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Evaluates at `t ∈ [0, domain_end]`. Exact at breakpoints (stored
    /// values); linear in between, clamped to the segment's value range so
    /// rounding can never break monotonicity.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let seg = self.segment_of(t)?;
        Ok(self.interpolate(seg, t))
    }

    fn segment_of(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < 0.0 || t > self.domain_end() {
            return Err(Error::Horizon { t, horizon: self.domain_end() });
        }
        // partition_point: first index with breakpoint > t, so seg = idx - 1.
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        Ok(idx.saturating_sub(1).min(self.breakpoints.len().saturating_sub(2)))
    }

    fn interpolate(&self, seg: usize, t: f64) -> f64 {
        if self.breakpoints.len() == 1 {
            return self.values[0];
        }
        let (t0, t1) = (self.breakpoints[seg], self.breakpoints[seg + 1]);
        let (v0, v1) = (self.values[seg], self.values[seg + 1]);
        if t == t0 {
            return v0;
        }
        if t == t1 {
            return v1;
        }
        let frac = (t - t0) / (t1 - t0);
        (v0 + frac * (v1 - v0)).max(v0).min(v1)
    }

    /// Slope of segment `i`.
    pub fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    pub fn segments(&self) -> usize {
        self.breakpoints.len().saturating_sub(1)
    }

    /// Whether every segment satisfies `Δvalue ≤ Δt` (slopes in [0, 1]).
    ///
    /// Differences of nearby stored f64s are exact (Sterbenz), but the
    /// stored endpoints themselves are rounded sums, so the comparison
    /// allows one ulp of the breakpoint scale.
    pub fn is_one_lipschitz(&self) -> bool {
        (0..self.segments()).all(|i| {
            let dv = self.values[i + 1] - self.values[i];
            let dt = self.breakpoints[i + 1] - self.breakpoints[i];
            let slack = 4.0 * f64::EPSILON * self.breakpoints[i + 1].abs().max(1.0);
            dv <= dt + slack
        })
    }

    /// Whether every segment has strictly positive slope.
    pub fn is_strictly_increasing(&self) -> bool {
        (0..self.segments()).all(|i| self.values[i + 1] > self.values[i])
    }

    /// Exact piecewise-linear inverse: the graph with coordinates swapped.
    ///
    /// Fails on flat segments (the inverse would jump) and on a nonzero value
    /// at 0 (the inverse would not be defined from time 0).
    pub fn invert(&self) -> Result<TimeChange> {
        if !self.is_strictly_increasing() {
            let i = (0..self.segments()).find(|&i| self.values[i + 1] <= self.values[i]).unwrap();
            return Err(Error::NonInvertible(format!(
                "flat segment on [{}, {}]",
                self.breakpoints[i],
                self.breakpoints[i + 1]
            )));
        }
        if self.values[0] != 0.0 {
            return Err(Error::NonInvertible(format!("value at zero is {}, not 0", self.values[0])));
        }
        TimeChange::new(self.values.clone(), self.breakpoints.clone())
    }

    /// Largest deviation `|c₁ − c₂|` over `[0, horizon]`, evaluated on the
    /// union of both breakpoint sets (where the piecewise-linear difference
    /// attains its extrema). Both clocks must cover the horizon.
    pub fn sup_distance(&self, other: &TimeChange, horizon: f64) -> Result<f64> {
        for c in [self, other] {
            if c.domain_end() < horizon {
                return Err(Error::Horizon { t: horizon, horizon: c.domain_end() });
            }
        }
        let mut worst = 0.0f64;
        let mut probe = |t: f64| -> Result<()> {
            let d = (self.value_at(t)? - other.value_at(t)?).abs();
            if d > worst {
                worst = d;
            }
            Ok(())
        };
        for &t in self.breakpoints.iter().take_while(|&&t| t <= horizon) {
            probe(t)?;
        }
        for &t in other.breakpoints.iter().take_while(|&&t| t <= horizon) {
            probe(t)?;
        }
        probe(horizon)?;
        Ok(worst)
    }

    /// JSON form `{breakpoints, values}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "breakpoints": self.breakpoints, "values": self.values }).to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            breakpoints: Vec<f64>,
            values: Vec<f64>,
        }
        let r: Repr = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        TimeChange::new(r.breakpoints, r.values)
    }

    /// Monotone evaluation cursor for sampling the clock at increasing times
    /// without re-searching segments.
    pub fn cursor(&self) -> ClockCursor<'_> {
        ClockCursor { clock: self, seg: 0 }
    }
}

/// Amortized O(1) evaluation of a [`TimeChange`] at nondecreasing times.
pub struct ClockCursor<'a> {
    clock: &'a TimeChange,
    seg: usize,
}

impl ClockCursor<'_> {
    pub fn value_at(&mut self, t: f64) -> Result<f64> {
        let c = self.clock;
        if !t.is_finite() || t < 0.0 || t > c.domain_end() {
            return Err(Error::Horizon { t, horizon: c.domain_end() });
        }
        while self.seg + 2 < c.breakpoints.len() && c.breakpoints[self.seg + 1] <= t {
            self.seg += 1;
        }
        Ok(c.interpolate(self.seg.min(c.segments().saturating_sub(1)), t))
    }
}

/// Samples the composition `t ↦ path(clock(t))` on a fresh uniform grid.
///
/// Output cells sit at `k·sample_step` for every `k` with
/// `k·sample_step ≤ clock.domain_end()`. Values are exact path lookups — no
/// interpolation of path values ever happens. The clock must map every
/// sample time into the path's covered horizon.
pub fn compose_path_timechange(path: &GridPath, clock: &TimeChange, sample_step: f64) -> Result<GridPath> {
    if !(sample_step > 0.0) || !sample_step.is_finite() {
        return Err(Error::Config(format!("sample step must be positive, got {sample_step}")));
    }
    let end = clock.domain_end();
    let mut cursor = clock.cursor();
    let mut values = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * sample_step;
        if t > end {
            break;
        }
        values.push(path.evaluate(cursor.value_at(t)?)?);
        k += 1;
    }
    GridPath::new(sample_step, values)
}
