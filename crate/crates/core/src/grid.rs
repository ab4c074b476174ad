//! Piecewise-constant càdlàg paths on uniform grids.
//!
//! A [`GridPath`] holds one value per grid cell `[k·step, (k+1)·step)` and is
//! evaluated with the càdlàg convention: right-continuous at grid times. All
//! solvers in this crate exchange paths in this form, so cell lookup is kept
//! exact — the cell index is the largest `k` with `k·step ≤ t` under f64
//! products, never a raw division that can land one cell short.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A càdlàg path constant on the cells of a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    step: f64,
    values: Vec<f64>,
    #[serde(skip, default)]
    origin_value_left_limit: Option<f64>,
}

impl GridPath {
    /// Builds a path from its mesh and per-cell values.
    ///
    /// The value at `0−` defaults to `values[0]`; it is only consulted when a
    /// path seeds a discretization scheme.
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(Error::Config("grid path needs at least one cell".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite path value {bad}")));
        }
        Ok(GridPath { step, values, origin_value_left_limit: None })
    }

    /// Same as [`GridPath::new`] with an explicit value at `0−`.
    pub fn with_origin_left_limit(step: f64, values: Vec<f64>, at_zero_minus: f64) -> Result<Self> {
        let mut p = Self::new(step, values)?;
        p.origin_value_left_limit = Some(at_zero_minus);
        Ok(p)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: the constructor rejects empty value vectors.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at `0−`, used only for scheme seeding.
    pub fn origin_value_left_limit(&self) -> f64 {
        self.origin_value_left_limit.unwrap_or(self.values[0])
    }

    /// First time not covered by the path: `len · step`.
    pub fn horizon(&self) -> f64 {
        self.values.len() as f64 * self.step
    }

    /// Time of the start of cell `k`.
    pub fn time_of(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    /// Index of the cell containing `t`: the largest `k` with `k·step ≤ t`.
    ///
    /// The quotient `t / step` can round across a cell boundary, so the
    /// candidate index is corrected against the actual f64 products. This is
    /// what makes evaluation right-continuous at every representable grid
    /// time, including non-dyadic meshes.
    pub fn cell_index(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < 0.0 || t >= self.horizon() {
            return Err(Error::Horizon { t, horizon: self.horizon() });
        }
        let last = self.values.len() - 1;
        let mut k = ((t / self.step) as usize).min(last);
        while k < last && (k + 1) as f64 * self.step <= t {
            k += 1;
        }
        while k > 0 && k as f64 * self.step > t {
            k -= 1;
        }
        Ok(k)
    }

    /// Path value at time `t` (càdlàg: right-continuous at grid times).
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.cell_index(t)?])
    }

    /// The running infimum capped at zero: `k ↦ min(0, min_{j≤k} values[j])`.
    pub fn running_infimum(&self) -> GridPath {
        let mut out = Vec::with_capacity(self.values.len());
        let mut m = 0.0f64;
        for &v in &self.values {
            if v < m {
                m = v;
            }
            out.push(m);
        }
        GridPath { step: self.step, values: out, origin_value_left_limit: None }
    }

    /// Cellwise map, preserving the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridPath> {
        GridPath::new(self.step, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Writes the path as CSV with header `t,value`, one row per cell.
    ///
    /// Values are written in shortest round-trip decimal form, so reading the
    /// file back reproduces the exact binary64 payload.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.time_of(k), v)?;
        }
        Ok(())
    }

    /// Reads a path written by [`GridPath::write_csv`].
    ///
    /// The mesh is recovered from the second row's time stamp, which is the
    /// exact f64 `step` (since `1·step == step`). Single-cell files are
    /// rejected because they do not determine the mesh.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut step = None;
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 {
                if line != "t,value" {
                    return Err(Error::Format(format!("expected header `t,value`, got `{line}`")));
                }
                continue;
            }
            let (t_str, v_str) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad csv row `{line}`")))?;
            let t: f64 = t_str.parse().map_err(|_| Error::Format(format!("bad time `{t_str}`")))?;
            let v: f64 = v_str.parse().map_err(|_| Error::Format(format!("bad value `{v_str}`")))?;
            if values.len() == 1 {
                step = Some(t);
            }
            values.push(v);
        }
        let step = step.ok_or_else(|| Error::Format("csv has fewer than two cells; mesh is undetermined".into()))?;
        GridPath::new(step, values)
    }

    /// JSON form `{step, values}` (exact binary64 round trip via serde_json).
    pub fn to_json(&self) -> String {
        serde_json::json!({ "step": self.step, "values": self.values }).to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            step: f64,
            values: Vec<f64>,
        }
        let r: Repr = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        GridPath::new(r.step, r.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_first_cell() {
        let p = GridPath::new(0.5, vec![1.0, 3.0]).unwrap();
        assert_eq!(p.evaluate(0.49).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_right_continuous_at_breakpoint() {
        let p = GridPath::new(0.5, vec![1.0, 3.0]).unwrap();
        assert_eq!(p.evaluate(0.5).unwrap(), 3.0);
    }

    #[test]
    fn evaluate_out_of_horizon() {
        let p = GridPath::new(0.5, vec![1.0, 3.0]).unwrap();
        assert!(matches!(p.evaluate(1.0), Err(Error::Horizon { .. })));
        assert!(matches!(p.evaluate(-0.1), Err(Error::Horizon { .. })));
    }

    #[test]
    fn evaluate_exact_on_awkward_mesh() {
        // 0.3/0.1 rounds below 3 in f64; the corrected index must not.
        let p = GridPath::new(0.1, vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        for k in 0..5 {
            assert_eq!(p.evaluate(k as f64 * 0.1).unwrap(), k as f64, "k = {k}");
        }
    }

    #[test]
    fn running_infimum_matches_definition() {
        let p = GridPath::new(1.0, vec![1.0, -1.0, 2.0]).unwrap();
        assert_eq!(p.running_infimum().values(), &[0.0, -1.0, -1.0]);

        let z = GridPath::new(1.0, vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(z.running_infimum().values(), &[0.0, 0.0, 0.0]);

        let n = GridPath::new(1.0, vec![-2.0, -1.0, -3.0]).unwrap();
        // brute-force prefix minimum
        let brute: Vec<f64> = (0..3)
            .map(|k| n.values()[..=k].iter().fold(0.0f64, |m, &v| m.min(v)))
            .collect();
        assert_eq!(n.running_infimum().values(), brute.as_slice());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = GridPath::new(0.125, vec![0.1 + 0.2, -1.0 / 3.0, f64::MIN_POSITIVE, 0.0]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = GridPath::read_csv(&buf[..]).unwrap();
        assert_eq!(p.step().to_bits(), q.step().to_bits());
        for (a, b) in p.values().iter().zip(q.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let p = GridPath::new(1.0 / 3.0, vec![0.1, 0.2, 0.30000000000000004]).unwrap();
        let q = GridPath::from_json(&p.to_json()).unwrap();
        assert_eq!(p.step().to_bits(), q.step().to_bits());
        for (a, b) in p.values().iter().zip(q.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
