//! Distances between grid paths: uniform distance and a windowed J1 bound.
//!
//! The J1 implementation minimizes, over monotone warps that map merged-grid
//! times to merged-grid times and deviate from the identity by at most
//! `window`, the larger of the time deviation and the warped value mismatch.
//! That is an upper bound for the Skorohod J1 distance (the identity warp is
//! always admissible, so it also never exceeds the uniform distance) and it
//! coincides with J1 whenever the optimal warp stays inside the window.
//!
//! Both metrics treat paths on the half-open interval `[0, horizon)`: since
//! the inputs are constant between consecutive grid times, suprema over the
//! continuum are attained on the union of the two grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPath;

/// Outcome of a J1 evaluation, with the identity-warp distance for scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetricReport {
    pub sup_distance: f64,
    pub j1_distance: f64,
    /// Largest `|λ(t) − t|` along the minimizing warp that was found.
    pub j1_time_warp_bound: f64,
    pub horizon: f64,
}

fn check_coverage(p: &GridPath, q: &GridPath, horizon: f64) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    for path in [p, q] {
        if path.horizon() < horizon {
            return Err(Error::Horizon { t: horizon, horizon: path.horizon() });
        }
    }
    Ok(())
}

/// Sorted union of both grids restricted to `[0, horizon)`.
fn merged_grid(p: &GridPath, q: &GridPath, horizon: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let tp = i as f64 * p.step();
        let tq = j as f64 * q.step();
        let (t, from_p, from_q) = if tp < tq {
            (tp, true, false)
        } else if tq < tp {
            (tq, false, true)
        } else {
            (tp, true, true)
        };
        if t >= horizon {
            break;
        }
        out.push(t);
        if from_p {
            i += 1;
        }
        if from_q {
            j += 1;
        }
    }
    out
}

/// Monotone cell lookup over increasing query times.
struct GridCursor<'a> {
    path: &'a GridPath,
    k: usize,
}

impl<'a> GridCursor<'a> {
    fn new(path: &'a GridPath) -> Self {
        GridCursor { path, k: 0 }
    }

    fn value_at(&mut self, t: f64) -> f64 {
        let n = self.path.len();
        let step = self.path.step();
        while self.k + 1 < n && (self.k + 1) as f64 * step <= t {
            self.k += 1;
        }
        self.path.values()[self.k]
    }
}

/// Uniform distance over `[0, horizon)`, evaluated on the union of both
/// grids. Meshes may differ; both paths must cover the horizon.
pub fn sup_distance(p: &GridPath, q: &GridPath, horizon: f64) -> Result<f64> {
    check_coverage(p, q, horizon)?;
    let times = merged_grid(p, q, horizon);
    let (mut cp, mut cq) = (GridCursor::new(p), GridCursor::new(q));
    let mut worst = 0.0f64;
    for &t in &times {
        let d = (cp.value_at(t) - cq.value_at(t)).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy)]
struct Dp {
    cost: f64,
    warp: f64,
}

const DP_INF: Dp = Dp { cost: f64::INFINITY, warp: f64::INFINITY };

impl Dp {
    fn min_by_cost(self, other: Dp) -> Dp {
        if other.cost < self.cost || (other.cost == self.cost && other.warp < self.warp) {
            other
        } else {
            self
        }
    }
}

/// Windowed J1 distance between `p` and `q` over `[0, horizon)`.
///
/// Runs a dynamic program over monotone warps that carry `q`'s grid times
/// onto union-grid times within the band `|λ(t) − t| ≤ window`, with the
/// endpoints pinned at 0 and at the horizon. Cost per warp is
/// `max(max_j |λ(t_j) − t_j|, sup_t |p(λ(t)) − q(t)|)`; the warped value
/// mismatch sweeps every union-grid cell the warp crosses, and the row
/// update is a running-minimum recurrence, so the whole program costs
/// O(q-grid rows × band width).
pub fn j1_distance(p: &GridPath, q: &GridPath, horizon: f64, window: f64) -> Result<PathMetricReport> {
    check_coverage(p, q, horizon)?;
    if window < p.step().max(q.step()) || !window.is_finite() {
        return Err(Error::Config(format!(
            "warp window {window} is smaller than the coarser mesh {}",
            p.step().max(q.step())
        )));
    }

    let times = merged_grid(p, q, horizon);
    let m = times.len();
    let (mut cp, mut cq) = (GridCursor::new(p), GridCursor::new(q));
    let pv: Vec<f64> = times.iter().map(|&t| cp.value_at(t)).collect();
    let qv_fine: Vec<f64> = times.iter().map(|&t| cq.value_at(t)).collect();

    let sup = pv.iter().zip(&qv_fine).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);

    // Warp knots live on q's own grid: q is constant between its grid times,
    // and p's finer events are swept by the range maximum inside each
    // segment, so extra knots would not lower the cost.
    let mut knots: Vec<f64> = Vec::new();
    let mut qv: Vec<f64> = Vec::new();
    {
        let mut k = 0usize;
        loop {
            let t = k as f64 * q.step();
            if t >= horizon {
                break;
            }
            knots.push(t);
            qv.push(q.values()[k]);
            k += 1;
        }
    }
    let rows = knots.len();

    // Band limits per row, two pointers; lo/hi are nondecreasing.
    let mut lo = vec![0usize; rows];
    let mut hi = vec![0usize; rows];
    {
        let (mut l, mut h) = (0usize, 0usize);
        for j in 0..rows {
            while times[l] < knots[j] - window {
                l += 1;
            }
            while h + 1 < m && times[h + 1] <= knots[j] + window {
                h += 1;
            }
            lo[j] = l;
            hi[j] = h.max(l);
        }
    }

    // Row 0: the warp is pinned at the origin. Rows are stored band-only;
    // the update is a single forward scan per row, so the whole DP costs
    // O(sum of band widths).
    let mut row_off = 0usize;
    let mut row: Vec<Dp> = vec![Dp { cost: 0.0, warp: 0.0 }];
    let mut next: Vec<Dp> = Vec::new();

    for j in 0..rows.saturating_sub(1) {
        let (nlo, nhi) = (lo[j + 1], hi[j + 1]);
        let scan_lo = row_off; // == lo[j] for j > 0; 0 for the pinned row
        next.clear();
        next.resize(nhi - nlo + 1, DP_INF);
        let q_j = qv[j];
        let t_next = knots[j + 1];
        let row_len = row.len();

        // g_less: best over warps arriving from strictly below; carries the
        // running maximum of w[i] = |p(t_i) − q(s_j)|, the value mismatch
        // while the warp crosses union cell i inside q's segment.
        let mut g_less = DP_INF;
        for i2 in scan_lo..=nhi {
            if i2 > scan_lo {
                let k = i2 - 1 - scan_lo;
                let e_prev = if k < row_len { row[k] } else { DP_INF };
                let stay = g_less.min_by_cost(e_prev);
                g_less = Dp { cost: stay.cost.max((pv[i2 - 1] - q_j).abs()), warp: stay.warp };
            }
            if i2 >= nlo {
                let k = i2.wrapping_sub(scan_lo);
                let e = if k < row_len { row[k] } else { DP_INF };
                let stall = Dp { cost: e.cost.max((pv[i2] - q_j).abs()), warp: e.warp };
                let best = g_less.min_by_cost(stall);
                if best.cost < f64::INFINITY {
                    let dt = (times[i2] - t_next).abs();
                    next[i2 - nlo] = Dp { cost: best.cost.max(dt), warp: best.warp.max(dt) };
                }
            }
        }
        std::mem::swap(&mut row, &mut next);
        row_off = nlo;
    }

    // Close out the final segment [s_last, horizon): the warp lands on the
    // horizon and sweeps every remaining p value against q's last value.
    // Because window ≥ q.step, the last row's band always reaches the last
    // union index, so a suffix maximum over the band covers the whole sweep.
    let q_last = qv[rows - 1];
    let mut suffix = (pv[m - 1] - q_last).abs();
    for i in row_off + row.len()..m {
        suffix = suffix.max((pv[i] - q_last).abs());
    }
    let mut best = DP_INF;
    for i_f in (row_off..row_off + row.len()).rev() {
        suffix = suffix.max((pv[i_f] - q_last).abs());
        let d = row[i_f - row_off];
        let cand = Dp { cost: d.cost.max(suffix), warp: d.warp };
        best = best.min_by_cost(cand);
    }

    Ok(PathMetricReport {
        sup_distance: sup,
        j1_distance: best.cost,
        j1_time_warp_bound: best.warp,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(step: f64, values: &[f64]) -> GridPath {
        GridPath::new(step, values.to_vec()).unwrap()
    }

    #[test]
    fn sup_distance_identical_inputs() {
        let p = path(1.0, &[0.0, 1.0]);
        assert_eq!(sup_distance(&p, &p, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn sup_distance_single_differing_cell() {
        let p = path(1.0, &[0.0, 1.0]);
        let q = path(1.0, &[0.0, 0.0]);
        assert_eq!(sup_distance(&p, &q, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn sup_distance_pointwise_scan() {
        let p = path(1.0, &[1.0, 2.0, 3.0]);
        let q = path(1.0, &[1.0, 1.0, 3.0]);
        assert_eq!(sup_distance(&p, &q, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn sup_distance_mixed_meshes() {
        let p = path(0.5, &[0.0, 2.0, 2.0, 2.0]);
        let q = path(1.0, &[0.0, 2.0]);
        // differ exactly on [0.5, 1.0)
        assert_eq!(sup_distance(&p, &q, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn sup_distance_horizon_error() {
        let p = path(1.0, &[0.0, 1.0]);
        let q = path(1.0, &[0.0]);
        assert!(matches!(sup_distance(&p, &q, 2.0), Err(Error::Horizon { .. })));
    }

    #[test]
    fn j1_zero_for_equal_paths() {
        let p = path(0.25, &[0.0, 1.0, -1.0, 2.0, 2.0, 0.5, 0.0, 1.0]);
        let r = j1_distance(&p, &p, 2.0, 1.0).unwrap();
        assert_eq!(r.j1_distance, 0.0);
        assert_eq!(r.j1_time_warp_bound, 0.0);
    }

    #[test]
    fn j1_pure_time_shift_costs_the_shift() {
        // unit step at 1.0 vs unit step at 1.25, horizon 2
        let mut a = vec![0.0; 8];
        for v in a.iter_mut().skip(4) {
            *v = 1.0;
        }
        let mut b = vec![0.0; 8];
        for v in b.iter_mut().skip(5) {
            *v = 1.0;
        }
        let p = path(0.25, &a);
        let q = path(0.25, &b);
        let r = j1_distance(&p, &q, 2.0, 0.5).unwrap();
        assert_eq!(r.j1_distance, 0.25);
        assert_eq!(r.j1_time_warp_bound, 0.25);
        assert_eq!(r.sup_distance, 1.0);
    }

    #[test]
    fn j1_never_exceeds_sup() {
        let p = path(0.5, &[0.3, -1.2, 4.0, 0.0]);
        let q = path(0.25, &[0.0, 0.3, -1.0, 4.0, 0.5, 0.5, 0.0, -0.25]);
        let r = j1_distance(&p, &q, 2.0, 1.0).unwrap();
        assert!(r.j1_distance <= r.sup_distance + 1e-15);
    }

    #[test]
    fn j1_window_below_mesh_is_config_error() {
        let p = path(0.5, &[0.0, 1.0]);
        let q = path(0.25, &[0.0, 0.0, 1.0, 1.0]);
        assert!(matches!(j1_distance(&p, &q, 1.0, 0.3), Err(Error::Config(_))));
    }
}
