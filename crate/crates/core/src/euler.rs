//! Euler-type discretization of the time-change equation.
//!
//! On the grid `ℕ/n` the clock advances by exactly one cell whenever the
//! current solution value is strictly positive:
//!
//! ```text
//! h_k = z_n + X^n(c_k) − γ·c_k + γ·k/n,      c_{k+1} = c_k + (1/n)·I(h_k > 0).
//! ```
//!
//! The clock is tracked as an integer cell count, so `X^n(c_k)` is a direct
//! index lookup and the branch values are exact — the recursion is
//! deterministic bit for bit. From a trace, `Z^n` is the piecewise-constant
//! path of the `h_k` and `C^n` the piecewise-linear clock with slopes 0 or 1.
//!
//! The indicator is evaluated on the value prevailing on the current cell
//! (`h_k` computed from `c_k` before the clock moves), the literal reading of
//! the defining equations. From `h = 0` the clock therefore stalls for one
//! cell while the `γ·k/n` term lifts the value — the sticky dwell mechanism.
//! For the staircase driver `−Id` this recursion produces values in
//! `{0, +1/n}` with the clock phase one cell behind the textbook table of the
//! same example; the limits `C*(t) = t/2`, `Z* ≡ 0` are identical.

use serde::{Deserialize, Serialize};

use crate::clock::TimeChange;
use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::levy::restrict_to_coarser_grid;
use crate::metrics::j1_distance;
use crate::tce::{solve_exact, TceProblem};

/// Per-step record `(c_k, h_k)` of one Euler run.
///
/// `c` has one more entry than `h`: `c_k = C^n(k/n)` for `k = 0, …, steps`,
/// while `h_k` is the value of `Z^n` on `[k/n, (k+1)/n)` for `k < steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerTrace {
    pub mesh_n: u64,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
    pub gamma: f64,
    pub z_n: f64,
}

impl EulerTrace {
    pub fn steps(&self) -> usize {
        self.h.len()
    }

    /// Writes the trace as CSV `k,t,c_k,h_k`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,t,c_k,h_k")?;
        let step = 1.0 / self.mesh_n as f64;
        for k in 0..self.h.len() {
            writeln!(w, "{},{},{},{}", k, k as f64 * step, self.c[k], self.h[k])?;
        }
        Ok(())
    }
}

fn mesh_of(driver: &GridPath) -> Result<u64> {
    let n = (1.0 / driver.step()).round();
    if n < 1.0 || (n * driver.step() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("driver mesh {} is not of the form 1/n", driver.step())));
    }
    Ok(n as u64)
}

/// Runs the recursion for `steps` cells.
///
/// The driver must start at 0 and cover at least `steps` cells; the clock can
/// consume at most one driver cell per step.
pub fn euler_solve(driver: &GridPath, z_n: f64, gamma: f64, steps: usize) -> Result<EulerTrace> {
    let n = mesh_of(driver)?;
    if driver.values()[0] != 0.0 {
        return Err(Error::Config(format!("driver must start at 0, got {}", driver.values()[0])));
    }
    if !(z_n >= 0.0) || !(gamma > 0.0) {
        return Err(Error::Config(format!("need z_n >= 0 and gamma > 0, got z_n = {z_n}, gamma = {gamma}")));
    }
    if steps == 0 {
        return Err(Error::Config("steps must be positive".into()));
    }
    if driver.len() < steps {
        return Err(Error::Horizon { t: steps as f64 / n as f64, horizon: driver.horizon() });
    }

    let step = driver.step();
    let values = driver.values();
    let mut c = Vec::with_capacity(steps + 1);
    let mut h = Vec::with_capacity(steps);
    let mut j = 0usize; // clock in cells: c_k = j/n, exact
    c.push(0.0);
    for k in 0..steps {
        let h_k = z_n + values[j] + gamma * ((k - j) as f64) * step;
        h.push(h_k);
        if h_k > 0.0 {
            j += 1;
        }
        c.push(j as f64 * step);
    }
    Ok(EulerTrace { mesh_n: n, c, h, gamma, z_n })
}

/// Rebuilds `(Z^n, C^n)` from a trace.
///
/// `Z^n` is constant `h_k` on `[k/n, (k+1)/n)`; `C^n` is piecewise linear
/// with slope `I(h_k > 0)` on each cell. When `output_mesh` differs from
/// `1/n`, `Z^n` is resampled by exact cell lookup.
pub fn reconstruct_processes(trace: &EulerTrace, output_mesh: f64) -> Result<(GridPath, TimeChange)> {
    if trace.h.is_empty() {
        return Err(Error::Config("empty trace".into()));
    }
    let step = 1.0 / trace.mesh_n as f64;
    let native = GridPath::new(step, trace.h.clone())?;
    let z_path = if (output_mesh - step).abs() <= 1e-12 * step {
        native
    } else {
        let mut values = Vec::new();
        let mut k = 0usize;
        loop {
            let t = k as f64 * output_mesh;
            if t >= native.horizon() {
                break;
            }
            values.push(native.evaluate(t)?);
            k += 1;
        }
        GridPath::new(output_mesh, values)?
    };
    let breakpoints: Vec<f64> = (0..=trace.h.len()).map(|k| k as f64 * step).collect();
    let clock = TimeChange::new(breakpoints, trace.c.clone())?;
    Ok((z_path, clock))
}

/// One row of a mesh-refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub sup_dist_c: f64,
    pub j1_dist_z: f64,
}

/// Distances between the Euler pair at each coarse mesh and the exact
/// solution at the fine reference mesh.
///
/// The reference `(Z, C)` is `solve_exact` on the problem's own (fine) grid;
/// each row restricts the driver to `ℕ/n`, runs the recursion with
/// `z_n = z`, and reports `sup|C^n − C|` on `[0, horizon]` and the windowed
/// J1 distance of the paths. One window — ten times the coarsest mesh in the
/// study — is shared by every row, so the rows measure one topology: a
/// per-row window would shrink below the sticky dwell-timing offsets at fine
/// meshes and collapse the J1 bound back to the uniform distance.
pub fn convergence_curve(problem: &TceProblem, meshes: &[u64], horizon: f64) -> Result<Vec<ConvergenceRow>> {
    let fine_n = mesh_of(&problem.driver)?;
    let reference = solve_exact(problem, problem.driver.step())?;
    if reference.clock.domain_end() < horizon {
        return Err(Error::Horizon { t: horizon, horizon: reference.clock.domain_end() });
    }
    let coarsest = *meshes.iter().min().ok_or_else(|| Error::Config("empty mesh list".into()))?;
    if coarsest == 0 {
        return Err(Error::Config("meshes must be positive".into()));
    }
    let window = 10.0 / coarsest as f64;
    let mut rows = Vec::with_capacity(meshes.len());
    for &n in meshes {
        if n == 0 || fine_n % n != 0 {
            return Err(Error::Config(format!("mesh {n} does not divide the reference mesh {fine_n}")));
        }
        let coarse = restrict_to_coarser_grid(&problem.driver, n)?;
        let steps = coarse.len();
        let trace = euler_solve(&coarse, problem.z, problem.gamma, steps)?;
        let (z_n, c_n) = reconstruct_processes(&trace, coarse.step())?;
        let sup_c = c_n.sup_distance(&reference.clock, horizon)?;
        // coarse path on the knot axis: the DP costs O(n·horizon × band)
        let j1 = j1_distance(&reference.z_path, &z_n, horizon, window)?;
        rows.push(ConvergenceRow { n, sup_dist_c: sup_c, j1_dist_z: j1.j1_distance });
    }
    Ok(rows)
}

/// Writes rows as CSV `n,sup_dist_C,j1_dist_Z`.
pub fn write_convergence_csv<W: std::io::Write>(rows: &[ConvergenceRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,sup_dist_C,j1_dist_Z")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n, r.sup_dist_c, r.j1_dist_z)?;
    }
    Ok(())
}
