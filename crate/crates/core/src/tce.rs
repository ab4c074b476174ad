//! Exact solution of the time-change equation on a grid.
//!
//! Given a driver `X` with nonnegative jumps, an initial point `z ≥ 0` and a
//! stickiness parameter `γ > 0`, the unique solution of
//!
//! ```text
//! Z_t = z + X_{C_t} + γ ∫₀ᵗ I(Z_s = 0) ds,      C_t = ∫₀ᵗ I(Z_s > 0) ds
//! ```
//!
//! is built in three exact steps: reflect `z + X` at its running infimum to
//! get `(r, L)`, form the strictly increasing sticky clock `a = Id + L/γ`,
//! and invert it exactly to obtain `C`; then `Z = r ∘ C`. No quadrature and
//! no root finding is involved, so the clock identity
//! `C(a_k) + γ⁻¹ L_{k−1} = a_k` holds to the last bit at breakpoints.
//!
//! At grid scale the local-time increment `L_k − L_{k−1}` is created by the
//! zero of `r` at cell `k`, so the clock attributes it to that cell:
//! `a_k = k·h + L_{k−1}/γ`. This places every sticky dwell on a cell where
//! the composed path is exactly zero, which is what makes the equation
//! residual vanish under mesh refinement; anchoring the increment one cell
//! earlier would park the dwell on a positive value and leave a residual of
//! the size of the accumulated local time, no matter how fine the grid.
//!
//! The construction is valid whenever the reflected path's zero set is
//! Lebesgue-null; that cannot be checked on a grid, so the solver proceeds
//! unconditionally and [`check_residual`] certifies the output after the
//! fact. Deterministic drivers with fat zero sets (staircase descents)
//! surface as a residual bounded away from zero — that is the documented
//! no-solution regime, not a solver fault.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clock::{compose_path_timechange, TimeChange};
use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::metrics::sup_distance;
use crate::reflection::{reflect, ReflectionPair};

/// One instance of the time-change equation.
#[derive(Debug, Clone, PartialEq)]
pub struct TceProblem {
    /// Driver path `X` with `X(0) = 0` (or `f − z` for deterministic `f`).
    pub driver: GridPath,
    /// Initial point `z ≥ 0`.
    pub z: f64,
    /// Stickiness parameter `γ > 0`.
    pub gamma: f64,
}

impl TceProblem {
    pub fn new(driver: GridPath, z: f64, gamma: f64) -> Result<Self> {
        if !(z >= 0.0) || !z.is_finite() {
            return Err(Error::Config(format!("initial point must satisfy z >= 0, got {z}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("stickiness parameter must satisfy gamma > 0, got {gamma}")));
        }
        Ok(TceProblem { driver, z, gamma })
    }

    /// Solves on the driver's own mesh.
    pub fn solve(&self) -> Result<TceSolution> {
        solve_exact(self, self.driver.step())
    }
}

/// The exact solution `(Z, C, L)` with its clocks and occupation summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct TceSolution {
    /// Solution path `Z = r ∘ C` sampled on the output grid.
    pub z_path: GridPath,
    /// Positive-time clock `C`: 1-Lipschitz, strictly increasing.
    pub clock: TimeChange,
    /// Local time at the infimum, at driver grid resolution.
    pub local_time: GridPath,
    /// The sticky clock `a = Id + L/γ` whose inverse is `C`, with each
    /// local-time increment attributed to the zero cell that created it:
    /// `a_k = k·h + L_{k−1}/γ`.
    pub clock_a: TimeChange,
    /// Time at zero measured as the grid-exact Riemann sum
    /// `∫ I(Z_s = 0) ds` over the covered horizon. Strictly positive whenever
    /// the path visits zero, including the start cell for `z = 0`.
    pub zero_occupation: f64,
    /// `γ⁻¹·L(C(T))`, the clock deficit `T − C(T)` at the final time. Agrees
    /// with `zero_occupation` in the continuum limit; on a grid it misses
    /// zero time that never forced the infimum down (e.g. the initial cell),
    /// which is why the occupation statistic is the indicator sum.
    pub clock_deficit: f64,
    pub gamma: f64,
    pub z: f64,
}

impl TceSolution {
    /// Last time the solution covers: the end of `C`'s domain.
    pub fn horizon(&self) -> f64 {
        self.clock.domain_end()
    }
}

/// Residuals of a candidate pair against the defining equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max_t |Z(t) − z − X(C(t)) − γ ∫₀ᵗ I(Z = 0) ds|` over the grid.
    pub max_equation_residual: f64,
    /// `max_t |C(t) − ∫₀ᵗ I(Z > 0) ds|` over the grid.
    pub max_clock_residual: f64,
    /// `(∫ I(Z > 0) ds, ∫ I(Z = 0) ds)` at the checked horizon.
    pub indicator_integrals: (f64, f64),
    /// Last grid time the residuals were evaluated at.
    pub horizon: f64,
}

/// Builds the exact solution from reflection and clock inversion.
///
/// `output_mesh` fixes the sampling grid for `Z`; `C`, `a` and `L` are exact
/// regardless of it. Fails if `z + driver(0) < 0`.
pub fn solve_exact(p: &TceProblem, output_mesh: f64) -> Result<TceSolution> {
    if !(p.gamma > 0.0) {
        return Err(Error::Config(format!("gamma must be positive, got {}", p.gamma)));
    }
    let f = p.driver.map(|v| p.z + v)?;
    if f.values()[0] < 0.0 {
        return Err(Error::InvalidInitialCondition(f.values()[0]));
    }
    let ReflectionPair { r, l, .. } = reflect(&f);

    let h = p.driver.step();
    let m = p.driver.len();
    let mut breakpoints = Vec::with_capacity(m);
    let mut a_values = Vec::with_capacity(m);
    breakpoints.push(0.0);
    a_values.push(0.0);
    for k in 1..m {
        let t = k as f64 * h;
        breakpoints.push(t);
        a_values.push(t + l.values()[k - 1] / p.gamma);
    }
    let clock_a = TimeChange::new(breakpoints, a_values)?;
    let clock = clock_a.invert()?;

    let z_path = compose_path_timechange(&r, &clock, output_mesh)?;
    let horizon = clock.domain_end();
    let zero_occupation = occupation_at_zero(&z_path, horizon);
    let clock_deficit = if m >= 2 { l.values()[m - 2] / p.gamma } else { 0.0 };

    Ok(TceSolution {
        z_path,
        clock,
        local_time: l,
        clock_a,
        zero_occupation,
        clock_deficit,
        gamma: p.gamma,
        z: p.z,
    })
}

/// Exact Riemann integral of `I(path = 0)` over `[0, upto]` for a
/// grid-constant path (partial last cell included).
pub fn occupation_at_zero(path: &GridPath, upto: f64) -> f64 {
    let step = path.step();
    let mut total = 0.0;
    for (k, &v) in path.values().iter().enumerate() {
        let start = k as f64 * step;
        if start >= upto {
            break;
        }
        if v == 0.0 {
            total += (upto - start).min(step);
        }
    }
    total
}

/// Same Riemann integral for `I(path > 0)`.
pub fn occupation_above_zero(path: &GridPath, upto: f64) -> f64 {
    let step = path.step();
    let mut total = 0.0;
    for (k, &v) in path.values().iter().enumerate() {
        let start = k as f64 * step;
        if start >= upto {
            break;
        }
        if v > 0.0 {
            total += (upto - start).min(step);
        }
    }
    total
}

/// Residuals of an arbitrary `(Z, C)` candidate against the equation with
/// driver and parameters from `p`. Indicator integrals are left-endpoint
/// Riemann sums on the candidate's grid, which are exact for grid-constant
/// paths. Evaluation runs over every grid time both the candidate path and
/// clock cover.
pub fn residual_of(p: &TceProblem, z_path: &GridPath, clock: &TimeChange) -> Result<ResidualReport> {
    let mesh = z_path.step();
    let zv = z_path.values();
    let mut clock_cursor = clock.cursor();
    let mut max_eq = 0.0f64;
    let mut max_clock = 0.0f64;
    let mut s_zero = 0.0f64;
    let mut s_pos = 0.0f64;
    let mut horizon = 0.0f64;

    for (k, _) in zv.iter().enumerate() {
        let t = k as f64 * mesh;
        if t > clock.domain_end() {
            break;
        }
        let c_t = clock_cursor.value_at(t)?;
        let x_at_c = p.driver.evaluate(c_t)?;
        let eq = (zv[k] - p.z - x_at_c - p.gamma * s_zero).abs();
        let cl = (c_t - s_pos).abs();
        if eq > max_eq {
            max_eq = eq;
        }
        if cl > max_clock {
            max_clock = cl;
        }
        horizon = t;
        if zv[k] == 0.0 {
            s_zero += mesh;
        } else if zv[k] > 0.0 {
            s_pos += mesh;
        }
    }

    Ok(ResidualReport {
        max_equation_residual: max_eq,
        max_clock_residual: max_clock,
        indicator_integrals: (s_pos, s_zero),
        horizon,
    })
}

/// Residuals of a solver output against its own problem.
pub fn check_residual(p: &TceProblem, sol: &TceSolution) -> Result<ResidualReport> {
    residual_of(p, &sol.z_path, &sol.clock)
}

/// Outcome of the clock comparison of two ordered problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClockComparison {
    /// `C¹ ≤ C² + tol` everywhere; `margin` is the largest `C¹ − C²` seen.
    Pass { margin: f64, at: f64 },
    Fail { violation: f64, at: f64 },
    /// The ordering precondition `z₁ + X¹ ≤ z₂ + X²` (same γ, same grid)
    /// does not hold, so the comparison theorem says nothing.
    Inapplicable { reason: String },
}

impl ClockComparison {
    pub fn is_pass(&self) -> bool {
        matches!(self, ClockComparison::Pass { .. })
    }
}

/// Checks the comparison property: drivers ordered cellwise (with the same γ
/// and grid) must produce ordered clocks, `C¹ ≤ C²` within `tol`.
///
/// `tol` defaults to twice the driver mesh, which absorbs the at-most-one
/// indicator flip a grid boundary can inject.
pub fn compare_clocks(
    p1: &TceProblem,
    p2: &TceProblem,
    sol1: &TceSolution,
    sol2: &TceSolution,
    tol: Option<f64>,
) -> Result<ClockComparison> {
    if p1.gamma != p2.gamma {
        return Ok(ClockComparison::Inapplicable { reason: format!("gammas differ: {} vs {}", p1.gamma, p2.gamma) });
    }
    if p1.driver.step() != p2.driver.step() || p1.driver.len() != p2.driver.len() {
        return Ok(ClockComparison::Inapplicable { reason: "drivers live on different grids".into() });
    }
    for (k, (a, b)) in p1.driver.values().iter().zip(p2.driver.values()).enumerate() {
        if p1.z + a > p2.z + b {
            return Ok(ClockComparison::Inapplicable {
                reason: format!("driver order fails at cell {k}: {} > {}", p1.z + a, p2.z + b),
            });
        }
    }
    let tol = tol.unwrap_or(2.0 * p1.driver.step());
    let end = sol1.clock.domain_end().min(sol2.clock.domain_end());
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = 0.0;
    {
        let mut probe = |t: f64| -> Result<()> {
            let d = sol1.clock.value_at(t)? - sol2.clock.value_at(t)?;
            if d > worst {
                worst = d;
                worst_at = t;
            }
            Ok(())
        };
        for &t in sol1.clock.breakpoints().iter().filter(|&&t| t <= end) {
            probe(t)?;
        }
        for &t in sol2.clock.breakpoints().iter().filter(|&&t| t <= end) {
            probe(t)?;
        }
    }
    if worst <= tol {
        Ok(ClockComparison::Pass { margin: worst, at: worst_at })
    } else {
        Ok(ClockComparison::Fail { violation: worst, at: worst_at })
    }
}

/// Outcome of the uniqueness probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProbeVerdict {
    Pass { z_distance: f64, clock_distance: f64 },
    Fail { z_distance: f64, clock_distance: f64, budget: f64 },
    /// The candidate does not satisfy the equation within `residual_tol`, so
    /// uniqueness makes no claim about it.
    Inapplicable { residual: f64, budget: f64 },
}

impl ProbeVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, ProbeVerdict::Pass { .. })
    }
}

/// Uniqueness as a computable statement: any candidate pair that satisfies
/// the equation within `residual_tol` must agree with the exact solution
/// within `3·residual_tol`, in uniform distance on both components.
pub fn uniqueness_probe(
    p: &TceProblem,
    candidate_z: &GridPath,
    candidate_clock: &TimeChange,
    residual_tol: f64,
) -> Result<ProbeVerdict> {
    let report = residual_of(p, candidate_z, candidate_clock)?;
    let residual = report.max_equation_residual.max(report.max_clock_residual);
    if residual > residual_tol {
        return Ok(ProbeVerdict::Inapplicable { residual, budget: residual_tol });
    }
    let exact = solve_exact(p, candidate_z.step())?;
    let horizon = report.horizon.min(exact.clock.domain_end());
    let z_distance = sup_distance(candidate_z, &exact.z_path, horizon)?;
    let clock_distance = candidate_clock.sup_distance(&exact.clock, horizon)?;
    let budget = 3.0 * residual_tol;
    if z_distance <= budget && clock_distance <= budget {
        Ok(ProbeVerdict::Pass { z_distance, clock_distance })
    } else {
        Ok(ProbeVerdict::Fail { z_distance, clock_distance, budget })
    }
}

/// Serializable summary attached to an exported solution bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleManifest {
    pub z: f64,
    pub gamma: f64,
    pub seed: u64,
    pub replicate_index: u64,
    pub zero_occupation: f64,
    pub clock_deficit: f64,
    pub residual: ResidualReport,
}

/// Writes `Z.csv`, `C.json`, `L.csv` and `manifest.json` into `dir`.
pub fn write_solution_bundle(
    dir: &Path,
    p: &TceProblem,
    sol: &TceSolution,
    seed: u64,
    replicate_index: u64,
) -> Result<Vec<std::path::PathBuf>> {
    let io_err = |e: std::io::Error| Error::Format(e.to_string());
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let z_csv = dir.join("Z.csv");
    let c_json = dir.join("C.json");
    let l_csv = dir.join("L.csv");
    let manifest = dir.join("manifest.json");

    let mut f = std::io::BufWriter::new(std::fs::File::create(&z_csv).map_err(io_err)?);
    sol.z_path.write_csv(&mut f).map_err(io_err)?;
    std::fs::write(&c_json, sol.clock.to_json()).map_err(io_err)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(&l_csv).map_err(io_err)?);
    sol.local_time.write_csv(&mut f).map_err(io_err)?;

    let residual = check_residual(p, sol)?;
    let doc = BundleManifest {
        z: p.z,
        gamma: p.gamma,
        seed,
        replicate_index,
        zero_occupation: sol.zero_occupation,
        clock_deficit: sol.clock_deficit,
        residual,
    };
    std::fs::write(&manifest, serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))?)
        .map_err(io_err)?;
    Ok(vec![z_csv, c_json, l_csv, manifest])
}
