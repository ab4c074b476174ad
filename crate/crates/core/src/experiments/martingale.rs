//! Monte Carlo test of the martingale characterization: for test functions
//! satisfying the sticky boundary condition `γf′(0+) = 𝓛f(0+)`, the process
//! `f(Z_t) − ∫₀ᵗ 𝓛f(Z_s) ds` is a martingale, so
//! `m(t) = E[f(Z_t)] − f(z) − ∫₀ᵗ E[𝓛f(Z_s)] ds` vanishes. A boundary defect
//! `d = γf′(0+) − 𝓛f(0+)` instead produces the drift
//! `m(t) = d·E[∫₀ᵗ I(Z_s = 0) ds]`, detectable with matching sign.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::levy::{sample_path, LevyTriplet, SimConfig};
use crate::tce::{occupation_at_zero, solve_exact, TceProblem};

use super::generator::GeneratorEval;
use super::testfn::TestFunction;
use super::{normal_sf, ExperimentReport, Summary, Verdict, EFFECT_FLOOR};

/// Per-time outcome of the martingale test.
#[derive(Debug, Clone)]
pub struct MartingaleOutcome {
    pub t: f64,
    pub m: f64,
    pub se: f64,
    pub zero_occupation_mean: f64,
}

struct ReplicateRow {
    m_at: Vec<f64>,
    occ_at: Vec<f64>,
    f_at_delta: f64,
}

/// Runs the martingale experiment and returns the report.
///
/// Simulates `cfg.ensemble_size` independent solutions (mesh `cfg.mesh_n`,
/// streams indexed by replicate), estimates `m(t)` at each time in `t_grid`
/// with its standard error, and passes when every `|m(t)| ≤ 3·SE(t)`. Also
/// reports the estimated initial slope `(E[f(Z_δ)] − f(z))/δ` against
/// `𝓛f(z)`, and a one-sided p-value for drift in the direction of the
/// boundary defect.
pub fn martingale_test(
    tr: &LevyTriplet,
    z: f64,
    gamma: f64,
    f: &TestFunction,
    g: &GeneratorEval,
    t_grid: &[f64],
    cfg: &SimConfig,
) -> Result<ExperimentReport> {
    let verdict_text = tr.validate();
    if !verdict_text.is_valid() {
        return Err(Error::Config(verdict_text.to_string()));
    }
    if t_grid.is_empty() {
        return Err(Error::Config("t_grid must be nonempty".into()));
    }
    let n = cfg.mesh_n;
    let mesh = 1.0 / n as f64;
    let mut t_cells = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let cells = t * n as f64;
        if !(t > 0.0) || (cells - cells.round()).abs() > 1e-9 {
            return Err(Error::Config(format!("time {t} is not a positive multiple of the mesh 1/{n}")));
        }
        t_cells.push(cells.round() as usize);
    }
    if t_cells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("t_grid must be strictly increasing".into()));
    }
    let t_max_cell = *t_cells.iter().max().unwrap();
    // driver needs one extra cell so the solution covers the last time
    let horizon = (t_max_cell + 1) as f64 * mesh;
    let sim = SimConfig { seed: cfg.seed, mesh_n: n, horizon, ensemble_size: cfg.ensemble_size };
    sim.check()?;

    let delta_cell = 16usize.min(t_max_cell).max(1);
    let delta = delta_cell as f64 * mesh;
    let f_z = f.value(z);

    let rows: Vec<ReplicateRow> = (0..cfg.ensemble_size as u64)
        .into_par_iter()
        .map(|rep| -> Result<ReplicateRow> {
            let driver = sample_path(tr, &sim, rep)?;
            let problem = TceProblem { driver, z, gamma };
            let sol = solve_exact(&problem, mesh)?;
            let zv = sol.z_path.values();

            let mut m_at = Vec::with_capacity(t_cells.len());
            let mut occ_at = Vec::with_capacity(t_cells.len());
            let mut riemann = 0.0f64;
            let mut next = 0usize;
            let mut f_at_delta = f_z;
            for k in 0..=t_max_cell {
                while next < t_cells.len() && t_cells[next] == k {
                    m_at.push(f.value(zv[k]) - f_z - riemann);
                    occ_at.push(occupation_at_zero(&sol.z_path, k as f64 * mesh));
                    next += 1;
                }
                if k == delta_cell {
                    f_at_delta = f.value(zv[k]);
                }
                riemann += g.apply(f, zv[k])? * mesh;
            }
            Ok(ReplicateRow { m_at, occ_at, f_at_delta })
        })
        .collect::<Result<Vec<_>>>()?;

    let defect = g.boundary_defect(f, gamma)?;
    let gen_at_z = g.apply(f, z)?;

    let mut report = ExperimentReport::new(
        "martingale",
        cfg.seed,
        serde_json::json!({
            "z": z, "gamma": gamma, "mesh_n": n, "ensemble_size": cfg.ensemble_size,
            "t_grid": t_grid, "boundary_defect": defect,
        }),
    );

    let mut outcomes = Vec::with_capacity(t_grid.len());
    let mut any_fail = false;
    let mut any_noisy = false;
    for (idx, &t) in t_grid.iter().enumerate() {
        let s = Summary::of(rows.iter().map(|r| r.m_at[idx]));
        let occ = Summary::of(rows.iter().map(|r| r.occ_at[idx]));
        let (m, se) = (s.mean(), s.standard_error());
        if m.abs() > 3.0 * se {
            any_fail = true;
        }
        if se > EFFECT_FLOOR {
            any_noisy = true;
        }
        report.stat(&format!("m_at_{t}"), m);
        report.stat(&format!("m_se_at_{t}"), se);
        report.stat(&format!("zero_occupation_mean_at_{t}"), occ.mean());
        report.stat(&format!("zero_occupation_se_at_{t}"), occ.standard_error());
        outcomes.push(MartingaleOutcome { t, m, se, zero_occupation_mean: occ.mean() });
    }

    let fd = Summary::of(rows.iter().map(|r| r.f_at_delta));
    report.stat("initial_derivative", (fd.mean() - f_z) / delta);
    report.stat("initial_derivative_se", fd.standard_error() / delta);
    report.stat("generator_at_z", gen_at_z);
    report.stat("boundary_defect", defect);

    // One-sided drift test in the defect's direction at the last time.
    if defect != 0.0 {
        let last = outcomes.last().unwrap();
        let zscore = defect.signum() * last.m / last.se;
        report.stat("defect_drift_z", zscore);
        report.stat("defect_drift_p", normal_sf(zscore).max(f64::MIN_POSITIVE));
        // predicted drift per unit of zero occupation is the defect itself
        if last.zero_occupation_mean > 0.0 {
            report.stat("drift_per_zero_occupation", last.m / last.zero_occupation_mean);
        }
    }

    report.verdict = if any_fail {
        Verdict::Fail
    } else if any_noisy {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    report.note(format!(
        "m(t) = E[f(Z_t)] - f(z) - Riemann(E[Lf(Z)]) on mesh 1/{n}; pass requires |m| <= 3 SE at every t"
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_gives_exactly_zero_drift() {
        let tr = LevyTriplet::brownian(1.0);
        let g = GeneratorEval::with_defaults(tr.clone()).unwrap();
        let f = TestFunction::constant(2.0);
        let cfg = SimConfig::new(11, 64, 1.0, 64).unwrap();
        let report = martingale_test(&tr, 0.0, 1.0, &f, &g, &[0.5, 1.0], &cfg).unwrap();
        assert_eq!(report.statistics["m_at_0.5"], 0.0);
        assert_eq!(report.statistics["m_at_1"], 0.0);
        assert!(report.verdict.is_pass());
    }

    #[test]
    fn invalid_triplet_is_rejected() {
        let tr = LevyTriplet::brownian(0.0);
        let g = GeneratorEval::with_defaults(tr.clone()).unwrap();
        let f = TestFunction::constant(1.0);
        let cfg = SimConfig::new(1, 16, 1.0, 4).unwrap();
        assert!(martingale_test(&tr, 0.0, 1.0, &f, &g, &[1.0], &cfg).is_err());
    }

    #[test]
    fn off_grid_time_is_rejected() {
        let tr = LevyTriplet::brownian(1.0);
        let g = GeneratorEval::with_defaults(tr.clone()).unwrap();
        let f = TestFunction::constant(1.0);
        let cfg = SimConfig::new(1, 16, 1.0, 4).unwrap();
        assert!(martingale_test(&tr, 0.0, 1.0, &f, &g, &[0.3], &cfg).is_err());
    }
}
