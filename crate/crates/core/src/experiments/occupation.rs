//! Occupation-time and boundary-regularity diagnostics.
//!
//! Stickiness means the solution spends positive Lebesgue time at zero while
//! zero stays regular and instantaneous. On a grid the measurable traces of
//! those statements are: the indicator occupation `∫ I(Z = 0) ds` is positive
//! on every replicate, and the first-hit and first-leave times of zero shrink
//! toward zero as the mesh refines. Refinements reuse the same underlying
//! fine path per replicate, so trends across meshes are coupled, not noisy
//! re-draws.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridPath;
use crate::levy::{restrict_to_coarser_grid, sample_path, LevyTriplet, SimConfig};
use crate::tce::{solve_exact, TceProblem};

use super::{ExperimentReport, Summary, Verdict};

struct MeshStats {
    zero_occ: Vec<f64>,
    first_hit: Vec<f64>,
    first_leave: Vec<f64>,
    hit_count: usize,
}

fn zero_visit_times(z_path: &GridPath, upto: f64) -> (Option<f64>, Option<f64>) {
    let step = z_path.step();
    let mut hit = None;
    for (k, &v) in z_path.values().iter().enumerate() {
        let t = k as f64 * step;
        if t > upto {
            break;
        }
        match hit {
            None => {
                if v == 0.0 {
                    hit = Some(t);
                }
            }
            Some(_) => {
                if v != 0.0 {
                    return (hit, Some(t));
                }
            }
        }
    }
    (hit, None)
}

/// Ensemble study of the time spent at zero and of the hit/leave times of
/// the boundary across mesh refinements.
///
/// `cfg.mesh_n` is the finest mesh; the study also solves on `n/2` and `n/4`
/// (restrictions of the same sampled path). The verdict passes when every
/// replicate has positive zero occupation at the finest mesh and the mean
/// first-hit and first-leave times are nonincreasing under refinement, with
/// the leave time strictly shrinking. If no replicate ever touches zero the
/// study is inconclusive (nothing to measure).
pub fn occupation_study(tr: &LevyTriplet, z: f64, gamma: f64, cfg: &SimConfig) -> Result<ExperimentReport> {
    cfg.check()?;
    let n = cfg.mesh_n;
    if n % 4 != 0 {
        return Err(Error::Config(format!("occupation study needs mesh_n divisible by 4, got {n}")));
    }
    let meshes = [n / 4, n / 2, n];
    let horizon = cfg.horizon;
    let sim = SimConfig {
        seed: cfg.seed,
        mesh_n: n,
        horizon: horizon + 1.0 / n as f64,
        ensemble_size: cfg.ensemble_size,
    };

    let per_replicate: Vec<Vec<(f64, Option<f64>, Option<f64>)>> = (0..cfg.ensemble_size as u64)
        .into_par_iter()
        .map(|rep| -> Result<Vec<(f64, Option<f64>, Option<f64>)>> {
            let fine = sample_path(tr, &sim, rep)?;
            meshes
                .iter()
                .map(|&m| {
                    let driver = restrict_to_coarser_grid(&fine, m)?;
                    let problem = TceProblem { driver, z, gamma };
                    let sol = solve_exact(&problem, 1.0 / m as f64)?;
                    let occ = crate::tce::occupation_at_zero(&sol.z_path, horizon);
                    let (hit, leave) = zero_visit_times(&sol.z_path, horizon);
                    Ok((occ, hit, leave))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "occupation",
        cfg.seed,
        serde_json::json!({
            "z": z, "gamma": gamma, "mesh_n": n, "horizon": horizon,
            "ensemble_size": cfg.ensemble_size, "meshes": meshes,
        }),
    );

    let mut stats = Vec::new();
    for (mi, &m) in meshes.iter().enumerate() {
        let mut s = MeshStats { zero_occ: Vec::new(), first_hit: Vec::new(), first_leave: Vec::new(), hit_count: 0 };
        for row in &per_replicate {
            let (occ, hit, leave) = row[mi];
            s.zero_occ.push(occ);
            if let Some(h) = hit {
                s.hit_count += 1;
                s.first_hit.push(h);
            }
            if let Some(l) = leave {
                s.first_leave.push(l);
            }
        }
        let occ = Summary::of(s.zero_occ.iter().copied());
        report.stat(&format!("zero_occupation_mean_n{m}"), occ.mean());
        report.stat(&format!("zero_occupation_se_n{m}"), occ.standard_error());
        report.stat(&format!("zero_occupation_min_n{m}"), occ.min);
        report.stat(
            &format!("positive_occupation_fraction_n{m}"),
            s.zero_occ.iter().filter(|&&v| v > 0.0).count() as f64 / s.zero_occ.len() as f64,
        );
        if !s.first_hit.is_empty() {
            let hit = Summary::of(s.first_hit.iter().copied());
            report.stat(&format!("first_hit_mean_n{m}"), hit.mean());
            report.stat(&format!("first_hit_se_n{m}"), hit.standard_error());
        }
        if !s.first_leave.is_empty() {
            let leave = Summary::of(s.first_leave.iter().copied());
            report.stat(&format!("first_leave_mean_n{m}"), leave.mean());
            report.stat(&format!("first_leave_se_n{m}"), leave.standard_error());
        }
        stats.push(s);
    }

    let finest = &stats[meshes.len() - 1];
    report.stat("zero_occupation_mean", Summary::of(finest.zero_occ.iter().copied()).mean());
    report.stat("zero_occupation_se", Summary::of(finest.zero_occ.iter().copied()).standard_error());

    if finest.hit_count == 0 {
        report.verdict = Verdict::Inconclusive;
        report.note("no replicate ever reached zero; the sticky diagnostics do not apply");
        return Ok(report);
    }

    let all_positive = finest.zero_occ.iter().all(|&v| v > 0.0);
    let mean_or = |v: &Vec<f64>, fallback: f64| if v.is_empty() { fallback } else { Summary::of(v.iter().copied()).mean() };
    let hits: Vec<f64> = stats.iter().map(|s| mean_or(&s.first_hit, 0.0)).collect();
    let leaves: Vec<f64> = stats.iter().map(|s| mean_or(&s.first_leave, 0.0)).collect();
    let hit_shrinks = hits.windows(2).all(|w| w[1] <= w[0]);
    let leave_shrinks = leaves.windows(2).all(|w| w[1] <= w[0]) && leaves[meshes.len() - 1] < leaves[0];
    report.stat("first_hit_shrinks", if hit_shrinks { 1.0 } else { 0.0 });
    report.stat("first_leave_shrinks", if leave_shrinks { 1.0 } else { 0.0 });

    report.verdict = if all_positive && hit_shrinks && leave_shrinks { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Exploratory γ sweep: zero-occupation statistics across stickiness values
/// on a shared seed set. Reported without a pass/fail verdict — the theory
/// fixes a single γ and makes no quantitative claim about the trend.
pub fn gamma_sweep_study(tr: &LevyTriplet, z: f64, gammas: &[f64], cfg: &SimConfig) -> Result<ExperimentReport> {
    cfg.check()?;
    if gammas.is_empty() || gammas.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::Config("gamma sweep needs positive gammas".into()));
    }
    let n = cfg.mesh_n;
    let horizon = cfg.horizon;
    let sim = SimConfig {
        seed: cfg.seed,
        mesh_n: n,
        horizon: horizon + 1.0 / n as f64,
        ensemble_size: cfg.ensemble_size,
    };

    let rows: Vec<Vec<f64>> = (0..cfg.ensemble_size as u64)
        .into_par_iter()
        .map(|rep| -> Result<Vec<f64>> {
            let driver = sample_path(tr, &sim, rep)?;
            gammas
                .iter()
                .map(|&gamma| {
                    let problem = TceProblem { driver: driver.clone(), z, gamma };
                    let sol = solve_exact(&problem, driver.step())?;
                    Ok(crate::tce::occupation_at_zero(&sol.z_path, horizon))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "gamma-sweep",
        cfg.seed,
        serde_json::json!({
            "z": z, "gammas": gammas, "mesh_n": n, "horizon": horizon,
            "ensemble_size": cfg.ensemble_size,
        }),
    );
    let mut means = Vec::new();
    for (gi, &gamma) in gammas.iter().enumerate() {
        let s = Summary::of(rows.iter().map(|r| r[gi]));
        report.stat(&format!("zero_occupation_mean_gamma_{gamma}"), s.mean());
        report.stat(&format!("zero_occupation_se_gamma_{gamma}"), s.standard_error());
        means.push(s.mean());
    }
    let decreasing = means.windows(2).all(|w| w[1] <= w[0]);
    report.stat("occupation_decreasing_in_gamma", if decreasing { 1.0 } else { 0.0 });
    report.verdict = Verdict::Inconclusive;
    report.note("exploratory study: occupation versus gamma carries no pass/fail criterion");
    Ok(report)
}
