//! Deterministic validation suites: reflection axioms against brute-force
//! oracles, the clock comparison property over random ordered pairs, and the
//! staircase no-solution demonstration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::clock::TimeChange;
use crate::error::Result;
use crate::grid::GridPath;
use crate::levy::{sample_path, JumpLaw, JumpSpec, LevyTriplet, SimConfig};
use crate::reflection::{check_reflection_axioms, reflect};
use crate::tce::{compare_clocks, residual_of, solve_exact, TceProblem};

use super::{ExperimentReport, Verdict};

fn suite_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(stream);
    rng
}

fn random_triplet(rng: &mut ChaCha12Rng) -> LevyTriplet {
    let sigma = rng.random_range(0.2..2.0);
    let drift_b = rng.random_range(-2.0..2.0);
    let jumps = if rng.random_bool(0.5) {
        let rate = rng.random_range(0.5..5.0);
        let law = match rng.random_range(0..3) {
            0 => JumpLaw::Exponential { mean: rng.random_range(0.2..2.0) },
            1 => JumpLaw::Pareto { alpha: rng.random_range(1.2..3.0), scale: rng.random_range(0.1..1.0) },
            _ => JumpLaw::FixedSizes {
                sizes: vec![rng.random_range(0.1..1.0), rng.random_range(1.0..3.0)],
                probabilities: vec![0.6, 0.4],
            },
        };
        Some(JumpSpec { rate, law })
    } else {
        None
    };
    LevyTriplet { drift_b, sigma, jumps, small_jump_intensity_flag: false }
}

/// Brute-force minimal envelope: the smallest nondecreasing `l` with
/// `l ≥ 0` and `f + l ≥ 0`, by direct double-loop evaluation of
/// `l_k = max_{j ≤ k} (−f_j ∨ 0)`.
fn minimal_envelope_oracle(f: &GridPath) -> Vec<f64> {
    let v = f.values();
    (0..v.len())
        .map(|k| (0..=k).map(|j| (-v[j]).max(0.0)).fold(0.0f64, f64::max))
        .collect()
}

/// Checks `reflect` on `n_paths` random mixed Brownian/jump paths (axioms at
/// tolerance zero) and against the brute-force envelope on `n_oracle` short
/// paths (exact equality).
pub fn reflection_axioms_suite(seed: u64, n_paths: usize, max_cells: usize, n_oracle: usize) -> Result<ExperimentReport> {
    let axiom_failures: usize = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = suite_rng(seed, i);
            let tr = random_triplet(&mut rng);
            let mesh_n = 1u64 << rng.random_range(4..=9);
            let max_len = max_cells.min(4096);
            let cells = rng.random_range(8..=max_len) as u64;
            let cfg = SimConfig::new(seed, mesh_n, cells as f64 / mesh_n as f64, 1)?;
            let x = sample_path(&tr, &cfg, i)?;
            // random vertical shift, sometimes starting below zero
            let shift = rng.random_range(-0.5..1.5);
            let f = x.map(|v| v + shift)?;
            let pair = reflect(&f);
            let verdict = check_reflection_axioms(&f, &pair, 0.0)?;
            Ok(if verdict.is_pass() { 0 } else { 1 })
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let mut oracle_failures = 0usize;
    for i in 0..n_oracle as u64 {
        let mut rng = suite_rng(seed.wrapping_add(1), i);
        let len = rng.random_range(2..=20);
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(-3.0..3.0)).collect();
        let f = GridPath::new(1.0, values)?;
        let pair = reflect(&f);
        let oracle_l = minimal_envelope_oracle(&f);
        let second_route: Vec<f64> = f.running_infimum().values().iter().map(|&v| -v).collect();
        let exact = pair.l.values() == oracle_l.as_slice() && pair.l.values() == second_route.as_slice();
        if !exact {
            oracle_failures += 1;
        }
    }

    let mut report = ExperimentReport::new(
        "reflection-axioms",
        seed,
        serde_json::json!({ "paths": n_paths, "max_cells": max_cells, "oracle_paths": n_oracle }),
    );
    report.stat("axiom_failures", axiom_failures as f64);
    report.stat("oracle_failures", oracle_failures as f64);
    report.stat("paths_checked", n_paths as f64);
    report.stat("oracle_paths_checked", n_oracle as f64);
    report.verdict = if axiom_failures == 0 && oracle_failures == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Clock comparison over random ordered pairs: `driver₂ = driver₁ + lift`
/// with a nonnegative lift (constant on even pairs, cumulative on odd ones),
/// same γ. Every pair must satisfy `C¹ ≤ C² + 2·mesh`.
pub fn monotonicity_suite(seed: u64, n_pairs: usize, mesh_n: u64, horizon: f64, gamma: f64) -> Result<ExperimentReport> {
    let failures: usize = (0..n_pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = suite_rng(seed, i);
            let cfg = SimConfig::new(seed, mesh_n, horizon, 1)?;
            let tr = LevyTriplet::brownian(rng.random_range(0.5..1.5));
            let d1 = sample_path(&tr, &cfg, i)?;
            let step = d1.step();
            let lift: Vec<f64> = if i % 2 == 0 {
                let c = rng.random_range(0.0..1.0);
                vec![c; d1.len()]
            } else {
                let mut acc = 0.0;
                (0..d1.len())
                    .map(|_| {
                        acc += rng.random_range(0.0..2.0 * step);
                        acc
                    })
                    .collect()
            };
            let d2 = GridPath::new(step, d1.values().iter().zip(&lift).map(|(v, l)| v + l).collect())?;
            let z = rng.random_range(0.0..0.5);
            let p1 = TceProblem { driver: d1, z, gamma };
            let p2 = TceProblem { driver: d2, z, gamma };
            let s1 = solve_exact(&p1, step)?;
            let s2 = solve_exact(&p2, step)?;
            let cmp = compare_clocks(&p1, &p2, &s1, &s2, None)?;
            Ok(if cmp.is_pass() { 0 } else { 1 })
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let mut report = ExperimentReport::new(
        "monotonicity",
        seed,
        serde_json::json!({ "pairs": n_pairs, "mesh_n": mesh_n, "horizon": horizon, "gamma": gamma }),
    );
    report.stat("pairs_checked", n_pairs as f64);
    report.stat("failures", failures as f64);
    report.verdict = if failures == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// The staircase demonstration: for `X = −Id`, `z = 0`, `γ = 1` the scheme
/// converges to `C*(t) = t/2`, `Z* ≡ 0`, yet that limit pair leaves an
/// equation residual bounded away from zero — the equation has no solution
/// for this driver.
pub fn no_solution_demo(meshes: &[u64], horizon: f64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "no-solution",
        0,
        serde_json::json!({ "meshes": meshes, "horizon": horizon, "driver": "-Id", "gamma": 1.0 }),
    );
    let mut ok = true;
    let mut finest = 0u64;
    for &n in meshes {
        let step = 1.0 / n as f64;
        let steps = (horizon * n as f64).round() as usize;
        let driver = GridPath::new(step, (0..steps).map(|k| -(k as f64) * step).collect())?;
        let trace = crate::euler::euler_solve(&driver, 0.0, 1.0, steps)?;
        let (z_n, c_n) = crate::euler::reconstruct_processes(&trace, step)?;
        let half = TimeChange::new(vec![0.0, horizon], vec![0.0, horizon / 2.0])?;
        let c_dist = c_n.sup_distance(&half, horizon)?;
        let z_sup = z_n.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        report.stat(&format!("sup_dist_c_half_n{n}"), c_dist);
        report.stat(&format!("sup_abs_z_n{n}"), z_sup);
        if c_dist > 2.0 / n as f64 || z_sup > 1.0 / n as f64 {
            ok = false;
        }
        finest = finest.max(n);
    }

    // the limit pair violates the equation: plug (Z* ≡ 0, C* = t/2) back in
    let n = finest.max(4);
    let step = 1.0 / n as f64;
    let cells = (horizon * n as f64).round() as usize + 1;
    let driver = GridPath::new(step, (0..cells).map(|k| -(k as f64) * step).collect())?;
    let problem = TceProblem { driver, z: 0.0, gamma: 1.0 };
    let z_star = GridPath::new(step, vec![0.0; cells])?;
    let c_star = TimeChange::new(vec![0.0, horizon], vec![0.0, horizon / 2.0])?;
    let residual = residual_of(&problem, &z_star, &c_star)?;
    report.stat("limit_equation_residual", residual.max_equation_residual);
    if residual.max_equation_residual < 0.2 {
        ok = false;
    }

    report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    report.note("the scheme converges but the limit pair does not satisfy the equation (no-solution regime)");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_suite_small_run_passes() {
        let report = reflection_axioms_suite(17, 50, 512, 20).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    }

    #[test]
    fn monotonicity_suite_small_run_passes() {
        let report = monotonicity_suite(23, 25, 128, 1.0, 1.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    }

    #[test]
    fn no_solution_demo_passes() {
        let report = no_solution_demo(&[4, 16, 64, 256], 1.0).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        assert!(report.statistics["limit_equation_residual"] >= 0.2);
        assert!(report.statistics["sup_dist_c_half_n256"] <= 2.0 / 256.0);
    }
}
