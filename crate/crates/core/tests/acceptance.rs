//! Acceptance suite: every numbered check prints one pass/fail line and
//! enforces its runtime budget. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p sticky-tce --test acceptance -- --nocapture
//! ```
//!
//! All randomness is seeded; reruns are bit-identical.

use std::time::Instant;

use sticky_tce::clock::TimeChange;
use sticky_tce::euler::{convergence_curve, euler_solve, reconstruct_processes};
use sticky_tce::experiments::{
    martingale_test, monotonicity_suite, occupation_study, reflection_axioms_suite, GeneratorEval,
    TestFunction, Verdict,
};
use sticky_tce::grid::GridPath;
use sticky_tce::levy::{restrict_to_coarser_grid, sample_path, LevyTriplet, SimConfig};
use sticky_tce::tce::{check_residual, residual_of, solve_exact, uniqueness_probe, TceProblem};

struct Criterion {
    label: &'static str,
    budget_seconds: f64,
    started: Instant,
}

impl Criterion {
    fn start(label: &'static str, budget_seconds: f64) -> Self {
        Criterion { label, budget_seconds, started: Instant::now() }
    }

    fn finish(self, detail: String) {
        let elapsed = self.started.elapsed().as_secs_f64();
        println!("acceptance {}: PASS ({elapsed:.1}s) — {detail}", self.label);
        assert!(
            elapsed < self.budget_seconds,
            "{} exceeded its runtime budget: {elapsed:.1}s > {}s",
            self.label,
            self.budget_seconds
        );
    }
}

fn staircase_down(n: u64, cells: usize) -> GridPath {
    let step = 1.0 / n as f64;
    GridPath::new(step, (0..cells).map(|k| -(k as f64) * step).collect()).unwrap()
}

/// 1. Exact counterexample limit: the scheme on `X = −Id`, `z = 0`, `γ = 1`
/// lands within one cell of `C* = t/2`, `Z* ≡ 0` at `n = 256`, yet that
/// limit pair violates the equation by at least 0.2.
#[test]
fn criterion_1_counterexample_limit() {
    let c = Criterion::start("1 (counterexample limit)", 1.0);
    let n = 256u64;
    let driver = staircase_down(n, 256);
    let trace = euler_solve(&driver, 0.0, 1.0, 256).unwrap();
    let (z_n, c_n) = reconstruct_processes(&trace, driver.step()).unwrap();
    let half = TimeChange::new(vec![0.0, 1.0], vec![0.0, 0.5]).unwrap();
    let c_dist = c_n.sup_distance(&half, 1.0).unwrap();
    assert!(c_dist <= 2.0 / n as f64, "sup|C^n − t/2| = {c_dist}");
    let z_sup = z_n.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    assert!(z_sup <= 1.0 / n as f64, "sup|Z^n| = {z_sup}");

    let cells = 257;
    let problem = TceProblem { driver: staircase_down(n, cells), z: 0.0, gamma: 1.0 };
    let z_star = GridPath::new(1.0 / n as f64, vec![0.0; cells]).unwrap();
    let report = residual_of(&problem, &z_star, &half).unwrap();
    assert!(
        report.max_equation_residual >= 0.2,
        "limit-pair residual = {}",
        report.max_equation_residual
    );
    c.finish(format!(
        "sup|C^n − t/2| = {c_dist:.6} ≤ {:.6}, sup|Z^n| = {z_sup:.6}, limit residual = {:.3} ≥ 0.2",
        2.0 / n as f64,
        report.max_equation_residual
    ));
}

/// 2. Reflection axioms at tolerance zero on 1000 random mixed paths and
/// exact agreement with the brute-force minimal envelope on 100 short ones.
#[test]
fn criterion_2_reflection_axioms() {
    let c = Criterion::start("2 (reflection axioms)", 10.0);
    let report = reflection_axioms_suite(20250809, 1000, 4096, 100).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    c.finish(format!(
        "{} paths, {} axiom failures; {} oracle paths, {} mismatches",
        report.statistics["paths_checked"],
        report.statistics["axiom_failures"],
        report.statistics["oracle_paths_checked"],
        report.statistics["oracle_failures"]
    ));
}

/// 3. Residual refinement: on one Brownian path, the equation and clock
/// residuals of the exact construction are positive, shrink under mesh
/// refinement, and end below 0.05 at n = 2^12.
#[test]
fn criterion_3_residual_refinement() {
    let c = Criterion::start("3 (residual refinement)", 30.0);
    let tr = LevyTriplet::brownian(1.0);
    let fine_n = 1u64 << 12;
    let cfg = SimConfig::new(7, fine_n, 1.0 + 1.0 / fine_n as f64, 1).unwrap();
    let fine = sample_path(&tr, &cfg, 0).unwrap();
    let mut residuals = Vec::new();
    for n in [1u64 << 8, 1 << 10, 1 << 12] {
        let driver = restrict_to_coarser_grid(&fine, n).unwrap();
        let p = TceProblem { driver, z: 0.0, gamma: 1.0 };
        let sol = solve_exact(&p, p.driver.step()).unwrap();
        let rep = check_residual(&p, &sol).unwrap();
        residuals.push((n, rep.max_equation_residual, rep.max_clock_residual));
    }
    for &(n, eq, clock) in &residuals {
        assert!(eq > 0.0 && clock > 0.0, "residuals must be positive at n = {n}");
    }
    for w in residuals.windows(2) {
        assert!(w[1].1 < w[0].1, "equation residual must decrease: {residuals:?}");
        assert!(w[1].2 < w[0].2, "clock residual must decrease: {residuals:?}");
    }
    let last = residuals.last().unwrap();
    assert!(last.1 <= 0.05 && last.2 <= 0.05, "residual at 2^12 too large: {residuals:?}");
    c.finish(format!(
        "equation residuals {:.4} → {:.4} → {:.4} (≤ 0.05 at n = 4096)",
        residuals[0].1, residuals[1].1, residuals[2].1
    ));
}

/// 4. Clock comparison: 500 random ordered driver pairs, same γ, all clocks
/// ordered within 2·mesh.
#[test]
fn criterion_4_monotonicity() {
    let c = Criterion::start("4 (clock monotonicity)", 60.0);
    let report = monotonicity_suite(31337, 500, 512, 1.0, 1.0).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    c.finish(format!(
        "{} ordered pairs, {} comparison failures",
        report.statistics["pairs_checked"], report.statistics["failures"]
    ));
}

/// 5. Scheme convergence: over 100 Brownian seeds against the exact solution
/// at N = 2^14, the clock distance falls from n = 2^6 to n = 2^11 on at
/// least 90 seeds and the path J1 distance on at least 95.
#[test]
fn criterion_5_euler_convergence() {
    let c = Criterion::start("5 (euler convergence)", 600.0);
    let tr = LevyTriplet::brownian(1.0);
    let meshes = [64u64, 128, 256, 512, 1024, 2048];
    let big_n = 1u64 << 14;
    use rayon::prelude::*;
    let outcomes: Vec<(bool, bool)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = SimConfig::new(1000 + seed, big_n, 1.0 + 1.0 / big_n as f64, 1).unwrap();
            let driver = sample_path(&tr, &cfg, 0).unwrap();
            let p = TceProblem { driver, z: 0.0, gamma: 1.0 };
            let rows = convergence_curve(&p, &meshes, 1.0).unwrap();
            let c_falls = rows.last().unwrap().sup_dist_c < rows.first().unwrap().sup_dist_c;
            let z_falls = rows.last().unwrap().j1_dist_z < rows.first().unwrap().j1_dist_z;
            (c_falls, z_falls)
        })
        .collect();
    let c_count = outcomes.iter().filter(|o| o.0).count();
    let z_count = outcomes.iter().filter(|o| o.1).count();
    assert!(c_count >= 90, "sup_dist_C fell on only {c_count}/100 seeds");
    assert!(z_count >= 95, "j1_dist_Z fell on only {z_count}/100 seeds");
    c.finish(format!(
        "sup_dist_C fell across meshes on {c_count}/100 seeds (≥90), j1_dist_Z on {z_count}/100 (≥95)"
    ));
}

/// 6. Sticky occupation: 10^4 replicates from z = 0 at n = 2^12 all spend
/// strictly positive time at zero.
#[test]
fn criterion_6_sticky_occupation() {
    let c = Criterion::start("6 (sticky occupation)", 300.0);
    let tr = LevyTriplet::brownian(1.0);
    let cfg = SimConfig::new(9, 1 << 12, 1.0, 10_000).unwrap();
    let report = occupation_study(&tr, 0.0, 1.0, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    assert_eq!(report.statistics["positive_occupation_fraction_n4096"], 1.0);
    assert!(report.statistics["zero_occupation_min_n4096"] > 0.0);
    c.finish(format!(
        "zero occupation > 0 on 100% of 10^4 replicates; mean {:.4} ± {:.4} (SE), min {:.2e}",
        report.statistics["zero_occupation_mean"],
        report.statistics["zero_occupation_se"],
        report.statistics["zero_occupation_min_n4096"]
    ));
}

/// 7. Martingale characterization: with a boundary-satisfying bump the drift
/// statistic stays inside 3·SE at t ∈ {0.25, 0.5, 1.0} over 10^5 replicates;
/// injecting boundary defect 1 produces a drift of matching sign with
/// one-sided p < 0.01.
#[test]
fn criterion_7_martingale_generator() {
    let c = Criterion::start("7 (martingale/generator)", 1200.0);
    let tr = LevyTriplet::brownian(1.0);
    let generator = GeneratorEval::with_defaults(tr.clone()).unwrap();

    let f_ok = TestFunction::with_boundary_defect(&generator, 1.0, 0.0).unwrap();
    let defect_ok = generator.boundary_defect(&f_ok, 1.0).unwrap();
    assert!(defect_ok.abs() <= 1e-8, "tuned defect = {defect_ok}");
    let cfg = SimConfig::new(7, 1 << 14, 1.0, 100_000).unwrap();
    let report = martingale_test(&tr, 0.0, 1.0, &f_ok, &generator, &[0.25, 0.5, 1.0], &cfg).unwrap();
    for t in ["0.25", "0.5", "1"] {
        let m = report.statistics[&format!("m_at_{t}")];
        let se = report.statistics[&format!("m_se_at_{t}")];
        assert!(m.abs() <= 3.0 * se, "|m({t})| = {} > 3·SE = {}", m.abs(), 3.0 * se);
    }
    assert_eq!(report.verdict, Verdict::Pass, "{report:?}");

    let f_bad = TestFunction::with_boundary_defect(&generator, 1.0, 1.0).unwrap();
    let cfg_bad = SimConfig::new(7, 1 << 12, 1.0, 20_000).unwrap();
    let bad = martingale_test(&tr, 0.0, 1.0, &f_bad, &generator, &[0.25, 0.5, 1.0], &cfg_bad).unwrap();
    assert_eq!(bad.verdict, Verdict::Fail, "defect run must fail: {bad:?}");
    let drift = bad.statistics["m_at_1"];
    assert!(drift > 0.0, "drift sign must match the defect, got {drift}");
    let p_value = bad.statistics["defect_drift_p"];
    assert!(p_value < 0.01, "sign test p = {p_value}");

    c.finish(format!(
        "boundary-satisfying f: |m| ≤ 3·SE at all t (m(1) = {:+.2e}, SE {:.1e}); defect 1 drifts {:+.3} with p = {:.1e}",
        report.statistics["m_at_1"],
        report.statistics["m_se_at_1"],
        drift,
        p_value
    ));
}

/// 8. Uniqueness as cross-method agreement: on every tested seed the Euler
/// pair at n = 2^11 sits closer to the exact solution (N = 2^14) than the
/// n = 2^6 pair does, in both criterion-5 metrics, and the uniqueness probe
/// accepts the exact solution within its own residual budget.
#[test]
fn criterion_8_uniqueness_probe() {
    let c = Criterion::start("8 (uniqueness probe)", 600.0);
    let tr = LevyTriplet::brownian(1.0);
    let big_n = 1u64 << 14;
    use rayon::prelude::*;
    let worst: Vec<(f64, f64)> = (5000..5025u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = SimConfig::new(seed, big_n, 1.0 + 1.0 / big_n as f64, 1).unwrap();
            let driver = sample_path(&tr, &cfg, 0).unwrap();
            let p = TceProblem { driver, z: 0.0, gamma: 1.0 };
            let rows = convergence_curve(&p, &[64, 2048], 1.0).unwrap();
            assert!(
                rows[1].sup_dist_c <= rows[0].sup_dist_c,
                "seed {seed}: clock distance grew: {rows:?}"
            );
            assert!(
                rows[1].j1_dist_z <= rows[0].j1_dist_z,
                "seed {seed}: path distance grew: {rows:?}"
            );
            let sol = solve_exact(&p, p.driver.step()).unwrap();
            let rep = check_residual(&p, &sol).unwrap();
            let tol = rep.max_equation_residual.max(rep.max_clock_residual) * 1.5 + 1e-12;
            let probe = uniqueness_probe(&p, &sol.z_path, &sol.clock, tol).unwrap();
            assert!(probe.is_pass(), "seed {seed}: {probe:?}");
            (rows[1].sup_dist_c, rows[1].j1_dist_z)
        })
        .collect();
    let max_c = worst.iter().map(|w| w.0).fold(0.0f64, f64::max);
    let max_z = worst.iter().map(|w| w.1).fold(0.0f64, f64::max);
    c.finish(format!(
        "25 seeds: fine-mesh Euler within coarse-mesh distances everywhere (worst sup_C {max_c:.4}, worst j1_Z {max_z:.4}); probe accepts the exact solution on all seeds"
    ));
}
