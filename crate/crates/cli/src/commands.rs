use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sticky_tce::euler::{convergence_curve, write_convergence_csv};
use sticky_tce::experiments::{
    gamma_sweep_study, martingale_test, monotonicity_suite, no_solution_demo, occupation_study,
    reflection_axioms_suite, ExperimentReport, GeneratorEval, TestFunction, Verdict,
};
use sticky_tce::levy::sample_path;
use sticky_tce::tce::{write_solution_bundle, TceProblem};
use sticky_tce::SimConfig;

use crate::config::RunConfig;
use crate::manifest::ManifestBuilder;
use crate::{EXIT_INCONCLUSIVE, EXIT_MODEL, EXIT_PASS, EXIT_STAT_FAIL};

fn write_run_manifest(dir: &Path, manifest: crate::manifest::RunManifest) -> Result<PathBuf> {
    let path = dir.join("run_manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

fn write_report(dir: &Path, report: &ExperimentReport) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("report.json");
    std::fs::write(&path, report.to_json_pretty())?;
    Ok(path)
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_STAT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let verdict = cfg.triplet.validate();
    if !verdict.is_valid() {
        eprintln!("triplet rejected: {verdict}");
        return Ok(EXIT_MODEL);
    }
    let manifest = ManifestBuilder::start("simulate", cfg)?;
    // one extra driver cell so the solution covers the full horizon
    let sim = SimConfig::new(
        cfg.seed,
        cfg.mesh_n,
        cfg.horizon + 1.0 / cfg.mesh_n as f64,
        cfg.ensemble_size,
    )?;
    let driver = sample_path(&cfg.triplet, &sim, 0)?;
    let problem = TceProblem::new(driver, cfg.z, cfg.gamma)?;
    let solution = problem.solve()?;
    std::fs::create_dir_all(out)?;
    let mut artifacts = write_solution_bundle(out, &problem, &solution, cfg.seed, 0)?;
    let run = manifest.finish(artifacts.clone());
    artifacts.push(write_run_manifest(out, run)?);
    println!(
        "simulate: wrote {} files to {} (zero occupation {:.6})",
        artifacts.len(),
        out.display(),
        solution.zero_occupation
    );
    Ok(EXIT_PASS)
}

pub fn euler_converge(cfg: &RunConfig, out: &Path, preset: Option<&str>) -> Result<u8> {
    if preset == Some("no-solution") {
        let manifest = ManifestBuilder::start("euler-converge --preset no-solution", cfg)?;
        let report = no_solution_demo(&cfg.euler.meshes, cfg.horizon)?;
        let mut artifacts = vec![write_report(out, &report)?];
        // the trace of the finest staircase run, for inspection
        if let Some(&n) = cfg.euler.meshes.iter().max() {
            let step = 1.0 / n as f64;
            let steps = (cfg.horizon * n as f64).round() as usize;
            let driver =
                sticky_tce::GridPath::new(step, (0..steps).map(|k| -(k as f64) * step).collect())?;
            let trace = sticky_tce::euler::euler_solve(&driver, 0.0, 1.0, steps)?;
            let path = out.join(format!("trace_n{n}.csv"));
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            trace.write_csv(&mut file)?;
            file.flush()?;
            artifacts.push(path);
        }
        artifacts.push(write_run_manifest(out, manifest.finish(artifacts.clone()))?);
        println!("no-solution demonstration: verdict {:?}", report.verdict);
        return Ok(verdict_exit(report.verdict));
    }

    let verdict = cfg.triplet.validate();
    if !verdict.is_valid() {
        eprintln!("triplet rejected: {verdict}");
        return Ok(EXIT_MODEL);
    }
    let manifest = ManifestBuilder::start("euler-converge", cfg)?;
    let big_n = cfg.euler.reference_n;
    let sim = SimConfig::new(cfg.seed, big_n, cfg.horizon + 1.0 / big_n as f64, 1)?;
    let driver = sample_path(&cfg.triplet, &sim, 0)?;
    let problem = TceProblem::new(driver, cfg.z, cfg.gamma)?;
    let rows = convergence_curve(&problem, &cfg.euler.meshes, cfg.horizon)?;

    std::fs::create_dir_all(out)?;
    let table = out.join("convergence.csv");
    let mut file = std::io::BufWriter::new(std::fs::File::create(&table)?);
    write_convergence_csv(&rows, &mut file)?;
    file.flush()?;
    let side = out.join("convergence_manifest.json");
    std::fs::write(
        &side,
        serde_json::to_string_pretty(&serde_json::json!({
            "seed": cfg.seed, "gamma": cfg.gamma, "z": cfg.z, "reference_n": big_n,
            "meshes": cfg.euler.meshes,
        }))?,
    )?;
    let mut artifacts = vec![table, side];
    artifacts.push(write_run_manifest(out, manifest.finish(artifacts.clone()))?);
    println!("euler-converge: {} rows written to {}", rows.len(), out.display());
    Ok(EXIT_PASS)
}

pub fn validate(cfg: &RunConfig, out: &Path, suite: &str) -> Result<u8> {
    let manifest = ManifestBuilder::start(&format!("validate --suite {suite}"), cfg)?;
    let v = &cfg.validate;
    let report = match suite {
        "reflection-axioms" => reflection_axioms_suite(cfg.seed, v.paths, 4096, v.oracle_paths)?,
        "monotonicity" => monotonicity_suite(cfg.seed, v.pairs, cfg.mesh_n.min(1024), cfg.horizon, cfg.gamma)?,
        "martingale" => {
            let verdict = cfg.triplet.validate();
            if !verdict.is_valid() {
                eprintln!("triplet rejected: {verdict}");
                return Ok(EXIT_MODEL);
            }
            let generator = GeneratorEval::with_defaults(cfg.triplet.clone())
                .context("generator setup failed")?;
            let f = TestFunction::with_boundary_defect(&generator, cfg.gamma, v.defect)
                .context("test function tuning failed")?;
            let sim = cfg.sim_config()?;
            martingale_test(&cfg.triplet, cfg.z, cfg.gamma, &f, &generator, &v.t_grid, &sim)?
        }
        "occupation" => {
            let verdict = cfg.triplet.validate();
            if !verdict.is_valid() {
                eprintln!("triplet rejected: {verdict}");
                return Ok(EXIT_MODEL);
            }
            occupation_study(&cfg.triplet, cfg.z, cfg.gamma, &cfg.sim_config()?)?
        }
        "gamma-sweep" => gamma_sweep_study(&cfg.triplet, cfg.z, &v.gammas, &cfg.sim_config()?)?,
        other => anyhow::bail!("unknown suite `{other}`"),
    };

    let mut artifacts = vec![write_report(out, &report)?];
    artifacts.push(write_run_manifest(out, manifest.finish(artifacts.clone()))?);
    println!("validate --suite {suite}: verdict {:?}", report.verdict);
    Ok(verdict_exit(report.verdict))
}
