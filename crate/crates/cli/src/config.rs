//! Run configuration: one TOML or JSON document per run, with embedded
//! presets for the named scenarios.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sticky_tce::levy::{LevyTriplet, SimConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub mesh_n: u64,
    pub horizon: f64,
    pub ensemble_size: usize,
    /// Initial point of the solution.
    #[serde(default)]
    pub z: f64,
    /// Stickiness parameter.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub triplet: LevyTriplet,
    #[serde(default)]
    pub euler: EulerSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

fn default_gamma() -> f64 {
    1.0
}

/// Settings for `euler-converge`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EulerSection {
    /// Reference mesh for the exact solution.
    pub reference_n: u64,
    /// Coarse meshes; each must divide `reference_n`.
    pub meshes: Vec<u64>,
}

impl Default for EulerSection {
    fn default() -> Self {
        EulerSection { reference_n: 1 << 14, meshes: vec![64, 128, 256, 512, 1024, 2048] }
    }
}

/// Settings for `validate` suites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidateSection {
    /// Random paths for the reflection suite.
    pub paths: usize,
    /// Short paths checked against the brute-force envelope oracle.
    pub oracle_paths: usize,
    /// Driver pairs for the monotonicity suite.
    pub pairs: usize,
    /// Boundary defect injected into the martingale suite's test function.
    pub defect: f64,
    /// Times at which the martingale statistic is evaluated.
    pub t_grid: Vec<f64>,
    /// Stickiness values for the exploratory gamma sweep.
    pub gammas: Vec<f64>,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            paths: 1000,
            oracle_paths: 100,
            pairs: 500,
            defect: 0.0,
            t_grid: vec![0.25, 0.5, 1.0],
            gammas: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

impl RunConfig {
    pub fn sim_config(&self) -> Result<SimConfig> {
        SimConfig::new(self.seed, self.mesh_n, self.horizon, self.ensemble_size)
            .context("invalid simulation layout")
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let is_json = path.extension().map_or(false, |e| e == "json");
        let cfg: RunConfig = if is_json {
            serde_json::from_str(&text).context("config does not match the schema (JSON)")?
        } else {
            toml::from_str(&text).context("config does not match the schema (TOML)")?
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        self.sim_config()?;
        self.triplet.check_parameters()?;
        if !(self.z >= 0.0) {
            bail!("z must be nonnegative, got {}", self.z);
        }
        if !(self.gamma > 0.0) {
            bail!("gamma must be positive, got {}", self.gamma);
        }
        Ok(())
    }

    /// Built-in presets for the named scenarios.
    pub fn preset(name: &str) -> Result<RunConfig> {
        match name {
            "brownian-sticky" => Ok(RunConfig {
                seed: 42,
                mesh_n: 1 << 12,
                horizon: 1.0,
                ensemble_size: 10_000,
                z: 0.0,
                gamma: 1.0,
                triplet: LevyTriplet::brownian(1.0),
                euler: EulerSection::default(),
                validate: ValidateSection::default(),
            }),
            "no-solution" => Ok(RunConfig {
                seed: 0,
                mesh_n: 256,
                horizon: 1.0,
                ensemble_size: 1,
                z: 0.0,
                gamma: 1.0,
                // drift −1, no noise: the staircase driver of the
                // no-solution regime (deliberately bounded variation)
                triplet: LevyTriplet::drifted_brownian(-1.0, 0.0),
                euler: EulerSection { reference_n: 256, meshes: vec![4, 16, 64, 256] },
                validate: ValidateSection::default(),
            }),
            "gamma-sweep" => Ok(RunConfig {
                seed: 42,
                mesh_n: 1 << 12,
                horizon: 1.0,
                ensemble_size: 2_000,
                z: 0.0,
                gamma: 1.0,
                triplet: LevyTriplet::brownian(1.0),
                euler: EulerSection::default(),
                validate: ValidateSection::default(),
            }),
            other => bail!("unknown preset `{other}` (expected brownian-sticky, no-solution or gamma-sweep)"),
        }
    }
}
