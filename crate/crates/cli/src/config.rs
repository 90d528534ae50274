//! JSON experiment configuration shared by the bench commands.
//!
//! A config names the method grid (presets with h and gamma lists), the
//! sampling plan (samples per grid point, runs per sample, global seed) and
//! exactly one generator section (`sbm` or `lfr`) for the synthetic sweeps;
//! the `real` command reuses the same file and ignores the generator
//! section. Every figure and table recipe in `configs/` is one such file.

use std::path::{Path, PathBuf};

use multiplex_louvain::solver::{NodeOrdering, Preset};
use multiplex_louvain::SolverConfig;
use serde::Deserialize;

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingOpt {
    #[default]
    Natural,
    Random,
    CommunitySize,
}

impl OrderingOpt {
    pub fn to_core(self) -> NodeOrdering {
        match self {
            OrderingOpt::Natural => NodeOrdering::Natural,
            OrderingOpt::Random => NodeOrdering::Random,
            OrderingOpt::CommunitySize => NodeOrdering::CommunitySize,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OrderingOpt::Natural => "natural",
            OrderingOpt::Random => "random",
            OrderingOpt::CommunitySize => "community-size",
        }
    }
}

/// One method entry as written in the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub preset: String,
    #[serde(default)]
    pub h: Option<usize>,
    /// Gamma grid; omit for MA and GL.
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
}

/// SBM sweep: fixed within-community probability, the p/q ratio varies.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmBench {
    pub sizes: Vec<usize>,
    pub p_in: f64,
    /// Grid of p/q ratios; q = p_in / ratio.
    pub ratios: Vec<f64>,
    #[serde(default = "one")]
    pub informative_layers: usize,
    #[serde(default)]
    pub noisy_layers: usize,
    /// Edge probability of noisy layers (p = q).
    #[serde(default = "default_p_noise")]
    pub p_noise: f64,
}

/// LFR sweep over the mixing parameter.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LfrBench {
    pub community_sizes: Vec<usize>,
    #[serde(default = "default_avg_degree")]
    pub avg_degree: f64,
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
    #[serde(default = "default_exponent")]
    pub degree_exponent: f64,
    pub mus: Vec<f64>,
    #[serde(default = "one")]
    pub informative_layers: usize,
    /// Noisy layers: one planted community, mu = 0.
    #[serde(default)]
    pub noisy_layers: usize,
}

fn one() -> usize {
    1
}

fn default_p_noise() -> f64 {
    0.1
}

fn default_avg_degree() -> f64 {
    16.0
}

fn default_max_degree() -> usize {
    32
}

fn default_exponent() -> f64 {
    2.0
}

fn default_runs() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Instances sampled per grid point.
    pub samples: usize,
    /// Solver runs per instance and method config.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub ordering: OrderingOpt,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; omitted or 0 means the pool default.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub sbm: Option<SbmBench>,
    #[serde(default)]
    pub lfr: Option<LfrBench>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(CliError::Data("samples must be >= 1".into()));
        }
        if self.runs < 1 {
            return Err(CliError::Data("runs must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Data("the method list is empty".into()));
        }
        expand_methods(&self.methods)?;
        if let Some(sbm) = &self.sbm {
            sbm.validate()?;
        }
        if let Some(lfr) = &self.lfr {
            lfr.validate()?;
        }
        Ok(())
    }
}

impl SbmBench {
    fn validate(&self) -> Result<()> {
        if self.ratios.is_empty() {
            return Err(CliError::Data("sbm.ratios is empty".into()));
        }
        for &r in &self.ratios {
            if !(r >= 1.0) {
                return Err(CliError::Data(format!("sbm ratio {r} must be >= 1")));
            }
        }
        if !(self.p_in > 0.0 && self.p_in <= 1.0) {
            return Err(CliError::Data(format!("sbm.p_in {} outside (0, 1]", self.p_in)));
        }
        if self.informative_layers == 0 {
            return Err(CliError::Data("sbm.informative_layers must be >= 1".into()));
        }
        Ok(())
    }
}

impl LfrBench {
    fn validate(&self) -> Result<()> {
        if self.mus.is_empty() {
            return Err(CliError::Data("lfr.mus is empty".into()));
        }
        for &mu in &self.mus {
            if !(0.0..1.0).contains(&mu) {
                return Err(CliError::Data(format!("lfr mu {mu} outside [0, 1)")));
            }
        }
        if self.informative_layers == 0 {
            return Err(CliError::Data("lfr.informative_layers must be >= 1".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.community_sizes.iter().sum()
    }
}

/// One runnable (preset, h, gamma) cell of the method grid.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub label: String,
    pub preset: Preset,
    pub h: Option<usize>,
    pub gamma: Option<f64>,
}

/// Canonical method names: list capacity spelled into MA/MVM/MVP, fixed-h
/// presets bare.
pub fn method_label(preset: Preset, h: Option<usize>) -> String {
    match preset {
        Preset::Ma | Preset::Mvm | Preset::Mvp => {
            format!("{preset}{}", h.expect("core rejects these presets without h"))
        }
        Preset::Evm | Preset::Evp | Preset::Gl => preset.to_string(),
    }
}

/// Expands the method list into one entry per gamma, validating each cell
/// against the preset taxonomy.
pub fn expand_methods(specs: &[MethodSpec]) -> Result<Vec<MethodConfig>> {
    let mut out = Vec::new();
    for spec in specs {
        let preset: Preset = spec
            .preset
            .parse()
            .map_err(|e: multiplex_louvain::Error| CliError::Data(e.to_string()))?;
        let gammas: Vec<Option<f64>> = match &spec.gammas {
            None => vec![None],
            Some(gs) if gs.is_empty() => {
                return Err(CliError::Data(format!(
                    "{}: the gamma list is empty",
                    spec.preset
                )))
            }
            Some(gs) => gs.iter().map(|&g| Some(g)).collect(),
        };
        for gamma in gammas {
            // dry-run the taxonomy so config errors surface before any work
            SolverConfig::from_preset(preset, spec.h, gamma)
                .map_err(|e| CliError::Data(e.to_string()))?;
            out.push(MethodConfig {
                label: method_label(preset, spec.h),
                preset,
                h: spec.h,
                gamma,
            });
        }
    }
    Ok(out)
}
