//! Experiment configuration schemas. Every config is strict: unknown fields
//! are rejected before any computation starts.

use crate::CliError;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Uniform,
    Gaf,
    SphericalEnsemble,
    Coulomb,
}

fn default_samples() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub sampler: SamplerKind,
    pub n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Coulomb only; required there.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposal_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_acceptance: Option<f64>,
    /// Number of geometric annealing stages from β = 1; absent or 1 means a
    /// single fixed-temperature stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annealing_stages: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backtrack_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub armijo_c: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Annealed Coulomb chains at β = n whose final states are fed to the
    /// optimizer as warm starts.
    #[serde(default)]
    pub warm_chains: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_chain_steps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Lemmas,
    Perturbation,
    SecondDerivative,
    Theorem,
    Baselines,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Lemmas => "lemmas",
            CheckKind::Perturbation => "perturbation",
            CheckKind::SecondDerivative => "second-derivative",
            CheckKind::Theorem => "theorem",
            CheckKind::Baselines => "baselines",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSweepConfig {
    #[serde(default = "LemmaSweepConfig::default_systems")]
    pub systems: usize,
    #[serde(default = "LemmaSweepConfig::default_max_states")]
    pub max_states: usize,
    #[serde(default = "LemmaSweepConfig::default_beta_min")]
    pub beta_min: f64,
    #[serde(default = "LemmaSweepConfig::default_beta_max")]
    pub beta_max: f64,
}

impl LemmaSweepConfig {
    fn default_systems() -> usize {
        1000
    }
    fn default_max_states() -> usize {
        20
    }
    fn default_beta_min() -> f64 {
        0.1
    }
    fn default_beta_max() -> f64 {
        100.0
    }
}

impl Default for LemmaSweepConfig {
    fn default() -> Self {
        Self {
            systems: Self::default_systems(),
            max_states: Self::default_max_states(),
            beta_min: Self::default_beta_min(),
            beta_max: Self::default_beta_max(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    #[serde(default = "PerturbationConfig::default_n_values")]
    pub n_values: Vec<usize>,
    /// Number of amplitudes spanning (0, √(5n)/2].
    #[serde(default = "PerturbationConfig::default_amplitudes")]
    pub amplitudes: usize,
    #[serde(default = "PerturbationConfig::default_trials")]
    pub trials: usize,
}

impl PerturbationConfig {
    fn default_n_values() -> Vec<usize> {
        vec![2, 3, 4, 6, 12, 20]
    }
    fn default_amplitudes() -> usize {
        5
    }
    fn default_trials() -> usize {
        1000
    }
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            n_values: Self::default_n_values(),
            amplitudes: Self::default_amplitudes(),
            trials: Self::default_trials(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondDerivativeConfig {
    #[serde(default = "PerturbationConfig::default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "SecondDerivativeConfig::default_t_count")]
    pub t_count: usize,
    #[serde(default = "SecondDerivativeConfig::default_directions")]
    pub directions: usize,
}

impl SecondDerivativeConfig {
    fn default_t_count() -> usize {
        5
    }
    fn default_directions() -> usize {
        4
    }
}

impl Default for SecondDerivativeConfig {
    fn default() -> Self {
        Self {
            n_values: PerturbationConfig::default_n_values(),
            t_count: Self::default_t_count(),
            directions: Self::default_directions(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremCase {
    pub n: usize,
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremConfig {
    #[serde(default = "TheoremConfig::default_cases")]
    pub cases: Vec<TheoremCase>,
}

impl TheoremConfig {
    fn default_cases() -> Vec<TheoremCase> {
        [10usize, 20, 50]
            .into_iter()
            .map(|n| TheoremCase {
                n,
                beta: n as f64,
                c: 10.0,
            })
            .collect()
    }
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            cases: Self::default_cases(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselinesConfig {
    #[serde(default = "BaselinesConfig::default_n")]
    pub n: usize,
    #[serde(default = "BaselinesConfig::default_samples")]
    pub samples: usize,
    #[serde(default = "BaselinesConfig::default_uniform_samples")]
    pub uniform_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Coulomb-gas chains to include in the table (0 skips the gas column).
    #[serde(default = "BaselinesConfig::default_chains")]
    pub chains: usize,
    #[serde(default = "BaselinesConfig::default_chain_steps")]
    pub chain_steps: u64,
}

impl BaselinesConfig {
    fn default_n() -> usize {
        16
    }
    fn default_samples() -> usize {
        200
    }
    fn default_uniform_samples() -> usize {
        2000
    }
    fn default_chains() -> usize {
        8
    }
    fn default_chain_steps() -> u64 {
        100_000
    }
}

impl Default for BaselinesConfig {
    fn default() -> Self {
        Self {
            n: Self::default_n(),
            samples: Self::default_samples(),
            uniform_samples: Self::default_uniform_samples(),
            seed: 0,
            chains: Self::default_chains(),
            chain_steps: Self::default_chain_steps(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_derivative: Option<SecondDerivativeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baselines: Option<BaselinesConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFileList {
    reports: Vec<std::path::PathBuf>,
}

pub fn report_file_list(path: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let list: ReportFileList = load(path)?;
    Ok(list.reports)
}
