//! TOML run-configuration files and their resolution into a `SimConfig`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use socsim_core::config::{
    DecaySpec, LlmConfig, PersonaSource, PolicyKind, ScriptedParams, SimConfig, TieMode,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: String,
    pub sim: SimSection,
    #[serde(default)]
    pub rewards: RewardsSection,
    pub ties: TiesSection,
    #[serde(default)]
    pub personas: PersonasSection,
    #[serde(default)]
    pub scripted: Option<ScriptedParams>,
    #[serde(default)]
    pub llm: Option<LlmConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub num_agents: usize,
    pub rounds: u32,
    pub actions_per_round: u32,
    pub seed: u64,
    #[serde(default = "default_policy")]
    pub policy: String,
    #[serde(default = "default_tie_mode")]
    pub tie_mode: String,
    #[serde(default)]
    pub coach: bool,
}

fn default_policy() -> String {
    "scripted".to_string()
}

fn default_tie_mode() -> String {
    "heuristic".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardsSection {
    pub beta_soc: f64,
    pub beta_inf: f64,
    pub beta_pre: f64,
    pub beta_coord: f64,
    pub beta_emo: f64,
    pub epsilon: f64,
}

impl Default for RewardsSection {
    fn default() -> Self {
        RewardsSection {
            beta_soc: 0.5,
            beta_inf: 0.5,
            beta_pre: 0.5,
            beta_coord: 0.5,
            beta_emo: 1.0,
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiesSection {
    pub xi: f64,
    pub delta_max: f64,
    /// Exactly one of `half_life` and `delta` must be present.
    #[serde(default)]
    pub half_life: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    pub beta_rec: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    pub evidence_weights: [f64; 4],
    #[serde(default = "default_true")]
    pub reciprocity_post_update: bool,
}

fn default_threshold() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PersonasSection {
    /// "bundled" or omitted for the built-in sample set.
    #[serde(default)]
    pub source: Option<String>,
    /// Path to a persona file, relative to the config file.
    #[serde(default)]
    pub file: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub policy: Option<PolicyKind>,
    pub tie_mode: Option<TieMode>,
    pub coach: Option<bool>,
}

pub fn parse_policy(s: &str) -> CliResult<PolicyKind> {
    match s {
        "scripted" => Ok(PolicyKind::Scripted),
        "llm" => Ok(PolicyKind::Llm),
        other => Err(CliError::config(format!(
            "sim.policy must be `scripted` or `llm`, got `{other}`"
        ))),
    }
}

pub fn parse_tie_mode(s: &str) -> CliResult<TieMode> {
    match s {
        "heuristic" => Ok(TieMode::Heuristic),
        "text" => Ok(TieMode::Text),
        other => Err(CliError::config(format!(
            "sim.tie_mode must be `heuristic` or `text`, got `{other}`"
        ))),
    }
}

/// Parses and validates a config file, returning the resolved configuration
/// and the raw file bytes (for hashing).
pub fn load_config(path: &Path, overrides: &Overrides) -> CliResult<(SimConfig, Vec<u8>)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::config(format!("{} is not UTF-8", path.display())))?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;

    if file.schema_version != socsim_core::SCHEMA_VERSION {
        return Err(CliError::config(format!(
            "unsupported schema_version `{}`",
            file.schema_version
        )));
    }

    let decay = match (file.ties.half_life, file.ties.delta) {
        (Some(h), None) => DecaySpec::HalfLife(h),
        (None, Some(d)) => DecaySpec::Delta(d),
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "ties: give exactly one of `half_life` and `delta`, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::config(
                "ties: one of `half_life` or `delta` is required",
            ))
        }
    };

    let personas = match (&file.personas.source, &file.personas.file) {
        (_, Some(rel)) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            PersonaSource::File(base.join(rel))
        }
        (Some(s), None) if s == "bundled" => PersonaSource::Bundled,
        (Some(other), None) => {
            return Err(CliError::config(format!(
                "personas.source must be `bundled` (or give personas.file), got `{other}`"
            )))
        }
        (None, None) => PersonaSource::Bundled,
    };

    let config = SimConfig {
        num_agents: file.sim.num_agents,
        rounds: file.sim.rounds,
        actions_per_round: file.sim.actions_per_round,
        seed: overrides.seed.unwrap_or(file.sim.seed),
        policy: match overrides.policy {
            Some(p) => p,
            None => parse_policy(&file.sim.policy)?,
        },
        tie_mode: match overrides.tie_mode {
            Some(m) => m,
            None => parse_tie_mode(&file.sim.tie_mode)?,
        },
        coach_enabled: overrides.coach.unwrap_or(file.sim.coach),
        beta_soc: file.rewards.beta_soc,
        beta_inf: file.rewards.beta_inf,
        beta_pre: file.rewards.beta_pre,
        beta_coord: file.rewards.beta_coord,
        beta_emo: file.rewards.beta_emo,
        beta_rec: file.ties.beta_rec,
        epsilon: file.rewards.epsilon,
        xi: file.ties.xi,
        delta_max: file.ties.delta_max,
        decay,
        threshold: file.ties.threshold,
        evidence_weights: file.ties.evidence_weights,
        reciprocity_post_update: file.ties.reciprocity_post_update,
        personas,
        scripted: file.scripted.unwrap_or_default(),
        llm: file.llm.unwrap_or_default(),
    };
    config.validate().map_err(CliError::from)?;
    Ok((config, bytes))
}
