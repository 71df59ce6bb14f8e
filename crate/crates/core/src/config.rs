//! Resolved simulation configuration and its validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ties::half_life_to_delta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieMode {
    Heuristic,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Scripted,
    Llm,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Scripted => "scripted",
            PolicyKind::Llm => "llm",
        }
    }
}

/// Tie decay, given either directly or through a half-life.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecaySpec {
    HalfLife(f64),
    Delta(f64),
}

impl DecaySpec {
    /// The per-round decay factor delta in [0,1).
    pub fn delta(self) -> Result<f64> {
        match self {
            DecaySpec::Delta(d) => {
                if !(0.0..1.0).contains(&d) {
                    Err(Error::config(format!("delta must lie in [0,1), got {d}")))
                } else {
                    Ok(d)
                }
            }
            DecaySpec::HalfLife(h) => half_life_to_delta(h),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PersonaSource {
    Bundled,
    File(PathBuf),
}

/// Tunables of the scripted baseline policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScriptedParams {
    /// Logistic vote model: p(+1) = sigma(tie_coeff*w + stance_coeff*s + agree_coeff*a + bias).
    pub vote_tie_coeff: f64,
    pub vote_stance_coeff: f64,
    pub vote_agree_coeff: f64,
    pub vote_bias: f64,
    /// Dislike when stance alignment is below this and agreeableness below the next.
    pub dislike_stance_below: f64,
    pub dislike_agree_below: f64,
    /// Always reply to last round's DM senders when the SOC weight reaches this.
    pub soc_reply_threshold: f64,
    /// EMA factor for opinion strength updates.
    pub opinion_ema: f64,
    /// Score free text with the lexicon scorer instead of the tone constant.
    pub lexicon_sentiment: bool,
}

impl Default for ScriptedParams {
    fn default() -> Self {
        ScriptedParams {
            vote_tie_coeff: 2.0,
            vote_stance_coeff: 1.0,
            vote_agree_coeff: 1.0,
            vote_bias: -1.0,
            dislike_stance_below: -0.5,
            dislike_agree_below: 0.4,
            soc_reply_threshold: 0.3,
            opinion_ema: 0.5,
            lexicon_sentiment: false,
        }
    }
}

/// Chat-completion backend settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    /// Hard cap on rendered prompt length; context lists are trimmed oldest
    /// first to fit, contract sections are never cut.
    pub char_budget: usize,
    pub timeout_secs: u64,
    /// Transport-level retries on transient failures (429/5xx/timeouts).
    pub transport_retries: u32,
    pub backoff_base_ms: u64,
    /// Reject responses with extra keys; disable for weaker models.
    pub strict_parsing: bool,
    pub max_in_flight: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: "http://127.0.0.1:8080/v1/chat/completions".to_string(),
            model: "default-model".to_string(),
            temperature: 0.7,
            api_key_env: "SOCSIM_API_KEY".to_string(),
            char_budget: 16_000,
            timeout_secs: 60,
            transport_retries: 3,
            backoff_base_ms: 250,
            strict_parsing: true,
            max_in_flight: 1,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_agents: usize,
    pub rounds: u32,
    pub actions_per_round: u32,
    pub seed: u64,
    pub policy: PolicyKind,
    pub tie_mode: TieMode,
    pub coach_enabled: bool,

    pub beta_soc: f64,
    pub beta_inf: f64,
    pub beta_pre: f64,
    pub beta_coord: f64,
    pub beta_emo: f64,
    pub beta_rec: f64,
    pub epsilon: f64,

    pub xi: f64,
    pub delta_max: f64,
    pub decay: DecaySpec,
    pub threshold: f64,
    pub evidence_weights: [f64; 4],
    /// Use post-update reciprocity EMAs inside the same round (the default);
    /// switch off to use the pre-update values instead.
    pub reciprocity_post_update: bool,

    pub personas: PersonaSource,
    pub scripted: ScriptedParams,
    pub llm: LlmConfig,
}

impl SimConfig {
    /// A scripted-policy configuration with library defaults.
    pub fn defaults(num_agents: usize, rounds: u32, actions_per_round: u32, seed: u64) -> Self {
        SimConfig {
            num_agents,
            rounds,
            actions_per_round,
            seed,
            policy: PolicyKind::Scripted,
            tie_mode: TieMode::Heuristic,
            coach_enabled: false,
            beta_soc: 0.5,
            beta_inf: 0.5,
            beta_pre: 0.5,
            beta_coord: 0.5,
            beta_emo: 1.0,
            beta_rec: 0.9,
            epsilon: 1e-6,
            xi: 0.45,
            delta_max: 0.15,
            decay: DecaySpec::HalfLife(3.0),
            threshold: 0.5,
            evidence_weights: [0.25, 0.25, 0.25, 0.25],
            reciprocity_post_update: true,
            personas: PersonaSource::Bundled,
            scripted: ScriptedParams::default(),
            llm: LlmConfig::default(),
        }
    }

    pub fn delta(&self) -> Result<f64> {
        self.decay.delta()
    }

    pub fn validate(&self) -> Result<()> {
        fn in_unit(name: &str, v: f64) -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must lie in [0,1], got {v}")));
            }
            Ok(())
        }

        if self.num_agents == 0 {
            return Err(Error::config("num_agents must be positive"));
        }
        if self.rounds == 0 {
            return Err(Error::config("rounds must be positive"));
        }
        if self.actions_per_round == 0 {
            return Err(Error::config("actions_per_round must be positive"));
        }
        in_unit("beta_soc", self.beta_soc)?;
        in_unit("beta_inf", self.beta_inf)?;
        in_unit("beta_pre", self.beta_pre)?;
        in_unit("beta_coord", self.beta_coord)?;
        if !self.beta_emo.is_finite() {
            return Err(Error::config("beta_emo must be finite"));
        }
        if !(self.beta_rec > 0.0 && self.beta_rec < 1.0) {
            return Err(Error::config(format!(
                "beta_rec must lie in (0,1), got {}",
                self.beta_rec
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be > 0"));
        }
        if !(0.0..1.0).contains(&self.xi) {
            return Err(Error::config(format!("xi must lie in [0,1), got {}", self.xi)));
        }
        if !(self.delta_max >= 0.0) {
            return Err(Error::config("delta_max must be >= 0"));
        }
        self.delta()?;
        in_unit("threshold", self.threshold)?;
        let mut sum = 0.0;
        for (i, w) in self.evidence_weights.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::config(format!(
                    "evidence_weights[{i}] must be finite and >= 0"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "evidence_weights must sum to 1 (got {sum})"
            )));
        }
        if !(0.0..=1.0).contains(&self.llm.temperature) && self.llm.temperature > 2.0 {
            return Err(Error::config("llm temperature out of range"));
        }
        Ok(())
    }
}
