//! Agent personas: identity, traits, reward weights, and memory stores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ActionId, UserId};

/// The five behavioral reward components, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardComponent {
    Soc,
    Inf,
    Pre,
    Coord,
    Emo,
}

impl RewardComponent {
    pub const ALL: [RewardComponent; 5] = [
        RewardComponent::Soc,
        RewardComponent::Inf,
        RewardComponent::Pre,
        RewardComponent::Coord,
        RewardComponent::Emo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewardComponent::Soc => "SOC",
            RewardComponent::Inf => "INF",
            RewardComponent::Pre => "PRE",
            RewardComponent::Coord => "COORD",
            RewardComponent::Emo => "EMO",
        }
    }
}

/// Per-persona mixing weights over the reward components. Non-negative,
/// summing to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub soc: f64,
    pub inf: f64,
    pub pre: f64,
    pub coord: f64,
    pub emo: f64,
}

impl RewardWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn uniform() -> Self {
        RewardWeights {
            soc: 0.2,
            inf: 0.2,
            pre: 0.2,
            coord: 0.2,
            emo: 0.2,
        }
    }

    /// All weight on a single component.
    pub fn pure(component: RewardComponent) -> Self {
        let mut w = RewardWeights {
            soc: 0.0,
            inf: 0.0,
            pre: 0.0,
            coord: 0.0,
            emo: 0.0,
        };
        *w.get_mut(component) = 1.0;
        w
    }

    pub fn get(&self, component: RewardComponent) -> f64 {
        match component {
            RewardComponent::Soc => self.soc,
            RewardComponent::Inf => self.inf,
            RewardComponent::Pre => self.pre,
            RewardComponent::Coord => self.coord,
            RewardComponent::Emo => self.emo,
        }
    }

    fn get_mut(&mut self, component: RewardComponent) -> &mut f64 {
        match component {
            RewardComponent::Soc => &mut self.soc,
            RewardComponent::Inf => &mut self.inf,
            RewardComponent::Pre => &mut self.pre,
            RewardComponent::Coord => &mut self.coord,
            RewardComponent::Emo => &mut self.emo,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (RewardComponent, f64)> + '_ {
        RewardComponent::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    pub fn validate(&self) -> Result<()> {
        for (c, w) in self.iter() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::config(format!(
                    "reward weight {} must be finite and >= 0, got {w}",
                    c.name()
                )));
            }
        }
        let sum: f64 = self.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::config(format!(
                "reward weights must sum to 1 (got {sum})"
            )));
        }
        Ok(())
    }
}

/// Big Five trait scores in [0,1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigFive {
    pub openness: f64,
    pub conscientiousness: f64,
    pub extraversion: f64,
    pub agreeableness: f64,
    pub neuroticism: f64,
}

impl BigFive {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("openness", self.openness),
            ("conscientiousness", self.conscientiousness),
            ("extraversion", self.extraversion),
            ("agreeableness", self.agreeableness),
            ("neuroticism", self.neuroticism),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!(
                    "big five trait {name} must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// How an action entered the conversation log.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvRole {
    Sent,
    Received,
    Saw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConversationEntry {
    pub round: u32,
    pub action: ActionId,
    pub role: ConvRole,
}

/// What an agent remembers about one peer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct RelationshipEntry {
    pub last_round: u32,
    pub sent: u32,
    pub received: u32,
    /// Smoothed count of likes this agent gave the peer.
    pub ema_likes_to: f64,
    /// Smoothed count of likes received from the peer.
    pub ema_likes_from: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpinionEntry {
    pub text: String,
    /// Signed stance strength in [-1,1].
    pub strength: f64,
}

/// The three per-agent memory stores. The conversation log is append-only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct MemoryStores {
    pub conversation: Vec<ConversationEntry>,
    pub relationship: BTreeMap<UserId, RelationshipEntry>,
    pub opinion: BTreeMap<String, OpinionEntry>,
}

impl MemoryStores {
    pub fn record_conversation(&mut self, round: u32, action: ActionId, role: ConvRole) {
        self.conversation.push(ConversationEntry {
            round,
            action,
            role,
        });
    }

    pub fn relationship_mut(&mut self, peer: &UserId) -> &mut RelationshipEntry {
        self.relationship.entry(peer.clone()).or_default()
    }
}

/// A complete agent profile, including its evolving memory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Persona {
    pub user: UserId,
    pub name: String,
    pub role: String,
    pub description: String,
    pub stance: String,
    pub comm_style: String,
    pub big_five: BigFive,
    pub reward_weights: RewardWeights,
    #[serde(default)]
    pub memory: MemoryStores,
}

impl Persona {
    pub fn validate(&self) -> Result<()> {
        if self.user.is_empty() {
            return Err(Error::config("persona user id must be non-empty"));
        }
        self.big_five.validate()?;
        self.reward_weights.validate()
    }
}

/// The persisted persona form: every profile field except memory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersonaRecord {
    pub user: UserId,
    pub name: String,
    pub role: String,
    pub description: String,
    pub stance: String,
    pub comm_style: String,
    pub big_five: BigFive,
    pub reward_weights: RewardWeights,
}

impl From<PersonaRecord> for Persona {
    fn from(r: PersonaRecord) -> Self {
        Persona {
            user: r.user,
            name: r.name,
            role: r.role,
            description: r.description,
            stance: r.stance,
            comm_style: r.comm_style,
            big_five: r.big_five,
            reward_weights: r.reward_weights,
            memory: MemoryStores::default(),
        }
    }
}

impl From<&Persona> for PersonaRecord {
    fn from(p: &Persona) -> Self {
        PersonaRecord {
            user: p.user.clone(),
            name: p.name.clone(),
            role: p.role.clone(),
            description: p.description.clone(),
            stance: p.stance.clone(),
            comm_style: p.comm_style.clone(),
            big_five: p.big_five,
            reward_weights: p.reward_weights,
        }
    }
}

/// On-disk persona file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PersonaFile {
    pub schema_version: String,
    pub personas: Vec<PersonaRecord>,
}

impl PersonaFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: PersonaFile = serde_json::from_str(text)?;
        if file.schema_version != crate::SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported persona schema_version {}",
                file.schema_version
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for rec in &file.personas {
            Persona::from(rec.clone()).validate()?;
            if !seen.insert(rec.user.clone()) {
                return Err(Error::config(format!("duplicate persona user {}", rec.user)));
            }
        }
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::artifact(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

const BUNDLED_PERSONAS: &str = include_str!("../assets/personas_sample.json");

/// The bundled 30-persona sample set used when no persona file is given and
/// persona generation is disabled.
pub fn bundled_personas() -> Vec<PersonaRecord> {
    PersonaFile::parse(BUNDLED_PERSONAS)
        .expect("bundled persona set must be valid")
        .personas
}
