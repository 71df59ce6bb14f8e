//! Core domain types: users, actions, votes, and round batches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque agent identifier, unique within a run and stable across rounds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        debug_assert!(!id.is_empty(), "user ids must be non-empty");
        UserId(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId::new(s)
    }
}

/// Monotone action identifier, unique within a run.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ActionId(pub u64);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ActionType {
    Post,
    Com,
    Dm,
    Not,
}

impl ActionType {
    pub fn name(self) -> &'static str {
        match self {
            ActionType::Post => "POST",
            ActionType::Com => "COM",
            ActionType::Dm => "DM",
            ActionType::Not => "NOT",
        }
    }

    /// Direct exchanges: the actions that carry one-to-one engagement.
    pub fn is_direct(self) -> bool {
        matches!(self, ActionType::Dm | ActionType::Com)
    }

    /// Publicly visible content.
    pub fn is_public(self) -> bool {
        matches!(self, ActionType::Post | ActionType::Com)
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tone {
    Supportive,
    Neutral,
    Critical,
}

impl Tone {
    pub fn name(self) -> &'static str {
        match self {
            Tone::Supportive => "supportive",
            Tone::Neutral => "neutral",
            Tone::Critical => "critical",
        }
    }
}

/// One agent act in one round slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub id: ActionId,
    pub round: u32,
    #[serde(rename = "type")]
    pub kind: ActionType,
    pub sender: UserId,
    pub recipient: Option<UserId>,
    pub target_id: Option<ActionId>,
    pub topic: Option<String>,
    pub mentions: BTreeSet<UserId>,
    pub tone: Tone,
    pub content: String,
    pub sentiment: f64,
}

impl Action {
    /// Checks the per-type field invariants. `resolve` maps a target action id
    /// to its type, when known.
    pub fn check_invariants(
        &self,
        resolve: impl Fn(ActionId) -> Option<ActionType>,
    ) -> std::result::Result<(), String> {
        if self.sender.is_empty() {
            return Err("empty sender".into());
        }
        if !(-1.0..=1.0).contains(&self.sentiment) {
            return Err(format!("sentiment {} outside [-1,1]", self.sentiment));
        }
        if self.mentions.contains(&self.sender) {
            return Err("sender mentions itself".into());
        }
        match self.kind {
            ActionType::Post => {
                if self.recipient.is_some() || self.target_id.is_some() {
                    return Err("POST must have no recipient/target".into());
                }
                if self.topic.is_none() {
                    return Err("POST requires a topic".into());
                }
            }
            ActionType::Com => {
                if self.recipient.is_some() {
                    return Err("COM must have no recipient".into());
                }
                match self.target_id {
                    None => return Err("COM requires a target".into()),
                    Some(t) => match resolve(t) {
                        Some(ActionType::Post) | Some(ActionType::Com) => {}
                        Some(_) => return Err("COM target must be a POST or COM".into()),
                        None => return Err(format!("COM target {t} unknown")),
                    },
                }
            }
            ActionType::Dm => {
                if self.recipient.is_none() {
                    return Err("DM requires a recipient".into());
                }
                if let Some(t) = self.target_id {
                    match resolve(t) {
                        Some(ActionType::Dm) => {}
                        Some(_) => return Err("DM reply target must be a DM".into()),
                        None => return Err(format!("DM target {t} unknown")),
                    }
                }
            }
            ActionType::Not => {
                if self.recipient.is_some()
                    || self.topic.is_some()
                    || self.target_id.is_some()
                    || !self.mentions.is_empty()
                {
                    return Err("NOT must carry no recipient/topic/target/mentions".into());
                }
            }
        }
        Ok(())
    }
}

/// A like (+1), dislike (-1), or explicit neutral (0) cast on same-round
/// public content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub voter: UserId,
    pub content_id: ActionId,
    pub value: i8,
    pub round: u32,
}

impl Vote {
    pub fn is_like(&self) -> bool {
        self.value == 1
    }

    pub fn is_dislike(&self) -> bool {
        self.value == -1
    }
}

/// All actions and votes of one round; the unit over which rewards and tie
/// updates are computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct RoundBatch {
    pub round: u32,
    pub actions: Vec<Action>,
    pub votes: Vec<Vote>,
}

impl RoundBatch {
    pub fn new(round: u32) -> Self {
        RoundBatch {
            round,
            actions: Vec::new(),
            votes: Vec::new(),
        }
    }

    pub fn actions_by<'a>(&'a self, user: &'a UserId) -> impl Iterator<Item = &'a Action> {
        self.actions.iter().filter(move |a| &a.sender == user)
    }

    /// DM and COM actions, network-wide.
    pub fn direct_exchanges(&self) -> impl Iterator<Item = &Action> {
        self.actions.iter().filter(|a| a.kind.is_direct())
    }

    /// POST and COM actions, network-wide.
    pub fn public_actions(&self) -> impl Iterator<Item = &Action> {
        self.actions.iter().filter(|a| a.kind.is_public())
    }

    pub fn action(&self, id: ActionId) -> Option<&Action> {
        self.actions.iter().find(|a| a.id == id)
    }
}

/// Lightweight per-action metadata kept for every action of every completed
/// round, so that comment/vote targets resolve to their authors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionMeta {
    pub author: UserId,
    pub kind: ActionType,
    pub topic: Option<String>,
    pub round: u32,
}

/// Author/topic lookup across rounds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionIndex {
    meta: BTreeMap<ActionId, ActionMeta>,
}

impl ActionIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_action(&mut self, action: &Action) {
        self.meta.insert(
            action.id,
            ActionMeta {
                author: action.sender.clone(),
                kind: action.kind,
                topic: action.topic.clone(),
                round: action.round,
            },
        );
    }

    pub fn insert_batch(&mut self, batch: &RoundBatch) {
        for a in &batch.actions {
            self.insert_action(a);
        }
    }

    pub fn meta(&self, id: ActionId) -> Option<&ActionMeta> {
        self.meta.get(&id)
    }

    pub fn author_of(&self, id: ActionId) -> Option<&UserId> {
        self.meta.get(&id).map(|m| &m.author)
    }

    pub fn kind_of(&self, id: ActionId) -> Option<ActionType> {
        self.meta.get(&id).map(|m| m.kind)
    }

    pub fn len(&self) -> usize {
        self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meta.is_empty()
    }
}

/// The user a direct exchange lands on: the recipient for a DM, the target's
/// author for a COM.
pub fn received_by<'a>(action: &'a Action, index: &'a ActionIndex) -> Option<&'a UserId> {
    match action.kind {
        ActionType::Dm => action.recipient.as_ref(),
        ActionType::Com => action.target_id.and_then(|t| index.author_of(t)),
        _ => None,
    }
}

/// Canonical topic form: lowercase, whitespace-collapsed, at most five words.
pub fn canonical_topic(raw: &str) -> String {
    raw.to_lowercase()
        .split_whitespace()
        .take(5)
        .collect::<Vec<_>>()
        .join(" ")
}
