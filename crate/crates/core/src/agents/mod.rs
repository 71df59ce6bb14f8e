//! Policy contracts: plan structure and validation, the deterministic coach,
//! vote and tie-rating interfaces, and sentiment assignment.

pub mod scripted;

pub use scripted::{like_probability, ScriptedPolicy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand_chacha::ChaCha12Rng;

use crate::persona::{Persona, RewardComponent, RewardWeights};
use crate::rewards::RewardVector;
use crate::types::{Action, ActionId, ActionType, Tone, UserId};

/// One planned slot, before execution fills in ids, content, and mentions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedAction {
    pub kind: ActionType,
    pub recipient: Option<UserId>,
    pub topic: Option<String>,
    pub target_id: Option<ActionId>,
    pub mention_flag: bool,
    pub tone: Tone,
}

impl PlannedAction {
    pub fn not() -> Self {
        PlannedAction {
            kind: ActionType::Not,
            recipient: None,
            topic: None,
            target_id: None,
            mention_flag: false,
            tone: Tone::Neutral,
        }
    }
}

/// Exactly N planned actions for one agent-round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionPlan {
    pub slots: Vec<PlannedAction>,
}

impl ActionPlan {
    /// The fallback plan: every slot a NOT.
    pub fn all_not(n: u32) -> Self {
        ActionPlan {
            slots: (0..n).map(|_| PlannedAction::not()).collect(),
        }
    }
}

/// A DM received last round that can be answered in reply mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmReplyCandidate {
    pub id: ActionId,
    pub author: UserId,
    pub topic: Option<String>,
    pub content: String,
}

/// A public item from last round that can be commented on. The engine orders
/// these by last-round like count (descending), so the first entry is the
/// top-liked post.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommentablePost {
    pub id: ActionId,
    pub author: UserId,
    pub topic: Option<String>,
    pub content: String,
    pub likes: u32,
}

/// What a tip points the agent at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TipTarget {
    User(UserId),
    TopLikedPost,
    NewTopic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoachTip {
    pub action: ActionType,
    pub target: TipTarget,
    pub topic_hint: Option<String>,
    pub invite_mention: bool,
    pub tone: Tone,
}

/// Ordered coach output: three to five tips, highest reward gap first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoachTips {
    pub tips: Vec<CoachTip>,
}

/// Coach output plus the gap ranking that produced it. The ranking feeds the
/// text prompt's priority line in chat-backed runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoachAdvice {
    /// Components with their gaps, largest gap first.
    pub ranked: Vec<(RewardComponent, f64)>,
    pub tips: CoachTips,
}

/// The agent's best round so far, summarized for the planning prompt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRoundSummary {
    pub round: u32,
    pub total: f64,
    pub summary: String,
}

/// Everything an agent sees while planning one round. All referenced ids
/// exist in the snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanContext {
    pub round: u32,
    pub n_actions: u32,
    /// The agent's visible slice of the previous round.
    pub visible: Vec<Action>,
    pub last_rewards: Option<RewardVector>,
    pub best: Option<BestRoundSummary>,
    pub weights: RewardWeights,
    /// Other agents (never includes the planner).
    pub roster: Vec<UserId>,
    /// Topics this agent has encountered so far, sorted.
    pub known_topics: Vec<String>,
    pub dm_replies: Vec<DmReplyCandidate>,
    pub commentable: Vec<CommentablePost>,
    pub coach: Option<CoachAdvice>,
}

/// A machine-readable reason a plan slot is invalid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanViolation {
    SlotCount { expected: u32, got: usize },
    RecipientForbidden { slot: usize },
    TargetForbidden { slot: usize },
    TopicForbidden { slot: usize },
    TopicMissing { slot: usize },
    RecipientMissing { slot: usize },
    TargetMissing { slot: usize },
    InvalidComTarget { slot: usize },
    InvalidDmTarget { slot: usize },
    DmRecipientMismatch { slot: usize },
    UnknownRecipient { slot: usize },
    MentionFlagForbidden { slot: usize },
    RoundOneMustPost { slot: usize },
}

/// Checks a plan against the planning contract: slot count, per-type field
/// nullability, target validity against the context lists, and the opening
/// round's POST-only rule.
pub fn validate_plan(plan: &ActionPlan, ctx: &PlanContext) -> Result<(), Vec<PlanViolation>> {
    let mut violations = Vec::new();
    if plan.slots.len() != ctx.n_actions as usize {
        violations.push(PlanViolation::SlotCount {
            expected: ctx.n_actions,
            got: plan.slots.len(),
        });
    }
    for (slot, p) in plan.slots.iter().enumerate() {
        if ctx.round == 1 && !matches!(p.kind, ActionType::Post | ActionType::Not) {
            violations.push(PlanViolation::RoundOneMustPost { slot });
        }
        match p.kind {
            ActionType::Post => {
                if p.recipient.is_some() {
                    violations.push(PlanViolation::RecipientForbidden { slot });
                }
                if p.target_id.is_some() {
                    violations.push(PlanViolation::TargetForbidden { slot });
                }
                if p.topic.as_deref().is_none_or(str::is_empty) {
                    violations.push(PlanViolation::TopicMissing { slot });
                }
            }
            ActionType::Com => {
                if p.recipient.is_some() {
                    violations.push(PlanViolation::RecipientForbidden { slot });
                }
                if p.topic.as_deref().is_none_or(str::is_empty) {
                    violations.push(PlanViolation::TopicMissing { slot });
                }
                match p.target_id {
                    None => violations.push(PlanViolation::TargetMissing { slot }),
                    Some(t) => {
                        if !ctx.commentable.iter().any(|c| c.id == t) {
                            violations.push(PlanViolation::InvalidComTarget { slot });
                        }
                    }
                }
            }
            ActionType::Dm => {
                if p.mention_flag {
                    violations.push(PlanViolation::MentionFlagForbidden { slot });
                }
                if p.topic.as_deref().is_none_or(str::is_empty) {
                    violations.push(PlanViolation::TopicMissing { slot });
                }
                match (&p.recipient, p.target_id) {
                    (None, _) => violations.push(PlanViolation::RecipientMissing { slot }),
                    (Some(r), Some(t)) => match ctx.dm_replies.iter().find(|d| d.id == t) {
                        None => violations.push(PlanViolation::InvalidDmTarget { slot }),
                        Some(d) if &d.author != r => {
                            violations.push(PlanViolation::DmRecipientMismatch { slot })
                        }
                        Some(_) => {}
                    },
                    (Some(r), None) => {
                        if !ctx.roster.contains(r) {
                            violations.push(PlanViolation::UnknownRecipient { slot });
                        }
                    }
                }
            }
            ActionType::Not => {
                if p.recipient.is_some() {
                    violations.push(PlanViolation::RecipientForbidden { slot });
                }
                if p.topic.is_some() {
                    violations.push(PlanViolation::TopicForbidden { slot });
                }
                if p.target_id.is_some() {
                    violations.push(PlanViolation::TargetForbidden { slot });
                }
                if p.mention_flag {
                    violations.push(PlanViolation::MentionFlagForbidden { slot });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// One item offered to a voter: same-round public content with the voter's
/// relationship context attached. Never includes the voter's own content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteItem {
    pub content_id: ActionId,
    pub author: UserId,
    pub content: String,
    pub topic: Option<String>,
    /// Directed tie weight from the voter toward the author.
    pub tie_weight: f64,
    /// Signed agreement between the voter's opinion and the item, in [-1,1].
    pub stance_alignment: f64,
    pub relationship_note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteDecision {
    pub content_id: ActionId,
    pub value: i8,
}

/// A 0..5 rating one agent assigned a peer this round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieRating {
    pub peer: UserId,
    pub score: i64,
    pub reason: String,
}

/// What a rater sees when scoring its active peers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieRatingContext {
    pub peers: Vec<UserId>,
    pub transcript: String,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    /// The policy produced unusable output; the caller may retry.
    #[error("invalid policy output: {0}")]
    Invalid(String),
    /// The backend is unreachable; not retryable at this level.
    #[error("transport failure: {0}")]
    Transport(String),
    /// A contract precondition was broken by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Agent intelligence behind the planning, voting, and tie-rating contracts.
pub trait Policy {
    fn name(&self) -> &'static str;

    /// Plans exactly `ctx.n_actions` slots. `attempt` counts from zero and
    /// increments on validation failures.
    fn plan(
        &mut self,
        persona: &Persona,
        ctx: &PlanContext,
        attempt: u32,
        rng: &mut ChaCha12Rng,
    ) -> Result<ActionPlan, PolicyError>;

    /// Returns one decision per item, in item order.
    fn vote(
        &mut self,
        persona: &Persona,
        items: &[VoteItem],
        rng: &mut ChaCha12Rng,
    ) -> Result<Vec<VoteDecision>, PolicyError>;

    /// Text-mode tie ratings for the active peers. Returning `None` tells the
    /// engine to quantize its heuristic evidence instead.
    fn rate_ties(
        &mut self,
        persona: &Persona,
        ctx: &TieRatingContext,
        attempt: u32,
        rng: &mut ChaCha12Rng,
    ) -> Result<Option<Vec<TieRating>>, PolicyError>;

    /// Request/response transcripts accumulated since the last drain; the
    /// engine appends them to the event log. Policies without a backend
    /// return nothing.
    fn drain_exchanges(&mut self) -> Vec<crate::gateway::ExchangeRecord> {
        Vec::new()
    }
}

/// Tone-based sentiment constants, with an optional lexicon override for
/// free text. Always lands in [-1,1].
pub fn sentiment_of(tone: Tone, text: Option<&str>) -> f64 {
    if let Some(t) = text {
        if let Some(s) = lexicon_sentiment(t) {
            return s;
        }
    }
    match tone {
        Tone::Supportive => 0.7,
        Tone::Neutral => 0.0,
        Tone::Critical => -0.7,
    }
}

const POSITIVE_WORDS: &[&str] = &[
    "agree", "appreciate", "encourage", "great", "helpful", "hope", "inspiring", "like", "love",
    "support", "thanks", "welcome", "wonderful",
];
const NEGATIVE_WORDS: &[&str] = &[
    "attack", "awful", "bad", "disagree", "dislike", "doubt", "hate", "nonsense", "oppose",
    "terrible", "wrong", "wasteful",
];

/// Net positive/negative word balance of a text, or `None` when no scored
/// word appears.
pub fn lexicon_sentiment(text: &str) -> Option<f64> {
    let lower = text.to_lowercase();
    let mut pos = 0i32;
    let mut neg = 0i32;
    for token in lower.split(|c: char| !c.is_alphanumeric()) {
        if POSITIVE_WORDS.contains(&token) {
            pos += 1;
        } else if NEGATIVE_WORDS.contains(&token) {
            neg += 1;
        }
    }
    if pos + neg == 0 {
        None
    } else {
        Some(f64::from(pos - neg) / f64::from(pos + neg))
    }
}

/// Topic labels the scripted baseline and the coach draw from when inventing
/// fresh topics.
pub const TOPIC_POOL: &[&str] = &[
    "solar power",
    "carbon tax",
    "ev adoption",
    "wind farms",
    "heat pumps",
    "grid storage",
    "carbon capture",
    "public transit",
    "urban greening",
    "meat consumption",
    "flight emissions",
    "nuclear energy",
    "recycling myths",
    "ocean warming",
    "climate finance",
    "insulation retrofits",
    "local food",
    "methane leaks",
    "green jobs",
    "water scarcity",
    "reforestation",
    "climate adaptation",
    "building codes",
    "circular economy",
];

/// A topic not yet in `known`, rotated by `key`; synthesizes a label when
/// the pool is exhausted.
pub fn fresh_topic(known: &[String], key: usize) -> String {
    let unseen: Vec<&&str> = TOPIC_POOL
        .iter()
        .filter(|t| !known.iter().any(|k| k == **t))
        .collect();
    if unseen.is_empty() {
        crate::types::canonical_topic(&format!("fresh angle {key}"))
    } else {
        unseen[key % unseen.len()].to_string()
    }
}

fn rotate<'a, T>(items: &'a [T], key: usize) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[key % items.len()])
    }
}

/// Deterministic coach: ranks components by how far recent rewards fall
/// below the persona's target weights and emits three to five executable
/// tips, highest gap first. Partners and topics rotate with the round so
/// consecutive calls vary.
pub fn coach(persona: &Persona, recent: &[RewardVector], ctx: &PlanContext) -> CoachAdvice {
    debug_assert!(!recent.is_empty(), "coach requires at least one reward vector");
    let weights = &persona.reward_weights;
    let n = recent.len() as f64;
    let mut ranked: Vec<(RewardComponent, f64)> = RewardComponent::ALL
        .iter()
        .map(|&c| {
            let mean = recent.iter().map(|r| r.component(c)).sum::<f64>() / n;
            (c, (weights.get(c) - mean).max(0.0))
        })
        .collect();
    // Descending by gap; ties keep the canonical component order.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

    let round = ctx.round as usize;
    let mut tips = Vec::new();
    for (c, gap) in &ranked {
        if *gap <= 0.0 || tips.len() >= 5 {
            continue;
        }
        tips.push(tip_for(*c, ctx, round + tips.len()));
    }
    let mut fallback_key = 0usize;
    while tips.len() < 3 {
        tips.push(generic_tip(fallback_key, ctx, round));
        fallback_key += 1;
    }
    CoachAdvice {
        ranked,
        tips: CoachTips { tips },
    }
}

fn tip_for(component: RewardComponent, ctx: &PlanContext, key: usize) -> CoachTip {
    match component {
        RewardComponent::Soc => {
            let partner = rotate(&ctx.dm_replies, key)
                .map(|d| d.author.clone())
                .or_else(|| rotate(&ctx.roster, key).cloned());
            CoachTip {
                action: ActionType::Dm,
                target: partner.map(TipTarget::User).unwrap_or(TipTarget::NewTopic),
                topic_hint: rotate(&ctx.dm_replies, key).and_then(|d| d.topic.clone()),
                invite_mention: false,
                tone: Tone::Supportive,
            }
        }
        RewardComponent::Inf => CoachTip {
            action: ActionType::Post,
            target: TipTarget::NewTopic,
            topic_hint: Some(fresh_topic(&ctx.known_topics, key)),
            invite_mention: false,
            tone: Tone::Neutral,
        },
        RewardComponent::Pre => CoachTip {
            action: ActionType::Post,
            target: TipTarget::NewTopic,
            topic_hint: rotate(&ctx.known_topics, key)
                .cloned()
                .or_else(|| Some(fresh_topic(&ctx.known_topics, key))),
            invite_mention: false,
            tone: Tone::Neutral,
        },
        RewardComponent::Coord => CoachTip {
            action: if ctx.commentable.is_empty() {
                ActionType::Post
            } else {
                ActionType::Com
            },
            target: TipTarget::TopLikedPost,
            topic_hint: None,
            invite_mention: true,
            tone: Tone::Neutral,
        },
        RewardComponent::Emo => CoachTip {
            action: if ctx.commentable.is_empty() {
                ActionType::Dm
            } else {
                ActionType::Com
            },
            target: if ctx.commentable.is_empty() {
                rotate(&ctx.roster, key)
                    .cloned()
                    .map(TipTarget::User)
                    .unwrap_or(TipTarget::TopLikedPost)
            } else {
                TipTarget::TopLikedPost
            },
            topic_hint: None,
            invite_mention: false,
            tone: Tone::Supportive,
        },
    }
}

/// Exploration fallbacks when no component shows a gap: a new topic, a new
/// partner, and one plain post.
fn generic_tip(which: usize, ctx: &PlanContext, round: usize) -> CoachTip {
    match which % 3 {
        0 => CoachTip {
            action: ActionType::Post,
            target: TipTarget::NewTopic,
            topic_hint: Some(fresh_topic(&ctx.known_topics, round)),
            invite_mention: false,
            tone: Tone::Neutral,
        },
        1 => CoachTip {
            action: ActionType::Dm,
            target: rotate(&ctx.roster, round + 1)
                .cloned()
                .map(TipTarget::User)
                .unwrap_or(TipTarget::NewTopic),
            topic_hint: None,
            invite_mention: false,
            tone: Tone::Supportive,
        },
        _ => CoachTip {
            action: ActionType::Post,
            target: TipTarget::NewTopic,
            topic_hint: rotate(&ctx.known_topics, round)
                .cloned()
                .or_else(|| Some(fresh_topic(&ctx.known_topics, round))),
            invite_mention: false,
            tone: Tone::Neutral,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{BigFive, MemoryStores};

    pub(crate) fn test_persona(user: &str, weights: RewardWeights) -> Persona {
        Persona {
            user: UserId::new(user),
            name: user.to_uppercase(),
            role: "tester".into(),
            description: "test persona".into(),
            stance: "neutral".into(),
            comm_style: "plain".into(),
            big_five: BigFive {
                openness: 0.5,
                conscientiousness: 0.5,
                extraversion: 0.5,
                agreeableness: 0.5,
                neuroticism: 0.5,
            },
            reward_weights: weights,
            memory: MemoryStores::default(),
        }
    }

    pub(crate) fn base_ctx(round: u32, n: u32) -> PlanContext {
        PlanContext {
            round,
            n_actions: n,
            visible: Vec::new(),
            last_rewards: None,
            best: None,
            weights: RewardWeights::uniform(),
            roster: vec![UserId::new("w1"), UserId::new("w2")],
            known_topics: vec!["solar power".into()],
            dm_replies: Vec::new(),
            commentable: Vec::new(),
            coach: None,
        }
    }

    fn post_slot(topic: &str) -> PlannedAction {
        PlannedAction {
            kind: ActionType::Post,
            recipient: None,
            topic: Some(topic.into()),
            target_id: None,
            mention_flag: false,
            tone: Tone::Neutral,
        }
    }

    #[test]
    fn validate_accepts_cold_dm() {
        let ctx = base_ctx(2, 1);
        let plan = ActionPlan {
            slots: vec![PlannedAction {
                kind: ActionType::Dm,
                recipient: Some(UserId::new("w1")),
                topic: Some("t".into()),
                target_id: None,
                mention_flag: false,
                tone: Tone::Neutral,
            }],
        };
        assert!(validate_plan(&plan, &ctx).is_ok());
    }

    #[test]
    fn validate_rejects_unlisted_com_target() {
        let mut ctx = base_ctx(2, 1);
        ctx.commentable.push(CommentablePost {
            id: ActionId(10),
            author: UserId::new("w1"),
            topic: Some("t".into()),
            content: "c".into(),
            likes: 0,
        });
        let plan = ActionPlan {
            slots: vec![PlannedAction {
                kind: ActionType::Com,
                recipient: None,
                topic: Some("t".into()),
                target_id: Some(ActionId(99)),
                mention_flag: false,
                tone: Tone::Neutral,
            }],
        };
        let violations = validate_plan(&plan, &ctx).unwrap_err();
        assert!(violations.contains(&PlanViolation::InvalidComTarget { slot: 0 }));
    }

    #[test]
    fn validate_rejects_topic_on_not() {
        let ctx = base_ctx(2, 1);
        let plan = ActionPlan {
            slots: vec![PlannedAction {
                kind: ActionType::Not,
                recipient: None,
                topic: Some("t".into()),
                target_id: None,
                mention_flag: false,
                tone: Tone::Neutral,
            }],
        };
        let violations = validate_plan(&plan, &ctx).unwrap_err();
        assert!(violations.contains(&PlanViolation::TopicForbidden { slot: 0 }));
    }

    #[test]
    fn validate_enforces_round_one_posts() {
        let ctx = base_ctx(1, 1);
        let plan = ActionPlan {
            slots: vec![PlannedAction {
                kind: ActionType::Dm,
                recipient: Some(UserId::new("w1")),
                topic: Some("t".into()),
                target_id: None,
                mention_flag: false,
                tone: Tone::Neutral,
            }],
        };
        let violations = validate_plan(&plan, &ctx).unwrap_err();
        assert!(violations.contains(&PlanViolation::RoundOneMustPost { slot: 0 }));
    }

    #[test]
    fn validate_slot_count() {
        let ctx = base_ctx(2, 3);
        let plan = ActionPlan {
            slots: vec![post_slot("a")],
        };
        let violations = validate_plan(&plan, &ctx).unwrap_err();
        assert!(matches!(violations[0], PlanViolation::SlotCount { .. }));
    }

    #[test]
    fn sentiment_constants() {
        assert_eq!(sentiment_of(Tone::Supportive, None), 0.7);
        assert_eq!(sentiment_of(Tone::Neutral, None), 0.0);
        assert_eq!(sentiment_of(Tone::Critical, None), -0.7);
    }

    #[test]
    fn lexicon_stays_bounded() {
        let s = lexicon_sentiment("I love this great helpful idea").unwrap();
        assert!((0.0..=1.0).contains(&s));
        let t = lexicon_sentiment("awful wrong terrible nonsense").unwrap();
        assert!((-1.0..=0.0).contains(&t));
        assert!(lexicon_sentiment("completely unrelated words").is_none());
    }

    fn reward(user: &str, soc: f64, inf: f64) -> RewardVector {
        RewardVector {
            user: UserId::new(user),
            round: 1,
            soc,
            inf,
            pre: 1.0,
            coord: 1.0,
            emo: 1.0,
            total: 0.5,
        }
    }

    #[test]
    fn coach_orders_by_gap() {
        // SOC gap 0.3, INF gap 0.1, all others saturated.
        let weights = RewardWeights {
            soc: 0.4,
            inf: 0.2,
            pre: 0.2,
            coord: 0.1,
            emo: 0.1,
        };
        let persona = test_persona("u", weights);
        let ctx = base_ctx(3, 3);
        let advice = coach(&persona, &[reward("u", 0.1, 0.1)], &ctx);
        assert_eq!(advice.ranked[0].0, RewardComponent::Soc);
        assert_eq!(advice.ranked[1].0, RewardComponent::Inf);
        assert!(advice.ranked[0].1 > advice.ranked[1].1);
        assert!(advice.tips.tips.len() >= 3 && advice.tips.tips.len() <= 5);
        assert_eq!(advice.tips.tips[0].action, ActionType::Dm);
    }

    #[test]
    fn coach_coord_tip_invites_mentions() {
        let weights = RewardWeights::pure(RewardComponent::Coord);
        let persona = test_persona("u", weights);
        let mut ctx = base_ctx(3, 3);
        ctx.commentable.push(CommentablePost {
            id: ActionId(5),
            author: UserId::new("w1"),
            topic: Some("t".into()),
            content: "c".into(),
            likes: 2,
        });
        let starved = RewardVector {
            user: UserId::new("u"),
            round: 1,
            soc: 1.0,
            inf: 1.0,
            pre: 1.0,
            coord: 0.0,
            emo: 1.0,
            total: 0.0,
        };
        let advice = coach(&persona, &[starved], &ctx);
        assert_eq!(advice.ranked[0].0, RewardComponent::Coord);
        assert!(advice.tips.tips[0].invite_mention);
        assert_eq!(advice.tips.tips[0].action, ActionType::Com);
    }

    #[test]
    fn coach_all_gaps_zero_gives_three_generic_tips() {
        let persona = test_persona("u", RewardWeights::uniform());
        let ctx = base_ctx(3, 3);
        let full = RewardVector {
            user: UserId::new("u"),
            round: 1,
            soc: 1.0,
            inf: 1.0,
            pre: 1.0,
            coord: 1.0,
            emo: 1.0,
            total: 1.0,
        };
        let advice = coach(&persona, &[full], &ctx);
        assert_eq!(advice.tips.tips.len(), 3);
        assert_eq!(advice.tips.tips[0].target, TipTarget::NewTopic);
        assert_eq!(advice.tips.tips[1].action, ActionType::Dm);
        assert_eq!(advice.tips.tips[2].action, ActionType::Post);
    }
}
