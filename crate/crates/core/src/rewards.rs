//! The five behavioral reward components and their weighted composition.
//!
//! All functions here are pure and total over an immutable [`RoundBatch`];
//! every component and the weighted total stay inside the unit interval.
//! Denominators that can vanish on quiet rounds (no direct exchanges, no
//! public content, no prior DM partners, empty recommendations, a single
//! known topic) zero out the affected term.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::persona::RewardWeights;
use crate::types::{received_by, Action, ActionIndex, ActionType, RoundBatch, UserId};

/// Per-user topic exposure history plus the set of topics ever observed
/// platform-wide. The platform set always contains every topic any user has
/// been exposed to.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TopicState {
    seen: BTreeMap<UserId, BTreeSet<String>>,
    platform: BTreeSet<String>,
}

impl TopicState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Topics the user has been exposed to so far.
    pub fn seen_by(&self, user: &UserId) -> Option<&BTreeSet<String>> {
        self.seen.get(user)
    }

    pub fn has_seen(&self, user: &UserId, topic: &str) -> bool {
        self.seen.get(user).is_some_and(|s| s.contains(topic))
    }

    /// Number of distinct topics observed anywhere on the platform.
    pub fn platform_topic_count(&self) -> usize {
        self.platform.len()
    }

    pub fn platform_topics(&self) -> &BTreeSet<String> {
        &self.platform
    }

    /// Record that `user` was exposed to `topic`. Exposure implies platform
    /// visibility, so the platform set absorbs it too.
    pub fn record_exposure(&mut self, user: &UserId, topic: &str) {
        self.seen
            .entry(user.clone())
            .or_default()
            .insert(topic.to_string());
        self.platform.insert(topic.to_string());
    }

    /// Record a topic that appeared anywhere on the platform.
    pub fn record_platform(&mut self, topic: &str) {
        self.platform.insert(topic.to_string());
    }
}

/// Per-component reward values plus the weighted total for one agent-round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardVector {
    pub user: UserId,
    pub round: u32,
    pub soc: f64,
    pub inf: f64,
    pub pre: f64,
    pub coord: f64,
    pub emo: f64,
    pub total: f64,
}

impl RewardVector {
    pub fn component(&self, c: crate::persona::RewardComponent) -> f64 {
        use crate::persona::RewardComponent::*;
        match c {
            Soc => self.soc,
            Inf => self.inf,
            Pre => self.pre,
            Coord => self.coord,
            Emo => self.emo,
        }
    }
}

/// Social-interaction reward: direct exchanges sent (out of the N slots) and
/// received (out of all direct exchanges this round), mixed by `beta`.
pub fn reward_soc(
    user: &UserId,
    batch: &RoundBatch,
    index: &ActionIndex,
    n_actions: u32,
    beta: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&beta));
    debug_assert!(n_actions >= 1);

    let mut dir_total = 0u32;
    let mut sent = 0u32;
    let mut received = 0u32;
    for a in batch.direct_exchanges() {
        dir_total += 1;
        if &a.sender == user {
            sent += 1;
        }
        if received_by(a, index) == Some(user) {
            received += 1;
        }
    }

    let sent_term = f64::from(sent) / f64::from(n_actions);
    let rec_term = if dir_total == 0 {
        0.0
    } else {
        f64::from(received) / f64::from(dir_total)
    };
    (1.0 - beta) * sent_term + beta * rec_term
}

/// Information-seeking reward over the content recommended to the user this
/// round: novelty of unseen topics against the platform topic count, plus
/// normalized Shannon entropy of the recommended topic mix.
///
/// `recommended` is the user's visible slice of the previous round's batch,
/// restricted to items bearing a topic.
pub fn reward_inf(
    user: &UserId,
    recommended: &[&Action],
    topics: &TopicState,
    beta: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&beta));

    let labels: Vec<&str> = recommended
        .iter()
        .filter_map(|a| a.topic.as_deref())
        .collect();
    if labels.is_empty() {
        return 0.0;
    }
    let k = topics.platform_topic_count();
    debug_assert!(k >= 1, "topics in a batch must be known platform-wide");
    if k == 0 {
        return 0.0;
    }

    let distinct: BTreeSet<&str> = labels.iter().copied().collect();
    let novel = distinct
        .iter()
        .filter(|t| !topics.has_seen(user, t))
        .count();
    let novelty = (novel as f64 / k as f64).min(1.0);

    let diversity = if k == 1 {
        // log K = 0: the diversity term is defined as zero.
        0.0
    } else {
        let total = labels.len() as f64;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &labels {
            *counts.entry(t).or_insert(0) += 1;
        }
        let entropy: f64 = counts
            .values()
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum();
        (entropy / (k as f64).ln()).clamp(0.0, 1.0)
    };

    (1.0 - beta) * novelty + beta * diversity
}

/// Self-presentation reward: share of the round's slots spent posting, plus
/// net like feedback on those posts, clamped into the unit interval.
pub fn reward_pre(
    user: &UserId,
    batch: &RoundBatch,
    num_agents: usize,
    n_actions: u32,
    beta: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&beta));
    debug_assert!(num_agents >= 2);

    let post_ids: BTreeSet<_> = batch
        .actions_by(user)
        .filter(|a| a.kind == ActionType::Post)
        .map(|a| a.id)
        .collect();
    let post_term = post_ids.len() as f64 / f64::from(n_actions);

    let mut likes = 0i64;
    let mut dislikes = 0i64;
    for v in &batch.votes {
        if post_ids.contains(&v.content_id) {
            match v.value {
                1 => likes += 1,
                -1 => dislikes += 1,
                _ => {}
            }
        }
    }
    let denom = (num_agents as f64 - 1.0) * f64::from(n_actions);
    let feedback_term = (likes - dislikes) as f64 / denom;

    ((1.0 - beta) * post_term + beta * feedback_term).clamp(0.0, 1.0)
}

/// Users who DM'd `user` in `batch` (the previous round, for reciprocity).
pub fn dm_senders_to(user: &UserId, batch: &RoundBatch) -> BTreeSet<UserId> {
    batch
        .actions
        .iter()
        .filter(|a| a.kind == ActionType::Dm && a.recipient.as_ref() == Some(user))
        .map(|a| a.sender.clone())
        .collect()
}

/// Coordination reward: visibility through mentions in the round's public
/// content, plus reciprocity toward last round's DM senders. Reply credit
/// counts distinct prior senders answered, so the term stays in [0,1].
pub fn reward_coord(
    user: &UserId,
    batch: &RoundBatch,
    prev: Option<&RoundBatch>,
    beta: f64,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&beta));

    let mut public_total = 0u32;
    let mut mentioned = 0u32;
    for a in batch.public_actions() {
        public_total += 1;
        if a.mentions.contains(user) {
            mentioned += 1;
        }
    }
    let mention_term = if public_total == 0 {
        0.0
    } else {
        f64::from(mentioned) / f64::from(public_total)
    };

    let prior_senders = prev.map(|b| dm_senders_to(user, b)).unwrap_or_default();
    let reply_term = if prior_senders.is_empty() {
        0.0
    } else {
        let replied: BTreeSet<&UserId> = batch
            .actions_by(user)
            .filter(|a| a.kind == ActionType::Dm)
            .filter_map(|a| a.recipient.as_ref())
            .filter(|r| prior_senders.contains(*r))
            .collect();
        replied.len() as f64 / prior_senders.len() as f64
    };

    (1.0 - beta) * mention_term + beta * reply_term
}

/// Emotional-support reward from the sentiment of direct exchanges landing on
/// the user. Stays in (0,1) for any real `beta`; quiet rounds sit at 0.5.
pub fn reward_emo(
    user: &UserId,
    batch: &RoundBatch,
    index: &ActionIndex,
    beta: f64,
    epsilon: f64,
) -> f64 {
    debug_assert!(epsilon > 0.0);

    let mut positive = 0.0;
    let mut negative = 0.0;
    for a in batch.direct_exchanges() {
        if received_by(a, index) == Some(user) {
            positive += a.sentiment.max(0.0);
            negative += (-a.sentiment).max(0.0);
        }
    }
    let ratio = (positive + beta * negative) / (positive + beta.abs() * negative + epsilon);
    0.5 * (1.0 + ratio)
}

/// Weighted composition of the five components, clamped against float noise.
pub fn reward_total(
    soc: f64,
    inf: f64,
    pre: f64,
    coord: f64,
    emo: f64,
    weights: &RewardWeights,
) -> f64 {
    let total = weights.soc * soc
        + weights.inf * inf
        + weights.pre * pre
        + weights.coord * coord
        + weights.emo * emo;
    total.clamp(0.0, 1.0)
}

/// Parameters shared by every per-user reward evaluation of a round.
pub struct RewardParams {
    pub num_agents: usize,
    pub n_actions: u32,
    pub beta_soc: f64,
    pub beta_inf: f64,
    pub beta_pre: f64,
    pub beta_coord: f64,
    pub beta_emo: f64,
    pub epsilon: f64,
}

/// Computes the full reward vector for one user.
#[allow(clippy::too_many_arguments)]
pub fn compute_rewards(
    user: &UserId,
    batch: &RoundBatch,
    prev: Option<&RoundBatch>,
    recommended: &[&Action],
    topics: &TopicState,
    index: &ActionIndex,
    weights: &RewardWeights,
    params: &RewardParams,
) -> RewardVector {
    let soc = reward_soc(user, batch, index, params.n_actions, params.beta_soc);
    let inf = reward_inf(user, recommended, topics, params.beta_inf);
    let pre = reward_pre(
        user,
        batch,
        params.num_agents,
        params.n_actions,
        params.beta_pre,
    );
    let coord = reward_coord(user, batch, prev, params.beta_coord);
    let emo = reward_emo(user, batch, index, params.beta_emo, params.epsilon);
    let total = reward_total(soc, inf, pre, coord, emo, weights);
    RewardVector {
        user: user.clone(),
        round: batch.round,
        soc,
        inf,
        pre,
        coord,
        emo,
        total,
    }
}
