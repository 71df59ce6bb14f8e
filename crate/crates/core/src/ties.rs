//! Endogenous social-tie dynamics: activation detection, dyadic evidence
//! signals, the gated tie update, decay, symmetrization, and thresholding.
//!
//! Tie strengths live in a dense directed matrix with a zero diagonal. The
//! weight of the tie from `v` to `u` grows when `v` addresses or engages `u`
//! (gated by an evidence score) and decays geometrically on passive rounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rewards::TopicState;
use crate::types::{ActionIndex, ActionType, RoundBatch, UserId};

/// Dense directed tie matrix over a fixed roster. Entries lie in [0,1] and
/// the diagonal stays zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieGraph {
    roster: Vec<UserId>,
    /// Row-major by source: `weights[from * n + to]`.
    weights: Vec<f64>,
    pub round: u32,
}

impl TieGraph {
    /// The zero matrix over a sorted roster.
    pub fn new(mut roster: Vec<UserId>) -> Self {
        roster.sort();
        roster.dedup();
        let n = roster.len();
        TieGraph {
            roster,
            weights: vec![0.0; n * n],
            round: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn roster(&self) -> &[UserId] {
        &self.roster
    }

    pub fn index_of(&self, user: &UserId) -> Option<usize> {
        self.roster.binary_search(user).ok()
    }

    /// Strength of the directed tie from `from` to `to`.
    pub fn weight(&self, from: &UserId, to: &UserId) -> f64 {
        match (self.index_of(from), self.index_of(to)) {
            (Some(f), Some(t)) => self.weight_idx(f, t),
            _ => 0.0,
        }
    }

    pub fn weight_idx(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.roster.len() + to]
    }

    pub fn set_weight_idx(&mut self, from: usize, to: usize, w: f64) {
        debug_assert!(from != to || w == 0.0, "diagonal must stay zero");
        debug_assert!((0.0..=1.0).contains(&w));
        let n = self.roster.len();
        self.weights[from * n + to] = w;
    }

    /// All ordered pairs `(from, to, weight)` with `from != to`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.roster.len();
        (0..n).flat_map(move |f| {
            (0..n)
                .filter(move |&t| t != f)
                .map(move |t| (f, t, self.weight_idx(f, t)))
        })
    }

    pub fn check_invariants(&self) -> Result<()> {
        let n = self.roster.len();
        for f in 0..n {
            for t in 0..n {
                let w = self.weight_idx(f, t);
                if f == t && w != 0.0 {
                    return Err(Error::domain("tie matrix diagonal must be zero"));
                }
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::domain(format!("tie weight {w} outside [0,1]")));
                }
            }
        }
        Ok(())
    }
}

/// The four dyadic evidence signals of one active pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSignals {
    /// 1 when the source introduced a topic the target had not seen.
    pub novelty: f64,
    /// Net like/dislike balance of the source's votes on the target's content, in [-1,1].
    pub approval: f64,
    /// Symmetry of smoothed like exchange, in [0,1].
    pub reciprocity: f64,
    /// Mean DM sentiment when no votes were cast, in [-1,1].
    pub affect: f64,
}

/// Exponentially smoothed like counts for every ordered pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityState {
    roster: Vec<UserId>,
    /// Row-major by source: `ema[from * n + to]`.
    ema: Vec<f64>,
}

impl ReciprocityState {
    pub fn new(mut roster: Vec<UserId>) -> Self {
        roster.sort();
        roster.dedup();
        let n = roster.len();
        ReciprocityState {
            roster,
            ema: vec![0.0; n * n],
        }
    }

    pub fn get(&self, from: &UserId, to: &UserId) -> f64 {
        match (self.index_of(from), self.index_of(to)) {
            (Some(f), Some(t)) => self.ema[f * self.roster.len() + t],
            _ => 0.0,
        }
    }

    fn index_of(&self, user: &UserId) -> Option<usize> {
        self.roster.binary_search(user).ok()
    }
}

/// Likes cast per ordered pair this round: `(from, to) -> like count`.
pub fn round_like_counts(batch: &RoundBatch, index: &ActionIndex) -> BTreeMap<(UserId, UserId), u32> {
    let mut likes = BTreeMap::new();
    for v in &batch.votes {
        if v.value != 1 {
            continue;
        }
        if let Some(author) = index.author_of(v.content_id) {
            *likes.entry((v.voter.clone(), author.clone())).or_insert(0) += 1;
        }
    }
    likes
}

/// Applies the per-round EMA recurrence to every ordered pair.
pub fn update_reciprocity(
    recip: &mut ReciprocityState,
    batch: &RoundBatch,
    index: &ActionIndex,
    beta_rec: f64,
) {
    debug_assert!(beta_rec > 0.0 && beta_rec < 1.0);
    let likes = round_like_counts(batch, index);
    let n = recip.roster.len();
    for f in 0..n {
        for t in 0..n {
            if f == t {
                continue;
            }
            let key = (recip.roster[f].clone(), recip.roster[t].clone());
            let observed = f64::from(likes.get(&key).copied().unwrap_or(0));
            let slot = &mut recip.ema[f * n + t];
            *slot = beta_rec * *slot + (1.0 - beta_rec) * observed;
        }
    }
}

fn vote_tallies_on(
    from: &UserId,
    to: &UserId,
    batch: &RoundBatch,
    index: &ActionIndex,
) -> (u32, u32) {
    let mut likes = 0;
    let mut dislikes = 0;
    for v in &batch.votes {
        if &v.voter != from || v.value == 0 {
            continue;
        }
        if index.author_of(v.content_id) == Some(to) {
            match v.value {
                1 => likes += 1,
                -1 => dislikes += 1,
                _ => {}
            }
        }
    }
    (likes, dislikes)
}

/// Topics `from` put in front of `to` this round: DMs to them, comments on
/// their content, and public posts or comments mentioning them.
pub fn topics_introduced(
    from: &UserId,
    to: &UserId,
    batch: &RoundBatch,
    index: &ActionIndex,
) -> BTreeSet<String> {
    let mut topics = BTreeSet::new();
    for a in &batch.actions {
        if &a.sender != from {
            continue;
        }
        let Some(topic) = &a.topic else { continue };
        let directed = match a.kind {
            ActionType::Dm => a.recipient.as_ref() == Some(to),
            ActionType::Com => {
                a.target_id.and_then(|t| index.author_of(t)) == Some(to)
                    || a.mentions.contains(to)
            }
            ActionType::Post => a.mentions.contains(to),
            ActionType::Not => false,
        };
        if directed {
            topics.insert(topic.clone());
        }
    }
    topics
}

/// Whether `from` directly addressed `to` (DM or public mention) or engaged
/// with their content (comment or non-neutral vote) this round.
pub fn activation(from: &UserId, to: &UserId, batch: &RoundBatch, index: &ActionIndex) -> bool {
    debug_assert!(from != to);
    let address = batch.actions.iter().any(|a| {
        &a.sender == from
            && match a.kind {
                ActionType::Dm => a.recipient.as_ref() == Some(to),
                ActionType::Post | ActionType::Com => a.mentions.contains(to),
                ActionType::Not => false,
            }
    });
    if address {
        return true;
    }
    let commented = batch.actions.iter().any(|a| {
        a.kind == ActionType::Com
            && &a.sender == from
            && a.target_id.and_then(|t| index.author_of(t)) == Some(to)
    });
    if commented {
        return true;
    }
    batch
        .votes
        .iter()
        .any(|v| &v.voter == from && v.value != 0 && index.author_of(v.content_id) == Some(to))
}

/// Computes the four dyadic signals for the pair `from -> to`.
///
/// `topics` must still hold the exposure history from before this round;
/// `recip` holds the smoothed like counters (post-update by default).
pub fn evidence_signals(
    from: &UserId,
    to: &UserId,
    batch: &RoundBatch,
    index: &ActionIndex,
    topics: &TopicState,
    recip: &ReciprocityState,
    epsilon: f64,
) -> EvidenceSignals {
    debug_assert!(from != to);

    let novelty = if topics_introduced(from, to, batch, index)
        .iter()
        .any(|t| !topics.has_seen(to, t))
    {
        1.0
    } else {
        0.0
    };

    let (likes, dislikes) = vote_tallies_on(from, to, batch, index);
    let votes_cast = likes + dislikes;
    let approval = if votes_cast == 0 {
        0.0
    } else {
        (f64::from(likes) - f64::from(dislikes)) / f64::from(votes_cast.max(1))
    };

    let fwd = recip.get(from, to);
    let bwd = recip.get(to, from);
    let reciprocity = 1.0 - ((fwd - bwd).abs() / (fwd + bwd + epsilon));

    let dm_sentiments: Vec<f64> = batch
        .actions
        .iter()
        .filter(|a| {
            a.kind == ActionType::Dm && &a.sender == from && a.recipient.as_ref() == Some(to)
        })
        .map(|a| a.sentiment)
        .collect();
    let affect = if votes_cast == 0 && !dm_sentiments.is_empty() {
        dm_sentiments.iter().sum::<f64>() / dm_sentiments.len() as f64
    } else {
        0.0
    };

    EvidenceSignals {
        novelty,
        approval,
        reciprocity,
        affect,
    }
}

/// Monotone aggregation of the four signals into an evidence score in [0,1].
/// Signed signals are rescaled to [0,1] before the convex combination.
pub fn aggregate_evidence(signals: &EvidenceSignals, weights: &[f64; 4]) -> f64 {
    debug_assert!(weights.iter().all(|w| *w >= 0.0));
    let e = weights[0] * signals.novelty
        + weights[1] * (signals.approval + 1.0) / 2.0
        + weights[2] * signals.reciprocity
        + weights[3] * (signals.affect + 1.0) / 2.0;
    e.clamp(0.0, 1.0)
}

/// One application of the gated update rule: active pairs grow by the capped,
/// thresholded evidence margin of the remaining headroom; passive pairs decay.
///
/// `active` maps ordered pairs with an activation this round to their
/// evidence score in [0,1]; every other off-diagonal pair decays.
pub fn tie_update(
    graph: &TieGraph,
    active: &BTreeMap<(UserId, UserId), f64>,
    xi: f64,
    delta_max: f64,
    delta: f64,
) -> TieGraph {
    debug_assert!((0.0..1.0).contains(&xi));
    debug_assert!(delta_max >= 0.0);
    debug_assert!((0.0..1.0).contains(&delta));

    let mut next = graph.clone();
    next.round = graph.round + 1;
    let n = graph.len();
    for f in 0..n {
        for t in 0..n {
            if f == t {
                continue;
            }
            let key = (graph.roster[f].clone(), graph.roster[t].clone());
            let w = graph.weight_idx(f, t);
            let w_next = match active.get(&key) {
                Some(&evidence) => {
                    debug_assert!((0.0..=1.0).contains(&evidence));
                    let margin = (evidence - xi).max(0.0);
                    w + delta_max.min((1.0 - w) * margin)
                }
                None => (1.0 - delta) * w,
            };
            next.set_weight_idx(f, t, w_next.clamp(0.0, 1.0));
        }
    }
    next
}

/// Decay factor for a given half-life: after `h` passive rounds a tie keeps
/// exactly half its strength.
pub fn half_life_to_delta(h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("half-life must be > 0, got {h}")));
    }
    Ok(1.0 - 2f64.powf(-1.0 / h))
}

/// Maps 0..5 integer ratings to evidence scores. Out-of-range entries are
/// dropped and reported; peers without a rating default to zero evidence.
pub fn text_evidence(ratings: &[(UserId, i64)]) -> (BTreeMap<UserId, f64>, Vec<String>) {
    let mut scores = BTreeMap::new();
    let mut dropped = Vec::new();
    for (peer, score) in ratings {
        if (0..=5).contains(score) {
            scores.insert(peer.clone(), *score as f64 / 5.0);
        } else {
            dropped.push(format!("rating {score} for {peer} outside 0..5, dropped"));
        }
    }
    (scores, dropped)
}

/// Symmetric matrix of pairwise tie means, used for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UndirectedTies {
    roster: Vec<UserId>,
    weights: Vec<f64>,
}

impl UndirectedTies {
    pub fn roster(&self) -> &[UserId] {
        &self.roster
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn weight_idx(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.roster.len() + b]
    }
}

/// Element-wise pair means of the directed matrix.
pub fn symmetrize(graph: &TieGraph) -> UndirectedTies {
    let n = graph.len();
    let mut weights = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            weights[a * n + b] = 0.5 * (graph.weight_idx(a, b) + graph.weight_idx(b, a));
        }
    }
    UndirectedTies {
        roster: graph.roster.clone(),
        weights,
    }
}

/// Unweighted undirected graph over the roster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryGraph {
    roster: Vec<UserId>,
    adj: Vec<bool>,
}

impl BinaryGraph {
    pub fn roster(&self) -> &[UserId] {
        &self.roster
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.roster.len() + b]
    }

    pub fn edge_count(&self) -> usize {
        let n = self.roster.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.has_edge(a, b))
            .count()
    }

    /// Undirected edges as index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.roster.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Thresholds the symmetrized matrix: an edge exists iff its weight is at
/// least `theta` (inclusive, so saturated ties survive theta = 1).
pub fn binarize(ties: &UndirectedTies, theta: f64) -> BinaryGraph {
    debug_assert!((0.0..=1.0).contains(&theta));
    let n = ties.len();
    let mut adj = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b && ties.weight_idx(a, b) >= theta {
                adj[a * n + b] = true;
            }
        }
    }
    BinaryGraph {
        roster: ties.roster.clone(),
        adj,
    }
}
