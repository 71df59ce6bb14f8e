//! The round orchestration loop.
//!
//! Each round runs plan -> execute -> vote -> reward -> reweight for every
//! agent, in deterministic user-id order, against the immutable snapshot of
//! the previous round. The whole state is serializable, which is what
//! checkpoints and resume load.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::agents::{
    coach, sentiment_of, validate_plan, ActionPlan, BestRoundSummary,
    CommentablePost, DmReplyCandidate, PlanContext, Policy, PolicyError, TieRatingContext,
    VoteDecision, VoteItem,
};
use crate::config::{SimConfig, TieMode};
use crate::error::{Error, Result};
use crate::events::{run_start_event, Event, EventBody, EventSink};
use crate::persona::{ConvRole, Persona};
use crate::rewards::{compute_rewards, RewardParams, RewardVector, TopicState};
use crate::rng::AgentStreams;
use crate::ties::{
    activation, aggregate_evidence, evidence_signals, text_evidence, tie_update,
    update_reciprocity, ReciprocityState, TieGraph,
};
use crate::types::{
    canonical_topic, received_by, Action, ActionId, ActionIndex, ActionType, RoundBatch, Tone,
    UserId, Vote,
};

const MAX_CONTRACT_ATTEMPTS: u32 = 3;

/// All public content plus direct messages addressed to `user`, in action-id
/// order. NOT actions are never visible.
pub fn visible_content<'a>(user: &UserId, batch: &'a RoundBatch) -> Vec<&'a Action> {
    let mut items: Vec<&Action> = batch
        .actions
        .iter()
        .filter(|a| match a.kind {
            ActionType::Post | ActionType::Com => true,
            ActionType::Dm => a.recipient.as_ref() == Some(user),
            ActionType::Not => false,
        })
        .collect();
    items.sort_by_key(|a| a.id);
    items
}

/// Result of one completed round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub round: u32,
    pub batch: RoundBatch,
    pub rewards: BTreeMap<UserId, RewardVector>,
    pub ties: TieGraph,
}

/// Complete simulation state between rounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimState {
    pub run_id: String,
    pub config: SimConfig,
    pub roster: Vec<UserId>,
    pub personas: BTreeMap<UserId, Persona>,
    pub ties: TieGraph,
    pub prev_batch: Option<RoundBatch>,
    pub topics: TopicState,
    pub recip: ReciprocityState,
    pub index: ActionIndex,
    pub next_action_id: u64,
    pub completed_rounds: u32,
    pub streams: BTreeMap<UserId, AgentStreams>,
    pub last_rewards: BTreeMap<UserId, RewardVector>,
    pub reward_history: BTreeMap<UserId, Vec<RewardVector>>,
    pub best_rounds: BTreeMap<UserId, BestRoundSummary>,
}

impl SimState {
    pub fn new(run_id: &str, config: SimConfig, personas: Vec<Persona>) -> Result<Self> {
        config.validate()?;
        if personas.len() != config.num_agents {
            return Err(Error::config(format!(
                "config expects {} agents, {} personas given",
                config.num_agents,
                personas.len()
            )));
        }
        let mut map = BTreeMap::new();
        for p in personas {
            p.validate()?;
            if map.insert(p.user.clone(), p).is_some() {
                return Err(Error::config("duplicate persona user id"));
            }
        }
        let roster: Vec<UserId> = map.keys().cloned().collect();
        let streams = roster
            .iter()
            .map(|u| (u.clone(), AgentStreams::for_agent(config.seed, u.as_str())))
            .collect();
        Ok(SimState {
            run_id: run_id.to_string(),
            config,
            ties: TieGraph::new(roster.clone()),
            recip: ReciprocityState::new(roster.clone()),
            roster,
            personas: map,
            prev_batch: None,
            topics: TopicState::new(),
            index: ActionIndex::new(),
            next_action_id: 1,
            completed_rounds: 0,
            streams,
            last_rewards: BTreeMap::new(),
            reward_history: BTreeMap::new(),
            best_rounds: BTreeMap::new(),
        })
    }

    pub fn is_finished(&self) -> bool {
        self.completed_rounds >= self.config.rounds
    }

    pub fn emit_run_start(&self, sink: &mut dyn EventSink) -> Result<()> {
        sink.emit(&run_start_event(&self.run_id, &self.config, &self.roster))
    }

    fn event(&self, round: u32, body: EventBody) -> Event {
        Event::new(&self.run_id, round, body)
    }

    fn diagnostic(
        &self,
        sink: &mut dyn EventSink,
        round: u32,
        agent: Option<&UserId>,
        code: &str,
        message: String,
    ) -> Result<()> {
        sink.emit(&self.event(
            round,
            EventBody::Diagnostic {
                agent: agent.cloned(),
                code: code.to_string(),
                message,
            },
        ))
    }

    /// Builds the planning context `user` sees at round `t`.
    fn plan_context(&self, user: &UserId, t: u32) -> PlanContext {
        let persona = &self.personas[user];
        let empty = RoundBatch::new(t.saturating_sub(1));
        let prev = self.prev_batch.as_ref().unwrap_or(&empty);

        let visible: Vec<Action> = visible_content(user, prev).into_iter().cloned().collect();
        let dm_replies: Vec<DmReplyCandidate> = visible
            .iter()
            .filter(|a| a.kind == ActionType::Dm && a.recipient.as_ref() == Some(user))
            .map(|a| DmReplyCandidate {
                id: a.id,
                author: a.sender.clone(),
                topic: a.topic.clone(),
                content: a.content.clone(),
            })
            .collect();

        let mut like_counts: BTreeMap<ActionId, u32> = BTreeMap::new();
        for v in &prev.votes {
            if v.value == 1 {
                *like_counts.entry(v.content_id).or_insert(0) += 1;
            }
        }
        let mut commentable: Vec<CommentablePost> = visible
            .iter()
            .filter(|a| a.kind.is_public() && &a.sender != user)
            .map(|a| CommentablePost {
                id: a.id,
                author: a.sender.clone(),
                topic: a.topic.clone(),
                content: a.content.clone(),
                likes: like_counts.get(&a.id).copied().unwrap_or(0),
            })
            .collect();
        commentable.sort_by(|a, b| b.likes.cmp(&a.likes).then(a.id.cmp(&b.id)));

        let roster: Vec<UserId> = self.roster.iter().filter(|u| *u != user).cloned().collect();
        let known_topics: Vec<String> = self
            .topics
            .seen_by(user)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();

        let mut ctx = PlanContext {
            round: t,
            n_actions: self.config.actions_per_round,
            visible,
            last_rewards: self.last_rewards.get(user).cloned(),
            best: self.best_rounds.get(user).cloned(),
            weights: persona.reward_weights,
            roster,
            known_topics,
            dm_replies,
            commentable,
            coach: None,
        };
        if self.config.coach_enabled && t >= 2 {
            if let Some(history) = self.reward_history.get(user) {
                if !history.is_empty() {
                    let recent: Vec<RewardVector> =
                        history.iter().rev().take(3).rev().cloned().collect();
                    ctx.coach = Some(coach(persona, &recent, &ctx));
                }
            }
        }
        ctx
    }

    /// Turns a validated plan into executed actions with ids, content,
    /// resolved mentions, and sentiment.
    fn execute_plan(
        &mut self,
        user: &UserId,
        agent_idx: usize,
        plan: &ActionPlan,
        t: u32,
    ) -> Vec<Action> {
        let roster_others: Vec<UserId> = self
            .roster
            .iter()
            .filter(|u| *u != user)
            .cloned()
            .collect();
        let lexicon = self.config.scripted.lexicon_sentiment;
        let mut actions = Vec::with_capacity(plan.slots.len());
        for (slot_idx, slot) in plan.slots.iter().enumerate() {
            let id = ActionId(self.next_action_id);
            self.next_action_id += 1;

            let mut mentions = BTreeSet::new();
            if slot.mention_flag && !roster_others.is_empty() {
                let target_author = slot
                    .target_id
                    .and_then(|tid| self.index.author_of(tid))
                    .filter(|a| *a != user)
                    .cloned();
                let pick = target_author.unwrap_or_else(|| {
                    roster_others[(t as usize + slot_idx + agent_idx) % roster_others.len()]
                        .clone()
                });
                mentions.insert(pick);
            }

            let topic = slot.topic.as_deref().map(canonical_topic);
            let tone_phrase = match slot.tone {
                Tone::Supportive => "great to see this, I really appreciate it",
                Tone::Neutral => "sharing a few notes, curious what others think",
                Tone::Critical => "I disagree, this take has it wrong",
            };
            let mention_prefix = mentions
                .iter()
                .map(|m| format!("@{m} "))
                .collect::<String>();
            let content = match slot.kind {
                ActionType::Post => format!(
                    "{mention_prefix}Sharing thoughts on {}: {tone_phrase}",
                    topic.as_deref().unwrap_or("the discussion")
                ),
                ActionType::Com => format!(
                    "{mention_prefix}Replying on {}: {tone_phrase}",
                    topic.as_deref().unwrap_or("the discussion")
                ),
                ActionType::Dm => format!(
                    "About {}: {tone_phrase}",
                    topic.as_deref().unwrap_or("the discussion")
                ),
                ActionType::Not => String::new(),
            };
            let sentiment = if slot.kind == ActionType::Not {
                0.0
            } else {
                sentiment_of(slot.tone, lexicon.then_some(content.as_str()))
            };

            let action = Action {
                id,
                round: t,
                kind: slot.kind,
                sender: user.clone(),
                recipient: slot.recipient.clone(),
                target_id: slot.target_id,
                topic,
                mentions,
                tone: slot.tone,
                content,
                sentiment,
            };
            self.index.insert_action(&action);
            actions.push(action);
        }
        actions
    }

    fn vote_items_for(&self, user: &UserId, batch: &RoundBatch) -> Vec<VoteItem> {
        let persona = &self.personas[user];
        batch
            .public_actions()
            .filter(|a| &a.sender != user)
            .map(|a| {
                let alignment = a
                    .topic
                    .as_ref()
                    .and_then(|t| persona.memory.opinion.get(t))
                    .map(|o| (o.strength * a.sentiment).clamp(-1.0, 1.0))
                    .unwrap_or(0.0);
                let note = persona
                    .memory
                    .relationship
                    .get(&a.sender)
                    .map(|r| r.note.clone())
                    .unwrap_or_else(|| "-".to_string());
                VoteItem {
                    content_id: a.id,
                    author: a.sender.clone(),
                    content: a.content.clone(),
                    topic: a.topic.clone(),
                    tie_weight: self.ties.weight(user, &a.sender),
                    stance_alignment: alignment,
                    relationship_note: note,
                }
            })
            .collect()
    }

    /// One full round: plan, execute, vote, reward, reweight. Returns the
    /// finalized batch, per-agent rewards, and the updated tie matrix.
    pub fn run_round(
        &mut self,
        policy: &mut dyn Policy,
        sink: &mut dyn EventSink,
    ) -> Result<RoundOutcome> {
        let t = self.completed_rounds + 1;
        let n_actions = self.config.actions_per_round;

        // Plan and execute against the immutable previous-round snapshot.
        let mut batch = RoundBatch::new(t);
        for (agent_idx, user) in self.roster.clone().iter().enumerate() {
            let ctx = self.plan_context(user, t);
            let persona = self.personas[user].clone();
            let mut accepted: Option<ActionPlan> = None;
            for attempt in 0..MAX_CONTRACT_ATTEMPTS {
                let rng = &mut self
                    .streams
                    .get_mut(user)
                    .expect("stream exists for roster user")
                    .plan;
                match policy.plan(&persona, &ctx, attempt, rng) {
                    Ok(plan) => match validate_plan(&plan, &ctx) {
                        Ok(()) => {
                            accepted = Some(plan);
                            break;
                        }
                        Err(violations) => {
                            self.diagnostic(
                                sink,
                                t,
                                Some(user),
                                "plan_invalid",
                                format!(
                                    "attempt {attempt}: {}",
                                    serde_json::to_string(&violations)?
                                ),
                            )?;
                        }
                    },
                    Err(PolicyError::Invalid(msg)) => {
                        self.diagnostic(
                            sink,
                            t,
                            Some(user),
                            "plan_invalid",
                            format!("attempt {attempt}: {msg}"),
                        )?;
                    }
                    Err(PolicyError::Transport(msg)) => {
                        self.emit_exchanges(policy, sink, t)?;
                        return Err(Error::Transport(msg));
                    }
                    Err(PolicyError::Precondition(msg)) => {
                        return Err(Error::domain(msg));
                    }
                }
            }
            let plan = match accepted {
                Some(p) => p,
                None => {
                    self.diagnostic(
                        sink,
                        t,
                        Some(user),
                        "plan_fallback",
                        format!("validation exhausted after {MAX_CONTRACT_ATTEMPTS} attempts; substituting NOT actions"),
                    )?;
                    ActionPlan::all_not(n_actions)
                }
            };
            let actions = self.execute_plan(user, agent_idx, &plan, t);
            batch.actions.extend(actions);
        }
        self.check_batch(&batch, t)?;

        // Votes on this round's public content.
        for user in self.roster.clone() {
            let items = self.vote_items_for(&user, &batch);
            if items.is_empty() {
                continue;
            }
            let persona = self.personas[&user].clone();
            let mut decisions: Option<Vec<VoteDecision>> = None;
            for attempt in 0..MAX_CONTRACT_ATTEMPTS {
                let rng = &mut self
                    .streams
                    .get_mut(&user)
                    .expect("stream exists for roster user")
                    .vote;
                match policy.vote(&persona, &items, rng) {
                    Ok(d) if d.len() == items.len() => {
                        decisions = Some(d);
                        break;
                    }
                    Ok(d) => {
                        self.diagnostic(
                            sink,
                            t,
                            Some(&user),
                            "vote_invalid",
                            format!(
                                "attempt {attempt}: expected {} decisions, got {}",
                                items.len(),
                                d.len()
                            ),
                        )?;
                    }
                    Err(PolicyError::Invalid(msg)) => {
                        self.diagnostic(
                            sink,
                            t,
                            Some(&user),
                            "vote_invalid",
                            format!("attempt {attempt}: {msg}"),
                        )?;
                    }
                    Err(PolicyError::Transport(msg)) => {
                        self.emit_exchanges(policy, sink, t)?;
                        return Err(Error::Transport(msg));
                    }
                    Err(PolicyError::Precondition(msg)) => {
                        return Err(Error::domain(msg));
                    }
                }
            }
            let decisions = match decisions {
                Some(d) => d,
                None => {
                    self.diagnostic(
                        sink,
                        t,
                        Some(&user),
                        "vote_fallback",
                        "voting exhausted; substituting neutral votes".to_string(),
                    )?;
                    items
                        .iter()
                        .map(|i| VoteDecision {
                            content_id: i.content_id,
                            value: 0,
                        })
                        .collect()
                }
            };
            for d in decisions {
                debug_assert!((-1..=1).contains(&d.value));
                batch.votes.push(Vote {
                    voter: user.clone(),
                    content_id: d.content_id,
                    value: d.value,
                    round: t,
                });
            }
        }

        // Rewards over the finalized batch.
        let params = RewardParams {
            num_agents: self.config.num_agents,
            n_actions,
            beta_soc: self.config.beta_soc,
            beta_inf: self.config.beta_inf,
            beta_pre: self.config.beta_pre,
            beta_coord: self.config.beta_coord,
            beta_emo: self.config.beta_emo,
            epsilon: self.config.epsilon,
        };
        let empty = RoundBatch::new(t.saturating_sub(1));
        let prev = self.prev_batch.clone();
        let prev_ref = prev.as_ref().unwrap_or(&empty);
        let mut rewards = BTreeMap::new();
        for user in &self.roster {
            let recommended: Vec<&Action> = visible_content(user, prev_ref)
                .into_iter()
                .filter(|a| a.topic.is_some())
                .collect();
            let vector = compute_rewards(
                user,
                &batch,
                prev.as_ref(),
                &recommended,
                &self.topics,
                &self.index,
                &self.personas[user].reward_weights,
                &params,
            );
            rewards.insert(user.clone(), vector);
        }

        // Reciprocity smoothing, then activations and evidence.
        if self.config.reciprocity_post_update {
            update_reciprocity(&mut self.recip, &batch, &self.index, self.config.beta_rec);
        }
        let mut active_pairs: BTreeMap<(UserId, UserId), f64> = BTreeMap::new();
        let mut heuristic: BTreeMap<(UserId, UserId), f64> = BTreeMap::new();
        for from in &self.roster {
            for to in &self.roster {
                if from == to {
                    continue;
                }
                if activation(from, to, &batch, &self.index) {
                    let signals = evidence_signals(
                        from,
                        to,
                        &batch,
                        &self.index,
                        &self.topics,
                        &self.recip,
                        self.config.epsilon,
                    );
                    let e = aggregate_evidence(&signals, &self.config.evidence_weights);
                    heuristic.insert((from.clone(), to.clone()), e);
                }
            }
        }
        if !self.config.reciprocity_post_update {
            update_reciprocity(&mut self.recip, &batch, &self.index, self.config.beta_rec);
        }

        match self.config.tie_mode {
            TieMode::Heuristic => {
                active_pairs = heuristic.clone();
            }
            TieMode::Text => {
                for rater in self.roster.clone() {
                    let peers: Vec<UserId> = heuristic
                        .keys()
                        .filter(|(f, _)| *f == rater)
                        .map(|(_, to)| to.clone())
                        .collect();
                    if peers.is_empty() {
                        continue;
                    }
                    let scores =
                        self.text_scores_for(&rater, &peers, &batch, &heuristic, policy, sink, t)?;
                    for peer in peers {
                        let e = scores.get(&peer).copied().unwrap_or(0.0);
                        active_pairs.insert((rater.clone(), peer), e);
                    }
                }
            }
        }

        let delta = self.config.delta()?;
        let new_ties = tie_update(
            &self.ties,
            &active_pairs,
            self.config.xi,
            self.config.delta_max,
            delta,
        );

        // Emit events: actions, votes, rewards, tie updates, transcripts.
        self.emit_exchanges(policy, sink, t)?;
        for a in &batch.actions {
            sink.emit(&self.event(t, EventBody::Action(a.clone())))?;
        }
        for v in &batch.votes {
            sink.emit(&self.event(t, EventBody::Vote(v.clone())))?;
        }
        for user in &self.roster {
            sink.emit(&self.event(t, EventBody::Reward(rewards[user].clone())))?;
        }
        for from in &self.roster {
            for to in &self.roster {
                if from == to {
                    continue;
                }
                let key = (from.clone(), to.clone());
                let active = active_pairs.contains_key(&key);
                let before = self.ties.weight(from, to);
                let after = new_ties.weight(from, to);
                if active || before != after {
                    sink.emit(&self.event(
                        t,
                        EventBody::TieUpdate {
                            src: from.clone(),
                            dst: to.clone(),
                            active,
                            evidence: active_pairs.get(&key).copied(),
                            weight: after,
                        },
                    ))?;
                }
            }
        }
        sink.emit(&self.event(
            t,
            EventBody::RoundEnd {
                actions: batch.actions.len(),
                votes: batch.votes.len(),
            },
        ))?;

        // State updates for the next round: topics, memories, histories.
        self.ties = new_ties;
        for user in &self.roster {
            for a in visible_content(user, prev_ref) {
                if let Some(topic) = &a.topic {
                    self.topics.record_exposure(user, topic);
                }
            }
        }
        for a in &batch.actions {
            if let Some(topic) = &a.topic {
                self.topics.record_platform(topic);
            }
        }
        let opinion_ema = self.config.scripted.opinion_ema;
        for user in self.roster.clone() {
            let persona = self.personas.get_mut(&user).expect("persona exists");
            apply_round_memory(persona, &batch, &self.index, &self.recip, opinion_ema);
        }
        for user in &self.roster {
            let vector = rewards[user].clone();
            let summary = summarize_actions(user, &batch);
            let best = self.best_rounds.get(user);
            if best.is_none_or(|b| vector.total > b.total) {
                self.best_rounds.insert(
                    user.clone(),
                    BestRoundSummary {
                        round: t,
                        total: vector.total,
                        summary,
                    },
                );
            }
            self.last_rewards.insert(user.clone(), vector.clone());
            self.reward_history
                .entry(user.clone())
                .or_default()
                .push(vector);
        }
        self.prev_batch = Some(batch.clone());
        self.completed_rounds = t;

        Ok(RoundOutcome {
            round: t,
            batch,
            rewards,
            ties: self.ties.clone(),
        })
    }

    /// Runs every remaining round, discarding per-round outcomes.
    pub fn run_to_completion(
        &mut self,
        policy: &mut dyn Policy,
        sink: &mut dyn EventSink,
    ) -> Result<Vec<RoundOutcome>> {
        let mut outcomes = Vec::new();
        while !self.is_finished() {
            outcomes.push(self.run_round(policy, sink)?);
        }
        Ok(outcomes)
    }

    /// Text-mode evidence for one rater: policy ratings when available,
    /// otherwise the engine quantizes its heuristic evidence onto the same
    /// 0..5 scale.
    #[allow(clippy::too_many_arguments)]
    fn text_scores_for(
        &mut self,
        rater: &UserId,
        peers: &[UserId],
        batch: &RoundBatch,
        heuristic: &BTreeMap<(UserId, UserId), f64>,
        policy: &mut dyn Policy,
        sink: &mut dyn EventSink,
        t: u32,
    ) -> Result<BTreeMap<UserId, f64>> {
        let persona = self.personas[rater].clone();
        let ctx = TieRatingContext {
            peers: peers.to_vec(),
            transcript: round_transcript(rater, peers, batch, &self.index),
        };
        let mut ratings: Option<Vec<crate::agents::TieRating>> = None;
        for attempt in 0..MAX_CONTRACT_ATTEMPTS {
            let rng = &mut self
                .streams
                .get_mut(rater)
                .expect("stream exists for roster user")
                .tie;
            match policy.rate_ties(&persona, &ctx, attempt, rng) {
                Ok(Some(r)) => {
                    ratings = Some(r);
                    break;
                }
                Ok(None) => {
                    // Scripted path: quantize heuristic evidence to 0..5.
                    let quantized = peers
                        .iter()
                        .map(|p| {
                            let e = heuristic
                                .get(&(rater.clone(), p.clone()))
                                .copied()
                                .unwrap_or(0.0);
                            crate::agents::TieRating {
                                peer: p.clone(),
                                score: (e * 5.0).round() as i64,
                                reason: "quantized heuristic evidence".to_string(),
                            }
                        })
                        .collect();
                    ratings = Some(quantized);
                    break;
                }
                Err(PolicyError::Invalid(msg)) => {
                    self.diagnostic(
                        sink,
                        t,
                        Some(rater),
                        "tie_rating_invalid",
                        format!("attempt {attempt}: {msg}"),
                    )?;
                }
                Err(PolicyError::Transport(msg)) => {
                    self.emit_exchanges(policy, sink, t)?;
                    return Err(Error::Transport(msg));
                }
                Err(PolicyError::Precondition(msg)) => {
                    return Err(Error::domain(msg));
                }
            }
        }
        let ratings = match ratings {
            Some(r) => r,
            None => {
                self.diagnostic(
                    sink,
                    t,
                    Some(rater),
                    "tie_rating_fallback",
                    "rating exhausted; substituting zero scores".to_string(),
                )?;
                Vec::new()
            }
        };
        let pairs: Vec<(UserId, i64)> =
            ratings.iter().map(|r| (r.peer.clone(), r.score)).collect();
        let (scores, dropped) = text_evidence(&pairs);
        for message in dropped {
            self.diagnostic(sink, t, Some(rater), "tie_rating_dropped", message)?;
        }
        Ok(scores)
    }

    fn emit_exchanges(
        &self,
        policy: &mut dyn Policy,
        sink: &mut dyn EventSink,
        t: u32,
    ) -> Result<()> {
        for xchg in policy.drain_exchanges() {
            sink.emit(&self.event(
                t,
                EventBody::LlmExchange {
                    agent: UserId::new(xchg.agent.clone()),
                    template: xchg.template,
                    attempt: xchg.attempt,
                    request: xchg.request,
                    response: xchg.response,
                    outcome: xchg.outcome,
                },
            ))?;
        }
        Ok(())
    }

    fn check_batch(&self, batch: &RoundBatch, t: u32) -> Result<()> {
        let expected = self.config.num_agents * self.config.actions_per_round as usize;
        if batch.actions.len() != expected {
            return Err(Error::domain(format!(
                "round {t}: {} actions, expected {expected}",
                batch.actions.len()
            )));
        }
        for a in &batch.actions {
            for user in std::iter::once(&a.sender)
                .chain(a.recipient.iter())
                .chain(a.mentions.iter())
            {
                if !self.roster.contains(user) {
                    return Err(Error::Corruption {
                        user: user.to_string(),
                        round: t,
                    });
                }
            }
            let index = &self.index;
            a.check_invariants(|id| index.kind_of(id))
                .map_err(Error::domain)?;
        }
        Ok(())
    }
}

/// Updates one persona's memory stores from a finalized round. Pure in the
/// sense that replaying batches through it reconstructs identical stores.
pub fn apply_round_memory(
    persona: &mut Persona,
    batch: &RoundBatch,
    index: &ActionIndex,
    recip: &ReciprocityState,
    opinion_ema: f64,
) {
    let user = persona.user.clone();
    let t = batch.round;

    // Conversation log: everything sent, received, or seen this round.
    for a in &batch.actions {
        let role = if a.sender == user {
            ConvRole::Sent
        } else if received_by(a, index) == Some(&user) {
            ConvRole::Received
        } else if a.kind.is_public() {
            ConvRole::Saw
        } else {
            continue;
        };
        persona.memory.record_conversation(t, a.id, role);
    }

    // Relationship counters over directed interactions.
    for a in &batch.actions {
        let counterpart = if a.sender == user {
            received_by(a, index)
                .cloned()
                .or_else(|| a.mentions.iter().next().cloned())
        } else if received_by(a, index) == Some(&user) || a.mentions.contains(&user) {
            Some(a.sender.clone())
        } else {
            None
        };
        let Some(peer) = counterpart else { continue };
        if peer == user {
            continue;
        }
        let entry = persona.memory.relationship_mut(&peer);
        if a.sender == user {
            entry.sent += 1;
        } else {
            entry.received += 1;
        }
        entry.last_round = t;
    }

    // Mirror the smoothed like counters and refresh notes.
    let peers: Vec<UserId> = persona.memory.relationship.keys().cloned().collect();
    for peer in peers {
        let ema_to = recip.get(&user, &peer);
        let ema_from = recip.get(&peer, &user);
        let entry = persona.memory.relationship_mut(&peer);
        entry.ema_likes_to = ema_to;
        entry.ema_likes_from = ema_from;
        entry.note = format!(
            "sent {}, received {}, last round {}",
            entry.sent, entry.received, entry.last_round
        );
    }

    // Opinion store follows the agent's own expressed tone per topic.
    for a in batch.actions.iter().filter(|a| a.sender == user) {
        let Some(topic) = &a.topic else { continue };
        let target = sentiment_of(a.tone, None);
        let entry = persona
            .memory
            .opinion
            .entry(topic.clone())
            .or_insert_with(|| crate::persona::OpinionEntry {
                text: String::new(),
                strength: 0.0,
            });
        entry.strength = ((1.0 - opinion_ema) * entry.strength + opinion_ema * target)
            .clamp(-1.0, 1.0);
        let leaning = if entry.strength > 0.2 {
            "supportive"
        } else if entry.strength < -0.2 {
            "critical"
        } else {
            "neutral"
        };
        entry.text = format!("leaning {leaning} on {topic}");
    }
}

/// Directed interactions between `rater` and its peers this round, one line
/// per event, used as the text-mode rating transcript.
fn round_transcript(
    rater: &UserId,
    peers: &[UserId],
    batch: &RoundBatch,
    index: &ActionIndex,
) -> String {
    let peer_set: BTreeSet<&UserId> = peers.iter().collect();
    let mut lines = Vec::new();
    for a in &batch.actions {
        if a.kind == ActionType::Not {
            continue;
        }
        let receiver = received_by(a, index);
        let involves = (&a.sender == rater
            && (receiver.is_some_and(|r| peer_set.contains(r))
                || a.mentions.iter().any(|m| peer_set.contains(m))
                || a.kind.is_public()))
            || (peer_set.contains(&a.sender)
                && (receiver == Some(rater) || a.mentions.contains(rater) || a.kind.is_public()));
        if involves {
            let target = receiver
                .map(|r| format!(" -> {r}"))
                .unwrap_or_default();
            lines.push(format!("{} {}{}: {}", a.sender, a.kind, target, a.content));
        }
    }
    for v in &batch.votes {
        let author = index.author_of(v.content_id);
        let involved = (&v.voter == rater && author.is_some_and(|a| peer_set.contains(a)))
            || (peer_set.contains(&v.voter) && author == Some(rater));
        if involved && v.value != 0 {
            let verb = if v.value == 1 { "liked" } else { "disliked" };
            lines.push(format!(
                "{} {verb} content {} by {}",
                v.voter,
                v.content_id,
                author.map(|a| a.to_string()).unwrap_or_default()
            ));
        }
    }
    if lines.is_empty() {
        "(no directed interactions)".to_string()
    } else {
        lines.join("\n")
    }
}

fn summarize_actions(user: &UserId, batch: &RoundBatch) -> String {
    let mut counts: BTreeMap<&'static str, u32> = BTreeMap::new();
    for a in batch.actions_by(user) {
        *counts.entry(a.kind.name()).or_insert(0) += 1;
    }
    let mut parts: Vec<String> = Vec::new();
    for kind in ["POST", "COM", "DM", "NOT"] {
        if let Some(c) = counts.get(kind) {
            parts.push(format!("{c} {kind}"));
        }
    }
    if parts.is_empty() {
        "nothing".to_string()
    } else {
        parts.join(", ")
    }
}

#[cfg(test)]
mod tests;
