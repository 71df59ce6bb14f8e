//! The scripted stochastic baseline policy.
//!
//! Action propensities derive from the persona's reward weights: PRE pushes
//! posting, SOC pushes direct exchanges (with a hard reply rule above a
//! configurable SOC weight), COORD raises the mention rate on public actions,
//! INF biases topic choice toward unseen labels, and EMO tilts tone toward
//! supportive. Plans always satisfy the planning contract.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::config::ScriptedParams;
use crate::persona::Persona;
use crate::types::{ActionType, Tone};

use super::{
    fresh_topic, ActionPlan, CoachTip, PlanContext, PlannedAction, Policy, PolicyError,
    TieRating, TieRatingContext, TipTarget, VoteDecision, VoteItem,
};

pub struct ScriptedPolicy {
    params: ScriptedParams,
}

impl ScriptedPolicy {
    pub fn new(params: ScriptedParams) -> Self {
        ScriptedPolicy { params }
    }

    fn choose_tone(&self, persona: &Persona, rng: &mut ChaCha12Rng) -> Tone {
        let supportive_p = (1.0 + persona.reward_weights.emo) / 2.0;
        if rng.gen::<f64>() < supportive_p {
            Tone::Supportive
        } else if rng.gen::<f64>() < persona.big_five.agreeableness {
            Tone::Neutral
        } else {
            Tone::Critical
        }
    }

    fn choose_topic(&self, persona: &Persona, ctx: &PlanContext, rng: &mut ChaCha12Rng) -> String {
        let want_unseen = rng.gen::<f64>() < persona.reward_weights.inf;
        if want_unseen || ctx.known_topics.is_empty() {
            fresh_topic(&ctx.known_topics, rng.gen_range(0..usize::MAX))
        } else {
            ctx.known_topics[rng.gen_range(0..ctx.known_topics.len())].clone()
        }
    }

    fn mention_flag(&self, persona: &Persona, ctx: &PlanContext, rng: &mut ChaCha12Rng) -> bool {
        !ctx.roster.is_empty() && rng.gen::<f64>() < persona.reward_weights.coord
    }

    fn make_post(&self, persona: &Persona, ctx: &PlanContext, rng: &mut ChaCha12Rng) -> PlannedAction {
        PlannedAction {
            kind: ActionType::Post,
            recipient: None,
            topic: Some(self.choose_topic(persona, ctx, rng)),
            target_id: None,
            mention_flag: self.mention_flag(persona, ctx, rng),
            tone: self.choose_tone(persona, rng),
        }
    }

    fn make_com(&self, persona: &Persona, ctx: &PlanContext, rng: &mut ChaCha12Rng) -> Option<PlannedAction> {
        if ctx.commentable.is_empty() {
            return None;
        }
        let target = &ctx.commentable[rng.gen_range(0..ctx.commentable.len())];
        let topic = target
            .topic
            .clone()
            .unwrap_or_else(|| self.choose_topic(persona, ctx, rng));
        Some(PlannedAction {
            kind: ActionType::Com,
            recipient: None,
            topic: Some(topic),
            target_id: Some(target.id),
            mention_flag: self.mention_flag(persona, ctx, rng),
            tone: self.choose_tone(persona, rng),
        })
    }

    /// A reply DM when an unanswered candidate remains, otherwise a cold DM.
    fn make_dm(
        &self,
        persona: &Persona,
        ctx: &PlanContext,
        used_replies: &mut Vec<crate::types::ActionId>,
        rng: &mut ChaCha12Rng,
    ) -> Option<PlannedAction> {
        if let Some(cand) = ctx.dm_replies.iter().find(|d| !used_replies.contains(&d.id)) {
            used_replies.push(cand.id);
            return Some(PlannedAction {
                kind: ActionType::Dm,
                recipient: Some(cand.author.clone()),
                topic: Some(
                    cand.topic
                        .clone()
                        .unwrap_or_else(|| self.choose_topic(persona, ctx, rng)),
                ),
                target_id: Some(cand.id),
                mention_flag: false,
                tone: self.choose_tone(persona, rng),
            });
        }
        if ctx.roster.is_empty() {
            return None;
        }
        let recipient = ctx.roster[rng.gen_range(0..ctx.roster.len())].clone();
        Some(PlannedAction {
            kind: ActionType::Dm,
            recipient: Some(recipient),
            topic: Some(self.choose_topic(persona, ctx, rng)),
            target_id: None,
            mention_flag: false,
            tone: self.choose_tone(persona, rng),
        })
    }

    /// Realizes a coach tip, falling back to the nearest feasible action when
    /// the suggested one cannot be executed.
    fn realize_tip(
        &self,
        tip: &CoachTip,
        persona: &Persona,
        ctx: &PlanContext,
        used_replies: &mut Vec<crate::types::ActionId>,
        rng: &mut ChaCha12Rng,
    ) -> PlannedAction {
        let topic = tip
            .topic_hint
            .clone()
            .unwrap_or_else(|| self.choose_topic(persona, ctx, rng));
        match tip.action {
            ActionType::Com => {
                let target = match &tip.target {
                    TipTarget::User(u) => ctx
                        .commentable
                        .iter()
                        .find(|c| &c.author == u)
                        .or_else(|| ctx.commentable.first()),
                    _ => ctx.commentable.first(),
                };
                if let Some(t) = target {
                    return PlannedAction {
                        kind: ActionType::Com,
                        recipient: None,
                        topic: Some(t.topic.clone().unwrap_or(topic)),
                        target_id: Some(t.id),
                        mention_flag: tip.invite_mention,
                        tone: tip.tone,
                    };
                }
            }
            ActionType::Dm => {
                if let TipTarget::User(u) = &tip.target {
                    let reply = ctx
                        .dm_replies
                        .iter()
                        .find(|d| &d.author == u && !used_replies.contains(&d.id));
                    if let Some(cand) = reply {
                        used_replies.push(cand.id);
                        return PlannedAction {
                            kind: ActionType::Dm,
                            recipient: Some(cand.author.clone()),
                            topic: Some(cand.topic.clone().unwrap_or(topic)),
                            target_id: Some(cand.id),
                            mention_flag: false,
                            tone: tip.tone,
                        };
                    }
                    if ctx.roster.contains(u) {
                        return PlannedAction {
                            kind: ActionType::Dm,
                            recipient: Some(u.clone()),
                            topic: Some(topic),
                            target_id: None,
                            mention_flag: false,
                            tone: tip.tone,
                        };
                    }
                }
            }
            _ => {}
        }
        // Closest feasible alternative: a post carrying the tip's topic intent.
        PlannedAction {
            kind: ActionType::Post,
            recipient: None,
            topic: Some(topic),
            target_id: None,
            mention_flag: tip.invite_mention && !ctx.roster.is_empty(),
            tone: tip.tone,
        }
    }
}

impl Policy for ScriptedPolicy {
    fn name(&self) -> &'static str {
        "scripted"
    }

    fn plan(
        &mut self,
        persona: &Persona,
        ctx: &PlanContext,
        _attempt: u32,
        rng: &mut ChaCha12Rng,
    ) -> Result<ActionPlan, PolicyError> {
        let n = ctx.n_actions as usize;
        let mut slots: Vec<PlannedAction> = Vec::with_capacity(n);
        let mut used_replies = Vec::new();

        if ctx.round == 1 {
            while slots.len() < n {
                slots.push(self.make_post(persona, ctx, rng));
            }
            return Ok(ActionPlan { slots });
        }

        if let Some(advice) = &ctx.coach {
            for tip in &advice.tips.tips {
                if slots.len() >= n {
                    break;
                }
                slots.push(self.realize_tip(tip, persona, ctx, &mut used_replies, rng));
            }
        }

        let weights = &persona.reward_weights;
        if weights.soc >= self.params.soc_reply_threshold {
            for cand in &ctx.dm_replies {
                if slots.len() >= n {
                    break;
                }
                if used_replies.contains(&cand.id) {
                    continue;
                }
                used_replies.push(cand.id);
                slots.push(PlannedAction {
                    kind: ActionType::Dm,
                    recipient: Some(cand.author.clone()),
                    topic: Some(
                        cand.topic
                            .clone()
                            .unwrap_or_else(|| self.choose_topic(persona, ctx, rng)),
                    ),
                    target_id: Some(cand.id),
                    mention_flag: false,
                    tone: self.choose_tone(persona, rng),
                });
            }
        }

        while slots.len() < n {
            let w_post = weights.pre + 0.5 * weights.inf + 0.5 * weights.coord;
            let w_com = if ctx.commentable.is_empty() {
                0.0
            } else {
                0.5 * weights.soc + 0.5 * weights.coord
            };
            let w_dm = if ctx.roster.is_empty() && ctx.dm_replies.is_empty() {
                0.0
            } else {
                0.5 * weights.soc
            };
            let total = w_post + w_com + w_dm;
            let slot = if total < 1e-9 {
                // No signal from the weights: post.
                self.make_post(persona, ctx, rng)
            } else {
                let draw = rng.gen::<f64>() * total;
                if draw < w_post {
                    self.make_post(persona, ctx, rng)
                } else if draw < w_post + w_com {
                    self.make_com(persona, ctx, rng)
                        .unwrap_or_else(|| self.make_post(persona, ctx, rng))
                } else {
                    self.make_dm(persona, ctx, &mut used_replies, rng)
                        .unwrap_or_else(|| self.make_post(persona, ctx, rng))
                }
            };
            slots.push(slot);
        }

        Ok(ActionPlan { slots })
    }

    fn vote(
        &mut self,
        persona: &Persona,
        items: &[VoteItem],
        rng: &mut ChaCha12Rng,
    ) -> Result<Vec<VoteDecision>, PolicyError> {
        if let Some(own) = items.iter().find(|i| i.author == persona.user) {
            return Err(PolicyError::Precondition(format!(
                "vote items must exclude the agent's own content (found {})",
                own.content_id
            )));
        }
        let p = &self.params;
        let agree = persona.big_five.agreeableness;
        Ok(items
            .iter()
            .map(|item| {
                let logit = p.vote_tie_coeff * item.tie_weight
                    + p.vote_stance_coeff * item.stance_alignment
                    + p.vote_agree_coeff * agree
                    + p.vote_bias;
                let like_p = 1.0 / (1.0 + (-logit).exp());
                let value = if rng.gen::<f64>() < like_p {
                    1
                } else if item.stance_alignment < p.dislike_stance_below
                    && agree < p.dislike_agree_below
                {
                    -1
                } else {
                    0
                };
                VoteDecision {
                    content_id: item.content_id,
                    value,
                }
            })
            .collect())
    }

    fn rate_ties(
        &mut self,
        _persona: &Persona,
        _ctx: &TieRatingContext,
        _attempt: u32,
        _rng: &mut ChaCha12Rng,
    ) -> Result<Option<Vec<TieRating>>, PolicyError> {
        // The engine quantizes its heuristic evidence for scripted text mode.
        Ok(None)
    }
}

/// Identity used by vote-model tests: probability that the logistic model
/// emits a like for the given inputs.
pub fn like_probability(params: &ScriptedParams, tie: f64, stance: f64, agree: f64) -> f64 {
    let logit = params.vote_tie_coeff * tie
        + params.vote_stance_coeff * stance
        + params.vote_agree_coeff * agree
        + params.vote_bias;
    1.0 / (1.0 + (-logit).exp())
}

#[cfg(test)]
mod tests {
    use super::super::tests::{base_ctx, test_persona};
    use super::*;
    use crate::agents::{validate_plan, DmReplyCandidate};
    use crate::persona::{RewardComponent, RewardWeights};
    use crate::rng::derive_stream;
    use crate::types::{ActionId, UserId};

    fn plan_with(weights: RewardWeights, ctx: &PlanContext, seed: u64) -> ActionPlan {
        let persona = test_persona("u", weights);
        let mut policy = ScriptedPolicy::new(ScriptedParams::default());
        let mut rng = derive_stream(seed, &["test", "plan"]);
        policy.plan(&persona, ctx, 0, &mut rng).unwrap()
    }

    #[test]
    fn pure_pre_plans_only_posts() {
        let ctx = base_ctx(2, 3);
        for seed in 0..20 {
            let plan = plan_with(RewardWeights::pure(RewardComponent::Pre), &ctx, seed);
            assert!(plan.slots.iter().all(|s| s.kind == ActionType::Post));
        }
    }

    #[test]
    fn pure_soc_replies_first() {
        let mut ctx = base_ctx(2, 3);
        ctx.dm_replies.push(DmReplyCandidate {
            id: ActionId(9),
            author: UserId::new("w1"),
            topic: Some("t".into()),
            content: "hi".into(),
        });
        let plan = plan_with(RewardWeights::pure(RewardComponent::Soc), &ctx, 7);
        assert_eq!(plan.slots[0].kind, ActionType::Dm);
        assert_eq!(plan.slots[0].target_id, Some(ActionId(9)));
        assert_eq!(plan.slots[0].recipient, Some(UserId::new("w1")));
    }

    #[test]
    fn round_one_is_posts_only() {
        let ctx = base_ctx(1, 3);
        for seed in 0..10 {
            let plan = plan_with(RewardWeights::uniform(), &ctx, seed);
            assert!(plan
                .slots
                .iter()
                .all(|s| matches!(s.kind, ActionType::Post | ActionType::Not)));
        }
    }

    #[test]
    fn fixed_seed_fixed_plan() {
        let ctx = base_ctx(2, 3);
        let a = plan_with(RewardWeights::uniform(), &ctx, 99);
        let b = plan_with(RewardWeights::uniform(), &ctx, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn plans_always_validate() {
        let mut ctx = base_ctx(2, 3);
        ctx.commentable.push(crate::agents::CommentablePost {
            id: ActionId(4),
            author: UserId::new("w2"),
            topic: Some("solar power".into()),
            content: "post".into(),
            likes: 1,
        });
        ctx.dm_replies.push(DmReplyCandidate {
            id: ActionId(5),
            author: UserId::new("w1"),
            topic: None,
            content: "dm".into(),
        });
        for seed in 0..200 {
            let weights = match seed % 4 {
                0 => RewardWeights::uniform(),
                1 => RewardWeights::pure(RewardComponent::Soc),
                2 => RewardWeights::pure(RewardComponent::Coord),
                _ => RewardWeights {
                    soc: 0.3,
                    inf: 0.3,
                    pre: 0.2,
                    coord: 0.1,
                    emo: 0.1,
                },
            };
            let plan = plan_with(weights, &ctx, seed);
            assert!(validate_plan(&plan, &ctx).is_ok(), "seed {seed}: {plan:?}");
        }
    }

    #[test]
    fn vote_rejects_own_content() {
        let persona = test_persona("u", RewardWeights::uniform());
        let mut policy = ScriptedPolicy::new(ScriptedParams::default());
        let mut rng = derive_stream(1, &["test", "vote"]);
        let items = vec![VoteItem {
            content_id: ActionId(1),
            author: UserId::new("u"),
            content: "mine".into(),
            topic: None,
            tie_weight: 0.0,
            stance_alignment: 0.0,
            relationship_note: String::new(),
        }];
        assert!(policy.vote(&persona, &items, &mut rng).is_err());
    }

    #[test]
    fn vote_empty_items_empty_votes() {
        let persona = test_persona("u", RewardWeights::uniform());
        let mut policy = ScriptedPolicy::new(ScriptedParams::default());
        let mut rng = derive_stream(1, &["test", "vote"]);
        assert!(policy.vote(&persona, &[], &mut rng).unwrap().is_empty());
    }

    #[test]
    fn vote_like_rate_matches_logistic_model() {
        // Tie weight 1, aligned stance, agreeableness 1: sigma(3) over many draws.
        let mut persona = test_persona("u", RewardWeights::uniform());
        persona.big_five.agreeableness = 1.0;
        let mut policy = ScriptedPolicy::new(ScriptedParams::default());
        let mut rng = derive_stream(4242, &["test", "vote-mc"]);
        let item = VoteItem {
            content_id: ActionId(1),
            author: UserId::new("peer"),
            content: "c".into(),
            topic: None,
            tie_weight: 1.0,
            stance_alignment: 1.0,
            relationship_note: String::new(),
        };
        let trials = 10_000;
        let mut likes = 0u32;
        for _ in 0..trials {
            let votes = policy.vote(&persona, &[item.clone()], &mut rng).unwrap();
            if votes[0].value == 1 {
                likes += 1;
            }
        }
        let observed = f64::from(likes) / f64::from(trials);
        let expected = like_probability(&ScriptedParams::default(), 1.0, 1.0, 1.0);
        assert!((expected - 1.0 / (1.0 + (-3.0f64).exp())).abs() < 1e-12);
        assert!(
            (observed - expected).abs() < 0.01,
            "observed {observed}, expected {expected}"
        );
    }
}
