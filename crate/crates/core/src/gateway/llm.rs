//! The chat-completion-backed policy and persona generation.

use std::collections::BTreeMap;

use rand_chacha::ChaCha12Rng;

use crate::agents::{
    ActionPlan, PlanContext, Policy, PolicyError, TieRating, TieRatingContext, VoteDecision,
    VoteItem,
};
use crate::config::LlmConfig;
use crate::error::{Error, Result};
use crate::persona::{Persona, PersonaRecord, RewardComponent};
use crate::types::canonical_topic;

use super::parse::{parse_plan, parse_tie_ratings, parse_votes};
use super::templates::{render, template, TemplateName};
use super::transport::{ChatRequest, ChatTransport};
use super::{CallAccountant, ExchangeRecord};

/// Behavior summaries for the plan prompt, one line per component.
pub fn reward_doc(component: RewardComponent) -> &'static str {
    match component {
        RewardComponent::Soc => {
            "SOC: grows when you send DMs or comments and when others direct DMs or comments at you."
        }
        RewardComponent::Inf => {
            "INF: grows when your feed contains topics new to you and a diverse topic mix."
        }
        RewardComponent::Pre => {
            "PRE: grows when you post and when your posts collect likes rather than dislikes."
        }
        RewardComponent::Coord => {
            "COORD: grows when others @mention you and when you reply to the people who DM'd you last round."
        }
        RewardComponent::Emo => {
            "EMO: tracks the sentiment of DMs and comments you receive; supportive exchanges push it up."
        }
    }
}

fn or_none(s: String) -> String {
    if s.is_empty() {
        "(none)".to_string()
    } else {
        s
    }
}

pub struct LlmPolicy {
    transport: Box<dyn ChatTransport>,
    cfg: LlmConfig,
    /// Coach tip per (agent, round); plan retries reuse it.
    coach_cache: BTreeMap<(String, u32), String>,
    exchanges: Vec<ExchangeRecord>,
    accountant: CallAccountant,
}

impl LlmPolicy {
    pub fn new(transport: Box<dyn ChatTransport>, cfg: LlmConfig) -> Self {
        LlmPolicy {
            transport,
            cfg,
            coach_cache: BTreeMap::new(),
            exchanges: Vec::new(),
            accountant: CallAccountant::default(),
        }
    }

    pub fn accountant(&self) -> &CallAccountant {
        &self.accountant
    }

    fn call(
        &mut self,
        agent: &str,
        name: TemplateName,
        vars: &BTreeMap<String, String>,
        attempt: u32,
    ) -> std::result::Result<String, PolicyError> {
        let messages = render(template(name), vars).map_err(to_policy_error)?;
        let request = ChatRequest {
            model: self.cfg.model.clone(),
            messages,
            temperature: self.cfg.temperature,
            template: name,
        };
        self.accountant.record(name);
        let outcome = self.transport.send(&request);
        let (response, status) = match &outcome {
            Ok(reply) => (reply.text.clone(), "ok".to_string()),
            Err(e) => (String::new(), format!("error: {e}")),
        };
        self.exchanges.push(ExchangeRecord {
            agent: agent.to_string(),
            template: name.as_str().to_string(),
            attempt,
            request: request.wire_body().unwrap_or_default(),
            response,
            outcome: status,
        });
        outcome.map(|r| r.text).map_err(to_policy_error)
    }

    /// Trims list variables (oldest entries first) until the rendered prompt
    /// fits the character budget. Template text itself is never cut.
    fn fit_budget(
        &self,
        name: TemplateName,
        vars: &mut BTreeMap<String, String>,
        trimmable: &[&str],
    ) {
        let budget = self.cfg.char_budget;
        for _ in 0..1000 {
            let rendered_len = match render(template(name), vars) {
                Ok(msgs) => msgs.iter().map(|m| m.content.len()).sum::<usize>(),
                Err(_) => return,
            };
            if rendered_len <= budget {
                return;
            }
            // Drop the oldest line of the longest trimmable list.
            let longest = trimmable
                .iter()
                .filter_map(|k| {
                    let v = vars.get(*k)?;
                    let lines = v.lines().count();
                    (lines > 1).then_some((*k, lines))
                })
                .max_by_key(|(_, lines)| *lines);
            match longest {
                Some((key, _)) => {
                    let v = vars.get_mut(key).expect("key present");
                    *v = v.lines().skip(1).collect::<Vec<_>>().join("\n");
                }
                None => return,
            }
        }
    }

    fn coach_tip(
        &mut self,
        persona: &Persona,
        ctx: &PlanContext,
    ) -> std::result::Result<Option<String>, PolicyError> {
        let Some(advice) = &ctx.coach else {
            return Ok(None);
        };
        let key = (persona.user.to_string(), ctx.round);
        if let Some(tip) = self.coach_cache.get(&key) {
            return Ok(Some(tip.clone()));
        }
        let focus: Vec<&str> = advice
            .ranked
            .iter()
            .filter(|(_, gap)| *gap > 0.0)
            .map(|(c, _)| c.name())
            .collect();
        let focus = if focus.is_empty() {
            RewardComponent::ALL.iter().map(|c| c.name()).collect()
        } else {
            focus
        };
        let guidelines = focus
            .iter()
            .filter_map(|n| {
                RewardComponent::ALL
                    .iter()
                    .find(|c| c.name() == *n)
                    .map(|c| reward_doc(*c))
            })
            .collect::<Vec<_>>()
            .join(" ");
        let mut recent_partners: Vec<(u32, String)> = persona
            .memory
            .relationship
            .iter()
            .map(|(peer, entry)| (entry.last_round, peer.to_string()))
            .collect();
        recent_partners.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let recent_topics: Vec<String> = ctx
            .visible
            .iter()
            .rev()
            .filter_map(|a| a.topic.clone())
            .take(3)
            .collect();

        let mut vars = BTreeMap::new();
        vars.insert("focus".into(), focus.join(", "));
        vars.insert("guidelines".into(), guidelines);
        vars.insert(
            "users".into(),
            or_none(
                ctx.roster
                    .iter()
                    .map(|u| u.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
        );
        vars.insert(
            "dm_last_senders".into(),
            or_none(
                ctx.dm_replies
                    .iter()
                    .map(|d| d.author.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
        );
        vars.insert(
            "recent_partners".into(),
            or_none(
                recent_partners
                    .into_iter()
                    .take(5)
                    .map(|(_, p)| p)
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
        );
        vars.insert("seen_topics".into(), or_none(ctx.known_topics.join(", ")));
        vars.insert("last_recent".into(), or_none(recent_topics.join(", ")));

        let tip = self.call(persona.user.as_str(), TemplateName::Coach, &vars, 0)?;
        let tip = tip.trim().to_string();
        self.coach_cache.insert(key, tip.clone());
        Ok(Some(tip))
    }

    fn plan_vars(
        &self,
        persona: &Persona,
        ctx: &PlanContext,
        tip: Option<&str>,
    ) -> BTreeMap<String, String> {
        let weights = &persona.reward_weights;
        let active: Vec<(RewardComponent, f64)> = weights
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let active_comps = active
            .iter()
            .map(|(c, _)| c.name())
            .collect::<Vec<_>>()
            .join(", ");
        let active_weights = active
            .iter()
            .map(|(c, w)| format!("{}={w:.2}", c.name()))
            .collect::<Vec<_>>()
            .join(", ");
        let docs = active
            .iter()
            .map(|(c, _)| reward_doc(*c))
            .collect::<Vec<_>>()
            .join("\n");

        let last_actions = or_none(
            ctx.visible
                .iter()
                .filter(|a| a.sender == persona.user)
                .map(|a| match (&a.topic, &a.recipient) {
                    (Some(t), _) => format!("{}({t})", a.kind),
                    (None, Some(r)) => format!("{}->{r}", a.kind),
                    _ => a.kind.to_string(),
                })
                .collect::<Vec<_>>()
                .join(", "),
        );
        let observed = ctx
            .last_rewards
            .as_ref()
            .map(|r| {
                format!(
                    "SOC={:.3} INF={:.3} PRE={:.3} COORD={:.3} EMO={:.3} total={:.3}",
                    r.soc, r.inf, r.pre, r.coord, r.emo, r.total
                )
            })
            .unwrap_or_else(|| "(none yet)".to_string());
        let dm_lines = or_none(
            ctx.dm_replies
                .iter()
                .map(|d| {
                    format!(
                        "- author: {} (DM id: {}, topic: {}, content: {})",
                        d.author,
                        d.id,
                        d.topic.as_deref().unwrap_or("-"),
                        d.content
                    )
                })
                .collect::<Vec<_>>()
                .join("\n"),
        );
        let post_lines = or_none(
            ctx.commentable
                .iter()
                .map(|c| {
                    format!(
                        "- target_id: {} (POST author: {}, topic: {}, content: {})",
                        c.id,
                        c.author,
                        c.topic.as_deref().unwrap_or("-"),
                        c.content
                    )
                })
                .collect::<Vec<_>>()
                .join("\n"),
        );

        let mut vars = BTreeMap::new();
        vars.insert("name".into(), persona.name.clone());
        vars.insert("n_actions".into(), ctx.n_actions.to_string());
        match &ctx.best {
            Some(best) => {
                vars.insert("best_round".into(), best.round.to_string());
                vars.insert("best_reward".into(), format!("{:.3}", best.total));
                vars.insert("best_summary".into(), best.summary.clone());
            }
            None => {
                vars.insert("best_round".into(), "-".into());
                vars.insert("best_reward".into(), "-".into());
                vars.insert("best_summary".into(), "nothing yet".into());
            }
        }
        vars.insert("active_comps".into(), active_comps);
        vars.insert("active_weights".into(), active_weights);
        vars.insert("selected_reward_docs".into(), docs);
        vars.insert("last_actions".into(), last_actions);
        vars.insert("observed_rewards".into(), observed);
        vars.insert(
            "users".into(),
            or_none(
                ctx.roster
                    .iter()
                    .map(|u| u.to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
        );
        vars.insert("topics".into(), or_none(ctx.known_topics.join(", ")));
        vars.insert("dm_replies".into(), dm_lines);
        vars.insert("commentable_posts".into(), post_lines);
        if let Some(t) = tip {
            vars.insert("tip".into(), t.to_string());
        }
        vars
    }
}

fn to_policy_error(e: Error) -> PolicyError {
    match e {
        Error::Transport(msg) => PolicyError::Transport(msg),
        other => PolicyError::Invalid(other.to_string()),
    }
}

impl Policy for LlmPolicy {
    fn name(&self) -> &'static str {
        "llm"
    }

    fn plan(
        &mut self,
        persona: &Persona,
        ctx: &PlanContext,
        attempt: u32,
        _rng: &mut ChaCha12Rng,
    ) -> std::result::Result<ActionPlan, PolicyError> {
        let tip = self.coach_tip(persona, ctx)?;
        let mut vars = self.plan_vars(persona, ctx, tip.as_deref());
        self.fit_budget(
            TemplateName::Plan,
            &mut vars,
            &["dm_replies", "commentable_posts"],
        );
        let text = self.call(persona.user.as_str(), TemplateName::Plan, &vars, attempt)?;
        let mut plan =
            parse_plan(&text, self.cfg.strict_parsing).map_err(to_policy_error)?;
        for slot in &mut plan.slots {
            if let Some(topic) = &slot.topic {
                let canonical = canonical_topic(topic);
                slot.topic = if canonical.is_empty() {
                    None
                } else {
                    Some(canonical)
                };
            }
        }
        Ok(plan)
    }

    fn vote(
        &mut self,
        persona: &Persona,
        items: &[VoteItem],
        _rng: &mut ChaCha12Rng,
    ) -> std::result::Result<Vec<VoteDecision>, PolicyError> {
        if items.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(own) = items.iter().find(|i| i.author == persona.user) {
            return Err(PolicyError::Precondition(format!(
                "vote items must exclude the agent's own content (found {})",
                own.content_id
            )));
        }
        let bf = &persona.big_five;
        let lines = items
            .iter()
            .map(|i| {
                format!(
                    "- {} {} {} {}",
                    i.content_id, i.author, i.content, i.relationship_note
                )
            })
            .collect::<Vec<_>>()
            .join("\n");
        let mut vars = BTreeMap::new();
        vars.insert("name".into(), persona.name.clone());
        vars.insert("persona_type".into(), persona.role.clone());
        vars.insert(
            "personality".into(),
            format!(
                "O={:.1} C={:.1} E={:.1} A={:.1} N={:.1}",
                bf.openness, bf.conscientiousness, bf.extraversion, bf.agreeableness, bf.neuroticism
            ),
        );
        vars.insert("items".into(), lines);
        self.fit_budget(TemplateName::Vote, &mut vars, &["items"]);
        let text = self.call(persona.user.as_str(), TemplateName::Vote, &vars, 0)?;
        let parsed = parse_votes(&text, self.cfg.strict_parsing).map_err(to_policy_error)?;

        let by_id: BTreeMap<_, _> = parsed.into_iter().collect();
        if by_id.len() != items.len() {
            return Err(PolicyError::Invalid(format!(
                "expected {} vote entries, got {}",
                items.len(),
                by_id.len()
            )));
        }
        items
            .iter()
            .map(|item| {
                by_id
                    .get(&item.content_id)
                    .map(|&value| VoteDecision {
                        content_id: item.content_id,
                        value,
                    })
                    .ok_or_else(|| {
                        PolicyError::Invalid(format!("missing vote for {}", item.content_id))
                    })
            })
            .collect()
    }

    fn rate_ties(
        &mut self,
        persona: &Persona,
        ctx: &TieRatingContext,
        attempt: u32,
        _rng: &mut ChaCha12Rng,
    ) -> std::result::Result<Option<Vec<TieRating>>, PolicyError> {
        if ctx.peers.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let mut vars = BTreeMap::new();
        vars.insert("name".into(), persona.name.clone());
        vars.insert(
            "peer_list".into(),
            ctx.peers
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        vars.insert("transcript_text".into(), ctx.transcript.clone());
        self.fit_budget(TemplateName::TieUpdate, &mut vars, &["transcript_text"]);
        let text = self.call(
            persona.user.as_str(),
            TemplateName::TieUpdate,
            &vars,
            attempt,
        )?;
        let ratings =
            parse_tie_ratings(&text, self.cfg.strict_parsing).map_err(to_policy_error)?;
        Ok(Some(ratings))
    }

    fn drain_exchanges(&mut self) -> Vec<ExchangeRecord> {
        std::mem::take(&mut self.exchanges)
    }
}

/// Generates `n` personas from corpus snippets through the persona-planner
/// prompt, retrying invalid generations up to three attempts. With the
/// backend disabled, the bundled sample set stands in.
pub fn plan_personas(
    transport: Option<&mut dyn ChatTransport>,
    cfg: &LlmConfig,
    snippets: &[String],
    n: usize,
) -> Result<Vec<PersonaRecord>> {
    if n == 0 {
        return Err(Error::config("persona count must be at least 1"));
    }
    let Some(transport) = transport else {
        let bundled = crate::persona::bundled_personas();
        if n > bundled.len() {
            return Err(Error::config(format!(
                "bundled persona set holds {} records, {n} requested",
                bundled.len()
            )));
        }
        return Ok(bundled.into_iter().take(n).collect());
    };

    let mut vars = BTreeMap::new();
    vars.insert("n".to_string(), n.to_string());
    vars.insert(
        "snippets".to_string(),
        snippets
            .iter()
            .map(|s| format!("- {s}"))
            .collect::<Vec<_>>()
            .join("\n"),
    );
    let messages = render(template(TemplateName::PersonaPlan), &vars)?;
    let request = ChatRequest {
        model: cfg.model.clone(),
        messages,
        temperature: cfg.temperature,
        template: TemplateName::PersonaPlan,
    };

    let mut last_err = None;
    for _ in 0..3 {
        let reply = transport.send(&request)?;
        match parse_personas(&reply.text, n) {
            Ok(personas) => return Ok(personas),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Parse("persona generation failed".into())))
}

fn parse_personas(text: &str, n: usize) -> Result<Vec<PersonaRecord>> {
    let records: Vec<PersonaRecord> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("personas: {e}")))?;
    if records.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} personas, got {}",
            records.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for rec in &records {
        Persona::from(rec.clone()).validate().map_err(|e| {
            Error::Parse(format!("generated persona {} invalid: {e}", rec.user))
        })?;
        if rec.stance.trim().is_empty() {
            return Err(Error::Parse(format!("persona {} missing stance", rec.user)));
        }
        if !seen.insert(rec.user.clone()) {
            return Err(Error::Parse(format!("duplicate persona id {}", rec.user)));
        }
    }
    Ok(records)
}
