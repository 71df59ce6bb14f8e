//! The shipped prompt templates and the placeholder renderer.
//!
//! Templates use `{name}` placeholders; `{{` and `}}` escape literal braces.
//! A line whose placeholder is listed as optional disappears when the
//! variable is absent; any other unbound placeholder is a render error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateName {
    Coach,
    Plan,
    Vote,
    TieUpdate,
    PersonaPlan,
}

impl TemplateName {
    pub fn as_str(self) -> &'static str {
        match self {
            TemplateName::Coach => "coach",
            TemplateName::Plan => "plan",
            TemplateName::Vote => "vote",
            TemplateName::TieUpdate => "tie_update",
            TemplateName::PersonaPlan => "persona_plan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

pub struct PromptTemplate {
    pub name: TemplateName,
    pub system: &'static str,
    pub user: &'static str,
    /// Placeholders whose whole line is dropped when the variable is absent.
    pub optional: &'static [&'static str],
    /// Placeholders that must render to non-empty text.
    pub nonempty: &'static [&'static str],
}

const COACH_SYSTEM: &str = "You are a strategy coach in a multi-round social media game. Your job is to help the agent maximize long-term rewards by closing the gaps between their current reward scores and their target weights. Priorities are ordered by importance, so the first items need the most improvement. Output 3-5 one-sentence bullet tips that are concrete, executable, and encourage variety in partners and topics across rounds to promote diversity and exploration. No preamble, no explanations. Remember: the total reward per round is capped at 1, and many reward components depend on how others engage with the agent, so your tips should encourage responses and collaboration.";

const COACH_USER: &str = "Priority this round (high\u{2192}low): {focus}
Guidelines: {guidelines}

Context:
- Users: {users}
- DM senders last round: {dm_last_senders}
- Recent partners: {recent_partners}
- Known topics so far: {seen_topics}
- Recent topics (last 3): {last_recent}

Each tip must include:
- action type (POST/COM/DM),
- target user (from lists) or 'top-liked post',
- topic (choose a relevant or new topic; exploring new topics helps INF),
- whether you invite them to @mention you back (only if aiming at COORD),
- tone (supportive/neutral/critical).

Focus items are ordered by how far below target the corresponding reward is; design actions to improve the highest-priority components. Vary topics and partners to support learning and social diversity.

Return ONLY the bullets.";

const PLAN_SYSTEM: &str = "You are {name}, a user participating in a multi-round social media game. In each round you will execute exactly {n_actions} actions and your choices accumulate across rounds, affecting future relationships, topics seen and rewards. Recall past interactions and relationships from your memory when planning your actions.

Your best was round {best_round} with score {best_reward} when you did {best_summary}.
Your only goal is to grow what you value most-{active_comps}-in these proportions: {active_weights}.
You got this coaching tip: {tip}

Here are the reward definitions and how they translate into behaviours:
{selected_reward_docs}
Here's how they combine:
Your total score is a mix of these parts (SOC, INF, PRE, COORD, EMO), weighted by lambdas that sum to 1. Each lambda decides a component's importance.
Current weights: {active_weights}

Reward-aware rules (apply when the corresponding lambda is large):
- COORD: For POST/COM, set \"mention_flag\": true when you plan to include a literal @mention (e.g., @post_author or a user from Users).
- SOC: Balance COM/DM between initiating and replying; if someone messaged you last round, reply.
- INF: Prefer topics not seen recently; otherwise keep a diverse mix from Topics.
- PRE: Include at least one POST (keep it concise and end with a clear question).
- EMO: Set \"tone\": \"supportive\" for COM/DM to elicit supportive replies.

PLANNING CONTRACT:
Plan EXACTLY {n_actions} actions.
When coach tips are provided, you MUST follow them in your plan. Only adapt if a tip is impossible to execute.
If a tip is impossible, replace only that action with the closest feasible alternative that preserves the tip's intent.
Respond with a raw JSON array only (no code fences, no comments, no extra keys, no trailing commas).

Each action must be an object with EXACTLY these keys:
- \"type\": one of \"POST\",\"COM\",\"DM\",\"NOT\"
- \"recipient\": user ID for DM, otherwise null
- \"topic\": string for POST/COM/DM, null for NOT
- \"target_id\": COM \u{2192} a post ID from the list; DM \u{2192} a DM reply ID (reply mode) or null (cold DM); null for POST and NOT
- \"mention_flag\": boolean; true only if you will include an @mention (POST/COM only; must be false for DM and NOT)
- \"tone\": one of \"supportive\",\"neutral\",\"critical\"

CONSTRAINTS:
- POST: recipient=null, target_id=null
- COM: recipient=null, target_id MUST be a valid post ID from the list
- DM: two modes:
  - Reply DM: recipient MUST be the author of a listed DM reply AND target_id MUST be that DM id
  - Cold DM: recipient MUST be a valid user ID from the list AND target_id MUST be null
- NOT: recipient=topic=target_id=null

TOPIC GUIDANCE:
- For COM: use the target post's topic if provided; otherwise pick a relevant engaging topic.
- For POST/DM: choose any topic likely to engage the audience or recipient; exploring new topics can increase INF reward.
- There is no fixed topic list; you may introduce new topics, but keep them \u{2264} 5 words.";

const PLAN_USER: &str = "Last actions (most recent round): {last_actions},
Last observed reward scores: {observed_rewards},
Users you can interact with: {users},
Known topics so far: {topics} (you may introduce new topics),
DM replies (users who DM'd you last round):
{dm_replies}
Commentable posts (choose a target_id from this list ONLY):
{commentable_posts}
Based on the above context, decide on {n_actions} actions that best improve your priority rewards. For Reply DM, use the listed DM IDs; cold DM can be sent to any user in the list. For COM, you must supply a valid post ID from the list above. Remember: replies help SOC, mentions help COORD, and supportive tone helps EMO.";

const VOTE_SYSTEM: &str = "You are {name}, a user in a multi-round social media game.
You are a {persona_type} with {personality} personality - use these traits to guide your voting.
Your choices to \"like\" (1), \"dislike\" (-1), or remain neutral (0) on each piece of content affect how others perceive you (PRE) and the emotional tone of your interactions (EMO), and therefore influence your future rewards. Use your persona traits and your relationship history to decide which content to support, oppose, or ignore. A neutral vote (0) means you have no strong opinion or the relationship context is neutral.

Respond ONLY with a JSON array of objects. Each object must have:
- id: the content ID (integer)
- vote: 1 for \"like\", -1 for \"dislike\", or 0 for \"no vote\"
Example output:

[
{{\"id\": 42, \"vote\": 1}},
{{\"id\": 73, \"vote\": -1}},
{{\"id\": 99, \"vote\": 0}}
]
No extra keys, no free-form text, no explanation.";

const VOTE_USER: &str = "Here are the latest items to vote on (id, sender, content, relationship):

{items}

Vote on each according to your persona and the context of your relationships. Remember: liking or disliking influences your reputation and future interactions; use 0 (\"no vote\") when you have no strong opinion or the relationship context is neutral.";

const TIE_SYSTEM: &str = "You are {name}, a user in a multi-round social media game. Your task is to judge the strength of evidence for increasing your social connection to each peer based SOLELY on the interactions in the latest round.

SCORING GUIDE:
Assign an integer score from 0 to 5 to each peer based on these criteria:
- 5: Exceptional - repeated warmth/help/coordination; clear constructive alignment.
- 4: Strong - mutual positivity or clear support/assistance.
- 3: Good - polite/positive tone with some constructive exchange.
- 2: Weak - minor positive cues; limited substance.
- 1: Very Weak - faint positivity; likely noise.
- 0: None - mixed/negative/insufficient; do NOT increase.

RULES:
- Base decisions on LAST-ROUND transcript only; do not infer beyond text.
- Be conservative; if unsure, choose 0.
- One rating per peer. Reason must be factual and \u{2264}1 sentence.

OUTPUT FORMAT:
You MUST output STRICT JSON. Include a score and a concise reason for every peer provided.
{{
\"ratings\": [
    {{
    \"peer\": \"PeerName\",
    \"score\": 0|1|2|3|4|5,
    \"reason\": \"\u{2264}1 sentence.\"
    }}
]
}}";

const TIE_USER: &str = "Here are your peers for this round: {peer_list}.
Transcript of the last round: {transcript_text}.
Rate each peer according to the rules above.";

const PERSONA_SYSTEM: &str = "You are a persona planner for a multi-round social media game. From the corpus excerpts provided, design {n} distinct user personas grounded in the observed communication. Infer only content-based attributes: role, persona description, topic stance, and communication style. Assign Big Five trait scores in [0,1] and reward weights over SOC, INF, PRE, COORD, EMO that are non-negative and sum to 1.

Respond ONLY with a JSON array of {n} objects, each with EXACTLY these keys:
- \"user\": short lowercase identifier, unique
- \"name\": display name
- \"role\": one short phrase
- \"description\": 1-2 sentences
- \"stance\": one short phrase
- \"comm_style\": one short phrase
- \"big_five\": object with keys \"openness\",\"conscientiousness\",\"extraversion\",\"agreeableness\",\"neuroticism\", values in [0,1]
- \"reward_weights\": object with keys \"soc\",\"inf\",\"pre\",\"coord\",\"emo\", non-negative, summing to 1
No extra keys, no free-form text.";

const PERSONA_USER: &str = "Corpus excerpts:
{snippets}

Create {n} personas grounded in these excerpts.";

pub const COACH_TEMPLATE: PromptTemplate = PromptTemplate {
    name: TemplateName::Coach,
    system: COACH_SYSTEM,
    user: COACH_USER,
    optional: &[],
    nonempty: &["focus"],
};

pub const PLAN_TEMPLATE: PromptTemplate = PromptTemplate {
    name: TemplateName::Plan,
    system: PLAN_SYSTEM,
    user: PLAN_USER,
    optional: &["tip"],
    nonempty: &[],
};

pub const VOTE_TEMPLATE: PromptTemplate = PromptTemplate {
    name: TemplateName::Vote,
    system: VOTE_SYSTEM,
    user: VOTE_USER,
    optional: &[],
    nonempty: &["items"],
};

pub const TIE_TEMPLATE: PromptTemplate = PromptTemplate {
    name: TemplateName::TieUpdate,
    system: TIE_SYSTEM,
    user: TIE_USER,
    optional: &[],
    nonempty: &["peer_list"],
};

pub const PERSONA_TEMPLATE: PromptTemplate = PromptTemplate {
    name: TemplateName::PersonaPlan,
    system: PERSONA_SYSTEM,
    user: PERSONA_USER,
    optional: &[],
    nonempty: &["snippets"],
};

pub fn template(name: TemplateName) -> &'static PromptTemplate {
    match name {
        TemplateName::Coach => &COACH_TEMPLATE,
        TemplateName::Plan => &PLAN_TEMPLATE,
        TemplateName::Vote => &VOTE_TEMPLATE,
        TemplateName::TieUpdate => &TIE_TEMPLATE,
        TemplateName::PersonaPlan => &PERSONA_TEMPLATE,
    }
}

fn placeholders_in(line: &str) -> Vec<String> {
    let mut names = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            if i + 1 < bytes.len() && bytes[i + 1] == b'{' {
                i += 2;
                continue;
            }
            if let Some(end) = line[i + 1..].find(['}', '{']) {
                let end = i + 1 + end;
                if bytes[end] == b'}' {
                    let name = &line[i + 1..end];
                    if !name.is_empty()
                        && name
                            .chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        names.push(name.to_string());
                    }
                    i = end + 1;
                    continue;
                }
            }
        }
        i += 1;
    }
    names
}

fn render_text(
    text: &str,
    vars: &BTreeMap<String, String>,
    optional: &[&str],
    nonempty: &[&str],
) -> Result<String> {
    let mut out_lines = Vec::new();
    for line in text.lines() {
        let names = placeholders_in(line);
        let missing_optional = names
            .iter()
            .any(|n| optional.contains(&n.as_str()) && !vars.contains_key(n));
        if missing_optional {
            continue;
        }
        let mut rendered = String::with_capacity(line.len());
        let mut chars = line.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '{' if chars.peek() == Some(&'{') => {
                    chars.next();
                    rendered.push('{');
                }
                '}' if chars.peek() == Some(&'}') => {
                    chars.next();
                    rendered.push('}');
                }
                '{' => {
                    let mut name = String::new();
                    for c2 in chars.by_ref() {
                        if c2 == '}' {
                            break;
                        }
                        name.push(c2);
                    }
                    match vars.get(&name) {
                        Some(value) => {
                            if nonempty.contains(&name.as_str()) && value.trim().is_empty() {
                                return Err(Error::Render(format!(
                                    "variable `{name}` must not be empty"
                                )));
                            }
                            rendered.push_str(value);
                        }
                        None => {
                            return Err(Error::Render(format!(
                                "unbound placeholder `{name}`"
                            )))
                        }
                    }
                }
                other => rendered.push(other),
            }
        }
        out_lines.push(rendered);
    }
    Ok(out_lines.join("\n"))
}

/// Renders a template into system and user chat messages. Every placeholder
/// must be bound; optional lines vanish when their variable is absent.
pub fn render(tpl: &PromptTemplate, vars: &BTreeMap<String, String>) -> Result<Vec<ChatMessage>> {
    let system = render_text(tpl.system, vars, tpl.optional, tpl.nonempty)?;
    let user = render_text(tpl.user, vars, tpl.optional, tpl.nonempty)?;
    Ok(vec![
        ChatMessage {
            role: "system".to_string(),
            content: system,
        },
        ChatMessage {
            role: "user".to_string(),
            content: user,
        },
    ])
}
