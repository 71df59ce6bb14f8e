//! Strict structured parsing of assistant responses.
//!
//! The prompts demand raw JSON with no extra keys; strict mode enforces
//! exactly that. Lenient mode (for weaker models) strips code fences and
//! tolerates extra keys, but never relaxes value domains.

use serde::Deserialize;

use crate::agents::{ActionPlan, PlannedAction, TieRating};
use crate::error::{Error, Result};
use crate::types::{ActionId, ActionType, Tone, UserId};

fn parse_kind(s: &str) -> Result<ActionType> {
    match s {
        "POST" => Ok(ActionType::Post),
        "COM" => Ok(ActionType::Com),
        "DM" => Ok(ActionType::Dm),
        "NOT" => Ok(ActionType::Not),
        other => Err(Error::Parse(format!("unknown action type `{other}`"))),
    }
}

fn parse_tone(s: &str) -> Result<Tone> {
    match s {
        "supportive" => Ok(Tone::Supportive),
        "neutral" => Ok(Tone::Neutral),
        "critical" => Ok(Tone::Critical),
        other => Err(Error::Parse(format!("unknown tone `{other}`"))),
    }
}

/// Strips markdown code fences and surrounding chatter in lenient mode.
fn lenient_body(text: &str) -> &str {
    let trimmed = text.trim();
    let without_fence = trimmed
        .strip_prefix("```json")
        .or_else(|| trimmed.strip_prefix("```"))
        .and_then(|rest| rest.strip_suffix("```"))
        .unwrap_or(trimmed);
    without_fence.trim()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlotStrict {
    #[serde(rename = "type")]
    kind: String,
    recipient: Option<String>,
    topic: Option<String>,
    target_id: Option<u64>,
    mention_flag: bool,
    tone: String,
}

#[derive(Deserialize)]
struct RawSlotLenient {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    recipient: Option<String>,
    #[serde(default)]
    topic: Option<String>,
    #[serde(default)]
    target_id: Option<u64>,
    #[serde(default)]
    mention_flag: bool,
    tone: String,
}

fn slot_from_parts(
    kind: &str,
    recipient: Option<String>,
    topic: Option<String>,
    target_id: Option<u64>,
    mention_flag: bool,
    tone: &str,
) -> Result<PlannedAction> {
    Ok(PlannedAction {
        kind: parse_kind(kind)?,
        recipient: recipient.map(UserId::new),
        topic,
        target_id: target_id.map(ActionId),
        mention_flag,
        tone: parse_tone(tone)?,
    })
}

/// Parses a planned-action array. Contract validity (targets, nullability,
/// slot count) is checked separately by plan validation.
pub fn parse_plan(text: &str, strict: bool) -> Result<ActionPlan> {
    let slots = if strict {
        let raw: Vec<RawSlotStrict> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("plan: {e}")))?;
        raw.into_iter()
            .map(|s| {
                slot_from_parts(
                    &s.kind,
                    s.recipient,
                    s.topic,
                    s.target_id,
                    s.mention_flag,
                    &s.tone,
                )
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let raw: Vec<RawSlotLenient> = serde_json::from_str(lenient_body(text))
            .map_err(|e| Error::Parse(format!("plan: {e}")))?;
        raw.into_iter()
            .map(|s| {
                slot_from_parts(
                    &s.kind,
                    s.recipient,
                    s.topic,
                    s.target_id,
                    s.mention_flag,
                    &s.tone,
                )
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(ActionPlan { slots })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVoteStrict {
    id: u64,
    vote: i64,
}

#[derive(Deserialize)]
struct RawVoteLenient {
    id: u64,
    vote: i64,
}

/// Parses vote decisions `[{"id": .., "vote": -1|0|1}, ..]`.
pub fn parse_votes(text: &str, strict: bool) -> Result<Vec<(ActionId, i8)>> {
    let pairs: Vec<(u64, i64)> = if strict {
        let raw: Vec<RawVoteStrict> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("votes: {e}")))?;
        raw.into_iter().map(|v| (v.id, v.vote)).collect()
    } else {
        let raw: Vec<RawVoteLenient> = serde_json::from_str(lenient_body(text))
            .map_err(|e| Error::Parse(format!("votes: {e}")))?;
        raw.into_iter().map(|v| (v.id, v.vote)).collect()
    };
    pairs
        .into_iter()
        .map(|(id, value)| {
            if !(-1..=1).contains(&value) {
                return Err(Error::Parse(format!(
                    "vote value {value} for {id} outside -1..=1"
                )));
            }
            Ok((ActionId(id), value as i8))
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRatingsStrict {
    ratings: Vec<RawRatingStrict>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRatingStrict {
    peer: String,
    score: i64,
    reason: String,
}

#[derive(Deserialize)]
struct RawRatingsLenient {
    ratings: Vec<RawRatingLenient>,
}

#[derive(Deserialize)]
struct RawRatingLenient {
    peer: String,
    score: i64,
    #[serde(default)]
    reason: String,
}

/// Parses the tie-rating object. Score range enforcement happens downstream,
/// where out-of-range entries are dropped with a diagnostic.
pub fn parse_tie_ratings(text: &str, strict: bool) -> Result<Vec<TieRating>> {
    if strict {
        let raw: RawRatingsStrict =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("tie ratings: {e}")))?;
        Ok(raw
            .ratings
            .into_iter()
            .map(|r| TieRating {
                peer: UserId::new(r.peer),
                score: r.score,
                reason: r.reason,
            })
            .collect())
    } else {
        let raw: RawRatingsLenient = serde_json::from_str(lenient_body(text))
            .map_err(|e| Error::Parse(format!("tie ratings: {e}")))?;
        Ok(raw
            .ratings
            .into_iter()
            .map(|r| TieRating {
                peer: UserId::new(r.peer),
                score: r.score,
                reason: r.reason,
            })
            .collect())
    }
}
