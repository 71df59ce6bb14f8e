//! Line-delimited structured event log.
//!
//! One record per action, vote, reward, and tie update, plus run metadata
//! and diagnostics. Records carry no wall-clock data, so runs with equal
//! seeds and configs produce byte-identical logs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::rewards::RewardVector;
use crate::ties::TieGraph;
use crate::types::{Action, UserId, Vote};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    RunStart {
        seed: u64,
        num_agents: usize,
        rounds: u32,
        actions_per_round: u32,
        policy: String,
        tie_mode: String,
        coach: bool,
        roster: Vec<UserId>,
    },
    Action(Action),
    Vote(Vote),
    Reward(RewardVector),
    TieUpdate {
        src: UserId,
        dst: UserId,
        active: bool,
        evidence: Option<f64>,
        weight: f64,
    },
    Diagnostic {
        agent: Option<UserId>,
        code: String,
        message: String,
    },
    LlmExchange {
        agent: UserId,
        template: String,
        attempt: u32,
        request: String,
        response: String,
        outcome: String,
    },
    RoundEnd {
        actions: usize,
        votes: usize,
    },
}

/// One event-log line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub schema_version: String,
    pub run_id: String,
    pub round: u32,
    #[serde(flatten)]
    pub body: EventBody,
}

impl Event {
    pub fn new(run_id: &str, round: u32, body: EventBody) -> Self {
        Event {
            schema_version: crate::SCHEMA_VERSION.to_string(),
            run_id: run_id.to_string(),
            round,
            body,
        }
    }
}

/// Destination for emitted events.
pub trait EventSink {
    fn emit(&mut self, event: &Event) -> Result<()>;
}

/// Discards everything.
pub struct NullSink;

impl EventSink for NullSink {
    fn emit(&mut self, _event: &Event) -> Result<()> {
        Ok(())
    }
}

/// Collects events in memory.
#[derive(Default)]
pub struct VecSink(pub Vec<Event>);

impl EventSink for VecSink {
    fn emit(&mut self, event: &Event) -> Result<()> {
        self.0.push(event.clone());
        Ok(())
    }
}

/// Writes one JSON record per line.
pub struct JsonlSink<W: Write> {
    writer: W,
    pub lines: u64,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(writer: W) -> Self {
        JsonlSink { writer, lines: 0 }
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

impl<W: Write> EventSink for JsonlSink<W> {
    fn emit(&mut self, event: &Event) -> Result<()> {
        serde_json::to_writer(&mut self.writer, event)?;
        self.writer.write_all(b"\n")?;
        self.lines += 1;
        Ok(())
    }
}

/// Fans one event out to two sinks.
pub struct TeeSink<'a, A: EventSink, B: EventSink>(pub &'a mut A, pub &'a mut B);

impl<A: EventSink, B: EventSink> EventSink for TeeSink<'_, A, B> {
    fn emit(&mut self, event: &Event) -> Result<()> {
        self.0.emit(event)?;
        self.1.emit(event)
    }
}

pub fn run_start_event(run_id: &str, config: &SimConfig, roster: &[UserId]) -> Event {
    Event::new(
        run_id,
        0,
        EventBody::RunStart {
            seed: config.seed,
            num_agents: config.num_agents,
            rounds: config.rounds,
            actions_per_round: config.actions_per_round,
            policy: config.policy.name().to_string(),
            tie_mode: match config.tie_mode {
                crate::config::TieMode::Heuristic => "heuristic".to_string(),
                crate::config::TieMode::Text => "text".to_string(),
            },
            coach: config.coach_enabled,
            roster: roster.to_vec(),
        },
    )
}

/// Parses a JSONL event log.
pub fn read_events(text: &str) -> Result<Vec<Event>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// Rebuilds the final tie matrix by replaying tie-update records over a zero
/// matrix.
pub fn replay_final_ties(events: &[Event], roster: Vec<UserId>) -> TieGraph {
    let mut graph = TieGraph::new(roster);
    let mut last_round = 0;
    for ev in events {
        if let EventBody::TieUpdate {
            src, dst, weight, ..
        } = &ev.body
        {
            if let (Some(f), Some(t)) = (graph.index_of(src), graph.index_of(dst)) {
                graph.set_weight_idx(f, t, *weight);
            }
            last_round = last_round.max(ev.round);
        }
    }
    graph.round = last_round;
    graph
}
