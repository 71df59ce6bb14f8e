//! Deterministic, seedable multi-agent social-media simulation engine.
//!
//! The engine runs a fixed population of agents through a sequence of rounds.
//! Each round every agent plans and executes a fixed number of actions
//! (posts, comments, direct messages, or no-ops), votes on the round's public
//! content, receives a five-component behavioral reward, and the directed
//! social-tie matrix is reweighted from the round's interactions. Agent
//! intelligence is pluggable: a scripted stochastic baseline or an external
//! chat-completion backend drive the same planning/voting/rating contracts.
//!
//! Module map:
//! - [`types`]: actions, votes, round batches, identifiers.
//! - [`persona`]: agent profiles, reward weights, memory stores.
//! - [`rewards`]: the five behavioral reward components and their composition.
//! - [`ties`]: activation channels, evidence signals, the gated tie update.
//! - [`metrics`]: network statistics (density, clustering, paths, modularity,
//!   homophily, degree distributions) plus greedy community detection.
//! - [`agents`]: plan validation, the scripted policy, the coach.
//! - [`gateway`]: prompt templates, chat transport, strict response parsing.
//! - [`sim`]: the round orchestration loop and simulation state.
//! - [`events`]: the line-delimited event log.

pub mod agents;
pub mod config;
pub mod error;
pub mod events;
pub mod gateway;
pub mod metrics;
#[cfg(feature = "oracles")]
pub mod oracles;
pub mod persona;
pub mod rewards;
pub mod rng;
pub mod sim;
pub mod ties;
pub mod types;

pub use config::{PolicyKind, SimConfig, TieMode};
pub use error::{Error, Result};
pub use persona::{Persona, RewardComponent, RewardWeights};
pub use rewards::{RewardVector, TopicState};
pub use sim::SimState;
pub use ties::TieGraph;
pub use types::{Action, ActionId, ActionType, RoundBatch, Tone, UserId, Vote};

/// Version stamp written into every persisted artifact.
pub const SCHEMA_VERSION: &str = "1";
