//! Chat-completion gateway: prompt templates, transports, strict response
//! parsing, the chat-backed policy, and persona generation.

pub mod llm;
pub mod parse;
pub mod templates;
pub mod transport;

pub use llm::{plan_personas, reward_doc, LlmPolicy};
pub use parse::{parse_plan, parse_tie_ratings, parse_votes};
pub use templates::{render, template, ChatMessage, PromptTemplate, TemplateName};
pub use transport::{ChatRequest, ChatTransport, HttpTransport, MockReply, MockTransport};

use serde::{Deserialize, Serialize};

/// One logged request/response exchange. Secrets never enter the record:
/// auth travels in headers, which are not captured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord {
    pub agent: String,
    pub template: String,
    pub attempt: u32,
    pub request: String,
    pub response: String,
    pub outcome: String,
}

/// Counts outbound calls per template kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CallAccountant {
    pub plan: u32,
    pub vote: u32,
    pub tie: u32,
    pub coach: u32,
    pub persona: u32,
}

impl CallAccountant {
    pub fn record(&mut self, template: TemplateName) {
        match template {
            TemplateName::Plan => self.plan += 1,
            TemplateName::Vote => self.vote += 1,
            TemplateName::TieUpdate => self.tie += 1,
            TemplateName::Coach => self.coach += 1,
            TemplateName::PersonaPlan => self.persona += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.plan + self.vote + self.tie + self.coach + self.persona
    }

    /// Hard per-round ceiling: every contract allows up to three attempts,
    /// plus one coach call per agent.
    pub fn round_ceiling(num_agents: usize) -> u32 {
        (num_agents as u32) * (3 + 3 + 3 + 1)
    }
}
