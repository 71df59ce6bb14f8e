//! Chat-completion transport: a real HTTP client with exponential backoff
//! and a scriptable mock for tests and replay.

use std::collections::{BTreeMap, VecDeque};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::LlmConfig;
use crate::error::{Error, Result};

use super::templates::{ChatMessage, TemplateName};

/// One outbound request. `template` travels only in logs, not on the wire.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    #[serde(skip)]
    pub template: TemplateName,
}

impl ChatRequest {
    pub fn wire_body(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Body<'a> {
            model: &'a str,
            messages: &'a [ChatMessage],
            temperature: f64,
        }
        Ok(serde_json::to_string(&Body {
            model: &self.model,
            messages: &self.messages,
            temperature: self.temperature,
        })?)
    }

    pub fn char_len(&self) -> usize {
        self.messages.iter().map(|m| m.content.len()).sum()
    }
}

/// Assistant text plus how many sends it took.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportReply {
    pub text: String,
    pub attempts: u32,
}

pub trait ChatTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<TransportReply>;
}

#[derive(Deserialize)]
struct CompletionEnvelope {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: EnvelopeMessage,
}

#[derive(Deserialize)]
struct EnvelopeMessage {
    content: String,
}

/// Extracts the assistant text from a chat-completion response body.
pub fn extract_assistant_text(body: &str) -> Result<String> {
    let envelope: CompletionEnvelope = serde_json::from_str(body)
        .map_err(|e| Error::Parse(format!("completion envelope: {e}")))?;
    envelope
        .choices
        .into_iter()
        .next()
        .map(|c| c.message.content)
        .ok_or_else(|| Error::Parse("completion envelope has no choices".to_string()))
}

/// Blocking HTTP transport with bearer auth and exponential backoff on
/// transient failures (429, 5xx, timeouts, socket errors).
pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: String,
    retries: u32,
    backoff_base_ms: u64,
}

impl HttpTransport {
    /// Reads the bearer token from the environment variable named in the
    /// config; a missing token is a configuration error.
    pub fn from_config(cfg: &LlmConfig) -> Result<Self> {
        let api_key = std::env::var(&cfg.api_key_env).map_err(|_| {
            Error::config(format!(
                "environment variable {} with the API token is not set",
                cfg.api_key_env
            ))
        })?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
            .build()
            .new_agent();
        Ok(HttpTransport {
            agent,
            endpoint: cfg.endpoint.clone(),
            api_key,
            retries: cfg.transport_retries,
            backoff_base_ms: cfg.backoff_base_ms,
        })
    }

    fn is_transient(err: &ureq::Error) -> bool {
        match err {
            ureq::Error::StatusCode(code) => *code == 429 || *code >= 500,
            ureq::Error::Timeout(_) | ureq::Error::Io(_) | ureq::Error::HostNotFound => true,
            _ => false,
        }
    }
}

impl ChatTransport for HttpTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<TransportReply> {
        let body = request.wire_body()?;
        let mut attempts = 0;
        loop {
            attempts += 1;
            let outcome = self
                .agent
                .post(&self.endpoint)
                .header("authorization", &format!("Bearer {}", self.api_key))
                .header("content-type", "application/json")
                .send(body.as_str());
            match outcome {
                Ok(mut resp) => {
                    let text = resp
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| Error::Transport(format!("reading response: {e}")))?;
                    return Ok(TransportReply {
                        text: extract_assistant_text(&text)?,
                        attempts,
                    });
                }
                Err(err) if Self::is_transient(&err) && attempts <= self.retries => {
                    let delay = self.backoff_base_ms.saturating_mul(1 << (attempts - 1));
                    std::thread::sleep(Duration::from_millis(delay.min(30_000)));
                }
                Err(err) => {
                    return Err(Error::Transport(format!(
                        "{} after {attempts} attempt(s): {err}",
                        request.template.as_str()
                    )))
                }
            }
        }
    }
}

/// One canned mock behavior.
#[derive(Clone, Debug)]
pub enum MockReply {
    /// Assistant text returned as-is.
    Text(String),
    /// One transient failure; the caller's backoff retries.
    Transient,
    /// A hard transport failure.
    Fatal(String),
}

/// Scriptable transport: per-template queues of canned replies with an
/// optional per-template default once a queue runs dry.
#[derive(Default)]
pub struct MockTransport {
    queues: BTreeMap<TemplateName, VecDeque<MockReply>>,
    defaults: BTreeMap<TemplateName, String>,
    pub sent: Vec<(TemplateName, String)>,
    retries: u32,
}

impl MockTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    pub fn push(&mut self, template: TemplateName, reply: MockReply) {
        self.queues.entry(template).or_default().push_back(reply);
    }

    pub fn push_text(&mut self, template: TemplateName, text: impl Into<String>) {
        self.push(template, MockReply::Text(text.into()));
    }

    /// Reply used whenever the queue for `template` is empty.
    pub fn set_default(&mut self, template: TemplateName, text: impl Into<String>) {
        self.defaults.insert(template, text.into());
    }

    pub fn calls(&self, template: TemplateName) -> usize {
        self.sent.iter().filter(|(t, _)| *t == template).count()
    }
}

impl ChatTransport for MockTransport {
    fn send(&mut self, request: &ChatRequest) -> Result<TransportReply> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            self.sent
                .push((request.template, request.wire_body()?));
            let next = self
                .queues
                .get_mut(&request.template)
                .and_then(|q| q.pop_front());
            match next {
                Some(MockReply::Text(text)) => return Ok(TransportReply { text, attempts }),
                Some(MockReply::Transient) => {
                    if attempts > self.retries {
                        return Err(Error::Transport(format!(
                            "{}: transient failures exhausted",
                            request.template.as_str()
                        )));
                    }
                }
                Some(MockReply::Fatal(msg)) => return Err(Error::Transport(msg)),
                None => match self.defaults.get(&request.template) {
                    Some(text) => {
                        return Ok(TransportReply {
                            text: text.clone(),
                            attempts,
                        })
                    }
                    None => {
                        return Err(Error::Transport(format!(
                            "mock has no reply for {}",
                            request.template.as_str()
                        )))
                    }
                },
            }
        }
    }
}
