//! Chat-completion access: live HTTP, cassette record/replay and the
//! deterministic mock readers.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use simtom_core::Message;

mod cassette;
mod live;
mod mock;
mod rate;

pub use cassette::{Recorder, Replay, TranscriptRecord};
pub use live::{LiveBackend, LiveConfig, RetryPolicy};
pub use mock::{MockConfound, MockPerfect};
pub use rate::RateLimiter;

pub const DEFAULT_MAX_TOKENS: u32 = 1024;
pub const API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl ChatRequest {
    /// A request as the harness issues it: temperature 0.
    pub fn new(model_id: &str, messages: Vec<Message>, max_tokens: Option<u32>) -> Self {
        ChatRequest { model_id: model_id.to_string(), messages, temperature: 0.0, max_tokens }
    }

    /// Hex SHA-256 of the compact JSON of the request, fields in
    /// declaration order.
    pub fn cassette_key(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("requests serialize");
        hex::encode(Sha256::digest(canonical))
    }

    /// Content of the last user message.
    pub fn prompt(&self) -> &str {
        self.messages.last().map_or("", |m| m.content.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    pub finish_reason: String,
    #[serde(default)]
    pub usage: Option<Usage>,
}

impl ChatResponse {
    pub fn text(content: impl Into<String>) -> Self {
        ChatResponse { content: content.into(), finish_reason: "stop".into(), usage: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GatewayError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("credential rejected: {0}")]
    Credential(String),
    #[error("no cassette entry for key {0}")]
    CacheMiss(String),
    #[error("malformed response: {0}")]
    BadResponse(String),
    #[error("prompt not recognised by the mock reader: {0}")]
    Unrecognized(String),
    #[error("cassette io: {0}")]
    Cassette(String),
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError>;
}

impl<T: ChatBackend + ?Sized> ChatBackend for Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        (**self).complete(request)
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for &T {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        (**self).complete(request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_stable_and_sensitive() {
        let r = ChatRequest::new("gpt-4", vec![Message::user("hello")], Some(DEFAULT_MAX_TOKENS));
        assert_eq!(r.cassette_key(), r.clone().cassette_key());
        let mut changed = r.clone();
        changed.messages[0].content.push('!');
        assert_ne!(r.cassette_key(), changed.cassette_key());
        let mut other_budget = r.clone();
        other_budget.max_tokens = None;
        assert_ne!(r.cassette_key(), other_budget.cassette_key());
    }

    #[test]
    fn canonical_form() {
        let r = ChatRequest::new("m", vec![Message::user("x")], None);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"model_id":"m","messages":[{"role":"user","content":"x"}],"temperature":0.0,"max_tokens":null}"#
        );
    }
}
