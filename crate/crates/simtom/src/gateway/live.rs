use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use super::{ChatBackend, ChatRequest, ChatResponse, GatewayError, RateLimiter, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_secs(1), max_delay: Duration::from_secs(60) }
    }
}

impl RetryPolicy {
    /// Delay before attempt `n + 1`, doubling from `base_delay`.
    pub fn delay(&self, n: u32) -> Duration {
        self.base_delay.saturating_mul(1 << n.min(16)).min(self.max_delay)
    }
}

#[derive(Debug, Clone)]
pub struct LiveConfig {
    /// Endpoint root, e.g. `https://api.openai.com/v1`.
    pub base_url: String,
    pub api_key: Option<String>,
    pub retry: RetryPolicy,
    pub timeout: Duration,
    pub rpm: Option<u32>,
}

impl LiveConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        LiveConfig {
            base_url: base_url.into(),
            api_key: None,
            retry: RetryPolicy::default(),
            timeout: Duration::from_secs(120),
            rpm: None,
        }
    }
}

/// Client for a standard chat-completions endpoint.
pub struct LiveBackend {
    client: Client,
    url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    limiter: Option<RateLimiter>,
}

enum Failure {
    Transient(String),
    Fatal(GatewayError),
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<Self, GatewayError> {
        let client = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| GatewayError::Transport { attempts: 0, message: e.to_string() })?;
        Ok(LiveBackend {
            client,
            url: format!("{}/chat/completions", config.base_url.trim_end_matches('/')),
            api_key: config.api_key,
            retry: config.retry,
            limiter: config.rpm.map(RateLimiter::new),
        })
    }

    fn body(request: &ChatRequest) -> Value {
        let mut body = json!({
            "model": request.model_id,
            "messages": request.messages,
            "temperature": request.temperature,
        });
        if let Some(n) = request.max_tokens {
            body["max_tokens"] = json!(n);
        }
        body
    }

    fn attempt(&self, body: &Value) -> Result<ChatResponse, Failure> {
        if let Some(limiter) = &self.limiter {
            limiter.acquire();
        }
        let mut req = self.client.post(&self.url).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| Failure::Transient(e.to_string()))?;
        let status = resp.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            let text = resp.text().unwrap_or_default();
            return Err(Failure::Fatal(GatewayError::Credential(format!("{status}: {}", text.trim()))));
        }
        if status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            return Err(Failure::Transient(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(Failure::Fatal(GatewayError::Transport {
                attempts: 1,
                message: format!("HTTP {status}: {}", text.trim()),
            }));
        }
        let value: Value = resp.json().map_err(|e| Failure::Transient(e.to_string()))?;
        parse_completion(&value).map_err(Failure::Fatal)
    }
}

fn parse_completion(value: &Value) -> Result<ChatResponse, GatewayError> {
    let choice = &value["choices"][0];
    let content = choice["message"]["content"]
        .as_str()
        .ok_or_else(|| GatewayError::BadResponse("choices[0].message.content missing".into()))?;
    let usage = value.get("usage").and_then(|u| {
        Some(Usage { prompt_tokens: u["prompt_tokens"].as_u64()?, completion_tokens: u["completion_tokens"].as_u64()? })
    });
    Ok(ChatResponse {
        content: content.to_string(),
        finish_reason: choice["finish_reason"].as_str().unwrap_or("").to_string(),
        usage,
    })
}

impl ChatBackend for LiveBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let body = Self::body(request);
        let max = self.retry.max_attempts.max(1);
        let mut last = String::new();
        for n in 0..max {
            if n > 0 {
                std::thread::sleep(self.retry.delay(n - 1));
            }
            match self.attempt(&body) {
                Ok(resp) => return Ok(resp),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transient(msg)) => {
                    log::warn!("attempt {} of {max} failed: {msg}", n + 1);
                    last = msg;
                }
            }
        }
        Err(GatewayError::Transport { attempts: max, message: last })
    }
}
