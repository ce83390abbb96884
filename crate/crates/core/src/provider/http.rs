//! Live completion backend speaking a completions-style HTTP protocol.
//!
//! Request body: `{model, prompt, max_tokens, temperature}`. Response: the
//! first element of `choices`, whose `text` field is the completion.
//! Transient failures (timeouts, connection errors, 429, 5xx) retry with
//! exponential backoff up to an attempt cap; other HTTP statuses fail fast.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Backend, CompletionRequest, ProviderError};

/// Environment variable holding the completion endpoint URL.
pub const ENDPOINT_ENV: &str = "VERIPROMPT_ENDPOINT";
/// Environment variable holding the bearer token, if the endpoint wants one.
pub const API_KEY_ENV: &str = "VERIPROMPT_API_KEY";

const DEFAULT_MODEL: &str = "davinci";
const DEFAULT_MAX_ATTEMPTS: u32 = 3;
const DEFAULT_INITIAL_BACKOFF: Duration = Duration::from_millis(250);
const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
const DEFAULT_MAX_IN_FLIGHT: usize = 4;

pub struct HttpBackend {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
    model: String,
    max_attempts: u32,
    initial_backoff: Duration,
    gate: FlightGate,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("max_attempts", &self.max_attempts)
            .finish_non_exhaustive()
    }
}

impl HttpBackend {
    pub fn new(endpoint: &str) -> Self {
        Self::with_timeout(endpoint, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(endpoint: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .new_agent();
        HttpBackend {
            agent,
            endpoint: endpoint.to_string(),
            api_key: None,
            model: DEFAULT_MODEL.to_string(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            initial_backoff: DEFAULT_INITIAL_BACKOFF,
            gate: FlightGate::new(DEFAULT_MAX_IN_FLIGHT),
        }
    }

    /// Reads the endpoint from `VERIPROMPT_ENDPOINT` and an optional bearer
    /// token from `VERIPROMPT_API_KEY`.
    pub fn from_env() -> Result<Self, ProviderError> {
        let endpoint = std::env::var(ENDPOINT_ENV)
            .map_err(|_| ProviderError::Config(format!("{ENDPOINT_ENV} is not set")))?;
        let mut backend = HttpBackend::new(&endpoint);
        if let Ok(key) = std::env::var(API_KEY_ENV) {
            if !key.is_empty() {
                backend.api_key = Some(key);
            }
        }
        Ok(backend)
    }

    pub fn api_key(mut self, key: &str) -> Self {
        self.api_key = Some(key.to_string());
        self
    }

    pub fn model(mut self, model: &str) -> Self {
        self.model = model.to_string();
        self
    }

    pub fn max_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts.max(1);
        self
    }

    pub fn initial_backoff(mut self, backoff: Duration) -> Self {
        self.initial_backoff = backoff;
        self
    }

    pub fn max_in_flight(mut self, limit: usize) -> Self {
        self.gate = FlightGate::new(limit.max(1));
        self
    }

    fn attempt(&self, req: &CompletionRequest) -> Result<String, AttemptError> {
        let body = WireRequest {
            model: &self.model,
            prompt: &req.prompt,
            max_tokens: req.max_tokens,
            temperature: req.temperature,
        };
        let mut post = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            post = post.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = post.send_json(&body).map_err(classify)?;
        let wire: WireResponse = resp.body_mut().read_json().map_err(classify)?;
        let choice = wire
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| AttemptError::Malformed("response has no choices".to_string()))?;
        Ok(choice.text)
    }
}

impl Backend for HttpBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String, ProviderError> {
        let _permit = self.gate.acquire();
        let mut backoff = self.initial_backoff;
        let mut last = String::new();
        for attempt in 1..=self.max_attempts {
            if attempt > 1 {
                std::thread::sleep(backoff);
                backoff = backoff.saturating_mul(2);
            }
            match self.attempt(req) {
                Ok(text) => return Ok(text),
                Err(AttemptError::Malformed(message)) => {
                    return Err(ProviderError::MalformedResponse(message));
                }
                Err(AttemptError::Fatal(message)) => {
                    return Err(ProviderError::Transport { attempts: attempt, message });
                }
                Err(AttemptError::Retry(message)) => {
                    log::warn!("completion attempt {attempt}/{} failed: {message}", self.max_attempts);
                    last = message;
                }
            }
        }
        Err(ProviderError::Transport { attempts: self.max_attempts, message: last })
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Deserialize)]
struct WireChoice {
    text: String,
}

enum AttemptError {
    /// Transient; worth another attempt.
    Retry(String),
    /// The endpoint rejected the request; retrying cannot help.
    Fatal(String),
    /// Got a 2xx whose body we cannot use.
    Malformed(String),
}

fn classify(e: ureq::Error) -> AttemptError {
    match e {
        ureq::Error::StatusCode(429) => AttemptError::Retry("HTTP status 429".to_string()),
        ureq::Error::StatusCode(code) if (500..=599).contains(&code) => {
            AttemptError::Retry(format!("HTTP status {code}"))
        }
        ureq::Error::StatusCode(code) => AttemptError::Fatal(format!("HTTP status {code}")),
        ureq::Error::Json(e) => AttemptError::Malformed(format!("undecodable body: {e}")),
        ureq::Error::Io(_)
        | ureq::Error::Timeout(_)
        | ureq::Error::HostNotFound
        | ureq::Error::ConnectionFailed => AttemptError::Retry(e.to_string()),
        other => AttemptError::Fatal(other.to_string()),
    }
}

/// Caps concurrent requests; `acquire` blocks until a slot frees up and the
/// returned permit releases its slot on drop.
struct FlightGate {
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

impl FlightGate {
    fn new(max: usize) -> Self {
        FlightGate { max, in_flight: Mutex::new(0), freed: Condvar::new() }
    }

    fn acquire(&self) -> FlightPermit<'_> {
        let mut n = self.in_flight.lock().unwrap();
        while *n >= self.max {
            n = self.freed.wait(n).unwrap();
        }
        *n += 1;
        FlightPermit { gate: self }
    }
}

struct FlightPermit<'a> {
    gate: &'a FlightGate,
}

impl Drop for FlightPermit<'_> {
    fn drop(&mut self) {
        let mut n = self.gate.in_flight.lock().unwrap();
        *n -= 1;
        self.gate.freed.notify_one();
    }
}
