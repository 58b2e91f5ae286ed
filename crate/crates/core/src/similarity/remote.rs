//! Client for the embedding microservice.
//!
//! Wire protocol (JSON over HTTP):
//!
//! * `GET  {base}/health` -> `{"model_id": str, "dim": int, "status": "ok" | "loading"}`
//! * `POST {base}/embed`  <- `{"texts": [str], "pooling": "tokens" | "sentence", "layer": int | null}`
//!   -> `{"model_id": str, "dim": int, "embeddings": [{"tokens": [str], "matrix": [[float]]}]}`
//!
//! Rows come back L2-normalized from the service; they are renormalized here
//! anyway so every provider upholds the same unit-norm contract.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbeddingProvider, TokenEmbeddings};
use crate::error::{Error, Result};
use crate::text::TokenSequence;

/// Environment variable bounding each remote call, in milliseconds.
pub const REMOTE_TIMEOUT_ENV: &str = "PARAEVAL_REMOTE_TIMEOUT_MS";

const DEFAULT_TIMEOUT_MS: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct RemoteOptions {
    pub timeout: Duration,
    pub max_in_flight: usize,
    /// Attempts after the first one, for transport failures and 5xx/429.
    pub max_retries: u32,
    pub retry_backoff: Duration,
    pub layer: Option<i64>,
}

impl Default for RemoteOptions {
    fn default() -> Self {
        Self {
            timeout: Duration::from_millis(DEFAULT_TIMEOUT_MS),
            max_in_flight: 8,
            max_retries: 2,
            retry_backoff: Duration::from_millis(100),
            layer: None,
        }
    }
}

impl RemoteOptions {
    /// Defaults, with the timeout taken from `PARAEVAL_REMOTE_TIMEOUT_MS` when set.
    pub fn from_env() -> Self {
        let mut options = Self::default();
        if let Some(ms) = std::env::var(REMOTE_TIMEOUT_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            options.timeout = Duration::from_millis(ms);
        }
        options
    }
}

#[derive(Debug, Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
    pooling: &'static str,
    layer: Option<i64>,
}

#[derive(Debug, Deserialize)]
struct EmbedResponse {
    model_id: String,
    dim: usize,
    embeddings: Vec<TextEmbedding>,
}

#[derive(Debug, Deserialize)]
struct TextEmbedding {
    tokens: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct Health {
    model_id: String,
    dim: usize,
    status: String,
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct InFlightLimit {
    available: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a InFlightLimit);

impl InFlightLimit {
    fn new(n: usize) -> Self {
        Self {
            available: Mutex::new(n.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut available = self.available.lock().unwrap();
        while *available == 0 {
            available = self.freed.wait(available).unwrap();
        }
        *available -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.available.lock().unwrap() += 1;
        self.0.freed.notify_one();
    }
}

enum Failure {
    Retryable(String),
    Fatal(String),
}

impl From<ureq::Error> for Failure {
    fn from(e: ureq::Error) -> Self {
        match e {
            ureq::Error::StatusCode(code) if code >= 500 || code == 429 => {
                Failure::Retryable(format!("HTTP {code}"))
            }
            ureq::Error::StatusCode(code) => Failure::Fatal(format!("HTTP {code}")),
            other => Failure::Retryable(other.to_string()),
        }
    }
}

/// Embedding provider backed by the HTTP embedding service.
pub struct RemoteProvider {
    agent: ureq::Agent,
    base_url: String,
    model_id: String,
    dim: usize,
    options: RemoteOptions,
    limit: InFlightLimit,
    cache: Mutex<HashMap<String, TokenEmbeddings>>,
}

impl std::fmt::Debug for RemoteProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteProvider")
            .field("base_url", &self.base_url)
            .field("model_id", &self.model_id)
            .field("dim", &self.dim)
            .finish()
    }
}

impl RemoteProvider {
    /// Queries `/health` and returns a client bound to the reported model.
    pub fn connect(base_url: &str, options: RemoteOptions) -> Result<Self> {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(options.timeout))
            .build();
        let mut provider = Self {
            agent: config.into(),
            base_url: base_url.trim_end_matches('/').to_string(),
            model_id: String::new(),
            dim: 0,
            limit: InFlightLimit::new(options.max_in_flight),
            options,
            cache: Mutex::new(HashMap::new()),
        };
        let health: Health = provider.with_retries(|agent, url| {
            let mut resp = agent.get(&format!("{url}/health")).call()?;
            resp.body_mut()
                .read_json::<Health>()
                .map_err(|e| Failure::Fatal(format!("bad health payload: {e}")))
        })?;
        if health.status != "ok" {
            return Err(Error::ProviderUnavailable(format!(
                "service status is {:?}",
                health.status
            )));
        }
        if health.dim == 0 {
            return Err(Error::ProviderUnavailable("service reports dim 0".into()));
        }
        provider.model_id = health.model_id;
        provider.dim = health.dim;
        Ok(provider)
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    fn with_retries<T>(
        &self,
        mut call: impl FnMut(&ureq::Agent, &str) -> std::result::Result<T, Failure>,
    ) -> Result<T> {
        let _permit = self.limit.acquire();
        let mut attempt = 0;
        loop {
            match call(&self.agent, &self.base_url) {
                Ok(v) => return Ok(v),
                Err(Failure::Retryable(_)) if attempt < self.options.max_retries => {
                    attempt += 1;
                    thread::sleep(self.options.retry_backoff * attempt);
                }
                Err(Failure::Retryable(msg)) | Err(Failure::Fatal(msg)) => {
                    return Err(Error::ProviderUnavailable(format!("{}: {msg}", self.base_url)))
                }
            }
        }
    }

    /// Embeds several texts in one request, token pooling.
    pub fn embed_texts(&self, texts: &[String]) -> Result<Vec<TokenEmbeddings>> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let request = EmbedRequest {
            texts,
            pooling: "tokens",
            layer: self.options.layer,
        };
        let response: EmbedResponse = self.with_retries(|agent, url| {
            let mut resp = agent.post(&format!("{url}/embed")).send_json(&request)?;
            resp.body_mut()
                .read_json::<EmbedResponse>()
                .map_err(|e| Failure::Fatal(format!("bad embed payload: {e}")))
        })?;

        if response.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: response.dim,
            });
        }
        if response.model_id != self.model_id {
            return Err(Error::ProviderUnavailable(format!(
                "model changed from {} to {}",
                self.model_id, response.model_id
            )));
        }
        if response.embeddings.len() != texts.len() {
            return Err(Error::LengthMismatch {
                left: response.embeddings.len(),
                right: texts.len(),
            });
        }
        response
            .embeddings
            .into_iter()
            .map(|e| TokenEmbeddings::from_rows(e.tokens, self.dim, e.matrix))
            .collect()
    }
}

impl EmbeddingProvider for RemoteProvider {
    /// Sends the joined sentence; the returned rows follow the service's own
    /// tokenizer, so row count equals the service-reported token count.
    fn embed(&self, seq: &TokenSequence) -> Result<TokenEmbeddings> {
        if seq.is_empty() {
            return TokenEmbeddings::from_rows(Vec::new(), self.dim, Vec::new());
        }
        let text = seq.joined();
        if let Some(hit) = self.cache.lock().unwrap().get(&text) {
            return Ok(hit.clone());
        }
        let embedding = self
            .embed_texts(std::slice::from_ref(&text))?
            .pop()
            .expect("one text in, one embedding out");
        self.cache.lock().unwrap().insert(text, embedding.clone());
        Ok(embedding)
    }

    fn dim(&self) -> usize {
        self.dim
    }
}
