//! Chat-completion and embedding gateway with a content-addressed cache.
//!
//! Every exchange is keyed by the SHA-256 of a canonical serialization of the
//! request, so identical requests always hit the same cache entry and any
//! field change produces a new key. A warmed cache answers without touching
//! the backend at all; the mock backend resolves from a fixture directory
//! laid out exactly like the cache.

mod backend;
mod cache;
mod parse;
mod prompt;

pub use backend::{BackendConfig, BackendMode, ChatBackend, FailingBackend, LiveBackend, MockBackend};
pub use cache::{CacheEntry, ResponseCache};
pub use parse::{extract_json_object, parse_empathy_score, parse_subfactor_scores};
pub use prompt::{
    build_naive_prompt, build_subfactor_enhanced_prompt, build_subfactor_scoring_prompt,
    SCORING_INSTRUCTION,
};

use crate::corpus::{DialogueTriplet, EmpathyLabel};
use crate::hashing;
use crate::parallel;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

/// A chat-completion request. Scoring calls always use temperature 0 so that
/// cached replays are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub system_text: String,
    pub user_text: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Distinguishes retries of otherwise-identical requests; part of the
    /// cache key.
    pub seed_hint: Option<u64>,
}

/// An embedding request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRequest {
    pub model_id: String,
    pub input_text: String,
}

/// Where a response came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Live,
    Cache,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub backend: BackendKind,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResponse {
    pub values: Vec<f64>,
    pub backend: BackendKind,
    pub latency_ms: f64,
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("model_id must be non-empty")]
    EmptyModelId,
    #[error("temperature must be >= 0, got {0}")]
    NegativeTemperature(f64),
    #[error("network failure after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("mock fixture missing for key {key} ({what})")]
    MockFixtureMissing { key: String, what: String },
    #[error("cache I/O error at {path}: {source}")]
    CacheIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt cache entry {key}: {message}")]
    CorruptEntry { key: String, message: String },
    #[error("unparseable {what}: {message}")]
    Unparseable { what: String, message: String },
    #[error("missing subfactor key {name:?} in scored output")]
    MissingSubfactor { name: String },
    #[error("non-integer value for subfactor {name:?}: {value}")]
    NonIntegerSubfactor { name: String, value: String },
    #[error("API credential environment variable {var} is not set")]
    MissingCredentials { var: String },
    #[error("backend rejected request: {message}")]
    Rejected { message: String },
}

/// Normalize text for canonical hashing: CRLF/CR to LF, trailing whitespace
/// stripped per line and at the end.
pub(crate) fn normalize_text(text: &str) -> String {
    let unified = text.replace("\r\n", "\n").replace('\r', "\n");
    let mut out: Vec<&str> = unified.lines().map(|l| l.trim_end()).collect();
    while out.last() == Some(&"") {
        out.pop();
    }
    out.join("\n")
}

/// Canonical request forms: fields in fixed order with normalized text, so
/// cache keys are stable across runs and platforms.
#[derive(Serialize)]
struct CanonicalChat<'a> {
    kind: &'static str,
    model: &'a str,
    system: String,
    user: String,
    temperature: f64,
    max_output_tokens: u32,
    seed_hint: Option<u64>,
}

#[derive(Serialize)]
struct CanonicalEmbedding<'a> {
    kind: &'static str,
    model: &'a str,
    input: String,
}

pub fn canonical_chat(request: &ChatRequest) -> String {
    serde_json::to_string(&CanonicalChat {
        kind: "chat",
        model: request.model_id.trim(),
        system: normalize_text(&request.system_text),
        user: normalize_text(&request.user_text),
        temperature: request.temperature,
        max_output_tokens: request.max_output_tokens,
        seed_hint: request.seed_hint,
    })
    .expect("canonical form serializes")
}

pub fn canonical_embedding(request: &EmbeddingRequest) -> String {
    serde_json::to_string(&CanonicalEmbedding {
        kind: "embedding",
        model: request.model_id.trim(),
        input: normalize_text(&request.input_text),
    })
    .expect("canonical form serializes")
}

/// Content-address of a chat request.
pub fn chat_key(request: &ChatRequest) -> String {
    hashing::sha256_hex(canonical_chat(request).as_bytes())
}

/// Content-address of an embedding request.
pub fn embedding_key(request: &EmbeddingRequest) -> String {
    hashing::sha256_hex(canonical_embedding(request).as_bytes())
}

/// Token-bucket limiter for live calls, configured in requests per minute.
struct RateLimiter {
    state: Mutex<BucketState>,
    per_second: f64,
    burst: f64,
}

struct BucketState {
    tokens: f64,
    last: Instant,
}

impl RateLimiter {
    fn new(requests_per_minute: f64) -> Self {
        let burst = (requests_per_minute / 6.0).max(1.0);
        RateLimiter {
            state: Mutex::new(BucketState {
                tokens: burst,
                last: Instant::now(),
            }),
            per_second: requests_per_minute / 60.0,
            burst,
        }
    }

    fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().expect("limiter lock");
                let now = Instant::now();
                let elapsed = now.duration_since(state.last).as_secs_f64();
                state.tokens = (state.tokens + elapsed * self.per_second).min(self.burst);
                state.last = now;
                if state.tokens >= 1.0 {
                    state.tokens -= 1.0;
                    return;
                }
                (1.0 - state.tokens) / self.per_second
            };
            std::thread::sleep(Duration::from_secs_f64(wait.min(5.0)));
        }
    }
}

/// The gateway: cache in front of a backend, with retries and rate limiting
/// for live traffic. Safe to share across threads.
pub struct Gateway {
    backend: Box<dyn ChatBackend>,
    cache: Option<ResponseCache>,
    limiter: Option<RateLimiter>,
    network_retries: u32,
    /// Retry budget for unparseable completions; consumed by scoring helpers.
    pub parse_retry_budget: u32,
}

impl Gateway {
    pub fn new(backend: Box<dyn ChatBackend>, cache: Option<ResponseCache>) -> Self {
        Gateway {
            backend,
            cache,
            limiter: None,
            network_retries: 3,
            parse_retry_budget: 3,
        }
    }

    pub fn with_rate_limit(mut self, requests_per_minute: f64) -> Self {
        if requests_per_minute > 0.0 {
            self.limiter = Some(RateLimiter::new(requests_per_minute));
        }
        self
    }

    pub fn with_parse_retry_budget(mut self, budget: u32) -> Self {
        self.parse_retry_budget = budget;
        self
    }

    fn validate(request: &ChatRequest) -> Result<(), GatewayError> {
        if request.model_id.trim().is_empty() {
            return Err(GatewayError::EmptyModelId);
        }
        if request.temperature < 0.0 {
            return Err(GatewayError::NegativeTemperature(request.temperature));
        }
        Ok(())
    }

    /// Complete a chat request. Cache hits return the stored response with no
    /// backend traffic; misses call the backend and store the new entry
    /// atomically.
    pub fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        Self::validate(request)?;
        let key = chat_key(request);
        if let Some(cache) = &self.cache {
            if let Some(entry) = cache.get(&key)? {
                return Ok(ChatResponse {
                    text: entry.response_text,
                    backend: BackendKind::Cache,
                    latency_ms: 0.0,
                });
            }
        }
        let started = Instant::now();
        let text = self.call_with_retries(|| {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            self.backend.chat(request)
        })?;
        let latency_ms = backendless_latency(self.backend.kind(), started);
        if let Some(cache) = &self.cache {
            cache.put(&CacheEntry::for_chat(&key, request, &text))?;
        }
        Ok(ChatResponse {
            text,
            backend: self.backend.kind(),
            latency_ms,
        })
    }

    /// Embed a text. Caching behavior is identical to [`Gateway::complete`].
    pub fn embed(&self, request: &EmbeddingRequest) -> Result<EmbeddingResponse, GatewayError> {
        if request.model_id.trim().is_empty() {
            return Err(GatewayError::EmptyModelId);
        }
        let key = embedding_key(request);
        if let Some(cache) = &self.cache {
            if let Some(entry) = cache.get(&key)? {
                let values = entry.embedding_values(&key)?;
                return Ok(EmbeddingResponse {
                    values,
                    backend: BackendKind::Cache,
                    latency_ms: 0.0,
                });
            }
        }
        let started = Instant::now();
        let values = self.call_with_retries(|| {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            self.backend.embed(request)
        })?;
        let latency_ms = backendless_latency(self.backend.kind(), started);
        if let Some(cache) = &self.cache {
            cache.put(&CacheEntry::for_embedding(&key, request, &values))?;
        }
        Ok(EmbeddingResponse {
            values,
            backend: self.backend.kind(),
            latency_ms,
        })
    }

    fn call_with_retries<T>(
        &self,
        call: impl Fn() -> Result<T, GatewayError>,
    ) -> Result<T, GatewayError> {
        let mut attempt = 0;
        loop {
            match call() {
                Ok(value) => return Ok(value),
                Err(GatewayError::Network { message, .. }) if attempt < self.network_retries => {
                    attempt += 1;
                    let backoff = Duration::from_millis(200u64.saturating_mul(1 << attempt.min(5)));
                    log::warn!("transient backend failure (attempt {attempt}): {message}");
                    std::thread::sleep(backoff);
                }
                Err(GatewayError::Network { message, .. }) => {
                    return Err(GatewayError::Network {
                        attempts: attempt + 1,
                        message,
                    })
                }
                Err(other) => return Err(other),
            }
        }
    }
}

fn backendless_latency(kind: BackendKind, started: Instant) -> f64 {
    match kind {
        // mock latencies are reported as zero so fixtures replay bit-stably
        BackendKind::Mock => 0.0,
        _ => started.elapsed().as_secs_f64() * 1000.0,
    }
}

/// Outcome of scoring one triplet, after parse retries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreOutcome {
    pub id: String,
    /// Parsed label, or `None` after the retry budget was exhausted.
    pub label: Option<EmpathyLabel>,
    pub attempts: u32,
}

/// Score a batch of triplets with a prompt builder, retrying unparseable
/// completions by bumping `seed_hint` (so each retry is a distinct cache
/// key). Failures are recorded, not dropped: they count against accuracy.
pub fn score_batch<F>(
    gateway: &Gateway,
    triplets: &[DialogueTriplet],
    build: F,
) -> Result<Vec<ScoreOutcome>, GatewayError>
where
    F: Fn(&DialogueTriplet) -> ChatRequest + Sync + Send,
{
    let results = parallel::map_collect(triplets, |t| score_one(gateway, t, &build));
    results.into_iter().collect()
}

fn score_one<F>(
    gateway: &Gateway,
    triplet: &DialogueTriplet,
    build: &F,
) -> Result<ScoreOutcome, GatewayError>
where
    F: Fn(&DialogueTriplet) -> ChatRequest,
{
    let base = build(triplet);
    let budget = gateway.parse_retry_budget;
    let mut attempts = 0;
    loop {
        let mut request = base.clone();
        if attempts > 0 {
            request.seed_hint = Some(attempts as u64);
        }
        let response = gateway.complete(&request)?;
        attempts += 1;
        match parse_empathy_score(&response.text) {
            Ok(label) => {
                return Ok(ScoreOutcome {
                    id: triplet.id.clone(),
                    label: Some(label),
                    attempts,
                })
            }
            Err(_) if attempts <= budget => continue,
            Err(e) => {
                log::warn!(
                    "record {}: unparseable completion after {attempts} attempts: {e}",
                    triplet.id
                );
                return Ok(ScoreOutcome {
                    id: triplet.id.clone(),
                    label: None,
                    attempts,
                });
            }
        }
    }
}

/// Exact-match accuracy over scoring outcomes; failures count as mismatches.
pub fn outcome_accuracy(outcomes: &[ScoreOutcome], truth: &[EmpathyLabel]) -> f64 {
    assert_eq!(outcomes.len(), truth.len(), "aligned lengths required");
    if outcomes.is_empty() {
        return 0.0;
    }
    let correct = outcomes
        .iter()
        .zip(truth)
        .filter(|(o, t)| o.label == Some(**t))
        .count();
    correct as f64 / outcomes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ResponseSource;

    fn request(user: &str) -> ChatRequest {
        ChatRequest {
            model_id: "test-model".into(),
            system_text: "system".into(),
            user_text: user.into(),
            temperature: 0.0,
            max_output_tokens: 16,
            seed_hint: None,
        }
    }

    pub(crate) fn triplet(id: &str, score: u8) -> DialogueTriplet {
        DialogueTriplet {
            id: id.into(),
            situation: format!("situation {id}"),
            utterance: format!("utterance {id}"),
            response: format!("response {id}"),
            source: ResponseSource::Human,
            human_score: EmpathyLabel::new(score).unwrap(),
            miti_annotation: vec![],
        }
    }

    #[test]
    fn identical_requests_share_keys() {
        let a = request("hello");
        let b = request("hello");
        assert_eq!(chat_key(&a), chat_key(&b));
    }

    #[test]
    fn any_field_change_changes_key() {
        let base = request("hello");
        let mut variants = Vec::new();
        let mut v = base.clone();
        v.model_id = "other-model".into();
        variants.push(v);
        let mut v = base.clone();
        v.system_text = "system2".into();
        variants.push(v);
        let mut v = base.clone();
        v.user_text = "hello world".into();
        variants.push(v);
        let mut v = base.clone();
        v.temperature = 0.5;
        variants.push(v);
        let mut v = base.clone();
        v.max_output_tokens = 17;
        variants.push(v);
        let mut v = base.clone();
        v.seed_hint = Some(1);
        variants.push(v);

        let base_key = chat_key(&base);
        let mut keys: Vec<String> = variants.iter().map(chat_key).collect();
        keys.push(base_key);
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 7, "all keys distinct");
    }

    #[test]
    fn normalization_unifies_line_endings() {
        let mut a = request("line1\r\nline2  \n");
        let b = request("line1\nline2");
        a.system_text = "s\r".into();
        let mut b2 = b.clone();
        b2.system_text = "s".into();
        assert_eq!(chat_key(&a), chat_key(&b2));
    }

    #[test]
    fn chat_and_embedding_keys_never_collide() {
        let c = request("payload");
        let e = EmbeddingRequest {
            model_id: "test-model".into(),
            input_text: "payload".into(),
        };
        assert_ne!(chat_key(&c), embedding_key(&e));
    }

    #[test]
    fn outcome_accuracy_counts_failures_as_misses() {
        let truth = vec![
            EmpathyLabel::new(1).unwrap(),
            EmpathyLabel::new(2).unwrap(),
            EmpathyLabel::new(3).unwrap(),
        ];
        let outcomes = vec![
            ScoreOutcome {
                id: "a".into(),
                label: Some(EmpathyLabel::new(1).unwrap()),
                attempts: 1,
            },
            ScoreOutcome {
                id: "b".into(),
                label: None,
                attempts: 4,
            },
            ScoreOutcome {
                id: "c".into(),
                label: Some(EmpathyLabel::new(2).unwrap()),
                attempts: 1,
            },
        ];
        let accuracy = outcome_accuracy(&outcomes, &truth);
        assert!((accuracy - 1.0 / 3.0).abs() < 1e-12);
    }
}
