//! Chat/embedding backends: live HTTP, fixture-directory mock, and a
//! failing backend for asserting that a warmed cache performs no network
//! operations.

use super::cache::ResponseCache;
use super::{ChatRequest, EmbeddingRequest, GatewayError};
use super::{BackendKind, Gateway};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Backend abstraction used by the gateway on cache misses.
pub trait ChatBackend: Send + Sync {
    fn chat(&self, request: &ChatRequest) -> Result<String, GatewayError>;
    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<f64>, GatewayError>;
    fn kind(&self) -> BackendKind;
}

/// Offline/live switch carried in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendMode {
    /// Resolve from fixtures; error on anything missing.
    Mock,
    /// Call the configured HTTP endpoint.
    Live,
}

/// Declarative backend configuration. Credentials come only from the
/// environment variable named here, never from the config file itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub mode: BackendMode,
    #[serde(default = "default_base_url")]
    pub base_url: String,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    pub chat_model: String,
    pub embed_model: String,
    /// Documented output dimension of the embedding model; embeddings are
    /// validated against it.
    pub embed_dim: usize,
    /// Fixture directory for mock mode.
    #[serde(default)]
    pub fixtures_dir: Option<PathBuf>,
    /// Cache directory; filled on live runs, replayed on later runs.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default = "default_rpm")]
    pub requests_per_minute: f64,
    #[serde(default = "default_parse_retries")]
    pub parse_retry_budget: u32,
}

fn default_base_url() -> String {
    "https://api.openai.com/v1".to_string()
}

fn default_api_key_env() -> String {
    "OPENAI_API_KEY".to_string()
}

fn default_rpm() -> f64 {
    300.0
}

fn default_parse_retries() -> u32 {
    3
}

impl BackendConfig {
    /// Offline configuration resolving from a fixture directory.
    pub fn mock(fixtures_dir: &Path, chat_model: &str, embed_model: &str, embed_dim: usize) -> Self {
        BackendConfig {
            mode: BackendMode::Mock,
            base_url: default_base_url(),
            api_key_env: default_api_key_env(),
            chat_model: chat_model.to_string(),
            embed_model: embed_model.to_string(),
            embed_dim,
            fixtures_dir: Some(fixtures_dir.to_path_buf()),
            cache_dir: None,
            requests_per_minute: default_rpm(),
            parse_retry_budget: default_parse_retries(),
        }
    }

    /// Build a gateway for this configuration.
    pub fn build_gateway(&self) -> Result<Gateway, GatewayError> {
        let cache = match &self.cache_dir {
            Some(dir) => Some(ResponseCache::open(dir)?),
            None => None,
        };
        let backend: Box<dyn ChatBackend> = match self.mode {
            BackendMode::Mock => {
                let dir = self.fixtures_dir.clone().ok_or_else(|| GatewayError::Rejected {
                    message: "mock mode requires a fixtures_dir".into(),
                })?;
                Box::new(MockBackend::new(&dir)?)
            }
            BackendMode::Live => {
                let api_key = std::env::var(&self.api_key_env).map_err(|_| {
                    GatewayError::MissingCredentials {
                        var: self.api_key_env.clone(),
                    }
                })?;
                Box::new(LiveBackend::new(&self.base_url, api_key))
            }
        };
        let mut gateway = Gateway::new(backend, cache)
            .with_parse_retry_budget(self.parse_retry_budget);
        if self.mode == BackendMode::Live {
            gateway = gateway.with_rate_limit(self.requests_per_minute);
        }
        Ok(gateway)
    }
}

/// Mock backend: a read-only fixture directory with the cache's layout.
pub struct MockBackend {
    fixtures: ResponseCache,
}

impl MockBackend {
    pub fn new(dir: &Path) -> Result<Self, GatewayError> {
        Ok(MockBackend {
            fixtures: ResponseCache::open(dir)?,
        })
    }
}

impl ChatBackend for MockBackend {
    fn chat(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let key = super::chat_key(request);
        match self.fixtures.get(&key)? {
            Some(entry) => Ok(entry.response_text),
            None => Err(GatewayError::MockFixtureMissing {
                key,
                what: format!("chat completion for model {}", request.model_id),
            }),
        }
    }

    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<f64>, GatewayError> {
        let key = super::embedding_key(request);
        match self.fixtures.get(&key)? {
            Some(entry) => entry.embedding_values(&key),
            None => Err(GatewayError::MockFixtureMissing {
                key,
                what: format!("embedding for model {}", request.model_id),
            }),
        }
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Mock
    }
}

/// Backend that fails on any call. Used to assert a warmed cache performs
/// zero network operations.
pub struct FailingBackend;

impl ChatBackend for FailingBackend {
    fn chat(&self, _request: &ChatRequest) -> Result<String, GatewayError> {
        Err(GatewayError::Rejected {
            message: "live call attempted against failing backend".into(),
        })
    }

    fn embed(&self, _request: &EmbeddingRequest) -> Result<Vec<f64>, GatewayError> {
        Err(GatewayError::Rejected {
            message: "live call attempted against failing backend".into(),
        })
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Live
    }
}

/// Live backend speaking the common chat-completions/embeddings HTTP shape.
pub struct LiveBackend {
    client: reqwest::blocking::Client,
    base_url: String,
    api_key: String,
}

impl LiveBackend {
    pub fn new(base_url: &str, api_key: String) -> Self {
        LiveBackend {
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(120))
                .build()
                .expect("client builds"),
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key,
        }
    }

    fn post(&self, path: &str, body: serde_json::Value) -> Result<serde_json::Value, GatewayError> {
        let url = format!("{}{path}", self.base_url);
        let response = self
            .client
            .post(&url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| GatewayError::Network {
                attempts: 1,
                message: e.to_string(),
            })?;
        let status = response.status();
        let payload: serde_json::Value =
            response.json().map_err(|e| GatewayError::Network {
                attempts: 1,
                message: format!("invalid JSON response: {e}"),
            })?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(GatewayError::Network {
                attempts: 1,
                message: format!("HTTP {status}: {payload}"),
            });
        }
        if !status.is_success() {
            return Err(GatewayError::Rejected {
                message: format!("HTTP {status}: {payload}"),
            });
        }
        Ok(payload)
    }
}

impl ChatBackend for LiveBackend {
    fn chat(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let mut body = serde_json::json!({
            "model": request.model_id,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        });
        if let Some(seed) = request.seed_hint {
            body["seed"] = serde_json::json!(seed);
        }
        let payload = self.post("/chat/completions", body)?;
        payload["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| GatewayError::Rejected {
                message: format!("completion payload missing content: {payload}"),
            })
    }

    fn embed(&self, request: &EmbeddingRequest) -> Result<Vec<f64>, GatewayError> {
        let body = serde_json::json!({
            "model": request.model_id,
            "input": request.input_text,
        });
        let payload = self.post("/embeddings", body)?;
        payload["data"][0]["embedding"]
            .as_array()
            .map(|values| values.iter().filter_map(|v| v.as_f64()).collect())
            .ok_or_else(|| GatewayError::Rejected {
                message: format!("embedding payload missing vector: {payload}"),
            })
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Live
    }
}

#[cfg(test)]
mod tests {
    use super::super::{chat_key, embedding_key, CacheEntry};
    use super::*;

    fn request(user: &str) -> ChatRequest {
        ChatRequest {
            model_id: "m".into(),
            system_text: "s".into(),
            user_text: user.into(),
            temperature: 0.0,
            max_output_tokens: 8,
            seed_hint: None,
        }
    }

    #[test]
    fn mock_resolves_fixtures_and_reports_missing() {
        let dir = tempfile::tempdir().unwrap();
        let fixtures = ResponseCache::open(dir.path()).unwrap();
        let req = request("fixture me");
        let key = chat_key(&req);
        fixtures
            .put(&CacheEntry::for_chat(&key, &req, "3"))
            .unwrap();

        let mock = MockBackend::new(dir.path()).unwrap();
        assert_eq!(mock.chat(&req).unwrap(), "3");
        let missing = request("no fixture");
        let err = mock.chat(&missing).unwrap_err();
        assert!(matches!(err, GatewayError::MockFixtureMissing { .. }));
    }

    #[test]
    fn second_identical_call_is_served_from_cache() {
        let fixtures_dir = tempfile::tempdir().unwrap();
        let cache_dir = tempfile::tempdir().unwrap();
        let fixtures = ResponseCache::open(fixtures_dir.path()).unwrap();
        let req = request("q");
        fixtures
            .put(&CacheEntry::for_chat(&chat_key(&req), &req, "2"))
            .unwrap();

        let gateway = Gateway::new(
            Box::new(MockBackend::new(fixtures_dir.path()).unwrap()),
            Some(ResponseCache::open(cache_dir.path()).unwrap()),
        );
        let first = gateway.complete(&req).unwrap();
        assert_eq!(first.backend, BackendKind::Mock);
        let second = gateway.complete(&req).unwrap();
        assert_eq!(second.backend, BackendKind::Cache);
        assert_eq!(first.text, second.text);
    }

    #[test]
    fn warmed_cache_makes_no_backend_calls() {
        let cache_dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(cache_dir.path()).unwrap();
        let req = request("warm");
        cache
            .put(&CacheEntry::for_chat(&chat_key(&req), &req, "1"))
            .unwrap();
        let emb = EmbeddingRequest {
            model_id: "m".into(),
            input_text: "warm".into(),
        };
        cache
            .put(&CacheEntry::for_embedding(
                &embedding_key(&emb),
                &emb,
                &[0.25, -0.5],
            ))
            .unwrap();

        let gateway = Gateway::new(Box::new(FailingBackend), Some(cache));
        let chat = gateway.complete(&req).unwrap();
        assert_eq!(chat.backend, BackendKind::Cache);
        assert_eq!(chat.text, "1");
        let embedding = gateway.embed(&emb).unwrap();
        assert_eq!(embedding.values, vec![0.25, -0.5]);
        // an unwarmed request must surface the backend failure
        assert!(gateway.complete(&request("cold")).is_err());
    }
}
