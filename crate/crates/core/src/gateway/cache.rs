//! One-file-per-entry response cache.
//!
//! Filename = hex content hash of the canonicalized request; body = the
//! canonical request, the response and metadata as JSON. Writes go to a
//! temp file in the same directory and are renamed into place, so readers
//! never observe a partial entry.

use super::{ChatRequest, EmbeddingRequest, GatewayError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// A persisted exchange: canonical request, response payload, metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    /// Canonical serialization of the request that produced this entry.
    pub canonical_request: String,
    /// Completion text for chat entries; unused for embeddings.
    #[serde(default)]
    pub response_text: String,
    /// Embedding vector for embedding entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
    /// Unix seconds at write time.
    pub created_at: u64,
}

impl CacheEntry {
    pub fn for_chat(key: &str, request: &ChatRequest, text: &str) -> Self {
        CacheEntry {
            key: key.to_string(),
            canonical_request: super::canonical_chat(request),
            response_text: text.to_string(),
            embedding: None,
            created_at: now_unix(),
        }
    }

    pub fn for_embedding(key: &str, request: &EmbeddingRequest, values: &[f64]) -> Self {
        CacheEntry {
            key: key.to_string(),
            canonical_request: super::canonical_embedding(request),
            response_text: String::new(),
            embedding: Some(values.to_vec()),
            created_at: now_unix(),
        }
    }

    pub fn embedding_values(&self, key: &str) -> Result<Vec<f64>, GatewayError> {
        self.embedding
            .clone()
            .ok_or_else(|| GatewayError::CorruptEntry {
                key: key.to_string(),
                message: "entry holds no embedding".into(),
            })
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Directory-backed cache, one JSON file per key.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    /// Open (and create if needed) a cache directory.
    pub fn open(dir: &Path) -> Result<Self, GatewayError> {
        std::fs::create_dir_all(dir).map_err(|source| GatewayError::CacheIo {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(ResponseCache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entry_path(key).is_file()
    }

    pub fn get(&self, key: &str) -> Result<Option<CacheEntry>, GatewayError> {
        let path = self.entry_path(key);
        let body = match std::fs::read_to_string(&path) {
            Ok(body) => body,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(GatewayError::CacheIo { path, source }),
        };
        let entry: CacheEntry =
            serde_json::from_str(&body).map_err(|e| GatewayError::CorruptEntry {
                key: key.to_string(),
                message: e.to_string(),
            })?;
        Ok(Some(entry))
    }

    /// Store an entry atomically (write-temp-then-rename).
    pub fn put(&self, entry: &CacheEntry) -> Result<(), GatewayError> {
        let body = serde_json::to_string_pretty(entry).expect("entry serializes");
        let target = self.entry_path(&entry.key);
        let tmp = self.dir.join(format!(".{}.tmp-{}", entry.key, std::process::id()));
        std::fs::write(&tmp, body).map_err(|source| GatewayError::CacheIo {
            path: tmp.clone(),
            source,
        })?;
        std::fs::rename(&tmp, &target).map_err(|source| GatewayError::CacheIo {
            path: target,
            source,
        })?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        std::fs::read_dir(&self.dir)
            .map(|entries| entries.filter_map(|e| e.ok()).count())
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::super::chat_key;
    use super::*;

    fn request() -> ChatRequest {
        ChatRequest {
            model_id: "m".into(),
            system_text: "s".into(),
            user_text: "u".into(),
            temperature: 0.0,
            max_output_tokens: 8,
            seed_hint: None,
        }
    }

    #[test]
    fn put_then_get_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let req = request();
        let key = chat_key(&req);
        assert!(cache.get(&key).unwrap().is_none());
        let entry = CacheEntry::for_chat(&key, &req, "3");
        cache.put(&entry).unwrap();
        let loaded = cache.get(&key).unwrap().unwrap();
        assert_eq!(loaded.response_text, "3");
        assert_eq!(loaded.key, key);
        // one entry per key: overwrite keeps a single file
        cache.put(&entry).unwrap();
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn corrupt_entries_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        std::fs::write(cache.entry_path("deadbeef"), "not json").unwrap();
        let err = cache.get("deadbeef").unwrap_err();
        assert!(matches!(err, GatewayError::CorruptEntry { .. }));
    }
}
