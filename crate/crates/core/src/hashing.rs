//! Content hashing and seed derivation used across the pipeline.
//!
//! Every persisted artifact (dataset, splits, registries, feature stores,
//! fitted models, cache entries) is fingerprinted with SHA-256 so that run
//! manifests can record exactly which bytes produced which numbers.

use sha2::{Digest, Sha256};
use std::io;
use std::path::Path;

/// Hex-encoded SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// Hex-encoded SHA-256 of a file's contents.
pub fn file_sha256(path: &Path) -> io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(sha256_hex(&bytes))
}

/// Derive a per-stage seed from the global seed and a stage name.
///
/// Stages can then be re-run in isolation without disturbing the random
/// streams of other stages. The derivation is the first eight bytes of
/// `sha256("{global}:{stage}")`, little-endian.
pub fn derive_seed(global: u64, stage: &str) -> u64 {
    let digest = Sha256::digest(format!("{global}:{stage}").as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
