//! Empathy scoring lab: benchmark LLMs on 1–3 empathy scoring of dialogue
//! responses and approximate their behavior with transparent, feature-based
//! classifiers (MITI codes, elicited empathy subfactors, embeddings), plus
//! recursive feature elimination over the combined feature space.
//!
//! The crate is organized by pipeline stage:
//!
//! - [`corpus`] — dataset ingestion, class balancing, stratified splits
//! - [`gateway`] — prompt construction, chat/embedding backends, a
//!   content-addressed response cache, and score parsing
//! - [`subfactors`] — empathy-subfactor elicitation and versioned registries
//! - [`features`] — MITI multi-hot, subfactor, embedding and combined
//!   feature matrices with standardization
//! - [`models`] — five classifier families behind one train/predict/importance
//!   interface with seeded determinism
//! - [`selector`] — recursive feature elimination, accuracy-vs-k sweeps and
//!   importance reporting
//! - [`finetune`] — training-file export, fine-tune job orchestration and
//!   evaluation of the resulting models
//! - [`experiment`] — the end-to-end runner, confusion matrices and report
//!   emission
//!
//! Data-parallel inner loops (forest training, permutation shuffles, sweep
//! points, batch scoring) run on rayon when the default `parallel` feature is
//! enabled and fall back to sequential iteration without it.

pub mod corpus;
pub mod experiment;
pub mod features;
pub mod finetune;
pub mod gateway;
pub mod hashing;
pub mod models;
pub mod parallel;
pub mod selector;
pub mod subfactors;

pub use corpus::EmpathyLabel;

/// Round a fraction to four decimal places, half away from zero.
///
/// Accuracies are conventionally reported at four decimal places
/// (e.g. 179/384 = 0.4661), so every emitted accuracy goes through here.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

#[cfg(test)]
mod tests {
    use super::round4;

    #[test]
    fn round4_reported_fractions() {
        // Known n/384 fractions and their 4 dp decimal forms.
        assert_eq!(round4(179.0 / 384.0), 0.4661);
        assert_eq!(round4(164.0 / 384.0), 0.4271);
        assert_eq!(round4(210.0 / 384.0), 0.5469); // 0.546875 rounds up
        assert_eq!(round4(1.0 / 3.0), 0.3333);
    }
}
