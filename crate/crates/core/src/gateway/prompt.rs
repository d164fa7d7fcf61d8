//! The three scoring prompts: naive, subfactor-enhanced, and per-subfactor
//! scoring. All run at temperature 0 with deterministic text so identical
//! triplets produce identical cache keys.

use super::ChatRequest;
use crate::corpus::DialogueTriplet;
use crate::subfactors::{EmpathyDimension, SubfactorRegistry};

/// The baseline scoring instruction.
pub const SCORING_INSTRUCTION: &str = "You are given a situation context, a speaker utterance, \
and a response to the speaker utterance in the situation context. Please score the response on \
a scale of 1 to 3, where a score of 1 means a bad empathetic response, a score of 2 means an \
okay empathetic response, and a score of 3 means a good empathetic response.";

const INTEGER_ONLY: &str = "Output only the integer score (1, 2, or 3).";

const DEFAULT_SCORE_TOKENS: u32 = 16;
const DEFAULT_SUBFACTOR_TOKENS: u32 = 1024;

fn labeled_triplet(triplet: &DialogueTriplet) -> String {
    format!(
        "Situation: {}\nSpeaker: {}\nResponse: {}",
        triplet.situation, triplet.utterance, triplet.response
    )
}

/// Minimal 1–3 scoring prompt.
pub fn build_naive_prompt(triplet: &DialogueTriplet, model_id: &str) -> ChatRequest {
    ChatRequest {
        model_id: model_id.to_string(),
        system_text: format!("{SCORING_INSTRUCTION}\n\n{INTEGER_ONLY}"),
        user_text: labeled_triplet(triplet),
        temperature: 0.0,
        max_output_tokens: DEFAULT_SCORE_TOKENS,
        seed_hint: None,
    }
}

fn subfactor_listing(registry: &SubfactorRegistry) -> String {
    let mut listing = String::new();
    for dimension in EmpathyDimension::ALL {
        listing.push_str(&format!("## {}\n", dimension.display_name()));
        for s in registry.of_dimension(dimension) {
            listing.push_str(&format!("- {}: {}\n", s.name, s.definition));
        }
        listing.push('\n');
    }
    listing.trim_end().to_string()
}

/// Naive instruction enhanced with the 15 subfactor names and definitions
/// grouped under their three dimensions; still requests a single 1–3 score.
pub fn build_subfactor_enhanced_prompt(
    triplet: &DialogueTriplet,
    registry: &SubfactorRegistry,
    model_id: &str,
) -> ChatRequest {
    let system = format!(
        "{SCORING_INSTRUCTION}\n\nWhen scoring, consider the following dimensions of empathy \
         and their subfactors:\n\n{}\n\n{INTEGER_ONLY}",
        subfactor_listing(registry)
    );
    ChatRequest {
        model_id: model_id.to_string(),
        system_text: system,
        user_text: labeled_triplet(triplet),
        temperature: 0.0,
        max_output_tokens: DEFAULT_SCORE_TOKENS,
        seed_hint: None,
    }
}

/// Asks for a structured object scoring each of the 15 subfactors from 1 to
/// 10, where 1 means the subfactor is not found in the response and 10 means
/// it is extremely prevalent in the dialogue.
pub fn build_subfactor_scoring_prompt(
    triplet: &DialogueTriplet,
    registry: &SubfactorRegistry,
    model_id: &str,
) -> ChatRequest {
    let system = format!(
        "You are given a situation context, a speaker utterance, and a response to the speaker \
         utterance in the situation context. For each empathy subfactor listed below, assign a \
         score ranging from 1 to 10, where a score of 1 means the subfactor is not found in the \
         response and a score of 10 means the subfactor is extremely prevalent in the dialogue.\
         \n\n{}\n\nOutput only a JSON object mapping each subfactor name to its integer score.",
        subfactor_listing(registry)
    );
    ChatRequest {
        model_id: model_id.to_string(),
        system_text: system,
        user_text: labeled_triplet(triplet),
        temperature: 0.0,
        max_output_tokens: DEFAULT_SUBFACTOR_TOKENS,
        seed_hint: None,
    }
}
