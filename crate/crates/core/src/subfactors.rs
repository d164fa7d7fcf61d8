//! Versioned empathy-subfactor registries and the elicitation protocol that
//! produces them.
//!
//! A registry holds exactly 15 named, defined subfactors, five under each of
//! the three empathy dimensions (cognitive, affective, compassionate).
//! Registries are frozen as data files so downstream experiments do not
//! depend on live elicitation; the shipped v1/v2 files were regenerated by
//! running the elicitation protocol against a deterministic mock backend.

use crate::corpus::DialogueTriplet;
use crate::gateway::{ChatRequest, Gateway, GatewayError};
use crate::hashing;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DIMENSION_COUNT: usize = 3;
pub const SUBFACTORS_PER_DIMENSION: usize = 5;
pub const REGISTRY_SIZE: usize = DIMENSION_COUNT * SUBFACTORS_PER_DIMENSION;

/// The three dimensions of empathy, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpathyDimension {
    Cognitive,
    Affective,
    Compassionate,
}

impl EmpathyDimension {
    pub const ALL: [EmpathyDimension; 3] = [
        EmpathyDimension::Cognitive,
        EmpathyDimension::Affective,
        EmpathyDimension::Compassionate,
    ];

    /// Human-readable dimension header used in prompts and reports.
    pub fn display_name(self) -> &'static str {
        match self {
            EmpathyDimension::Cognitive => "Cognitive Empathy",
            EmpathyDimension::Affective => "Affective (Emotional) Empathy",
            EmpathyDimension::Compassionate => "Compassionate Empathy",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            EmpathyDimension::Cognitive => "cognitive",
            EmpathyDimension::Affective => "affective",
            EmpathyDimension::Compassionate => "compassionate",
        }
    }
}

impl fmt::Display for EmpathyDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// One named, defined subfactor under a dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubfactorDefinition {
    pub name: String,
    pub definition: String,
    pub dimension: EmpathyDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegistryVersion {
    V1,
    V2,
    Custom,
}

impl fmt::Display for RegistryVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegistryVersion::V1 => "v1",
            RegistryVersion::V2 => "v2",
            RegistryVersion::Custom => "custom",
        })
    }
}

/// A validated set of 15 subfactors in stable dimension-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubfactorRegistry {
    version: RegistryVersion,
    subfactors: Vec<SubfactorDefinition>,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("dimension {dimension} has {count} subfactors, expected {SUBFACTORS_PER_DIMENSION}")]
    WrongDimensionCount {
        dimension: EmpathyDimension,
        count: usize,
    },
    #[error("duplicate subfactor name {name:?}")]
    DuplicateName { name: String },
    #[error("subfactor {name:?} has an empty definition")]
    EmptyDefinition { name: String },
    #[error("registry file {path} declares version {found}, expected {expected}")]
    VersionMismatch {
        path: PathBuf,
        found: RegistryVersion,
        expected: RegistryVersion,
    },
    #[error("failed to read registry {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse registry {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("dimension {dimension} has only {distinct} distinct candidate names, need {needed}")]
    NotEnoughCandidates {
        dimension: EmpathyDimension,
        distinct: usize,
        needed: usize,
    },
    #[error("no candidate sets provided")]
    NoCandidates,
}

impl SubfactorRegistry {
    /// Validate and order a subfactor list: five per dimension, unique names,
    /// non-empty definitions. Ordering is dimension-major (cognitive,
    /// affective, compassionate), preserving declared order within each
    /// dimension.
    pub fn new(
        version: RegistryVersion,
        subfactors: Vec<SubfactorDefinition>,
    ) -> Result<Self, RegistryError> {
        let mut seen = BTreeSet::new();
        for s in &subfactors {
            if !seen.insert(s.name.trim().to_lowercase()) {
                return Err(RegistryError::DuplicateName {
                    name: s.name.clone(),
                });
            }
            if s.definition.trim().is_empty() {
                return Err(RegistryError::EmptyDefinition {
                    name: s.name.clone(),
                });
            }
        }
        let mut ordered = Vec::with_capacity(REGISTRY_SIZE);
        for dimension in EmpathyDimension::ALL {
            let of_dim: Vec<&SubfactorDefinition> = subfactors
                .iter()
                .filter(|s| s.dimension == dimension)
                .collect();
            if of_dim.len() != SUBFACTORS_PER_DIMENSION {
                return Err(RegistryError::WrongDimensionCount {
                    dimension,
                    count: of_dim.len(),
                });
            }
            ordered.extend(of_dim.into_iter().cloned());
        }
        Ok(SubfactorRegistry {
            version,
            subfactors: ordered,
        })
    }

    pub fn version(&self) -> RegistryVersion {
        self.version
    }

    pub fn with_version(mut self, version: RegistryVersion) -> Self {
        self.version = version;
        self
    }

    /// All 15 subfactors in dimension-major order.
    pub fn subfactors(&self) -> &[SubfactorDefinition] {
        &self.subfactors
    }

    pub fn names(&self) -> Vec<&str> {
        self.subfactors.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn of_dimension(
        &self,
        dimension: EmpathyDimension,
    ) -> impl Iterator<Item = &SubfactorDefinition> {
        self.subfactors
            .iter()
            .filter(move |s| s.dimension == dimension)
    }

    /// Position of a name (matched case-insensitively after trimming).
    pub fn position(&self, name: &str) -> Option<usize> {
        let needle = name.trim().to_lowercase();
        self.subfactors
            .iter()
            .position(|s| s.name.trim().to_lowercase() == needle)
    }

    /// Canonical serialized form; the content hash recorded in run manifests
    /// is the SHA-256 of these bytes.
    pub fn to_canonical_toml(&self) -> String {
        let file = RegistryFile::from_registry(self);
        toml::to_string(&file).expect("registry serializes")
    }

    pub fn content_hash(&self) -> String {
        hashing::sha256_hex(self.to_canonical_toml().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        std::fs::write(path, self.to_canonical_toml()).map_err(|source| RegistryError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let body = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: RegistryFile = toml::from_str(&body).map_err(|e| RegistryError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        file.into_registry()
    }

    /// Shipped registry for a version (v1 from a single elicitation round,
    /// v2 from ten rounds with most-recurring selection).
    pub fn builtin(version: RegistryVersion) -> Result<Self, RegistryError> {
        let body = match version {
            RegistryVersion::V1 => include_str!("../data/subfactors_v1.toml"),
            RegistryVersion::V2 => include_str!("../data/subfactors_v2.toml"),
            RegistryVersion::Custom => {
                return Err(RegistryError::Parse {
                    path: PathBuf::from("<builtin>"),
                    message: "no built-in custom registry; provide a path".into(),
                })
            }
        };
        let file: RegistryFile = toml::from_str(body).map_err(|e| RegistryError::Parse {
            path: PathBuf::from("<builtin>"),
            message: e.to_string(),
        })?;
        file.into_registry()
    }
}

/// Load a registry file and check it declares the expected version.
pub fn load_registry(
    version: RegistryVersion,
    path: &Path,
) -> Result<SubfactorRegistry, RegistryError> {
    let registry = SubfactorRegistry::load(path)?;
    if registry.version != version {
        return Err(RegistryError::VersionMismatch {
            path: path.to_path_buf(),
            found: registry.version,
            expected: version,
        });
    }
    Ok(registry)
}

/// On-disk registry layout: version plus five (name, definition) pairs per
/// dimension.
#[derive(Debug, Serialize, Deserialize)]
struct RegistryFile {
    version: RegistryVersion,
    #[serde(default)]
    provenance: Option<String>,
    cognitive: Vec<NamedDefinition>,
    affective: Vec<NamedDefinition>,
    compassionate: Vec<NamedDefinition>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NamedDefinition {
    name: String,
    definition: String,
}

impl RegistryFile {
    fn from_registry(registry: &SubfactorRegistry) -> Self {
        let collect = |dimension| {
            registry
                .of_dimension(dimension)
                .map(|s| NamedDefinition {
                    name: s.name.clone(),
                    definition: s.definition.clone(),
                })
                .collect()
        };
        RegistryFile {
            version: registry.version,
            provenance: None,
            cognitive: collect(EmpathyDimension::Cognitive),
            affective: collect(EmpathyDimension::Affective),
            compassionate: collect(EmpathyDimension::Compassionate),
        }
    }

    fn into_registry(self) -> Result<SubfactorRegistry, RegistryError> {
        let mut subfactors = Vec::with_capacity(REGISTRY_SIZE);
        for (dimension, entries) in [
            (EmpathyDimension::Cognitive, self.cognitive),
            (EmpathyDimension::Affective, self.affective),
            (EmpathyDimension::Compassionate, self.compassionate),
        ] {
            for e in entries {
                subfactors.push(SubfactorDefinition {
                    name: e.name,
                    definition: e.definition,
                    dimension,
                });
            }
        }
        SubfactorRegistry::new(self.version, subfactors)
    }
}

/// One candidate subfactor proposed during an elicitation round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSubfactor {
    pub name: String,
    pub definition: String,
}

/// The parsed output of one elicitation round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Round index, used to key definition recency deterministically.
    pub round: usize,
    pub by_dimension: BTreeMap<EmpathyDimension, Vec<CandidateSubfactor>>,
}

/// Canonical name form used for recurrence counting: lowercase, trimmed,
/// internal whitespace collapsed.
pub fn canonical_name(name: &str) -> String {
    name.trim()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Build the elicitation prompt: recommend five subfactors per dimension,
/// grounded in sample dialogues and their human scores, as structured JSON.
pub fn build_elicitation_prompt(
    sample: &[DialogueTriplet],
    model_id: &str,
    round: usize,
) -> ChatRequest {
    let mut system = String::from(
        "You study how empathy is expressed in dialogue responses. Empathy has three \
         dimensions: Cognitive Empathy, Affective (Emotional) Empathy, and Compassionate \
         Empathy. Based on the example dialogues and their human empathy scores below, \
         recommend 5 subfactors for each dimension of empathy. Give each subfactor a short \
         lowercase name and a one-to-three sentence definition.\n\nRespond with only a JSON \
         object of the form {\"cognitive\": [{\"name\": ..., \"definition\": ...}, ...], \
         \"affective\": [...], \"compassionate\": [...]} with exactly 5 entries per dimension.",
    );
    system.push('\n');

    let mut user = String::new();
    for t in sample {
        user.push_str(&format!(
            "Situation: {}\nSpeaker: {}\nResponse: {}\nHuman empathy score (1-3): {}\n\n",
            t.situation, t.utterance, t.response, t.human_score
        ));
    }
    user.push_str("Recommend the subfactors now.");

    ChatRequest {
        model_id: model_id.to_string(),
        system_text: system,
        user_text: user,
        temperature: 0.0,
        max_output_tokens: 2048,
        // distinct rounds must produce distinct cache keys
        seed_hint: Some(round as u64),
    }
}

/// Parse one elicitation response into per-dimension candidates.
pub fn parse_candidates(
    text: &str,
    round: usize,
) -> Result<CandidateSet, GatewayError> {
    let value = crate::gateway::extract_json_object(text)?;
    let object = value.as_object().ok_or_else(|| GatewayError::Unparseable {
        what: "elicitation response".into(),
        message: "top-level JSON value is not an object".into(),
    })?;
    let mut by_dimension = BTreeMap::new();
    for dimension in EmpathyDimension::ALL {
        let entries = object
            .get(dimension.key())
            .and_then(|v| v.as_array())
            .ok_or_else(|| GatewayError::Unparseable {
                what: "elicitation response".into(),
                message: format!("missing array for dimension {:?}", dimension.key()),
            })?;
        let mut candidates = Vec::new();
        for entry in entries {
            let name = entry.get("name").and_then(|v| v.as_str()).ok_or_else(|| {
                GatewayError::Unparseable {
                    what: "elicitation response".into(),
                    message: format!("candidate without a name under {:?}", dimension.key()),
                }
            })?;
            let definition = entry
                .get("definition")
                .and_then(|v| v.as_str())
                .unwrap_or("")
                .trim()
                .to_string();
            candidates.push(CandidateSubfactor {
                name: name.trim().to_string(),
                definition,
            });
        }
        if candidates.is_empty() {
            return Err(GatewayError::Unparseable {
                what: "elicitation response".into(),
                message: format!("no candidates for dimension {:?}", dimension.key()),
            });
        }
        by_dimension.insert(dimension, candidates);
    }
    Ok(CandidateSet { round, by_dimension })
}

/// Run `rounds` elicitation rounds through the gateway. Unparseable rounds
/// are logged and skipped, so fewer than `rounds` sets may come back.
pub fn elicit_candidates(
    gateway: &Gateway,
    corpus_sample: &[DialogueTriplet],
    rounds: usize,
    model_id: &str,
) -> Result<Vec<CandidateSet>, GatewayError> {
    assert!(rounds >= 1, "rounds must be >= 1");
    assert!(!corpus_sample.is_empty(), "corpus sample must be non-empty");
    let mut sets = Vec::new();
    for round in 0..rounds {
        let request = build_elicitation_prompt(corpus_sample, model_id, round);
        let response = gateway.complete(&request)?;
        match parse_candidates(&response.text, round) {
            Ok(set) => sets.push(set),
            Err(e) => log::warn!("elicitation round {round} unparseable, skipping: {e}"),
        }
    }
    Ok(sets)
}

/// Select the most recurring `per_dimension` candidate names per dimension.
///
/// Names are canonicalized (lowercase, trimmed, whitespace collapsed) before
/// counting; a name counts once per round. Ties break toward the
/// lexicographically smaller canonical name. Each selected name takes its
/// definition from the highest round index that mentions it, which makes the
/// result invariant to the order of the candidate-set list.
pub fn select_recurring(
    candidates: &[CandidateSet],
    per_dimension: usize,
) -> Result<SubfactorRegistry, RegistryError> {
    if candidates.is_empty() {
        return Err(RegistryError::NoCandidates);
    }
    assert!(per_dimension >= 1, "per_dimension must be >= 1");

    let mut subfactors = Vec::new();
    for dimension in EmpathyDimension::ALL {
        // canonical name -> (rounds mentioning it, definition from highest round)
        let mut counts: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        let mut definitions: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for set in candidates {
            let Some(list) = set.by_dimension.get(&dimension) else {
                continue;
            };
            for candidate in list {
                let canonical = canonical_name(&candidate.name);
                if canonical.is_empty() {
                    continue;
                }
                counts.entry(canonical.clone()).or_default().insert(set.round);
                let entry = definitions
                    .entry(canonical)
                    .or_insert((set.round, candidate.definition.clone()));
                if set.round >= entry.0 {
                    *entry = (set.round, candidate.definition.clone());
                }
            }
        }
        if counts.len() < per_dimension {
            return Err(RegistryError::NotEnoughCandidates {
                dimension,
                distinct: counts.len(),
                needed: per_dimension,
            });
        }
        let mut ranked: Vec<(&String, usize)> =
            counts.iter().map(|(name, rounds)| (name, rounds.len())).collect();
        // highest count first; ties toward lexicographically smaller name
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        for (name, _) in ranked.into_iter().take(per_dimension) {
            let definition = definitions[name].1.clone();
            subfactors.push(SubfactorDefinition {
                name: name.clone(),
                definition: if definition.trim().is_empty() {
                    name.clone()
                } else {
                    definition
                },
                dimension,
            });
        }
    }
    SubfactorRegistry::new(RegistryVersion::Custom, subfactors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn def(name: &str, dimension: EmpathyDimension) -> SubfactorDefinition {
        SubfactorDefinition {
            name: name.to_string(),
            definition: format!("definition of {name}"),
            dimension,
        }
    }

    fn full_set() -> Vec<SubfactorDefinition> {
        let mut v = Vec::new();
        for dimension in EmpathyDimension::ALL {
            for i in 0..SUBFACTORS_PER_DIMENSION {
                v.push(def(&format!("{} factor {i}", dimension.key()), dimension));
            }
        }
        v
    }

    #[test]
    fn registry_validates_counts() {
        let mut subfactors = full_set();
        assert!(SubfactorRegistry::new(RegistryVersion::Custom, subfactors.clone()).is_ok());
        subfactors.pop();
        let err = SubfactorRegistry::new(RegistryVersion::Custom, subfactors).unwrap_err();
        assert!(matches!(
            err,
            RegistryError::WrongDimensionCount {
                dimension: EmpathyDimension::Compassionate,
                count: 4
            }
        ));
    }

    #[test]
    fn registry_rejects_duplicates() {
        let mut subfactors = full_set();
        subfactors[1].name = subfactors[0].name.clone();
        let err = SubfactorRegistry::new(RegistryVersion::Custom, subfactors).unwrap_err();
        assert!(matches!(err, RegistryError::DuplicateName { .. }));
    }

    #[test]
    fn registry_order_is_dimension_major() {
        let mut shuffled = full_set();
        shuffled.reverse();
        let registry = SubfactorRegistry::new(RegistryVersion::Custom, shuffled).unwrap();
        let dims: Vec<EmpathyDimension> =
            registry.subfactors().iter().map(|s| s.dimension).collect();
        let mut expected = Vec::new();
        for d in EmpathyDimension::ALL {
            expected.extend(std::iter::repeat(d).take(SUBFACTORS_PER_DIMENSION));
        }
        assert_eq!(dims, expected);
    }

    #[test]
    fn save_load_preserves_order_and_hash() {
        let registry =
            SubfactorRegistry::new(RegistryVersion::Custom, full_set()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("registry.toml");
        registry.save(&path).unwrap();
        let reloaded = SubfactorRegistry::load(&path).unwrap();
        assert_eq!(reloaded, registry);
        assert_eq!(reloaded.content_hash(), registry.content_hash());
    }

    #[test]
    fn builtin_registries_load_and_differ() {
        let v1 = SubfactorRegistry::builtin(RegistryVersion::V1).unwrap();
        let v2 = SubfactorRegistry::builtin(RegistryVersion::V2).unwrap();
        assert_eq!(v1.subfactors().len(), REGISTRY_SIZE);
        assert_eq!(v2.subfactors().len(), REGISTRY_SIZE);
        assert_ne!(v1.content_hash(), v2.content_hash());
        for dimension in EmpathyDimension::ALL {
            assert_eq!(v1.of_dimension(dimension).count(), 5);
            assert_eq!(v2.of_dimension(dimension).count(), 5);
        }
    }

    #[test]
    fn load_registry_checks_version() {
        let registry =
            SubfactorRegistry::new(RegistryVersion::V1, full_set()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("registry.toml");
        registry.save(&path).unwrap();
        assert!(load_registry(RegistryVersion::V1, &path).is_ok());
        let err = load_registry(RegistryVersion::V2, &path).unwrap_err();
        assert!(matches!(err, RegistryError::VersionMismatch { .. }));
    }

    fn candidate_set(round: usize, names: [&[&str]; 3]) -> CandidateSet {
        let mut by_dimension = BTreeMap::new();
        for (dimension, list) in EmpathyDimension::ALL.iter().zip(names) {
            by_dimension.insert(
                *dimension,
                list.iter()
                    .map(|n| CandidateSubfactor {
                        name: n.to_string(),
                        definition: format!("{n} (round {round})"),
                    })
                    .collect(),
            );
        }
        CandidateSet { round, by_dimension }
    }

    #[test]
    fn select_recurring_counts_and_ties() {
        // "e" appears twice; among the once-mentioned names the lexicographic
        // rule decides who fills the remaining slots.
        let base = ["a", "b", "c", "d", "e"];
        let sets = vec![
            candidate_set(0, [&["e", "z", "y", "x", "w"], &base, &base]),
            candidate_set(1, [&["e", "v", "u", "t", "s"], &base, &base]),
        ];
        let registry = select_recurring(&sets, 5).unwrap();
        let cognitive: Vec<&str> = registry
            .of_dimension(EmpathyDimension::Cognitive)
            .map(|s| s.name.as_str())
            .collect();
        // e selected on count, then lexicographically smallest of the rest
        assert_eq!(cognitive, vec!["e", "s", "t", "u", "v"]);
        // definition comes from the highest round mentioning the name
        let e = registry
            .of_dimension(EmpathyDimension::Cognitive)
            .find(|s| s.name == "e")
            .unwrap();
        assert_eq!(e.definition, "e (round 1)");
    }

    #[test]
    fn select_recurring_unanimity() {
        let names: [&[&str]; 3] = [
            &["a", "b", "c", "d", "e"],
            &["f", "g", "h", "i", "j"],
            &["k", "l", "m", "n", "o"],
        ];
        let sets: Vec<CandidateSet> =
            (0..10).map(|round| candidate_set(round, names)).collect();
        let registry = select_recurring(&sets, 5).unwrap();
        let got: Vec<&str> = registry.names();
        assert_eq!(
            got,
            vec!["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o"]
        );
    }

    #[test]
    fn select_recurring_is_permutation_invariant() {
        let sets = vec![
            candidate_set(
                0,
                [
                    &["alpha", "beta", "gamma", "delta", "epsilon"],
                    &["a", "b", "c", "d", "e"],
                    &["k", "l", "m", "n", "o"],
                ],
            ),
            candidate_set(
                1,
                [
                    &["alpha", "beta", "zeta", "eta", "theta"],
                    &["a", "b", "c", "d", "e"],
                    &["k", "l", "m", "n", "o"],
                ],
            ),
            candidate_set(
                2,
                [
                    &["alpha", "iota", "kappa", "lambda", "mu"],
                    &["a", "b", "c", "d", "e"],
                    &["k", "l", "m", "n", "o"],
                ],
            ),
        ];
        let forward = select_recurring(&sets, 5).unwrap();
        let mut reversed = sets.clone();
        reversed.reverse();
        let backward = select_recurring(&reversed, 5).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn select_recurring_requires_enough_distinct_names() {
        let sets = vec![candidate_set(
            0,
            [
                &["a", "a", "b", "b", "c"],
                &["a", "b", "c", "d", "e"],
                &["a", "b", "c", "d", "e"],
            ],
        )];
        let err = select_recurring(&sets, 5).unwrap_err();
        assert!(matches!(
            err,
            RegistryError::NotEnoughCandidates {
                dimension: EmpathyDimension::Cognitive,
                distinct: 3,
                needed: 5
            }
        ));
    }

    #[test]
    fn canonical_name_collapses_whitespace() {
        assert_eq!(canonical_name("  Emotion   Recognition "), "emotion recognition");
    }
}
