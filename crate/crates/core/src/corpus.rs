//! Dialogue corpus ingestion, class balancing and stratified splitting.
//!
//! The input dataset is a UTF-8 CSV with one record per row and columns
//! `id, situation, utterance, response, source, human_score, miti_codes`
//! where `miti_codes` is a `|`-separated list (empty allowed). Balancing
//! undersamples every class down to the smallest class count; splitting is
//! stratified so both partitions stay balanced.

use crate::hashing;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// An empathy score: 1 = bad, 2 = okay, 3 = good.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct EmpathyLabel(u8);

impl EmpathyLabel {
    pub const ALL: [EmpathyLabel; 3] = [EmpathyLabel(1), EmpathyLabel(2), EmpathyLabel(3)];

    pub fn new(value: u8) -> Result<Self, CorpusError> {
        if (1..=3).contains(&value) {
            Ok(EmpathyLabel(value))
        } else {
            Err(CorpusError::InvalidScore {
                value: value.to_string(),
            })
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Zero-based class index, for matrix and confusion-matrix layouts.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < 3, "class index out of range: {index}");
        EmpathyLabel(index as u8 + 1)
    }
}

impl fmt::Display for EmpathyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for EmpathyLabel {
    type Error = CorpusError;
    fn try_from(value: u8) -> Result<Self, Self::Error> {
        EmpathyLabel::new(value)
    }
}

impl From<EmpathyLabel> for u8 {
    fn from(label: EmpathyLabel) -> u8 {
        label.0
    }
}

/// Who produced the response in a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseSource {
    Human,
    Llm,
    LlmEmpathyPrompted,
}

impl ResponseSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseSource::Human => "human",
            ResponseSource::Llm => "llm",
            ResponseSource::LlmEmpathyPrompted => "llm_empathy_prompted",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "human" => Some(ResponseSource::Human),
            "llm" => Some(ResponseSource::Llm),
            "llm_empathy_prompted" => Some(ResponseSource::LlmEmpathyPrompted),
            _ => None,
        }
    }
}

/// One (situation, speaker utterance, response) record with its human label
/// and the MITI codes assigned to the response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueTriplet {
    pub id: String,
    pub situation: String,
    pub utterance: String,
    pub response: String,
    pub source: ResponseSource,
    pub human_score: EmpathyLabel,
    pub miti_annotation: Vec<String>,
}

/// The ordered MITI code vocabulary (15 names in this dataset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitiVocabulary {
    names: Vec<String>,
}

/// Number of MITI codes in the dataset's vocabulary.
pub const MITI_VOCABULARY_SIZE: usize = 15;

impl MitiVocabulary {
    pub fn new(names: Vec<String>) -> Result<Self, CorpusError> {
        if names.len() != MITI_VOCABULARY_SIZE {
            return Err(CorpusError::BadVocabulary {
                message: format!(
                    "expected {MITI_VOCABULARY_SIZE} MITI codes, got {}",
                    names.len()
                ),
            });
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            let trimmed = name.trim();
            if trimmed.is_empty() {
                return Err(CorpusError::BadVocabulary {
                    message: "empty MITI code name".into(),
                });
            }
            if !seen.insert(trimmed.to_string()) {
                return Err(CorpusError::BadVocabulary {
                    message: format!("duplicate MITI code {trimmed:?}"),
                });
            }
        }
        Ok(MitiVocabulary {
            names: names.iter().map(|n| n.trim().to_string()).collect(),
        })
    }

    /// Vocabulary frozen from the dataset's distinct codes, cross-checked
    /// against the MITI 4.2.1 behavior-code manual.
    pub fn default_codes() -> Self {
        MitiVocabulary::new(
            [
                "Advise with Permission",
                "Advise without Permission",
                "Affirm",
                "Confront",
                "Direct",
                "Emphasize Control",
                "Facilitate",
                "Filler",
                "Giving Information",
                "Question",
                "Raise Concern",
                "Reflect",
                "Reframe",
                "Support",
                "Warn",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        )
        .expect("built-in vocabulary is valid")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        let code = code.trim();
        self.names.iter().position(|n| n == code)
    }

    pub fn content_hash(&self) -> String {
        hashing::sha256_hex(self.names.join("\n").as_bytes())
    }
}

/// An ordered corpus with per-class counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawCorpus {
    pub records: Vec<DialogueTriplet>,
    /// Counts for labels 1, 2, 3 in that order.
    pub class_counts: [usize; 3],
}

impl RawCorpus {
    pub fn from_records(records: Vec<DialogueTriplet>) -> Self {
        let mut class_counts = [0usize; 3];
        for r in &records {
            class_counts[r.human_score.index()] += 1;
        }
        RawCorpus {
            records,
            class_counts,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, label: EmpathyLabel) -> usize {
        self.class_counts[label.index()]
    }

    pub fn is_balanced(&self) -> bool {
        self.class_counts[0] == self.class_counts[1] && self.class_counts[1] == self.class_counts[2]
    }
}

/// A stratified train/test partition of a balanced corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedSplit {
    pub train: Vec<DialogueTriplet>,
    pub test: Vec<DialogueTriplet>,
    pub seed: u64,
    pub ratio: f64,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("dataset file not found: {path}")]
    MissingFile { path: PathBuf },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at row {row}, field {field:?}: {message}")]
    MalformedRecord {
        row: usize,
        field: String,
        message: String,
    },
    #[error("unknown score value {value:?}")]
    InvalidScore { value: String },
    #[error("unknown score value {value:?} at row {row}")]
    UnknownScore { row: usize, value: String },
    #[error("unknown MITI code {code:?} at row {row}")]
    UnknownMitiCode { row: usize, code: String },
    #[error("duplicate record id {id:?} at row {row}")]
    DuplicateId { row: usize, id: String },
    #[error("cannot balance: class {label} absent")]
    ClassAbsent { label: EmpathyLabel },
    #[error("corpus is not balanced: class counts {counts:?}")]
    NotBalanced { counts: [usize; 3] },
    #[error("split ratio must be strictly between 0 and 1, got {ratio}")]
    RatioOutOfRange { ratio: f64 },
    #[error("invalid MITI vocabulary: {message}")]
    BadVocabulary { message: String },
    #[error("csv error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

const CSV_HEADER: [&str; 7] = [
    "id",
    "situation",
    "utterance",
    "response",
    "source",
    "human_score",
    "miti_codes",
];

/// Load a corpus CSV, validating every row against the vocabulary.
///
/// Row order is preserved. Malformed rows are rejected with their row index
/// and offending field rather than silently dropped, so class counts stay
/// auditable.
pub fn load_corpus(path: &Path, vocabulary: &MitiVocabulary) -> Result<RawCorpus, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|source| CorpusError::Csv {
            path: path.to_path_buf(),
            source,
        })?;

    {
        let headers = reader.headers().map_err(|source| CorpusError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let found: Vec<&str> = headers.iter().collect();
        if found != CSV_HEADER {
            return Err(CorpusError::MalformedRecord {
                row: 0,
                field: "header".into(),
                message: format!("expected columns {CSV_HEADER:?}, found {found:?}"),
            });
        }
    }

    let mut records = Vec::new();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let row_index = i + 1; // 1-based data row, header is row 0
        let row = row.map_err(|source| CorpusError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let field = |idx: usize, name: &str| -> Result<String, CorpusError> {
            row.get(idx)
                .map(|s| s.to_string())
                .ok_or_else(|| CorpusError::MalformedRecord {
                    row: row_index,
                    field: name.into(),
                    message: "missing column".into(),
                })
        };

        let id = field(0, "id")?.trim().to_string();
        if id.is_empty() {
            return Err(CorpusError::MalformedRecord {
                row: row_index,
                field: "id".into(),
                message: "empty id".into(),
            });
        }
        if !seen_ids.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { row: row_index, id });
        }

        let mut text_field = |idx: usize, name: &str| -> Result<String, CorpusError> {
            let value = field(idx, name)?.trim().to_string();
            if value.is_empty() {
                return Err(CorpusError::MalformedRecord {
                    row: row_index,
                    field: name.into(),
                    message: "empty after trimming".into(),
                });
            }
            Ok(value)
        };
        let situation = text_field(1, "situation")?;
        let utterance = text_field(2, "utterance")?;
        let response = text_field(3, "response")?;

        let source_raw = field(4, "source")?;
        let source = ResponseSource::parse(source_raw.trim()).ok_or_else(|| {
            CorpusError::MalformedRecord {
                row: row_index,
                field: "source".into(),
                message: format!("unknown source {source_raw:?}"),
            }
        })?;

        let score_raw = field(5, "human_score")?;
        let human_score = score_raw
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(|v| EmpathyLabel::new(v).ok())
            .ok_or_else(|| CorpusError::UnknownScore {
                row: row_index,
                value: score_raw.trim().to_string(),
            })?;

        let codes_raw = field(6, "miti_codes")?;
        let mut miti_annotation = Vec::new();
        for code in codes_raw.split('|') {
            let code = code.trim();
            if code.is_empty() {
                continue;
            }
            if vocabulary.position(code).is_none() {
                return Err(CorpusError::UnknownMitiCode {
                    row: row_index,
                    code: code.to_string(),
                });
            }
            miti_annotation.push(code.to_string());
        }

        records.push(DialogueTriplet {
            id,
            situation,
            utterance,
            response,
            source,
            human_score,
            miti_annotation,
        });
    }

    Ok(RawCorpus::from_records(records))
}

/// Write a corpus back out in the input CSV schema.
pub fn save_corpus(corpus: &RawCorpus, path: &Path) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_path(path).map_err(|source| CorpusError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    writer
        .write_record(CSV_HEADER)
        .map_err(|source| CorpusError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    for r in &corpus.records {
        writer
            .write_record([
                r.id.as_str(),
                r.situation.as_str(),
                r.utterance.as_str(),
                r.response.as_str(),
                r.source.as_str(),
                &r.human_score.to_string(),
                &r.miti_annotation.join("|"),
            ])
            .map_err(|source| CorpusError::Csv {
                path: path.to_path_buf(),
                source,
            })?;
    }
    writer.flush().map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Undersample every class uniformly at random (without replacement) down to
/// the smallest class count. Output row order follows the input corpus and
/// the result is deterministic for a fixed `(corpus, seed)`.
pub fn balance(corpus: &RawCorpus, seed: u64) -> Result<RawCorpus, CorpusError> {
    for label in EmpathyLabel::ALL {
        if corpus.count(label) == 0 {
            return Err(CorpusError::ClassAbsent { label });
        }
    }
    let target = *corpus.class_counts.iter().min().expect("three classes");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep: Vec<usize> = Vec::with_capacity(target * 3);
    for label in EmpathyLabel::ALL {
        let mut indices: Vec<usize> = corpus
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.human_score == label)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(&mut rng);
        keep.extend(indices.into_iter().take(target));
    }
    keep.sort_unstable();

    let records = keep
        .into_iter()
        .map(|i| corpus.records[i].clone())
        .collect();
    Ok(RawCorpus::from_records(records))
}

/// Stratified split of a balanced corpus.
///
/// Per class, the train partition receives `floor(ratio * class_count)`
/// records chosen uniformly at random with the given seed; the remainder
/// goes to test. Both partitions preserve input row order.
pub fn split(corpus: &RawCorpus, ratio: f64, seed: u64) -> Result<BalancedSplit, CorpusError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CorpusError::RatioOutOfRange { ratio });
    }
    if !corpus.is_balanced() {
        return Err(CorpusError::NotBalanced {
            counts: corpus.class_counts,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();
    for label in EmpathyLabel::ALL {
        let mut indices: Vec<usize> = corpus
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.human_score == label)
            .map(|(i, _)| i)
            .collect();
        let per_class_train = (ratio * indices.len() as f64).floor() as usize;
        if per_class_train == 0 && !indices.is_empty() {
            log::warn!(
                "split ratio {ratio} leaves zero training records for class {label} \
                 ({} available)",
                indices.len()
            );
        }
        indices.shuffle(&mut rng);
        train_idx.extend(indices.iter().take(per_class_train).copied());
        test_idx.extend(indices.iter().skip(per_class_train).copied());
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok(BalancedSplit {
        train: train_idx
            .into_iter()
            .map(|i| corpus.records[i].clone())
            .collect(),
        test: test_idx
            .into_iter()
            .map(|i| corpus.records[i].clone())
            .collect(),
        seed,
        ratio,
    })
}

/// Manifest persisted alongside the two split files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub ratio: f64,
    pub source_checksum: String,
    pub train_checksum: String,
    pub test_checksum: String,
    pub train_counts: [usize; 3],
    pub test_counts: [usize; 3],
}

/// Persist a split as two corpus CSVs plus a JSON manifest recording the
/// seed, ratio and source-file checksum.
pub fn save_split(
    split: &BalancedSplit,
    source_path: &Path,
    dir: &Path,
) -> Result<SplitManifest, CorpusError> {
    std::fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let train_path = dir.join("train.csv");
    let test_path = dir.join("test.csv");
    let train = RawCorpus::from_records(split.train.clone());
    let test = RawCorpus::from_records(split.test.clone());
    save_corpus(&train, &train_path)?;
    save_corpus(&test, &test_path)?;

    let io_err = |path: &Path, source: std::io::Error| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let manifest = SplitManifest {
        seed: split.seed,
        ratio: split.ratio,
        source_checksum: hashing::file_sha256(source_path).map_err(|e| io_err(source_path, e))?,
        train_checksum: hashing::file_sha256(&train_path).map_err(|e| io_err(&train_path, e))?,
        test_checksum: hashing::file_sha256(&test_path).map_err(|e| io_err(&test_path, e))?,
        train_counts: train.class_counts,
        test_counts: test.class_counts,
    };
    let manifest_path = dir.join("split_manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, body).map_err(|e| io_err(&manifest_path, e))?;
    Ok(manifest)
}

/// Reload a split persisted by [`save_split`].
pub fn load_split(dir: &Path, vocabulary: &MitiVocabulary) -> Result<BalancedSplit, CorpusError> {
    let manifest_path = dir.join("split_manifest.json");
    let body = std::fs::read_to_string(&manifest_path).map_err(|source| CorpusError::Io {
        path: manifest_path.clone(),
        source,
    })?;
    let manifest: SplitManifest =
        serde_json::from_str(&body).map_err(|e| CorpusError::MalformedRecord {
            row: 0,
            field: "split_manifest".into(),
            message: e.to_string(),
        })?;
    let train = load_corpus(&dir.join("train.csv"), vocabulary)?;
    let test = load_corpus(&dir.join("test.csv"), vocabulary)?;
    Ok(BalancedSplit {
        train: train.records,
        test: test.records,
        seed: manifest.seed,
        ratio: manifest.ratio,
    })
}
