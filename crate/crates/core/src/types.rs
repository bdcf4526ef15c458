//! Domain types shared by every stage of the pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The ten concepts probed by default.
pub const DEFAULT_CUES: [&str; 10] = [
    "math",
    "physics",
    "science",
    "teacher",
    "scientist",
    "school",
    "biology",
    "art",
    "chemistry",
    "stem",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("cue word is empty")]
    EmptyCue,
    #[error("cue word {0:?} contains whitespace")]
    CueWhitespace(String),
    #[error("valence score {0} outside 1..=5")]
    ScoreOutOfRange(i64),
    #[error("unknown valence label {0:?}")]
    UnknownLabel(String),
}

/// A single lowercase cue token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CueWord(String);

impl CueWord {
    pub fn new(text: &str) -> Result<Self, TypeError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(TypeError::EmptyCue);
        }
        if trimmed.chars().any(char::is_whitespace) {
            return Err(TypeError::CueWhitespace(trimmed.to_string()));
        }
        Ok(CueWord(trimmed.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn defaults() -> Vec<CueWord> {
        DEFAULT_CUES.iter().map(|c| CueWord(c.to_string())).collect()
    }
}

impl TryFrom<String> for CueWord {
    type Error = TypeError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        CueWord::new(&value)
    }
}

impl From<CueWord> for String {
    fn from(value: CueWord) -> Self {
        value.0
    }
}

impl FromStr for CueWord {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CueWord::new(s)
    }
}

impl fmt::Display for CueWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An integer rating on the 1 (very negative) to 5 (very positive) scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct ValenceScore(u8);

impl ValenceScore {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(value: i64) -> Result<Self, TypeError> {
        if (Self::MIN as i64..=Self::MAX as i64).contains(&value) {
            Ok(ValenceScore(value as u8))
        } else {
            Err(TypeError::ScoreOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for ValenceScore {
    type Error = TypeError;
    fn try_from(value: i64) -> Result<Self, Self::Error> {
        ValenceScore::new(value)
    }
}

impl From<ValenceScore> for i64 {
    fn from(value: ValenceScore) -> Self {
        value.0 as i64
    }
}

impl From<ValenceScore> for f64 {
    fn from(value: ValenceScore) -> Self {
        value.0 as f64
    }
}

impl fmt::Display for ValenceScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValenceLabel {
    Negative,
    Neutral,
    Positive,
}

impl ValenceLabel {
    pub const ALL: [ValenceLabel; 3] = [
        ValenceLabel::Positive,
        ValenceLabel::Neutral,
        ValenceLabel::Negative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValenceLabel::Negative => "negative",
            ValenceLabel::Neutral => "neutral",
            ValenceLabel::Positive => "positive",
        }
    }
}

impl fmt::Display for ValenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValenceLabel {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" => Ok(ValenceLabel::Negative),
            "neutral" => Ok(ValenceLabel::Neutral),
            "positive" => Ok(ValenceLabel::Positive),
            other => Err(TypeError::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Associate {
    pub token: String,
    pub score: ValenceScore,
}

impl Associate {
    pub fn new(token: impl Into<String>, score: ValenceScore) -> Self {
        Associate {
            token: token.into(),
            score,
        }
    }
}

/// One accepted reply to the association prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub sequence: u64,
    pub cue: CueWord,
    pub associates: [Associate; 3],
    pub raw_reply: String,
    pub model_id: String,
    pub timestamp: DateTime<Utc>,
}

/// The model's own rating of a cue word, asked independently of any association.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueRating {
    pub cue: CueWord,
    pub score: ValenceScore,
    #[serde(default)]
    pub sequence: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMetadata {
    pub model_id: String,
    pub temperature: f64,
    pub created: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_responses_per_cue: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cue_rating_samples: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A model's full set of association records and cue ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub metadata: CorpusMetadata,
    pub cue_ratings: Vec<CueRating>,
    pub records: Vec<ResponseRecord>,
    #[serde(default)]
    pub normalized: bool,
    /// Stem to most frequent surface form, filled in by normalization.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub display_forms: BTreeMap<String, String>,
}

impl Corpus {
    pub fn new(metadata: CorpusMetadata) -> Self {
        Corpus {
            metadata,
            cue_ratings: Vec::new(),
            records: Vec::new(),
            normalized: false,
            display_forms: BTreeMap::new(),
        }
    }

    /// Cues in the order they first appear among ratings and records.
    pub fn cues(&self) -> Vec<CueWord> {
        let mut seen = Vec::new();
        let all = self
            .cue_ratings
            .iter()
            .map(|r| &r.cue)
            .chain(self.records.iter().map(|r| &r.cue));
        for cue in all {
            if !seen.contains(cue) {
                seen.push(cue.clone());
            }
        }
        seen
    }

    pub fn display_form<'a>(&'a self, stem: &'a str) -> &'a str {
        self.display_forms
            .get(stem)
            .map(String::as_str)
            .unwrap_or(stem)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("corpus serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Arithmetic mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
}

impl MeanEstimate {
    /// Standard error is the population standard deviation over sqrt(n).
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(MeanEstimate {
            n: values.len(),
            mean,
            std_error: var.sqrt() / n.sqrt(),
        })
    }
}
