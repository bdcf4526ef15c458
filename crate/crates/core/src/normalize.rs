//! Token canonicalization: lowercase, strip punctuation, spell-correct, stem.
//!
//! Variants of the same concept ("Equations", "equation") must collapse onto
//! one stem so that they become one network node. Spell correction is
//! conservative: only a single Damerau-Levenshtein edit against the wordlist
//! is ever applied.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{Associate, Corpus, ResponseRecord};

const BUNDLED_WORDLIST: &str = include_str!("../data/wordlist_en.txt");

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("token {0:?} is empty after cleaning")]
    EmptyAfterCleaning(String),
    #[error("wordlist is empty")]
    EmptyWordlist,
    #[error("wordlist line {line}: {reason}")]
    WordlistFormat { line: usize, reason: String },
    #[error("reading wordlist: {0}")]
    Io(#[from] std::io::Error),
}

/// Reference vocabulary for spell checking, with optional frequency ranks
/// (1 = most frequent).
#[derive(Debug, Clone)]
pub struct Wordlist {
    ranks: HashMap<String, Option<u32>>,
}

impl Wordlist {
    pub fn parse(text: &str) -> Result<Self, NormalizeError> {
        let mut ranks = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, rank) = match line.split_once('\t') {
                Some((w, r)) => {
                    let rank = r.trim().parse::<u32>().map_err(|_| {
                        NormalizeError::WordlistFormat {
                            line: idx + 1,
                            reason: format!("bad rank {r:?}"),
                        }
                    })?;
                    (w.trim(), Some(rank))
                }
                None => (line, None),
            };
            // Keep the best rank when a word is listed twice.
            ranks
                .entry(word.to_lowercase())
                .and_modify(|r: &mut Option<u32>| {
                    *r = match (*r, rank) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    }
                })
                .or_insert(rank);
        }
        if ranks.is_empty() {
            return Err(NormalizeError::EmptyWordlist);
        }
        Ok(Wordlist { ranks })
    }

    pub fn from_path(path: &Path) -> Result<Self, NormalizeError> {
        Wordlist::parse(&std::fs::read_to_string(path)?)
    }

    /// English list of the 25k most frequent alphabetic words.
    pub fn bundled() -> &'static Wordlist {
        static LIST: OnceLock<Wordlist> = OnceLock::new();
        LIST.get_or_init(|| Wordlist::parse(BUNDLED_WORDLIST).expect("bundled wordlist parses"))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ranks.contains_key(&word.to_lowercase())
    }

    pub fn rank(&self, word: &str) -> Option<u32> {
        self.ranks.get(&word.to_lowercase()).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.ranks.keys().map(String::as_str)
    }
}

/// Lowercase, trim punctuation and whitespace at both ends, collapse inner
/// whitespace runs.
pub fn clean_token(raw: &str) -> Result<String, NormalizeError> {
    let lowered = raw.to_lowercase();
    let trimmed = lowered.trim_matches(|c: char| c.is_whitespace() || is_punct(c));
    let collapsed = trimmed.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        Err(NormalizeError::EmptyAfterCleaning(raw.to_string()))
    } else {
        Ok(collapsed)
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '’' | '‘' | '“' | '”' | '–' | '—' | '…' | '•')
}

/// Best-effort correction to a wordlist entry one edit away. Multiword tokens
/// are corrected word by word.
pub fn spell_correct(token: &str, wordlist: &Wordlist) -> String {
    token
        .split(' ')
        .map(|word| correct_word(word, wordlist))
        .collect::<Vec<_>>()
        .join(" ")
}

fn correct_word(word: &str, wordlist: &Wordlist) -> String {
    if word.is_empty() || wordlist.contains(word) {
        return word.to_string();
    }
    let mut best: Option<(u32, String)> = None;
    for candidate in edits1(word) {
        if !wordlist.contains(&candidate) {
            continue;
        }
        let rank = wordlist.rank(&candidate).unwrap_or(u32::MAX);
        let better = match &best {
            None => true,
            Some((r, w)) => rank < *r || (rank == *r && candidate < *w),
        };
        if better {
            best = Some((rank, candidate));
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| word.to_string())
}

/// All strings one Damerau-Levenshtein edit (delete, adjacent transpose,
/// substitute, insert) away over the lowercase ASCII alphabet.
fn edits1(word: &str) -> HashSet<String> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut out = HashSet::new();
    for i in 0..n {
        let mut v = chars.clone();
        v.remove(i);
        out.insert(v.into_iter().collect());
    }
    for i in 0..n.saturating_sub(1) {
        let mut v = chars.clone();
        v.swap(i, i + 1);
        out.insert(v.into_iter().collect());
    }
    for i in 0..n {
        for c in 'a'..='z' {
            if chars[i] != c {
                let mut v = chars.clone();
                v[i] = c;
                out.insert(v.into_iter().collect());
            }
        }
    }
    for i in 0..=n {
        for c in 'a'..='z' {
            let mut v = chars.clone();
            v.insert(i, c);
            out.insert(v.into_iter().collect());
        }
    }
    out.remove(word);
    out
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Porter2 English stem of every word (split on whitespace and hyphens),
/// rejoined with single spaces.
pub fn stem(token: &str) -> String {
    token
        .split(|c: char| c.is_whitespace() || c == '-')
        .filter(|w| !w.is_empty())
        .map(|w| stemmer().stem(&w.to_lowercase()).into_owned())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Clean then stem, skipping spell correction. Used where no wordlist is at
/// hand, such as the compliance filter.
pub fn stem_key(raw: &str) -> Option<String> {
    clean_token(raw).ok().map(|t| stem(&t))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenTrace {
    pub original: String,
    pub cleaned: Option<String>,
    pub corrected: Option<String>,
    pub stem: Option<String>,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedRecord {
    pub sequence: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    /// One entry per distinct original token, keyed lexicographically.
    pub trace: Vec<TokenTrace>,
    pub corrections: usize,
    /// Surface forms folded into an already-seen stem.
    pub merges: usize,
    pub discarded_tokens: usize,
    pub dropped_records: Vec<DroppedRecord>,
}

/// Clean, correct and stem every associate. A corpus already flagged as
/// normalized is returned untouched with an empty report.
pub fn normalize_corpus(
    corpus: &Corpus,
    wordlist: &Wordlist,
) -> (Corpus, NormalizationReport) {
    if corpus.normalized {
        return (corpus.clone(), NormalizationReport::default());
    }

    let mut traces: BTreeMap<String, TokenTrace> = BTreeMap::new();
    for rec in &corpus.records {
        for assoc in &rec.associates {
            traces
                .entry(assoc.token.clone())
                .or_insert_with(|| trace_token(&assoc.token, wordlist))
                .occurrences += 1;
        }
    }

    let mut surface_counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut records = Vec::with_capacity(corpus.records.len());
    let mut dropped = Vec::new();
    let mut discarded_tokens = 0;

    for rec in &corpus.records {
        let cue_stem = stem(rec.cue.as_str());
        let mut kept = Vec::with_capacity(3);
        let mut discarded_here = 0;
        for assoc in &rec.associates {
            let trace = &traces[&assoc.token];
            match (&trace.corrected, &trace.stem) {
                (Some(surface), Some(stemmed)) => kept.push((surface.clone(), stemmed.clone(), assoc.score)),
                _ => discarded_here += 1,
            }
        }
        discarded_tokens += discarded_here;
        if kept.len() < 3 {
            dropped.push(DroppedRecord {
                sequence: rec.sequence,
                reason: format!("{discarded_here} associate(s) empty after cleaning"),
            });
            continue;
        }
        if kept.iter().any(|(_, s, _)| *s == cue_stem) {
            dropped.push(DroppedRecord {
                sequence: rec.sequence,
                reason: "associate repeats the cue after correction".to_string(),
            });
            continue;
        }
        let mut associates = Vec::with_capacity(3);
        for (surface, stemmed, score) in kept {
            *surface_counts
                .entry(stemmed.clone())
                .or_default()
                .entry(surface)
                .or_default() += 1;
            associates.push(Associate::new(stemmed, score));
        }
        let associates: [Associate; 3] = associates.try_into().expect("exactly three kept");
        records.push(ResponseRecord {
            associates,
            ..rec.clone()
        });
    }

    for cue in corpus.cues() {
        surface_counts
            .entry(stem(cue.as_str()))
            .or_default()
            .entry(cue.as_str().to_string())
            .or_default();
    }

    let mut display_forms = BTreeMap::new();
    let mut merges = 0;
    for (stemmed, forms) in &surface_counts {
        merges += forms.values().filter(|&&c| c > 0).count().saturating_sub(1);
        // Most frequent surface form; ties go to the lexicographically smallest.
        let best = forms
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(form, _)| form.clone())
            .expect("nonempty");
        display_forms.insert(stemmed.clone(), best);
    }

    let corrections = traces
        .values()
        .filter(|t| t.cleaned.is_some() && t.cleaned != t.corrected)
        .count();

    let report = NormalizationReport {
        trace: traces.into_values().collect(),
        corrections,
        merges,
        discarded_tokens,
        dropped_records: dropped,
    };

    let normalized = Corpus {
        metadata: corpus.metadata.clone(),
        cue_ratings: corpus.cue_ratings.clone(),
        records,
        normalized: true,
        display_forms,
    };
    (normalized, report)
}

fn trace_token(original: &str, wordlist: &Wordlist) -> TokenTrace {
    match clean_token(original) {
        Ok(cleaned) => {
            let corrected = spell_correct(&cleaned, wordlist);
            let stemmed = stem(&corrected);
            TokenTrace {
                original: original.to_string(),
                cleaned: Some(cleaned),
                corrected: Some(corrected),
                stem: Some(stemmed),
                occurrences: 0,
            }
        }
        Err(_) => TokenTrace {
            original: original.to_string(),
            cleaned: None,
            corrected: None,
            stem: None,
            occurrences: 0,
        },
    }
}
