//! Probing a language model with the free-association prompt.
//!
//! Prompts go out one per request with no conversation memory. Replies are
//! parsed with a tolerant line grammar and filtered for cue repetitions.
//! Every exchange can be recorded to a JSON Lines transcript and replayed
//! later to rebuild a byte-identical corpus offline.

use std::collections::{BTreeMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{LazyLock, Mutex};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{stem, stem_key};
use crate::types::{
    Associate, Corpus, CorpusMetadata, CueRating, CueWord, ResponseRecord, ValenceScore,
};

pub const DEFAULT_TARGET: u32 = 159;
pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const MAX_RETRIES: u32 = 5;

pub fn render_association_prompt(cue: &CueWord) -> String {
    format!(
        "Write a list of 3 words that come to your mind when you think of {cue} and rate each word \
         on a scale from 1 (very negative) to 5 (very positive) according to the sentiment the word \
         inspires in you."
    )
}

pub fn render_cue_rating_prompt(cue: &CueWord) -> String {
    format!(
        "Rate the word {cue} on a scale from 1 (very negative) to 5 (very positive) according to \
         the sentiment the word inspires in you. Reply with a single number."
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unparseable reply: {reason}")]
pub struct ParseFailure {
    pub reason: String,
}

impl ParseFailure {
    fn new(reason: impl Into<String>) -> Self {
        ParseFailure {
            reason: reason.into(),
        }
    }
}

pub type ParsedTriple = [(String, ValenceScore); 3];

static ENUMERATION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\(?\d{1,2}[.)]\s*|[-•*+·]\s+)").unwrap());
static ITEM_SPLIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[,;]\s+\p{L}").unwrap());
static ITEM: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?xi)^
        (?P<word>\p{L}(?:[\p{L}'’\ \-]*?\p{L})??)
        (?:\s*[-–—:=,(][\s\-–—:=,(]*|\s+)
        (?:(?:rating|score|sentiment|valence)\s*[:=]?\s*)?
        (?P<score>\d+)
        (?P<rest>.*)$",
    )
    .unwrap()
});
static RATING_ONLY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?xi)^
        (?:(?:rating|score|sentiment|valence)\s*[:=]?\s*|[-–—:=(]\s*)?
        (?P<score>\d+)
        (?P<rest>.*)$",
    )
    .unwrap()
});
static WORD_ONLY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\p{L}(?:[\p{L}'’\ \-]*\p{L})?:?$").unwrap());
static TRAILING_OK: LazyLock<Regex> = LazyLock::new(|| {
    // After the score: an optional "/5" and closing parenthesis, then nothing,
    // sentence punctuation, or a separator introducing an explanation.
    Regex::new(r"^(?:\s*/\s*5)?\s*\)?\s*(?:[.!]?\s*$|[.!]\s+\S.*$|[-–—:;,(].*$)").unwrap()
});
static DECIMAL_TAIL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[.,]\d").unwrap());

enum LineItem {
    Scored(String, i64),
    Invalid(String),
    None,
}

fn strip_markup(line: &str) -> String {
    let cleaned: String = line
        .chars()
        .filter(|c| !matches!(c, '*' | '`' | '"' | '“' | '”' | '#' | '_'))
        .collect();
    // Markdown table cells become colon-separated fields.
    let cleaned = cleaned.trim().trim_matches('|').replace('|', ":");
    let cleaned = cleaned.trim();
    ENUMERATION.replace(cleaned, "").trim().to_string()
}

fn parse_score(score: &str, rest: &str) -> LineItem {
    if DECIMAL_TAIL.is_match(rest) {
        return LineItem::Invalid(format!("non-integer score {score}{rest}"));
    }
    if !TRAILING_OK.is_match(rest) {
        return LineItem::None;
    }
    match score.parse::<i64>() {
        Ok(v) => LineItem::Scored(String::new(), v),
        Err(_) => LineItem::Invalid(format!("score {score} is not an integer")),
    }
}

fn scored_item(chunk: &str) -> LineItem {
    let Some(caps) = ITEM.captures(chunk) else {
        return LineItem::None;
    };
    match parse_score(&caps["score"], &caps["rest"]) {
        LineItem::Scored(_, v) => LineItem::Scored(caps["word"].to_string(), v),
        other => other,
    }
}

fn canonical_token(word: &str) -> Option<String> {
    let unhyphenated: String = word
        .chars()
        .map(|c| if matches!(c, '-' | '–' | '—') { ' ' } else { c })
        .collect();
    crate::normalize::clean_token(&unhyphenated).ok()
}

/// Split a line into item chunks at commas or semicolons that introduce a new word.
fn split_items(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    for m in ITEM_SPLIT.find_iter(line) {
        out.push(&line[start..m.start()]);
        // Keep the letter that triggered the split.
        let letter_len = line[..m.end()].chars().next_back().map_or(1, char::len_utf8);
        start = m.end() - letter_len;
    }
    out.push(&line[start..]);
    out
}

/// Extract exactly three (token, score) pairs from a free-form reply.
///
/// Lines are scanned independently after stripping enumeration markers,
/// bullets and markup. A scored item is a word or phrase followed by an
/// integer, separated by a dash, colon, equals sign, comma, parenthesis or
/// whitespace, optionally with a "rating:" style label and a "/5" suffix.
/// A word alone on a line takes its score from an immediately following
/// "Rating: N" line.
pub fn parse_association_reply(raw: &str) -> Result<ParsedTriple, ParseFailure> {
    let mut items: Vec<(String, i64)> = Vec::new();
    let mut pending: Option<String> = None;

    for line in raw.lines() {
        let line = strip_markup(line);
        if line.is_empty() {
            continue;
        }
        if let Some(word) = pending.take() {
            if let Some(caps) = RATING_ONLY.captures(&line) {
                match parse_score(&caps["score"], &caps["rest"]) {
                    LineItem::Scored(_, v) => {
                        items.push((word, v));
                        continue;
                    }
                    LineItem::Invalid(reason) => return Err(ParseFailure::new(reason)),
                    LineItem::None => {}
                }
            }
        }
        let chunks = split_items(&line);
        let mut any_scored = false;
        for chunk in &chunks {
            match scored_item(chunk.trim()) {
                LineItem::Scored(word, v) => {
                    items.push((word, v));
                    any_scored = true;
                }
                LineItem::Invalid(reason) => return Err(ParseFailure::new(reason)),
                LineItem::None => {}
            }
        }
        if !any_scored && chunks.len() == 1 && WORD_ONLY.is_match(&line) {
            let word = line.trim_end_matches(':').to_string();
            if word.split_whitespace().count() <= 3 {
                pending = Some(word);
            }
        }
    }

    if items.len() != 3 {
        return Err(ParseFailure::new(format!("found {} scored items", items.len())));
    }
    let mut out = Vec::with_capacity(3);
    for (word, value) in items {
        let score = ValenceScore::new(value)
            .map_err(|_| ParseFailure::new(format!("score {value} outside 1..=5")))?;
        let token = canonical_token(&word)
            .ok_or_else(|| ParseFailure::new(format!("empty token {word:?}")))?;
        out.push((token, score));
    }
    Ok(out.try_into().expect("exactly three items"))
}

static INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(?:[.,]\d+)?").unwrap());

/// The first standalone integer from 1 to 5 in a cue-rating reply.
pub fn parse_cue_rating(raw: &str) -> Result<ValenceScore, ParseFailure> {
    INTEGER
        .find_iter(raw)
        .filter(|m| m.as_str().chars().all(|c| c.is_ascii_digit()))
        .filter_map(|m| m.as_str().parse::<i64>().ok())
        .find_map(|v| ValenceScore::new(v).ok())
        .ok_or_else(|| ParseFailure::new("no integer between 1 and 5"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compliance {
    Accept,
    Discard,
}

/// Discard a reply whose associates include the cue itself, compared after
/// cleaning and stemming both sides.
pub fn filter_compliance(parsed: &ParsedTriple, cue: &CueWord) -> Compliance {
    let cue_stem = stem(cue.as_str());
    let repeats = parsed
        .iter()
        .any(|(token, _)| stem_key(token).is_some_and(|s| s == cue_stem));
    if repeats {
        Compliance::Discard
    } else {
        Compliance::Accept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportMode {
    Live,
    Record,
    Replay,
}

impl FromStr for TransportMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(TransportMode::Live),
            "record" => Ok(TransportMode::Record),
            "replay" => Ok(TransportMode::Replay),
            other => Err(format!("unknown mode {other:?} (expected live, record or replay)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub endpoint_url: String,
    pub model_id: String,
    pub temperature: f64,
    pub target_responses_per_cue: u32,
    /// Association requests allowed per cue, parse failures included.
    pub max_attempts: u32,
    /// Requests per second; `None` means unthrottled.
    pub rate_limit: Option<f64>,
    pub transport_mode: TransportMode,
    pub transcript: Option<PathBuf>,
    pub api_key: Option<String>,
    pub cue_rating_samples: u32,
    pub in_flight: usize,
    pub retry_base_delay: Duration,
    pub request_timeout: Duration,
    pub seed: Option<u64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            endpoint_url: "http://localhost:8000/v1/chat/completions".into(),
            model_id: "unknown".into(),
            temperature: DEFAULT_TEMPERATURE,
            target_responses_per_cue: DEFAULT_TARGET,
            max_attempts: 10 * DEFAULT_TARGET,
            rate_limit: None,
            transport_mode: TransportMode::Live,
            transcript: None,
            api_key: None,
            cue_rating_samples: 1,
            in_flight: 1,
            retry_base_delay: Duration::from_millis(500),
            request_timeout: Duration::from_secs(60),
            seed: None,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<(), ProbeError> {
        let bad = |m: &str| Err(ProbeError::Config(m.to_string()));
        if !(self.temperature >= 0.0) {
            return bad("temperature must be nonnegative");
        }
        if self.target_responses_per_cue == 0 {
            return bad("target responses per cue must be positive");
        }
        if self.max_attempts == 0 {
            return bad("max attempts must be positive");
        }
        if self.in_flight == 0 {
            return bad("in-flight request count must be positive");
        }
        if matches!(self.rate_limit, Some(r) if !(r > 0.0)) {
            return bad("rate limit must be positive");
        }
        if self.transport_mode != TransportMode::Live && self.transcript.is_none() {
            return bad("record and replay modes require a transcript path");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("endpoint error: {0}")]
    EndpointError(String),
    #[error("cue {cue:?}: target not reached ({accepted} accepted after {attempts} attempts)")]
    TargetNotReached {
        cue: String,
        accepted: u32,
        attempts: u32,
    },
    #[error("replay transcript exhausted after {served} exchanges")]
    ReplayExhausted { served: u64 },
    #[error("replay mismatch at exchange {sequence}: transcript prompt differs from the request")]
    ReplayMismatch { sequence: u64 },
    #[error("transcript line {line}: {reason}")]
    TranscriptFormat { line: usize, reason: String },
    #[error("transcript {path}: {source}")]
    TranscriptIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid probe configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseStatus {
    Accepted,
    DiscardedRepetition,
    Unparseable,
    CueRating,
    CueRatingUnparseable,
}

/// One request/reply pair as persisted in a transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub sequence: u64,
    pub cue: CueWord,
    pub prompt: String,
    pub raw_reply: String,
    pub model_id: String,
    pub timestamp: DateTime<Utc>,
    pub parse_status: ParseStatus,
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptEntry>, ProbeError> {
    let io_err = |source| ProbeError::TranscriptIo {
        path: path.display().to_string(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line).map_err(|e| ProbeError::TranscriptFormat {
            line: i + 1,
            reason: e.to_string(),
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

pub struct TranscriptWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl TranscriptWriter {
    pub fn create(path: &Path) -> Result<Self, ProbeError> {
        let file = File::create(path).map_err(|source| ProbeError::TranscriptIo {
            path: path.display().to_string(),
            source,
        })?;
        Ok(TranscriptWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, entry: &TranscriptEntry) -> Result<(), ProbeError> {
        let line = serde_json::to_string(entry).expect("transcript entry serializes");
        writeln!(self.out, "{line}")
            .and_then(|_| self.out.flush())
            .map_err(|source| ProbeError::TranscriptIo {
                path: self.path.display().to_string(),
                source,
            })
    }
}

/// A reply and the instant it was received.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    pub timestamp: DateTime<Utc>,
}

pub trait Transport: Sync {
    fn send(&self, prompt: &str) -> Result<Reply, ProbeError>;

    /// Whether requests may be issued concurrently.
    fn concurrent(&self) -> bool {
        false
    }
}

/// OpenAI-compatible chat-completions client.
pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
    base_delay: Duration,
}

impl HttpTransport {
    pub fn new(config: &ProbeConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.request_timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            agent,
            endpoint: config.endpoint_url.clone(),
            model: config.model_id.clone(),
            temperature: config.temperature,
            api_key: config.api_key.clone(),
            base_delay: config.retry_base_delay,
        }
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<String, (bool, String)> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            let retryable = status == 429 || status >= 500;
            return Err((retryable, format!("HTTP {status}: {}", text.trim())));
        }
        let json: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| (false, format!("malformed response body: {e}")))?;
        let choice = &json["choices"][0];
        choice["message"]["content"]
            .as_str()
            .or_else(|| choice["text"].as_str())
            .map(str::to_string)
            .ok_or_else(|| (false, "response has no choices[0].message.content".to_string()))
    }
}

impl Transport for HttpTransport {
    fn send(&self, prompt: &str) -> Result<Reply, ProbeError> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        });
        let mut delay = self.base_delay;
        let mut retries = 0;
        loop {
            match self.attempt(&body) {
                Ok(text) => {
                    return Ok(Reply {
                        text,
                        timestamp: Utc::now(),
                    })
                }
                Err((true, msg)) if retries < MAX_RETRIES => {
                    log::warn!("request failed ({msg}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay *= 2;
                    retries += 1;
                }
                Err((_, msg)) => {
                    return Err(ProbeError::EndpointError(format!(
                        "{msg} (after {retries} retries)"
                    )))
                }
            }
        }
    }

    fn concurrent(&self) -> bool {
        true
    }
}

/// Serves recorded replies in order, checking each request against the
/// recorded prompt.
pub struct ReplayTransport {
    entries: Mutex<(u64, VecDeque<TranscriptEntry>)>,
}

impl ReplayTransport {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        ReplayTransport {
            entries: Mutex::new((0, entries.into())),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ProbeError> {
        Ok(Self::new(read_transcript(path)?))
    }

    pub fn remaining(&self) -> usize {
        self.entries.lock().expect("replay lock").1.len()
    }
}

impl Transport for ReplayTransport {
    fn send(&self, prompt: &str) -> Result<Reply, ProbeError> {
        let mut guard = self.entries.lock().expect("replay lock");
        let (served, queue) = &mut *guard;
        let entry = queue
            .pop_front()
            .ok_or(ProbeError::ReplayExhausted { served: *served })?;
        *served += 1;
        if entry.prompt != prompt {
            return Err(ProbeError::ReplayMismatch {
                sequence: entry.sequence,
            });
        }
        Ok(Reply {
            text: entry.raw_reply,
            timestamp: entry.timestamp,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CueStats {
    pub accepted: u32,
    pub discarded_repetition: u32,
    pub discarded_unparseable: u32,
    /// Association requests issued for this cue.
    pub total_requests: u32,
    pub cue_rating_requests: u32,
}

impl CueStats {
    pub fn parsed_attempts(&self) -> u32 {
        self.accepted + self.discarded_repetition + self.discarded_unparseable
    }

    /// Share of association replies that were not accepted.
    pub fn discard_rate(&self) -> f64 {
        let attempts = self.parsed_attempts();
        if attempts == 0 {
            0.0
        } else {
            (self.discarded_repetition + self.discarded_unparseable) as f64 / attempts as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub per_cue: BTreeMap<String, CueStats>,
    pub total_requests: u32,
}

impl CampaignStats {
    pub fn totals(&self) -> CueStats {
        self.per_cue.values().fold(CueStats::default(), |mut acc, s| {
            acc.accepted += s.accepted;
            acc.discarded_repetition += s.discarded_repetition;
            acc.discarded_unparseable += s.discarded_unparseable;
            acc.total_requests += s.total_requests;
            acc.cue_rating_requests += s.cue_rating_requests;
            acc
        })
    }

    pub fn discard_rate(&self) -> f64 {
        self.totals().discard_rate()
    }
}

struct Campaign<'a> {
    config: &'a ProbeConfig,
    transport: &'a dyn Transport,
    transcript: Option<TranscriptWriter>,
    sequence: u64,
    first_timestamp: Option<DateTime<Utc>>,
    last_send: Option<Instant>,
}

impl Campaign<'_> {
    fn throttle(&mut self, requests: usize) {
        if let (Some(rate), Some(last)) = (self.config.rate_limit, self.last_send) {
            let min_gap = Duration::from_secs_f64(requests as f64 / rate);
            let elapsed = last.elapsed();
            if elapsed < min_gap {
                std::thread::sleep(min_gap - elapsed);
            }
        }
        self.last_send = Some(Instant::now());
    }

    /// Send `count` copies of `prompt`, concurrently when the transport
    /// allows it; replies come back in request order.
    fn send_batch(&mut self, prompt: &str, count: usize) -> Vec<Result<Reply, ProbeError>> {
        self.throttle(count);
        if count == 1 || !self.transport.concurrent() {
            return (0..count).map(|_| self.transport.send(prompt)).collect();
        }
        let transport = self.transport;
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..count)
                .map(|_| scope.spawn(move || transport.send(prompt)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("request thread panicked"))
                .collect()
        })
    }

    fn log_exchange(
        &mut self,
        cue: &CueWord,
        prompt: &str,
        reply: &Reply,
        status: ParseStatus,
    ) -> Result<u64, ProbeError> {
        let sequence = self.sequence;
        self.sequence += 1;
        self.first_timestamp.get_or_insert(reply.timestamp);
        if let Some(writer) = &mut self.transcript {
            writer.append(&TranscriptEntry {
                sequence,
                cue: cue.clone(),
                prompt: prompt.to_string(),
                raw_reply: reply.text.clone(),
                model_id: self.config.model_id.clone(),
                timestamp: reply.timestamp,
                parse_status: status,
            })?;
        }
        Ok(sequence)
    }

    fn rate_cue(&mut self, cue: &CueWord, stats: &mut CueStats) -> Result<Vec<CueRating>, ProbeError> {
        let prompt = render_cue_rating_prompt(cue);
        let wanted = self.config.cue_rating_samples;
        let mut ratings = Vec::new();
        while (ratings.len() as u32) < wanted {
            if stats.cue_rating_requests >= self.config.max_attempts {
                return Err(ProbeError::TargetNotReached {
                    cue: cue.to_string(),
                    accepted: ratings.len() as u32,
                    attempts: stats.cue_rating_requests,
                });
            }
            stats.cue_rating_requests += 1;
            let reply = self.send_batch(&prompt, 1).remove(0)?;
            match parse_cue_rating(&reply.text) {
                Ok(score) => {
                    let sequence = self.log_exchange(cue, &prompt, &reply, ParseStatus::CueRating)?;
                    ratings.push(CueRating {
                        cue: cue.clone(),
                        score,
                        sequence,
                    });
                }
                Err(failure) => {
                    log::debug!("cue {cue}: {failure}");
                    self.log_exchange(cue, &prompt, &reply, ParseStatus::CueRatingUnparseable)?;
                }
            }
        }
        Ok(ratings)
    }

    fn associate_cue(&mut self, cue: &CueWord, stats: &mut CueStats) -> Result<Vec<ResponseRecord>, ProbeError> {
        let prompt = render_association_prompt(cue);
        let target = self.config.target_responses_per_cue;
        let mut records = Vec::new();
        while stats.accepted < target {
            let budget = self.config.max_attempts - stats.total_requests;
            if budget == 0 {
                return Err(ProbeError::TargetNotReached {
                    cue: cue.to_string(),
                    accepted: stats.accepted,
                    attempts: stats.total_requests,
                });
            }
            let in_flight = if self.transport.concurrent() { self.config.in_flight } else { 1 };
            let batch = (target - stats.accepted).min(budget).min(in_flight as u32) as usize;
            stats.total_requests += batch as u32;
            for reply in self.send_batch(&prompt, batch) {
                let reply = reply?;
                match parse_association_reply(&reply.text) {
                    Err(failure) => {
                        log::debug!("cue {cue}: {failure}");
                        stats.discarded_unparseable += 1;
                        self.log_exchange(cue, &prompt, &reply, ParseStatus::Unparseable)?;
                    }
                    Ok(triple) => match filter_compliance(&triple, cue) {
                        Compliance::Discard => {
                            stats.discarded_repetition += 1;
                            self.log_exchange(cue, &prompt, &reply, ParseStatus::DiscardedRepetition)?;
                        }
                        Compliance::Accept => {
                            stats.accepted += 1;
                            let sequence = self.log_exchange(cue, &prompt, &reply, ParseStatus::Accepted)?;
                            records.push(ResponseRecord {
                                sequence,
                                cue: cue.clone(),
                                associates: triple.map(|(token, score)| Associate { token, score }),
                                raw_reply: reply.text,
                                model_id: self.config.model_id.clone(),
                                timestamp: reply.timestamp,
                            });
                        }
                    },
                }
            }
        }
        Ok(records)
    }
}

/// Run a campaign through an explicit transport, optionally appending every
/// exchange to a transcript.
pub fn collect_with(
    config: &ProbeConfig,
    cues: &[CueWord],
    transport: &dyn Transport,
    transcript: Option<TranscriptWriter>,
) -> Result<(Corpus, CampaignStats), ProbeError> {
    config.validate()?;
    let mut campaign = Campaign {
        config,
        transport,
        transcript,
        sequence: 0,
        first_timestamp: None,
        last_send: None,
    };
    let mut stats = CampaignStats::default();
    let mut ratings = Vec::new();
    let mut records = Vec::new();
    for cue in cues {
        let mut cue_stats = CueStats::default();
        ratings.extend(campaign.rate_cue(cue, &mut cue_stats)?);
        records.extend(campaign.associate_cue(cue, &mut cue_stats)?);
        log::info!(
            "cue {cue}: {} accepted, {} repetitions, {} unparseable",
            cue_stats.accepted,
            cue_stats.discarded_repetition,
            cue_stats.discarded_unparseable
        );
        stats.total_requests += cue_stats.total_requests + cue_stats.cue_rating_requests;
        stats.per_cue.insert(cue.to_string(), cue_stats);
    }

    let mut corpus = Corpus::new(CorpusMetadata {
        model_id: config.model_id.clone(),
        temperature: config.temperature,
        created: campaign.first_timestamp.unwrap_or(DateTime::UNIX_EPOCH),
        target_responses_per_cue: Some(config.target_responses_per_cue),
        cue_rating_samples: Some(config.cue_rating_samples),
        seed: config.seed,
    });
    corpus.cue_ratings = ratings;
    corpus.records = records;
    Ok((corpus, stats))
}

/// Run a campaign with the transport selected by the configured mode.
pub fn collect_corpus(config: &ProbeConfig, cues: &[CueWord]) -> Result<(Corpus, CampaignStats), ProbeError> {
    config.validate()?;
    let transcript_path = config.transcript.as_deref();
    match config.transport_mode {
        TransportMode::Live => collect_with(config, cues, &HttpTransport::new(config), None),
        TransportMode::Record => {
            let writer = TranscriptWriter::create(transcript_path.expect("validated"))?;
            collect_with(config, cues, &HttpTransport::new(config), Some(writer))
        }
        TransportMode::Replay => {
            let replay = ReplayTransport::from_path(transcript_path.expect("validated"))?;
            collect_with(config, cues, &replay, None)
        }
    }
}
