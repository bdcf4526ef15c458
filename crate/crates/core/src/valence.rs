//! Categorical valence labels from 1-5 ratings.
//!
//! Each stem's ratings are tested against the rest of its corpus with a
//! two-group Kruskal-Wallis test. A significant deviation is labeled by the
//! sign of the mean-rank difference; anything else is Neutral.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::stem;
use crate::types::{Corpus, MeanEstimate, ValenceLabel, ValenceScore};

#[derive(Debug, Error)]
pub enum ValenceError {
    #[error("corpus holds no valence scores")]
    EmptyCorpus,
    #[error("sample has zero spread")]
    DegenerateSample,
    #[error("sample needs at least two values")]
    SampleTooSmall,
    #[error("all values are identical; the rank test is undefined")]
    DegenerateTest,
    #[error("both groups must be nonempty")]
    EmptyGroup,
    #[error("alpha {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("labels csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("labels csv row {row}: {reason}")]
    LabelFormat { row: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Pooling strategy for the reference group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    /// Compare against every score except the sample's own.
    #[default]
    Complement,
    /// Compare against the whole pooled distribution, sample included.
    Full,
}

impl std::str::FromStr for Pooling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complement" => Ok(Pooling::Complement),
            "full" => Ok(Pooling::Full),
            other => Err(format!("unknown pooling mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceConfig {
    pub alpha: f64,
    pub pooling: Pooling,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig {
            alpha: 0.1,
            pooling: Pooling::Complement,
        }
    }
}

impl SignificanceConfig {
    pub fn new(alpha: f64, pooling: Pooling) -> Result<Self, ValenceError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ValenceError::InvalidAlpha(alpha));
        }
        Ok(SignificanceConfig { alpha, pooling })
    }
}

/// Every score attributed to one stem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub stem: String,
    pub scores: Vec<ValenceScore>,
}

impl ScoreSample {
    pub fn values(&self) -> Vec<f64> {
        self.scores.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn estimate(&self) -> Option<MeanEstimate> {
        MeanEstimate::of(&self.values())
    }
}

/// All associate scores and all cue ratings in the corpus.
pub fn pool_scores(corpus: &Corpus) -> Result<Vec<ValenceScore>, ValenceError> {
    let pooled: Vec<ValenceScore> = corpus
        .records
        .iter()
        .flat_map(|r| r.associates.iter().map(|a| a.score))
        .chain(corpus.cue_ratings.iter().map(|r| r.score))
        .collect();
    if pooled.is_empty() {
        Err(ValenceError::EmptyCorpus)
    } else {
        Ok(pooled)
    }
}

/// Scores grouped by stem, sorted ascending. Associates are assumed already
/// stemmed; cue ratings are attributed to the stem of the cue. A cue with
/// neither ratings nor appearances as an associate has an empty sample.
pub fn score_samples(corpus: &Corpus) -> BTreeMap<String, ScoreSample> {
    let mut samples: BTreeMap<String, Vec<ValenceScore>> = BTreeMap::new();
    for rec in &corpus.records {
        // Unrated cues still get an (empty) sample so they can be labeled.
        samples.entry(stem(rec.cue.as_str())).or_default();
        for assoc in &rec.associates {
            samples.entry(assoc.token.clone()).or_default().push(assoc.score);
        }
    }
    for rating in &corpus.cue_ratings {
        samples
            .entry(stem(rating.cue.as_str()))
            .or_default()
            .push(rating.score);
    }
    samples
        .into_iter()
        .map(|(stem, mut scores)| {
            scores.sort_unstable();
            (stem.clone(), ScoreSample { stem, scores })
        })
        .collect()
}

/// 3(mean - median) / sigma with the population standard deviation.
pub fn pearson_skewness(sample: &[f64]) -> Result<f64, ValenceError> {
    if sample.len() < 2 {
        return Err(ValenceError::SampleTooSmall);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sigma = var.sqrt();
    if sigma == 0.0 {
        return Err(ValenceError::DegenerateSample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    Ok(3.0 * (mean - median) / sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    /// Tie-corrected statistic.
    pub h: f64,
    pub h_uncorrected: f64,
    pub tie_correction: f64,
    pub p_value: f64,
    pub mean_rank_a: f64,
    pub mean_rank_b: f64,
}

/// Two-group Kruskal-Wallis H with tie correction; p from chi-square with one
/// degree of freedom.
pub fn kruskal_wallis(group_a: &[f64], group_b: &[f64]) -> Result<KruskalWallis, ValenceError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(ValenceError::EmptyGroup);
    }
    let n_a = group_a.len();
    let mut pooled: Vec<(f64, bool)> = group_a
        .iter()
        .map(|&v| (v, true))
        .chain(group_b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // Positions i..j share the average of ranks i+1..=j.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let in_a = pooled[i..j].iter().filter(|p| p.1).count();
        rank_sum_a += avg_rank * in_a as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }

    let nf = n as f64;
    let correction = 1.0 - tie_term / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Err(ValenceError::DegenerateTest);
    }
    let n_b = n - n_a;
    let total_rank = nf * (nf + 1.0) / 2.0;
    let rank_sum_b = total_rank - rank_sum_a;
    let h_raw = 12.0 / (nf * (nf + 1.0))
        * (rank_sum_a * rank_sum_a / n_a as f64 + rank_sum_b * rank_sum_b / n_b as f64)
        - 3.0 * (nf + 1.0);
    let h_raw = h_raw.max(0.0);
    let h = h_raw / correction;
    Ok(KruskalWallis {
        h,
        h_uncorrected: h_raw,
        tie_correction: correction,
        p_value: chi2_sf_df1(h),
        mean_rank_a: rank_sum_a / n_a as f64,
        mean_rank_b: rank_sum_b / n_b as f64,
    })
}

/// Upper tail of the chi-square distribution with one degree of freedom:
/// P(X >= x) = erfc(sqrt(x / 2)).
pub fn chi2_sf_df1(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    libm::erfc((x / 2.0).sqrt()).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelResult {
    pub stem: String,
    pub label: ValenceLabel,
    pub n: usize,
    pub h_statistic: f64,
    pub p_value: f64,
    /// Sign of the sample mean rank minus the reference mean rank.
    pub direction: i8,
}

/// Label one stem against the pooled distribution. With complement pooling
/// `pooled` must still contain the sample's own scores; they are removed here.
pub fn label_stem(
    sample: &ScoreSample,
    pooled: &[ValenceScore],
    cfg: &SignificanceConfig,
) -> LabelResult {
    let values = sample.values();
    let reference: Vec<f64> = match cfg.pooling {
        Pooling::Full => pooled.iter().map(|&s| f64::from(s)).collect(),
        Pooling::Complement => complement(pooled, &sample.scores),
    };

    let neutral = |h: f64, p: f64, direction: i8| LabelResult {
        stem: sample.stem.clone(),
        label: ValenceLabel::Neutral,
        n: values.len(),
        h_statistic: h,
        p_value: p,
        direction,
    };

    match kruskal_wallis(&values, &reference) {
        Ok(kw) => {
            let diff = kw.mean_rank_a - kw.mean_rank_b;
            let direction = if diff > 0.0 {
                1
            } else if diff < 0.0 {
                -1
            } else {
                0
            };
            if kw.p_value >= cfg.alpha || direction == 0 {
                neutral(kw.h, kw.p_value, direction)
            } else {
                LabelResult {
                    label: if direction < 0 {
                        ValenceLabel::Negative
                    } else {
                        ValenceLabel::Positive
                    },
                    ..neutral(kw.h, kw.p_value, direction)
                }
            }
        }
        Err(_) => neutral(0.0, 1.0, 0),
    }
}

fn complement(pooled: &[ValenceScore], own: &[ValenceScore]) -> Vec<f64> {
    let mut remove = [0usize; 6];
    for s in own {
        remove[s.value() as usize] += 1;
    }
    let mut out = Vec::with_capacity(pooled.len().saturating_sub(own.len()));
    for s in pooled {
        let slot = &mut remove[s.value() as usize];
        if *slot > 0 {
            *slot -= 1;
        } else {
            out.push(f64::from(*s));
        }
    }
    out
}

/// Per-stem labels, ordered lexicographically by stem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledLexicon {
    pub entries: BTreeMap<String, LabelResult>,
}

impl LabeledLexicon {
    pub fn get(&self, stem: &str) -> Option<&LabelResult> {
        self.entries.get(stem)
    }

    pub fn label(&self, stem: &str) -> Option<ValenceLabel> {
        self.entries.get(stem).map(|r| r.label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV with header `stem,label,n,h,p,direction`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), ValenceError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["stem", "label", "n", "h", "p", "direction"])?;
        for r in self.entries.values() {
            w.write_record([
                r.stem.clone(),
                r.label.to_string(),
                r.n.to_string(),
                r.h_statistic.to_string(),
                r.p_value.to_string(),
                r.direction.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self, ValenceError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut entries = BTreeMap::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row?;
            let bad = |reason: String| ValenceError::LabelFormat { row: idx + 1, reason };
            if row.len() != 6 {
                return Err(bad(format!("expected 6 fields, got {}", row.len())));
            }
            let field = |i: usize| row.get(i).unwrap_or_default();
            let label = field(1).parse::<ValenceLabel>().map_err(|e| bad(e.to_string()))?;
            let n = field(2).parse().map_err(|_| bad("bad n".into()))?;
            let h_statistic = field(3).parse().map_err(|_| bad("bad h".into()))?;
            let p_value = field(4).parse().map_err(|_| bad("bad p".into()))?;
            let direction = field(5).parse().map_err(|_| bad("bad direction".into()))?;
            let stem = field(0).to_string();
            entries.insert(
                stem.clone(),
                LabelResult {
                    stem,
                    label,
                    n,
                    h_statistic,
                    p_value,
                    direction,
                },
            );
        }
        Ok(LabeledLexicon { entries })
    }
}

/// Label every distinct stem in a normalized corpus.
pub fn label_corpus(corpus: &Corpus, cfg: &SignificanceConfig) -> Result<LabeledLexicon, ValenceError> {
    let pooled = pool_scores(corpus)?;
    let entries = score_samples(corpus)
        .into_iter()
        .map(|(stem, sample)| (stem, label_stem(&sample, &pooled, cfg)))
        .collect();
    Ok(LabeledLexicon { entries })
}
