//! Frame measurements and cross-corpus comparison tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::EmotionLexicon;
use crate::network::{FrameAssociate, SemanticFrame};
use crate::types::{MeanEstimate, ValenceLabel};
use crate::valence::ScoreSample;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("corpus id {corpus_id:?} appears twice for cue {cue:?}")]
    DuplicateCorpusId { corpus_id: String, cue: String },
    #[error("no metrics to compare")]
    NoCorpora,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameAura {
    Negative,
    Neutral,
    Positive,
    Mixed,
}

impl FrameAura {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameAura::Negative => "negative",
            FrameAura::Neutral => "neutral",
            FrameAura::Positive => "positive",
            FrameAura::Mixed => "mixed",
        }
    }
}

/// How associates are counted in fractions and in the aura mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Each distinct associate counts once.
    #[default]
    Unique,
    /// Each associate counts its edge multiplicity.
    Multiplicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LabelFractions {
    pub positive: f64,
    pub neutral: f64,
    pub negative: f64,
}

impl LabelFractions {
    pub fn sum(&self) -> f64 {
        self.positive + self.neutral + self.negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub cue: String,
    pub frame_size: usize,
    pub estimated_valence: Option<MeanEstimate>,
    pub cue_label: ValenceLabel,
    pub frame_aura: FrameAura,
    pub fractions: LabelFractions,
    pub non_emotional_fraction: f64,
    pub non_emotional_fractions: LabelFractions,
    pub weighting: Weighting,
}

impl FrameMetrics {
    pub fn is_empty(&self) -> bool {
        self.frame_size == 0
    }
}

/// No basic-emotion flag set, or absent from the thesaurus altogether.
pub fn is_non_emotional(assoc: &FrameAssociate, emolex: &EmotionLexicon) -> bool {
    emolex
        .lookup(&assoc.display_form, &assoc.stem)
        .is_none_or(|flags| !flags.any_basic())
}

fn weighted_fractions<'a>(
    items: impl Iterator<Item = &'a FrameAssociate>,
    weighting: Weighting,
) -> (LabelFractions, [f64; 3]) {
    // Totals indexed negative, neutral, positive.
    let mut totals = [0.0f64; 3];
    for a in items {
        let w = match weighting {
            Weighting::Unique => 1.0,
            Weighting::Multiplicity => a.multiplicity as f64,
        };
        totals[label_index(a.label)] += w;
    }
    let sum: f64 = totals.iter().sum();
    if sum == 0.0 {
        return (LabelFractions::default(), totals);
    }
    (
        LabelFractions {
            negative: totals[0] / sum,
            neutral: totals[1] / sum,
            positive: totals[2] / sum,
        },
        totals,
    )
}

fn label_index(l: ValenceLabel) -> usize {
    match l {
        ValenceLabel::Negative => 0,
        ValenceLabel::Neutral => 1,
        ValenceLabel::Positive => 2,
    }
}

fn aura(totals: [f64; 3]) -> FrameAura {
    let max = totals.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return FrameAura::Neutral;
    }
    let winners: Vec<usize> = (0..3).filter(|&i| totals[i] == max).collect();
    match winners.as_slice() {
        [0] => FrameAura::Negative,
        [1] => FrameAura::Neutral,
        [2] => FrameAura::Positive,
        _ => FrameAura::Mixed,
    }
}

/// The six frame measurements. An empty frame yields zero fractions and a
/// Neutral aura.
pub fn frame_metrics(
    frame: &SemanticFrame,
    cue_scores: &ScoreSample,
    emolex: &EmotionLexicon,
    weighting: Weighting,
) -> FrameMetrics {
    let (fractions, totals) = weighted_fractions(frame.associates.iter(), weighting);
    let non_emotional: Vec<&FrameAssociate> = frame
        .associates
        .iter()
        .filter(|a| is_non_emotional(a, emolex))
        .collect();
    let weight = |a: &FrameAssociate| match weighting {
        Weighting::Unique => 1.0,
        Weighting::Multiplicity => a.multiplicity as f64,
    };
    let total_weight: f64 = frame.associates.iter().map(weight).sum();
    let ne_weight: f64 = non_emotional.iter().map(|a| weight(a)).sum();
    let (non_emotional_fractions, _) = weighted_fractions(non_emotional.into_iter(), weighting);

    FrameMetrics {
        cue: frame.cue_display.clone(),
        frame_size: frame.associates.len(),
        estimated_valence: cue_scores.estimate(),
        cue_label: frame.cue_label,
        frame_aura: aura(totals),
        fractions,
        non_emotional_fraction: if total_weight > 0.0 { ne_weight / total_weight } else { 0.0 },
        non_emotional_fractions,
        weighting,
    }
}

/// One bar of the per-cue fraction chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionRow {
    pub cue: String,
    /// The cue's own label, used to color the bar caption.
    pub cue_label: ValenceLabel,
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
    pub empty: bool,
}

pub fn fraction_chart_data(metrics: &[FrameMetrics]) -> Vec<FractionRow> {
    metrics
        .iter()
        .map(|m| FractionRow {
            cue: m.cue.clone(),
            cue_label: m.cue_label,
            positive: m.fractions.positive,
            negative: m.fractions.negative,
            neutral: m.fractions.neutral,
            empty: m.is_empty(),
        })
        .collect()
}

pub fn fraction_rows_csv(rows: &[FractionRow]) -> String {
    let mut out = String::from("cue,cue_label,positive,negative,neutral,empty\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.4},{:.4},{}",
            r.cue, r.cue_label, r.positive, r.negative, r.neutral, r.empty
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub corpus_id: String,
    pub metrics: FrameMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

const COLUMNS: [&str; 14] = [
    "corpus_id",
    "cue",
    "frame_size",
    "estimated_valence",
    "valence_std_error",
    "cue_label",
    "frame_aura",
    "positive",
    "neutral",
    "negative",
    "non_emotional",
    "non_emotional_positive",
    "non_emotional_neutral",
    "non_emotional_negative",
];

impl ComparisonTable {
    fn cells(&self) -> Vec<Vec<String>> {
        let f = |x: f64| format!("{x:.4}");
        self.rows
            .iter()
            .map(|r| {
                let m = &r.metrics;
                let (mean, se) = m
                    .estimated_valence
                    .map(|e| (f(e.mean), f(e.std_error)))
                    .unwrap_or_default();
                vec![
                    r.corpus_id.clone(),
                    m.cue.clone(),
                    m.frame_size.to_string(),
                    mean,
                    se,
                    m.cue_label.to_string(),
                    m.frame_aura.as_str().to_string(),
                    f(m.fractions.positive),
                    f(m.fractions.neutral),
                    f(m.fractions.negative),
                    f(m.non_emotional_fraction),
                    f(m.non_emotional_fractions.positive),
                    f(m.non_emotional_fractions.neutral),
                    f(m.non_emotional_fractions.negative),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for row in self.cells() {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("| {} |\n", COLUMNS.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(COLUMNS.len()));
        for row in self.cells() {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }
}

/// Rows in input order; a (corpus, cue) pair may appear only once.
pub fn compare(rows: Vec<(String, FrameMetrics)>) -> Result<ComparisonTable, MetricsError> {
    if rows.is_empty() {
        return Err(MetricsError::NoCorpora);
    }
    let mut seen = BTreeSet::new();
    for (id, m) in &rows {
        if !seen.insert((id.clone(), m.cue.clone())) {
            return Err(MetricsError::DuplicateCorpusId {
                corpus_id: id.clone(),
                cue: m.cue.clone(),
            });
        }
    }
    Ok(ComparisonTable {
        rows: rows
            .into_iter()
            .map(|(corpus_id, metrics)| ComparisonRow { corpus_id, metrics })
            .collect(),
    })
}
