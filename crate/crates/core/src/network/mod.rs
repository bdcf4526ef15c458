//! Behavioral forma mentis network: cues linked to each of their responses,
//! nodes enriched with valence labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::stem;
use crate::types::{Corpus, CueWord, MeanEstimate, ValenceLabel};
use crate::valence::{score_samples, LabeledLexicon};

pub mod export;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("no valence label for stem {stem:?}")]
    MissingLabel { stem: String },
    #[error("cue {0:?} is not a node of the network")]
    UnknownCue(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub stem: String,
    pub display_form: String,
    pub label: ValenceLabel,
    /// Appearances in records, as cue or as associate.
    pub occurrence_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valence: Option<MeanEstimate>,
}

/// An association between a cue (the `cue_stem` side) and one of its responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub cue_stem: String,
    pub associate_stem: String,
    pub multiplicity: u64,
    pub idiosyncratic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    NegativeNegative,
    PositivePositive,
    Conflicting,
    NeutralTouching,
}

impl EdgeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::NegativeNegative => "negative_negative",
            EdgeClass::PositivePositive => "positive_positive",
            EdgeClass::Conflicting => "conflicting",
            EdgeClass::NeutralTouching => "neutral_touching",
        }
    }
}

pub fn classify_edge(a: ValenceLabel, b: ValenceLabel) -> EdgeClass {
    use ValenceLabel::*;
    match (a, b) {
        (Negative, Negative) => EdgeClass::NegativeNegative,
        (Positive, Positive) => EdgeClass::PositivePositive,
        (Positive, Negative) | (Negative, Positive) => EdgeClass::Conflicting,
        _ => EdgeClass::NeutralTouching,
    }
}

/// Undirected association graph; every edge remembers which endpoint was the
/// cue. Keyed containers keep iteration order independent of record order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bfmn {
    pub nodes: BTreeMap<String, Node>,
    #[serde(with = "edge_list")]
    pub edges: BTreeMap<(String, String), Edge>,
}

mod edge_list {
    use super::Edge;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        edges: &BTreeMap<(String, String), Edge>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        edges.values().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(String, String), Edge>, D::Error> {
        let list = Vec::<Edge>::deserialize(d)?;
        Ok(list
            .into_iter()
            .map(|e| ((e.cue_stem.clone(), e.associate_stem.clone()), e))
            .collect())
    }
}

/// Multiset of (cue stem, associate stem) pairs; merging is associative and
/// commutative, so partial counts over record chunks can be combined freely.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub pairs: BTreeMap<(String, String), u64>,
    pub occurrences: BTreeMap<String, u64>,
}

impl EdgeCounts {
    pub fn from_records(records: &[crate::types::ResponseRecord]) -> Self {
        let mut counts = EdgeCounts::default();
        for rec in records {
            let cue = stem(rec.cue.as_str());
            *counts.occurrences.entry(cue.clone()).or_default() += 1;
            for assoc in &rec.associates {
                *counts
                    .pairs
                    .entry((cue.clone(), assoc.token.clone()))
                    .or_default() += 1;
                *counts.occurrences.entry(assoc.token.clone()).or_default() += 1;
            }
        }
        counts
    }

    pub fn merge(mut self, other: EdgeCounts) -> Self {
        for (k, v) in other.pairs {
            *self.pairs.entry(k).or_default() += v;
        }
        for (k, v) in other.occurrences {
            *self.occurrences.entry(k).or_default() += v;
        }
        self
    }
}

/// Link every cue to each of its three responses. Multiplicity counts
/// associate slots, so the multiplicities always sum to three per record.
pub fn build_bfmn(corpus: &Corpus, lexicon: &LabeledLexicon) -> Result<Bfmn, NetworkError> {
    let counts = EdgeCounts::from_records(&corpus.records);
    let samples = score_samples(corpus);

    let mut nodes = BTreeMap::new();
    let mut node_for = |stem: &str, count: u64| -> Result<(), NetworkError> {
        if nodes.contains_key(stem) {
            return Ok(());
        }
        let label = lexicon.label(stem).ok_or_else(|| NetworkError::MissingLabel {
            stem: stem.to_string(),
        })?;
        nodes.insert(
            stem.to_string(),
            Node {
                stem: stem.to_string(),
                display_form: corpus.display_form(stem).to_string(),
                label,
                occurrence_count: count,
                valence: samples.get(stem).and_then(|s| s.estimate()),
            },
        );
        Ok(())
    };

    for (stem_key, &count) in &counts.occurrences {
        node_for(stem_key, count)?;
    }
    // Cues that were rated but never answered still get a node.
    for cue in corpus.cues() {
        let s = stem(cue.as_str());
        if lexicon.label(&s).is_some() {
            node_for(&s, 0)?;
        }
    }

    let edges = counts
        .pairs
        .into_iter()
        .map(|((cue, assoc), multiplicity)| {
            (
                (cue.clone(), assoc.clone()),
                Edge {
                    cue_stem: cue,
                    associate_stem: assoc,
                    multiplicity,
                    idiosyncratic: multiplicity == 1,
                },
            )
        })
        .collect();
    Ok(Bfmn { nodes, edges })
}

impl Bfmn {
    pub fn total_multiplicity(&self) -> u64 {
        self.edges.values().map(|e| e.multiplicity).sum()
    }

    pub fn edge_class(&self, edge: &Edge) -> EdgeClass {
        let label = |s: &str| {
            self.nodes
                .get(s)
                .map(|n| n.label)
                .unwrap_or(ValenceLabel::Neutral)
        };
        classify_edge(label(&edge.cue_stem), label(&edge.associate_stem))
    }

    /// Edges with both endpoints in `stems`, regardless of cue side.
    pub fn edges_within<'a>(&'a self, stems: &'a [&str]) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.values().filter(move |e| {
            stems.contains(&e.cue_stem.as_str()) && stems.contains(&e.associate_stem.as_str())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAssociate {
    pub stem: String,
    pub display_form: String,
    pub label: ValenceLabel,
    pub multiplicity: u64,
    pub idiosyncratic: bool,
}

/// The neighborhood of a cue: every response given to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticFrame {
    pub cue_stem: String,
    pub cue_display: String,
    pub cue_label: ValenceLabel,
    pub cue_mean_valence: Option<MeanEstimate>,
    /// Multiplicity descending, then stem ascending.
    pub associates: Vec<FrameAssociate>,
}

impl SemanticFrame {
    pub fn size(&self) -> usize {
        self.associates.len()
    }
}

pub fn frame(bfmn: &Bfmn, cue: &CueWord) -> Result<SemanticFrame, NetworkError> {
    let cue_stem = stem(cue.as_str());
    let cue_node = bfmn
        .nodes
        .get(&cue_stem)
        .ok_or_else(|| NetworkError::UnknownCue(cue.to_string()))?;

    let mut associates: Vec<FrameAssociate> = bfmn
        .edges
        .range((cue_stem.clone(), String::new())..)
        .take_while(|((c, _), _)| *c == cue_stem)
        .map(|(_, e)| {
            let node = &bfmn.nodes[&e.associate_stem];
            FrameAssociate {
                stem: e.associate_stem.clone(),
                display_form: node.display_form.clone(),
                label: node.label,
                multiplicity: e.multiplicity,
                idiosyncratic: e.idiosyncratic,
            }
        })
        .collect();
    associates.sort_by(|a, b| b.multiplicity.cmp(&a.multiplicity).then_with(|| a.stem.cmp(&b.stem)));

    Ok(SemanticFrame {
        cue_stem,
        cue_display: cue_node.display_form.clone(),
        cue_label: cue_node.label,
        cue_mean_valence: cue_node.valence,
        associates,
    })
}
