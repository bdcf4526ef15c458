//! Behavioral forma mentis network analysis of language-model word associations.
//!
//! The pipeline runs in stages, each a module:
//!
//! * [`probe`] asks a model for three associates of a cue plus ratings, and
//!   parses, filters and persists the replies;
//! * [`normalize`] cleans, spell-corrects and stems associate tokens;
//! * [`valence`] labels every stem negative, neutral or positive with a
//!   Kruskal-Wallis test against the pooled rating distribution;
//! * [`network`] links cues to their associates and extracts semantic frames;
//! * [`affect`] maps frames onto the valence-arousal plane and estimates a density;
//! * [`metrics`] summarizes frames into comparable measures;
//! * [`report`] renders frames, densities and fraction charts as SVG.

pub mod affect;
pub mod metrics;
pub mod network;
pub mod normalize;
pub mod probe;
pub mod report;
pub mod types;
pub mod valence;

pub use affect::{CircumplexPoint, CircumplexReport, DensityGrid, EmotionLexicon, VadLexicon};
pub use metrics::{ComparisonTable, FrameAura, FrameMetrics, Weighting};
pub use network::{Bfmn, Edge, EdgeClass, Node, SemanticFrame};
pub use normalize::{NormalizationReport, Wordlist};
pub use probe::{CampaignStats, ProbeConfig, TransportMode};
pub use report::RenderSpec;
pub use types::{
    Associate, Corpus, CorpusMetadata, CueRating, CueWord, MeanEstimate, ResponseRecord,
    ValenceLabel, ValenceScore, DEFAULT_CUES,
};
pub use valence::{LabeledLexicon, Pooling, SignificanceConfig};
