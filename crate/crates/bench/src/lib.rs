//! Shared inputs for the pipeline benchmarks: the desk-scale fixture
//! replayed into a normalized, labeled network.

use std::path::{Path, PathBuf};

use bfmn_core::network::build_bfmn;
use bfmn_core::normalize::normalize_corpus;
use bfmn_core::probe::collect_corpus;
use bfmn_core::valence::label_corpus;
use bfmn_core::{
    Bfmn, Corpus, CueWord, LabeledLexicon, ProbeConfig, SignificanceConfig, TransportMode, VadLexicon,
    Wordlist,
};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/desk")
}

/// The ten default cues, 159 replies each, before normalization.
pub fn raw_corpus() -> Corpus {
    let config = ProbeConfig {
        model_id: "desk".into(),
        transport_mode: TransportMode::Replay,
        transcript: Some(fixture_dir().join("transcript.jsonl")),
        ..ProbeConfig::default()
    };
    collect_corpus(&config, &CueWord::defaults()).expect("desk fixture replays").0
}

pub struct Prepared {
    pub corpus: Corpus,
    pub lexicon: LabeledLexicon,
    pub bfmn: Bfmn,
    pub vad: VadLexicon,
}

pub fn prepared() -> Prepared {
    let corpus = normalize_corpus(&raw_corpus(), Wordlist::bundled()).0;
    let lexicon = label_corpus(&corpus, &SignificanceConfig::default()).expect("labels");
    let bfmn = build_bfmn(&corpus, &lexicon).expect("network");
    let vad = bfmn_core::affect::load_vad(&fixture_dir().join("vad.tsv")).expect("vad lexicon");
    Prepared { corpus, lexicon, bfmn, vad }
}
