//! File formats passed between subcommands.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use bfmn_core::network::SemanticFrame;
use bfmn_core::{FrameMetrics, ValenceScore, Weighting};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// A semantic frame together with the cue's own ratings, so that frame
/// measurements need nothing but this file and an emotion lexicon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub frame: SemanticFrame,
    pub cue_ratings: Vec<ValenceScore>,
}

/// Frame measurements of one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub corpus_id: String,
    pub weighting: Weighting,
    pub metrics: Vec<FrameMetrics>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Write to `path`, or to standard output when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
