//! The `bfmn` command line: one subcommand per pipeline stage, each reading
//! the previous stage's files and writing its own.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod config;
pub mod files;

pub use files::{FrameFile, MetricsFile};

/// Bad invocation: unknown flags, invalid values, or missing input files.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: i32 = 0;
pub const EXIT_PIPELINE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bfmn", version, about = "Valence-labeled association networks from language-model probes")]
pub struct Cli {
    /// JSON file with default settings (overridden by environment and flags).
    #[arg(long, global = true, env = "BFMN_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collect association replies from a model endpoint or a transcript.
    Probe(ProbeArgs),
    /// Clean, spell-correct and stem associate tokens.
    Normalize(NormalizeArgs),
    /// Assign valence labels to every stem.
    Label(LabelArgs),
    /// Extract the semantic frame of a cue.
    Frame(FrameArgs),
    /// Compute frame measurements for a set of frames.
    Metrics(MetricsArgs),
    /// Merge metrics from several corpora into one comparison table.
    Compare(CompareArgs),
    /// Estimate the valence-arousal density of a frame.
    Circumplex(CircumplexArgs),
    /// Draw a frame, a density, or a fraction chart as SVG.
    Render(RenderArgs),
    /// Write the labeled network as GraphML, DOT or JSON.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Live,
    Record,
    Replay,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, env = "BFMN_ENDPOINT")]
    pub endpoint: Option<String>,
    #[arg(long, env = "BFMN_MODEL")]
    pub model: Option<String>,
    /// A file with one cue per line, or a comma-separated list.
    #[arg(long)]
    pub cues: Option<String>,
    /// Accepted replies wanted per cue.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, env = "BFMN_TEMPERATURE")]
    pub temperature: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Campaign statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long)]
    pub max_attempts: Option<u32>,
    /// Requests per second.
    #[arg(long)]
    pub rate_limit: Option<f64>,
    #[arg(long)]
    pub in_flight: Option<usize>,
    #[arg(long)]
    pub cue_rating_samples: Option<u32>,
    #[arg(long, env = "LLM_API_KEY", hide_env_values = true)]
    pub api_key: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Word list, one word per line with an optional tab-separated rank.
    #[arg(long, env = "BFMN_WORDLIST")]
    pub wordlist: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoolingArg {
    Complement,
    Full,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, env = "BFMN_ALPHA")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub pooling: Option<PoolingArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Cue to extract; without it every cue is written to --out-dir.
    #[arg(long, required_unless_present = "out_dir")]
    pub cue: Option<String>,
    #[arg(long, conflicts_with = "out_dir")]
    pub out: Option<PathBuf>,
    #[arg(long, conflicts_with = "cue")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// A directory of frame files, or a single frame file.
    #[arg(long)]
    pub frames: PathBuf,
    #[arg(long, env = "BFMN_EMOLEX")]
    pub emolex: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
    /// Weight fractions by edge multiplicity instead of counting unique associates.
    #[arg(long)]
    pub weighted: bool,
    /// Identifier of the corpus in comparison tables.
    #[arg(long)]
    pub corpus_id: Option<String>,
    /// Per-cue fraction chart data as CSV.
    #[arg(long)]
    pub fractions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Metrics files written with `metrics --format json`.
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct CircumplexArgs {
    #[arg(long)]
    pub frame: PathBuf,
    #[arg(long, env = "BFMN_VAD")]
    pub vad: Option<PathBuf>,
    /// Cells per axis.
    #[arg(long, env = "BFMN_GRID")]
    pub grid: Option<usize>,
    /// Fixed kernel bandwidth "valence,arousal" instead of Silverman's rule.
    #[arg(long, value_parser = parse_pair)]
    pub bandwidth: Option<(f64, f64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// The grid alone as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("figure").required(true).args(["frame", "density", "metrics"])))]
pub struct RenderArgs {
    /// Star layout of a frame file.
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// Network JSON (from `export --format json`) for edges among associates.
    #[arg(long, requires = "frame")]
    pub graph: Option<PathBuf>,
    /// Heatmap of a circumplex density file.
    #[arg(long)]
    pub density: Option<PathBuf>,
    /// Stacked fraction bars of a metrics file.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Overlay the density's points.
    #[arg(long, requires = "density")]
    pub points: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Graphml,
    Dot,
    Json,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum, default_value = "graphml")]
    pub format: GraphFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated numbers")?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok((parse(a)?, parse(b)?))
}

pub(crate) fn require_file(path: &Path) -> Result<(), UsageError> {
    if path.exists() {
        Ok(())
    } else {
        Err(UsageError(format!("input {} does not exist", path.display())))
    }
}

/// Parse `argv` (program name first), run the pipeline stage and return the
/// process exit status. Diagnostics go to standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            if let Some(usage) = err.downcast_ref::<UsageError>() {
                eprintln!("error: {usage}");
                EXIT_USAGE
            } else {
                eprintln!("error: {err:#}");
                EXIT_PIPELINE
            }
        }
    }
}
