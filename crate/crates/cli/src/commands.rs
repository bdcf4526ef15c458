use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use bfmn_core::affect::{self, circumplex_points, kde_density, CircumplexReport};
use bfmn_core::metrics::{compare, fraction_chart_data, fraction_rows_csv, frame_metrics, ComparisonTable};
use bfmn_core::network::{build_bfmn, export, frame};
use bfmn_core::normalize::{normalize_corpus, Wordlist};
use bfmn_core::probe::{collect_corpus, ProbeConfig, TransportMode};
use bfmn_core::report::{render_circumplex_svg, render_fraction_bars_svg, render_star_svg, RenderSpec};
use bfmn_core::valence::{label_corpus, Pooling, ScoreSample, SignificanceConfig};
use bfmn_core::{Bfmn, Corpus, CueWord, EmotionLexicon, LabeledLexicon, Weighting};

use crate::config::ConfigFile;
use crate::files::{read_json, to_json, write_output, FrameFile, MetricsFile};
use crate::*;

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Probe(a) => probe(a, &config),
        Command::Normalize(a) => normalize(a, &config),
        Command::Label(a) => label(a, &config),
        Command::Frame(a) => frames(a),
        Command::Metrics(a) => metrics(a, &config),
        Command::Compare(a) => compare_cmd(a),
        Command::Circumplex(a) => circumplex(a, &config),
        Command::Render(a) => render(a),
        Command::Export(a) => export_cmd(a),
    }
}

fn parse_cues(spec: &str) -> Result<Vec<CueWord>> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).with_context(|| format!("reading cues from {spec}"))?
    } else {
        spec.to_string()
    };
    let cues = text
        .split([',', '\n'])
        .map(str::trim)
        .filter(|c| !c.is_empty() && !c.starts_with('#'))
        .map(|c| CueWord::new(c).map_err(|e| UsageError(format!("cue {c:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if cues.is_empty() {
        return Err(UsageError("no cues given".into()).into());
    }
    Ok(cues)
}

fn probe(a: ProbeArgs, cfg: &ConfigFile) -> Result<()> {
    let defaults = ProbeConfig::default();
    let mode = match cfg.resolve_opt(a.mode.map(mode_name), "mode")? {
        Some(m) => m.parse::<TransportMode>().map_err(UsageError)?,
        None => TransportMode::Live,
    };
    let transcript: Option<PathBuf> = cfg.resolve_opt(a.transcript, "transcript")?;
    if mode == TransportMode::Replay {
        match &transcript {
            Some(p) => require_file(p)?,
            None => return Err(UsageError("--mode replay requires --transcript".into()).into()),
        }
    }
    if mode == TransportMode::Record && transcript.is_none() {
        return Err(UsageError("--mode record requires --transcript".into()).into());
    }
    let cues = match cfg.resolve_opt(a.cues, "cues")? {
        Some(spec) => parse_cues(&spec)?,
        None => CueWord::defaults(),
    };
    let config = ProbeConfig {
        endpoint_url: cfg.resolve(a.endpoint, "endpoint", defaults.endpoint_url)?,
        model_id: cfg.resolve(a.model, "model", defaults.model_id)?,
        temperature: cfg.resolve(a.temperature, "temperature", defaults.temperature)?,
        target_responses_per_cue: cfg.resolve(a.n, "n", defaults.target_responses_per_cue)?,
        max_attempts: cfg.resolve(a.max_attempts, "max-attempts", defaults.max_attempts)?,
        rate_limit: cfg.resolve_opt(a.rate_limit, "rate-limit")?,
        transport_mode: mode,
        transcript,
        api_key: cfg.resolve_opt(a.api_key, "api-key")?,
        cue_rating_samples: cfg.resolve(a.cue_rating_samples, "cue-rating-samples", 1)?,
        in_flight: cfg.resolve(a.in_flight, "in-flight", 1)?,
        retry_base_delay: defaults.retry_base_delay,
        request_timeout: Duration::from_secs(cfg.resolve(None, "timeout-secs", 60)?),
        seed: cfg.resolve_opt(a.seed, "seed")?,
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;

    let (corpus, stats) = collect_corpus(&config, &cues)?;
    let totals = stats.totals();
    log::info!(
        "{} records accepted, discard rate {:.2}%",
        totals.accepted,
        100.0 * stats.discard_rate()
    );
    write_output(a.out.as_deref(), &corpus.to_json())?;
    if let Some(path) = a.stats {
        write_output(Some(&path), &to_json(&stats))?;
    }
    Ok(())
}

fn mode_name(m: Mode) -> String {
    match m {
        Mode::Live => "live",
        Mode::Record => "record",
        Mode::Replay => "replay",
    }
    .to_string()
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    require_file(path)?;
    read_json(path)
}

fn read_normalized(path: &Path) -> Result<Corpus> {
    let corpus = read_corpus(path)?;
    if !corpus.normalized {
        bail!("{} is not normalized; run `bfmn normalize` first", path.display());
    }
    Ok(corpus)
}

fn read_labels(path: &Path) -> Result<LabeledLexicon> {
    require_file(path)?;
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    LabeledLexicon::read_csv(file).with_context(|| format!("reading labels {}", path.display()))
}

fn normalize(a: NormalizeArgs, cfg: &ConfigFile) -> Result<()> {
    let corpus = read_corpus(&a.input)?;
    let wordlist_path: Option<PathBuf> = cfg.resolve_opt(a.wordlist, "wordlist")?;
    let custom;
    let wordlist = match &wordlist_path {
        Some(p) => {
            require_file(p)?;
            custom = Wordlist::from_path(p)?;
            &custom
        }
        None => Wordlist::bundled(),
    };
    let (normalized, report) = normalize_corpus(&corpus, wordlist);
    log::info!(
        "{} corrections, {} merges, {} records dropped",
        report.corrections,
        report.merges,
        report.dropped_records.len()
    );
    write_output(a.out.as_deref(), &normalized.to_json())?;
    if let Some(path) = a.report {
        write_output(Some(&path), &to_json(&report))?;
    }
    Ok(())
}

fn label(a: LabelArgs, cfg: &ConfigFile) -> Result<()> {
    let corpus = read_normalized(&a.input)?;
    let alpha = cfg.resolve(a.alpha, "alpha", 0.1)?;
    let pooling = match a.pooling {
        Some(PoolingArg::Complement) => Pooling::Complement,
        Some(PoolingArg::Full) => Pooling::Full,
        None => match cfg.get::<String>("pooling")? {
            Some(p) => p.parse().map_err(UsageError)?,
            None => Pooling::default(),
        },
    };
    let sig = SignificanceConfig::new(alpha, pooling).map_err(|e| UsageError(e.to_string()))?;
    let lexicon = label_corpus(&corpus, &sig)?;
    write_output(a.out.as_deref(), &lexicon.to_csv_string())
}

fn network(corpus_path: &Path, labels_path: &Path) -> Result<(Corpus, Bfmn)> {
    let corpus = read_normalized(corpus_path)?;
    let lexicon = read_labels(labels_path)?;
    let bfmn = build_bfmn(&corpus, &lexicon)?;
    Ok((corpus, bfmn))
}

fn frame_file(corpus: &Corpus, bfmn: &Bfmn, cue: &CueWord) -> Result<FrameFile> {
    let frame = frame(bfmn, cue)?;
    let cue_ratings = corpus
        .cue_ratings
        .iter()
        .filter(|r| &r.cue == cue)
        .map(|r| r.score)
        .collect();
    Ok(FrameFile { frame, cue_ratings })
}

fn frames(a: FrameArgs) -> Result<()> {
    let (corpus, bfmn) = network(&a.corpus, &a.labels)?;
    if let Some(cue) = a.cue {
        let cue = CueWord::new(&cue).map_err(|e| UsageError(e.to_string()))?;
        return write_output(a.out.as_deref(), &to_json(&frame_file(&corpus, &bfmn, &cue)?));
    }
    let dir = a.out_dir.expect("clap requires --cue or --out-dir");
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, cue) in corpus.cues().iter().enumerate() {
        let path = dir.join(format!("{i:02}-{cue}.frame.json"));
        write_output(Some(&path), &to_json(&frame_file(&corpus, &bfmn, cue)?))?;
    }
    Ok(())
}

fn load_emolex(given: Option<PathBuf>, cfg: &ConfigFile) -> Result<EmotionLexicon> {
    match cfg.resolve_opt(given, "emolex")? {
        Some(p) => {
            require_file(&p)?;
            Ok(affect::load_emolex(&p)?)
        }
        None => {
            log::warn!("no emotion lexicon given; every associate counts as non-emotional");
            Ok(EmotionLexicon::default())
        }
    }
}

/// Frame files in a directory, sorted by file name, or a single file.
fn frame_paths(path: &Path) -> Result<Vec<PathBuf>> {
    require_file(path)?;
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(UsageError(format!("no .json frame files in {}", path.display())).into());
    }
    Ok(paths)
}

fn metrics(a: MetricsArgs, cfg: &ConfigFile) -> Result<()> {
    let emolex = load_emolex(a.emolex, cfg)?;
    let weighting = if a.weighted || cfg.get::<bool>("weighted")?.unwrap_or(false) {
        Weighting::Multiplicity
    } else {
        Weighting::Unique
    };
    let mut all = Vec::new();
    for path in frame_paths(&a.frames)? {
        let file: FrameFile = read_json(&path)?;
        let cue_scores = ScoreSample {
            stem: file.frame.cue_stem.clone(),
            scores: file.cue_ratings.clone(),
        };
        all.push(frame_metrics(&file.frame, &cue_scores, &emolex, weighting));
    }
    let corpus_id = cfg.resolve(a.corpus_id, "corpus-id", "corpus".to_string())?;
    if let Some(path) = a.fractions {
        write_output(Some(&path), &fraction_rows_csv(&fraction_chart_data(&all)))?;
    }
    let format = a.format.unwrap_or(TableFormat::Csv);
    let doc = MetricsFile {
        corpus_id: corpus_id.clone(),
        weighting,
        metrics: all,
    };
    if format == TableFormat::Json {
        return write_output(a.out.as_deref(), &to_json(&doc));
    }
    let table = compare(doc.metrics.into_iter().map(|m| (corpus_id.clone(), m)).collect())?;
    write_table(&table, format, a.out.as_deref())
}

fn write_table(table: &ComparisonTable, format: TableFormat, out: Option<&Path>) -> Result<()> {
    let text = match format {
        TableFormat::Csv => table.to_csv(),
        TableFormat::Markdown => table.to_markdown(),
        TableFormat::Json => to_json(table),
    };
    write_output(out, &text)
}

fn compare_cmd(a: CompareArgs) -> Result<()> {
    let mut rows = Vec::new();
    for path in &a.inputs {
        require_file(path)?;
        let doc: MetricsFile = read_json(path)?;
        rows.extend(doc.metrics.into_iter().map(|m| (doc.corpus_id.clone(), m)));
    }
    let table = compare(rows)?;
    write_table(&table, a.format.unwrap_or(TableFormat::Csv), a.out.as_deref())
}

fn circumplex(a: CircumplexArgs, cfg: &ConfigFile) -> Result<()> {
    require_file(&a.frame)?;
    let vad_path: PathBuf = cfg
        .resolve_opt(a.vad, "vad")?
        .ok_or_else(|| UsageError("--vad is required".into()))?;
    require_file(&vad_path)?;
    let grid_n = cfg.resolve(a.grid, "grid", 100usize)?;
    if grid_n == 0 {
        return Err(UsageError("--grid must be positive".into()).into());
    }
    let bandwidth = cfg.resolve_opt(a.bandwidth, "bandwidth")?;
    let file: FrameFile = read_json(&a.frame)?;
    let vad = affect::load_vad(&vad_path)?;
    let (points, coverage) = circumplex_points(&file.frame, &vad);
    log::info!("VAD coverage {}/{}", coverage.found, coverage.total);
    let grid = kde_density(&points, grid_n, bandwidth)?;
    if let Some(path) = a.csv {
        write_output(Some(&path), &grid.to_csv())?;
    }
    let report = CircumplexReport::new(&file.frame.cue_display, points, coverage, grid);
    write_output(a.out.as_deref(), &to_json(&report))
}

fn render(a: RenderArgs) -> Result<()> {
    let svg = if let Some(path) = &a.frame {
        require_file(path)?;
        let file: FrameFile = read_json(path)?;
        let bfmn = match &a.graph {
            Some(g) => {
                require_file(g)?;
                export::from_json(&std::fs::read_to_string(g)?)?
            }
            None => Bfmn::default(),
        };
        render_star_svg(&file.frame, &bfmn, &RenderSpec::default())?
    } else if let Some(path) = &a.density {
        require_file(path)?;
        let report: CircumplexReport = read_json(path)?;
        render_circumplex_svg(&report.grid, a.points.then_some(report.points.as_slice()))
    } else {
        let path = a.metrics.as_ref().expect("clap requires one figure input");
        require_file(path)?;
        let doc: MetricsFile = read_json(path)?;
        render_fraction_bars_svg(&fraction_chart_data(&doc.metrics))
    };
    write_output(a.out.as_deref(), &svg)
}

fn export_cmd(a: ExportArgs) -> Result<()> {
    let (_, bfmn) = network(&a.corpus, &a.labels)?;
    let text = match a.format {
        GraphFormat::Graphml => export::to_graphml(&bfmn),
        GraphFormat::Dot => export::to_dot(&bfmn),
        GraphFormat::Json => export::to_json(&bfmn),
    };
    write_output(a.out.as_deref(), &text)
}
