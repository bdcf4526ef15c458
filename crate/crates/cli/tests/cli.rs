//! End-to-end runs of the `bfmn` binary: exit codes, file hand-offs and
//! settings precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn bfmn(args: &[&str]) -> Output {
    bfmn_env(args, &[])
}

fn bfmn_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bfmn"));
    for var in ["BFMN_CONFIG", "BFMN_ALPHA", "BFMN_EMOLEX", "BFMN_VAD", "BFMN_WORDLIST", "BFMN_GRID"] {
        cmd.env_remove(var);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Replay and normalize the desk fixture into `dir`, returning the corpus path.
fn desk_corpus(dir: &Path) -> PathBuf {
    let raw = dir.join("raw.json");
    let norm = dir.join("corpus.json");
    let out = bfmn(&[
        "probe", "--mode", "replay", "--transcript", s(&fixture("desk/transcript.jsonl")),
        "--model", "desk", "--out", s(&raw), "--stats", s(&dir.join("stats.json")),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = bfmn(&["normalize", "--in", s(&raw), "--out", s(&norm)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    norm
}

#[test]
fn full_pipeline_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let corpus = desk_corpus(d);
    let labels = d.join("labels.csv");
    let frames = d.join("frames");
    let run = |args: &[&str]| {
        let out = bfmn(args);
        assert_eq!(code(&out), 0, "bfmn {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    };
    run(&["label", "--in", s(&corpus), "--out", s(&labels)]);
    run(&["frame", "--corpus", s(&corpus), "--labels", s(&labels), "--out-dir", s(&frames)]);
    let emolex = fixture("desk/emolex.tsv");
    let metrics = d.join("metrics.json");
    run(&[
        "metrics", "--frames", s(&frames), "--emolex", s(&emolex), "--format", "json",
        "--corpus-id", "desk", "--out", s(&metrics), "--fractions", s(&d.join("fractions.csv")),
    ]);
    let weighted = d.join("weighted.json");
    run(&[
        "metrics", "--frames", s(&frames), "--emolex", s(&emolex), "--format", "json",
        "--corpus-id", "desk-weighted", "--weighted", "--out", s(&weighted),
    ]);
    run(&["compare", "--inputs", s(&metrics), s(&weighted), "--format", "markdown", "--out", s(&d.join("compare.md"))]);
    let school = std::fs::read_dir(&frames)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("-school.frame.json"))
        .expect("a frame file per cue");
    let density = d.join("school.density.json");
    run(&["circumplex", "--frame", s(&school), "--vad", s(&fixture("desk/vad.tsv")), "--out", s(&density)]);
    let graph = d.join("graph.json");
    run(&["export", "--corpus", s(&corpus), "--labels", s(&labels), "--format", "json", "--out", s(&graph)]);
    run(&["render", "--frame", s(&school), "--graph", s(&graph), "--out", s(&d.join("star.svg"))]);
    run(&["render", "--density", s(&density), "--points", "--out", s(&d.join("density.svg"))]);
    run(&["render", "--metrics", s(&metrics), "--out", s(&d.join("bars.svg"))]);

    assert_eq!(std::fs::read_dir(&frames).unwrap().count(), 10);
    for svg in ["star.svg", "density.svg", "bars.svg"] {
        let text = std::fs::read_to_string(d.join(svg)).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"), "{svg}");
    }
    let table = std::fs::read_to_string(d.join("compare.md")).unwrap();
    assert!(table.contains("school") && table.contains("desk-weighted"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bfmn(&["label", "--no-such-flag"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_input_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bfmn(&["label", "--in", s(&tmp.path().join("absent.json"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not exist"));
}

#[test]
fn unknown_cue_is_a_pipeline_error() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = desk_corpus(tmp.path());
    let labels = tmp.path().join("labels.csv");
    assert_eq!(code(&bfmn(&["label", "--in", s(&corpus), "--out", s(&labels)])), 0);
    let out = bfmn(&["frame", "--corpus", s(&corpus), "--labels", s(&labels), "--cue", "notacue"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("notacue"));
}

#[test]
fn help_exits_zero() {
    let out = bfmn(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("probe"));
}

#[test]
fn flag_beats_environment_beats_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = desk_corpus(tmp.path());
    let config = tmp.path().join("config.json");
    std::fs::write(&config, r#"{"alpha": 1e-12}"#).unwrap();
    let labels_with = |args: &[&str], env: &[(&str, &str)]| {
        let mut full = vec!["--config", s(&config), "label", "--in", s(&corpus)];
        full.extend_from_slice(args);
        let out = bfmn_env(&full, env);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let non_neutral = |csv: &str| csv.lines().filter(|l| l.contains(",positive,") || l.contains(",negative,")).count();

    // The config file alone: nothing is significant at such a strict level.
    let from_config = labels_with(&[], &[]);
    assert_eq!(non_neutral(&from_config), 0);
    // The environment overrides the file.
    let from_env = labels_with(&[], &[("BFMN_ALPHA", "0.1")]);
    assert!(non_neutral(&from_env) > 0);
    // The flag overrides both.
    let from_flag = labels_with(&["--alpha", "1e-12"], &[("BFMN_ALPHA", "0.1")]);
    assert_eq!(from_flag, from_config);
}

#[test]
fn invalid_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    std::fs::write(&config, "[1, 2]").unwrap();
    let corpus = desk_corpus(tmp.path());
    let out = bfmn(&["--config", s(&config), "label", "--in", s(&corpus)]);
    assert_eq!(code(&out), 2);
}
