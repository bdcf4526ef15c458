//! Valence-arousal circumplex for semantic frames.
//!
//! Frame associates are placed in the unit square using a VAD lexicon, then
//! smoothed into a density grid with a weighted Gaussian kernel.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::SemanticFrame;
use crate::normalize::stem;

#[derive(Debug, Error)]
pub enum AffectError {
    #[error("reading {path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("density estimation needs at least one point")]
    NoPoints,
    #[error("grid size must be positive")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vad {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

/// Word lookups that fall back to stem-matching when the surface form is
/// missing. When several keys share a stem the shortest (then
/// lexicographically first) one wins.
#[derive(Debug, Clone, Default)]
pub struct StemIndexed<T> {
    entries: BTreeMap<String, T>,
    by_stem: BTreeMap<String, String>,
}

impl<T> StemIndexed<T> {
    fn from_entries(entries: BTreeMap<String, T>) -> Self {
        let mut by_stem: BTreeMap<String, String> = BTreeMap::new();
        for key in entries.keys() {
            let s = stem(key);
            match by_stem.get(&s) {
                Some(existing) if (existing.len(), existing.as_str()) <= (key.len(), key.as_str()) => {}
                _ => {
                    by_stem.insert(s, key.clone());
                }
            }
        }
        StemIndexed { entries, by_stem }
    }

    pub fn get_exact(&self, word: &str) -> Option<&T> {
        self.entries.get(word)
    }

    /// Surface form first, then the stem against stemmed keys.
    pub fn lookup(&self, surface: &str, stem_key: &str) -> Option<&T> {
        self.entries.get(surface).or_else(|| {
            self.by_stem
                .get(stem_key)
                .and_then(|k| self.entries.get(k))
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub type VadLexicon = StemIndexed<Vad>;

fn read(path: &Path) -> Result<String, AffectError> {
    std::fs::read_to_string(path).map_err(|source| AffectError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Tab-separated `word valence arousal dominance`; a non-numeric first line
/// is taken as a header.
pub fn parse_vad(text: &str) -> Result<VadLexicon, AffectError> {
    let mut entries = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |reason: String| AffectError::Format { line: idx + 1, reason };
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let nums: Vec<Option<f64>> = fields[1..].iter().map(|f| f.trim().parse().ok()).collect();
        if nums.iter().any(Option::is_none) {
            if idx == 0 {
                continue;
            }
            return Err(bad("non-numeric score".into()));
        }
        let nums: Vec<f64> = nums.into_iter().flatten().collect();
        if let Some(v) = nums.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(bad(format!("score {v} outside [0, 1]")));
        }
        entries.insert(
            fields[0].trim().to_lowercase(),
            Vad {
                valence: nums[0],
                arousal: nums[1],
                dominance: nums[2],
            },
        );
    }
    if entries.is_empty() {
        log::warn!("VAD lexicon is empty");
    }
    Ok(StemIndexed::from_entries(entries))
}

pub fn load_vad(path: &Path) -> Result<VadLexicon, AffectError> {
    parse_vad(&read(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Trust,
    Negative,
    Positive,
}

impl Emotion {
    pub const ALL: [Emotion; 10] = [
        Emotion::Anger,
        Emotion::Anticipation,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Joy,
        Emotion::Sadness,
        Emotion::Surprise,
        Emotion::Trust,
        Emotion::Negative,
        Emotion::Positive,
    ];

    pub fn is_basic(self) -> bool {
        !matches!(self, Emotion::Negative | Emotion::Positive)
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

impl std::str::FromStr for Emotion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| format!("{e:?}").eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown emotion {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EmotionFlags(u16);

impl EmotionFlags {
    pub fn has(self, e: Emotion) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn set(&mut self, e: Emotion, on: bool) {
        if on {
            self.0 |= e.bit();
        } else {
            self.0 &= !e.bit();
        }
    }

    pub fn any_basic(self) -> bool {
        Emotion::ALL.into_iter().filter(|e| e.is_basic()).any(|e| self.has(e))
    }
}

pub type EmotionLexicon = StemIndexed<EmotionFlags>;

impl EmotionLexicon {
    pub fn from_flags(entries: BTreeMap<String, EmotionFlags>) -> Self {
        StemIndexed::from_entries(entries)
    }
}

/// Long-format rows `word emotion 0|1`, tab-separated.
pub fn parse_emolex(text: &str) -> Result<EmotionLexicon, AffectError> {
    let mut entries: BTreeMap<String, EmotionFlags> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| AffectError::Format { line: idx + 1, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let emotion: Emotion = fields[1].parse().map_err(bad)?;
        let on = match fields[2].trim() {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("flag {other:?} is not 0 or 1"))),
        };
        entries
            .entry(fields[0].trim().to_lowercase())
            .or_default()
            .set(emotion, on);
    }
    Ok(EmotionLexicon::from_flags(entries))
}

pub fn load_emolex(path: &Path) -> Result<EmotionLexicon, AffectError> {
    parse_emolex(&read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircumplexPoint {
    pub stem: String,
    pub valence: f64,
    pub arousal: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub found: usize,
    pub missing: Vec<String>,
    pub total: usize,
}

impl Coverage {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.found as f64 / self.total as f64
        }
    }
}

/// One point per associate present in the lexicon, weighted by multiplicity.
pub fn circumplex_points(frame: &SemanticFrame, vad: &VadLexicon) -> (Vec<CircumplexPoint>, Coverage) {
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for a in &frame.associates {
        match vad.lookup(&a.display_form, &a.stem) {
            Some(v) => points.push(CircumplexPoint {
                stem: a.stem.clone(),
                valence: v.valence,
                arousal: v.arousal,
                weight: a.multiplicity as f64,
            }),
            None => missing.push(a.stem.clone()),
        }
    }
    let coverage = Coverage {
        found: points.len(),
        missing,
        total: frame.associates.len(),
    };
    (points, coverage)
}

pub const MIN_BANDWIDTH: f64 = 0.02;

/// Row-major density over the unit square: `values[row * n + col]` is the
/// cell whose center is ((col + 0.5) / n, (row + 0.5) / n), with valence on
/// columns and arousal on rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub n: usize,
    pub bandwidth: (f64, f64),
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn cell_center(&self, idx: usize) -> f64 {
        (idx as f64 + 0.5) / self.n as f64
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    /// Midpoint-rule integral over the unit square.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.n * self.n) as f64
    }

    /// (row, col) of the largest cell; the first one wins ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best / self.n, best % self.n)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn quadrant_mass(&self, q: Quadrant) -> f64 {
        let mut sum = 0.0;
        for row in 0..self.n {
            for col in 0..self.n {
                if quadrant(self.cell_center(col), self.cell_center(row)) == q {
                    sum += self.at(row, col);
                }
            }
        }
        sum / (self.n * self.n) as f64
    }

    /// CSV with columns valence, arousal, density.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("valence,arousal,density\n");
        for row in 0..self.n {
            for col in 0..self.n {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    self.cell_center(col),
                    self.cell_center(row),
                    self.at(row, col)
                );
            }
        }
        out
    }
}

/// Weighted standard deviation and Kish effective sample size.
fn weighted_spread(values: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let total: f64 = values.clone().map(|(_, w)| w).sum();
    let sum_sq_w: f64 = values.clone().map(|(_, w)| w * w).sum();
    let mean = values.clone().map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values.map(|(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total;
    (var.sqrt(), total * total / sum_sq_w)
}

/// Silverman bandwidth for two dimensions, sigma * n^(-1/6), floored.
pub fn silverman_bandwidth(points: &[CircumplexPoint]) -> (f64, f64) {
    let (sx, n_eff) = weighted_spread(points.iter().map(|p| (p.valence, p.weight)));
    let (sy, _) = weighted_spread(points.iter().map(|p| (p.arousal, p.weight)));
    let factor = n_eff.powf(-1.0 / 6.0);
    ((sx * factor).max(MIN_BANDWIDTH), (sy * factor).max(MIN_BANDWIDTH))
}

/// Weighted product-Gaussian density on an n by n grid over the unit square.
/// Mass falling outside the square is dropped and the grid renormalized.
pub fn kde_density(
    points: &[CircumplexPoint],
    n: usize,
    bandwidth: Option<(f64, f64)>,
) -> Result<DensityGrid, AffectError> {
    if n == 0 {
        return Err(AffectError::EmptyGrid);
    }
    let points: Vec<&CircumplexPoint> = points.iter().filter(|p| p.weight > 0.0).collect();
    if points.is_empty() {
        return Err(AffectError::NoPoints);
    }
    let owned: Vec<CircumplexPoint> = points.iter().map(|p| (*p).clone()).collect();
    let (hx, hy) = bandwidth.unwrap_or_else(|| silverman_bandwidth(&owned));

    let centers: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    // Separable kernel: per-point 1D factors, combined in a fixed order.
    let kx: Vec<Vec<f64>> = owned
        .iter()
        .map(|p| centers.iter().map(|c| gauss((c - p.valence) / hx)).collect())
        .collect();
    let ky: Vec<Vec<f64>> = owned
        .iter()
        .map(|p| centers.iter().map(|c| gauss((c - p.arousal) / hy)).collect())
        .collect();

    let mut values = vec![0.0; n * n];
    for (k, p) in owned.iter().enumerate() {
        for row in 0..n {
            let wy = p.weight * ky[k][row];
            if wy == 0.0 {
                continue;
            }
            let base = row * n;
            for col in 0..n {
                values[base + col] += wy * kx[k][col];
            }
        }
    }
    let sum: f64 = values.iter().sum();
    if sum > 0.0 {
        let scale = (n * n) as f64 / sum;
        values.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(DensityGrid {
        n,
        bandwidth: (hx, hy),
        values,
    })
}

fn gauss(z: f64) -> f64 {
    (-0.5 * z * z).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    SerenityLowerRight,
    AnxietyUpperLeft,
    ExcitementUpperRight,
    BoredomLowerLeft,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::SerenityLowerRight,
        Quadrant::AnxietyUpperLeft,
        Quadrant::ExcitementUpperRight,
        Quadrant::BoredomLowerLeft,
    ];
}

/// Split at 0.5 on both axes; valence 0.5 counts as high, arousal 0.5 as low.
pub fn quadrant(valence: f64, arousal: f64) -> Quadrant {
    match (valence >= 0.5, arousal > 0.5) {
        (true, false) => Quadrant::SerenityLowerRight,
        (false, true) => Quadrant::AnxietyUpperLeft,
        (true, true) => Quadrant::ExcitementUpperRight,
        (false, false) => Quadrant::BoredomLowerLeft,
    }
}

impl CircumplexPoint {
    pub fn quadrant(&self) -> Quadrant {
        quadrant(self.valence, self.arousal)
    }
}

/// Density report written by the `circumplex` stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircumplexReport {
    pub cue: String,
    pub coverage: Coverage,
    pub points: Vec<CircumplexPoint>,
    pub quadrant_mass: BTreeMap<String, f64>,
    pub grid: DensityGrid,
}

impl CircumplexReport {
    pub fn new(cue: &str, points: Vec<CircumplexPoint>, coverage: Coverage, grid: DensityGrid) -> Self {
        let quadrant_mass = Quadrant::ALL
            .into_iter()
            .map(|q| (format!("{q:?}"), grid.quadrant_mass(q)))
            .collect();
        CircumplexReport {
            cue: cue.to_string(),
            coverage,
            points,
            quadrant_mass,
            grid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::FrameAssociate;
    use crate::types::ValenceLabel;
    use proptest::prelude::*;

    fn pt(v: f64, a: f64, w: f64) -> CircumplexPoint {
        CircumplexPoint {
            stem: "p".into(),
            valence: v,
            arousal: a,
            weight: w,
        }
    }

    fn frame_of(words: &[&str]) -> SemanticFrame {
        SemanticFrame {
            cue_stem: "math".into(),
            cue_display: "math".into(),
            cue_label: ValenceLabel::Neutral,
            cue_mean_valence: None,
            associates: words
                .iter()
                .map(|w| FrameAssociate {
                    stem: stem(w),
                    display_form: w.to_string(),
                    label: ValenceLabel::Neutral,
                    multiplicity: 1,
                    idiosyncratic: true,
                })
                .collect(),
        }
    }

    #[test]
    fn vad_parsing() {
        let lex = parse_vad("Word\tValence\tArousal\tDominance\ncalm\t0.89\t0.12\t0.75\n").unwrap();
        let calm = lex.get_exact("calm").unwrap();
        assert_eq!((calm.valence, calm.arousal), (0.89, 0.12));
        assert!(matches!(
            parse_vad("calm\t1.7\t0.1\t0.1\n"),
            Err(AffectError::Format { line: 1, .. })
        ));
        assert!(parse_vad("").unwrap().is_empty());
        assert!(matches!(
            load_vad(Path::new("/nonexistent/vad.txt")),
            Err(AffectError::File { .. })
        ));
    }

    #[test]
    fn emolex_parsing() {
        let lex = parse_emolex("dread\tfear\t1\ndread\tjoy\t0\nchair\tanger\t0\nchair\tfear\t0\n").unwrap();
        assert!(lex.get_exact("dread").unwrap().has(Emotion::Fear));
        assert!(!lex.get_exact("dread").unwrap().has(Emotion::Joy));
        assert_eq!(*lex.get_exact("chair").unwrap(), EmotionFlags::default());
        assert!(matches!(
            parse_emolex("dread\tboredom\t1\n"),
            Err(AffectError::Format { line: 1, .. })
        ));
    }

    #[test]
    fn sentiment_flags_are_not_basic() {
        let mut f = EmotionFlags::default();
        f.set(Emotion::Negative, true);
        f.set(Emotion::Positive, true);
        assert!(!f.any_basic());
        f.set(Emotion::Trust, true);
        assert!(f.any_basic());
    }

    #[test]
    fn points_and_coverage() {
        let vad = parse_vad("calm\t0.89\t0.12\t0.75\nnumber\t0.5\t0.3\t0.5\n").unwrap();
        let (pts, cov) = circumplex_points(&frame_of(&["calm", "numbers", "zzq"]), &vad);
        assert_eq!(pts[0].valence, 0.89);
        assert_eq!(pts[0].arousal, 0.12);
        // "numbers" is found through the stem index.
        assert_eq!(pts.len(), 2);
        assert_eq!(cov.missing, ["zzq"]);
        let (none, cov) = circumplex_points(&frame_of(&["zzq"]), &vad);
        assert!(none.is_empty());
        assert_eq!(cov.ratio(), 0.0);
    }

    #[test]
    fn single_point_peaks_at_its_cell() {
        let g = kde_density(&[pt(0.5, 0.5, 1.0)], 101, None).unwrap();
        assert_eq!(g.argmax(), (50, 50));
        assert!((g.mass() - 1.0).abs() < 1e-9);
        assert_eq!(g.bandwidth, (MIN_BANDWIDTH, MIN_BANDWIDTH));
    }

    #[test]
    fn duplicate_equals_double_weight() {
        let two = kde_density(&[pt(0.3, 0.7, 1.0), pt(0.3, 0.7, 1.0)], 50, None).unwrap();
        let one = kde_density(&[pt(0.3, 0.7, 2.0)], 50, None).unwrap();
        for (a, b) in two.values.iter().zip(&one.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn kde_errors() {
        assert!(matches!(kde_density(&[], 10, None), Err(AffectError::NoPoints)));
        assert!(matches!(kde_density(&[pt(0.1, 0.1, 1.0)], 0, None), Err(AffectError::EmptyGrid)));
    }

    #[test]
    fn quadrant_examples() {
        assert_eq!(quadrant(0.9, 0.1), Quadrant::SerenityLowerRight);
        assert_eq!(quadrant(0.1, 0.9), Quadrant::AnxietyUpperLeft);
        assert_eq!(quadrant(0.5, 0.5), Quadrant::SerenityLowerRight);
        assert_eq!(quadrant(0.9, 0.51), Quadrant::ExcitementUpperRight);
        assert_eq!(quadrant(0.49, 0.5), Quadrant::BoredomLowerLeft);
    }

    proptest! {
        #[test]
        fn grid_is_a_density(pts in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 1u32..5), 1..20), n in 5usize..60) {
            let pts: Vec<_> = pts.into_iter().map(|(v, a, w)| pt(v, a, w as f64)).collect();
            let g = kde_density(&pts, n, None).unwrap();
            prop_assert!(g.values.iter().all(|&v| v >= 0.0));
            prop_assert!((g.mass() - 1.0).abs() < 1e-6);
            let total: f64 = Quadrant::ALL.iter().map(|&q| g.quadrant_mass(q)).sum();
            prop_assert!((total - 1.0).abs() < 1e-6);
        }

        #[test]
        fn argmax_shifts_with_points(
            offsets in prop::collection::vec((-5i32..=5, -5i32..=5), 1..5),
            shift in (-8i32..=8, -8i32..=8),
        ) {
            let n = 100;
            let cell = |i: i32| (i as f64 + 0.5) / n as f64;
            // Distinct weights keep the peak unique.
            let w = |k: usize| 1.0 + 0.37 * k as f64;
            let pts: Vec<_> = offsets.iter().enumerate().map(|(k, (dx, dy))| pt(cell(50 + dx), cell(50 + dy), w(k))).collect();
            let moved: Vec<_> = offsets.iter().enumerate().map(|(k, (dx, dy))| pt(cell(50 + dx + shift.0), cell(50 + dy + shift.1), w(k))).collect();
            let bw = Some((0.03, 0.03));
            let (r0, c0) = kde_density(&pts, n, bw).unwrap().argmax();
            let (r1, c1) = kde_density(&moved, n, bw).unwrap().argmax();
            prop_assert_eq!(r1 as i32 - r0 as i32, shift.1);
            prop_assert_eq!(c1 as i32 - c0 as i32, shift.0);
        }

        #[test]
        fn quadrant_is_total(v in 0.0f64..=1.0, a in 0.0f64..=1.0) {
            let q = quadrant(v, a);
            prop_assert_eq!(q == Quadrant::SerenityLowerRight, v >= 0.5 && a <= 0.5);
            prop_assert_eq!(q == Quadrant::AnxietyUpperLeft, v < 0.5 && a > 0.5);
        }
    }
}
