//! Deterministic SVG figures.
//!
//! Output depends only on the inputs: coordinates are printed with fixed
//! precision and nothing time-dependent is embedded.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::affect::{CircumplexPoint, DensityGrid};
use crate::metrics::FractionRow;
use crate::network::{classify_edge, Bfmn, EdgeClass, SemanticFrame};
use crate::types::ValenceLabel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("cannot render an empty frame")]
    EmptyFrame,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub layout: Layout,
    pub wide_edge: f64,
    pub narrow_edge: f64,
    pub cue_font_scale: f64,
    pub font_size: f64,
    pub ring_spacing: f64,
    /// Nodes on ring k (1-based) before spilling outward.
    pub ring_capacity: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            layout: Layout::Star,
            wide_edge: 3.0,
            narrow_edge: 1.0,
            cue_font_scale: 1.8,
            font_size: 12.0,
            ring_spacing: 140.0,
            ring_capacity: 16,
        }
    }
}

impl RenderSpec {
    pub fn node_color(&self, label: ValenceLabel) -> &'static str {
        match label {
            ValenceLabel::Positive => "cyan",
            ValenceLabel::Negative => "red",
            ValenceLabel::Neutral => "black",
        }
    }

    pub fn edge_color(&self, class: EdgeClass) -> &'static str {
        match class {
            EdgeClass::NegativeNegative => "red",
            EdgeClass::PositivePositive => "cyan",
            EdgeClass::Conflicting => "purple",
            EdgeClass::NeutralTouching => "gray",
        }
    }

    pub fn edge_width(&self, idiosyncratic: bool) -> f64 {
        if idiosyncratic {
            self.narrow_edge
        } else {
            self.wide_edge
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Ring index (0-based) and angle in degrees for every associate in frame
/// order. Rings fill by multiplicity; positions within a ring are assigned
/// in lexicographic stem order, evenly spaced from 0 degrees.
pub fn star_positions(frame: &SemanticFrame, spec: &RenderSpec) -> Vec<(usize, f64)> {
    let mut out = vec![(0usize, 0.0f64); frame.associates.len()];
    let mut start = 0;
    let mut ring = 0;
    while start < frame.associates.len() {
        let cap = spec.ring_capacity * (ring + 1);
        let end = (start + cap).min(frame.associates.len());
        let mut members: Vec<usize> = (start..end).collect();
        members.sort_by(|&a, &b| frame.associates[a].stem.cmp(&frame.associates[b].stem));
        let count = members.len() as f64;
        for (slot, idx) in members.into_iter().enumerate() {
            out[idx] = (ring, 360.0 * slot as f64 / count);
        }
        start = end;
        ring += 1;
    }
    out
}

/// Star layout: the cue at the center, associates on concentric rings.
/// Edges among frame members that exist in the network are drawn as well.
pub fn render_star_svg(frame: &SemanticFrame, bfmn: &Bfmn, spec: &RenderSpec) -> Result<String, RenderError> {
    if frame.associates.is_empty() {
        return Err(RenderError::EmptyFrame);
    }
    let positions = star_positions(frame, spec);
    let rings = positions.iter().map(|p| p.0).max().unwrap_or(0) + 1;
    let radius_max = spec.ring_spacing * rings as f64;
    let half = radius_max + 120.0;
    let size = 2.0 * half;

    let mut coords = std::collections::BTreeMap::new();
    coords.insert(frame.cue_stem.as_str(), (half, half));
    for (a, (ring, angle)) in frame.associates.iter().zip(&positions) {
        let r = spec.ring_spacing * (*ring as f64 + 1.0);
        let theta = angle * PI / 180.0;
        coords.insert(a.stem.as_str(), (half + r * theta.cos(), half - r * theta.sin()));
    }
    let label_of = |stem: &str| {
        if stem == frame.cue_stem {
            Some(frame.cue_label)
        } else {
            frame.associates.iter().find(|a| a.stem == stem).map(|a| a.label)
        }
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" viewBox=\"0 0 {size:.0} {size:.0}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g class=\"edges\">\n");

    let draw_edge = |svg: &mut String, a: &str, b: &str, idiosyncratic: bool| {
        let (Some(&(x1, y1)), Some(&(x2, y2))) = (coords.get(a), coords.get(b)) else {
            return;
        };
        let (Some(la), Some(lb)) = (label_of(a), label_of(b)) else {
            return;
        };
        let class = classify_edge(la, lb);
        let _ = writeln!(
            svg,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{}\" stroke-width=\"{:.1}\" stroke-opacity=\"0.7\" data-class=\"{}\"/>",
            spec.edge_color(class),
            spec.edge_width(idiosyncratic),
            class.as_str()
        );
    };

    for a in &frame.associates {
        draw_edge(&mut svg, &frame.cue_stem, &a.stem, a.idiosyncratic);
    }
    let members: Vec<&str> = frame.associates.iter().map(|a| a.stem.as_str()).collect();
    for e in bfmn.edges_within(&members) {
        draw_edge(&mut svg, &e.cue_stem, &e.associate_stem, e.idiosyncratic);
    }
    svg.push_str("</g>\n<g class=\"nodes\" font-family=\"sans-serif\" text-anchor=\"middle\">\n");

    for (a, (_, angle)) in frame.associates.iter().zip(&positions) {
        let (x, y) = coords[a.stem.as_str()];
        let _ = writeln!(
            svg,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{:.1}\" fill=\"{}\" data-angle=\"{angle:.2}\">{}</text>",
            spec.font_size,
            spec.node_color(a.label),
            escape(&a.display_form)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{half:.2}\" y=\"{half:.2}\" font-size=\"{:.1}\" font-weight=\"bold\" fill=\"{}\" class=\"cue\">{}</text>",
        spec.font_size * spec.cue_font_scale,
        spec.node_color(frame.cue_label),
        escape(&frame.cue_display)
    );
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

/// Dark purple through teal to yellow; luminance increases monotonically.
const HEAT_STOPS: [(f64, [u8; 3]); 5] = [
    (0.0, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.5, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.0, [253, 231, 37]),
];

pub fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mut i = 0;
    while i + 2 < HEAT_STOPS.len() && t > HEAT_STOPS[i + 1].0 {
        i += 1;
    }
    let (t0, c0) = HEAT_STOPS[i];
    let (t1, c1) = HEAT_STOPS[i + 1];
    let u = (t - t0) / (t1 - t0);
    let mix = |k: usize| (c0[k] as f64 + u * (c1[k] as f64 - c0[k] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

/// Heatmap of the density with valence on x and arousal on y (upward).
pub fn render_circumplex_svg(grid: &DensityGrid, points: Option<&[CircumplexPoint]>) -> String {
    let plot = 500.0;
    let margin = 60.0;
    let size = plot + 2.0 * margin;
    let cell = plot / grid.n as f64;
    let max = grid.max();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" viewBox=\"0 0 {size:.0} {size:.0}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g class=\"density\" shape-rendering=\"crispEdges\">\n");
    for row in 0..grid.n {
        for col in 0..grid.n {
            let v = grid.at(row, col);
            let t = if max > 0.0 { v / max } else { 0.0 };
            let x = margin + col as f64 * cell;
            // Row 0 is the lowest arousal, drawn at the bottom.
            let y = margin + plot - (row as f64 + 1.0) * cell;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{cell:.3}\" height=\"{cell:.3}\" fill=\"{}\"/>",
                heat_color(t)
            );
        }
    }
    svg.push_str("</g>\n<g class=\"guides\" stroke=\"white\" stroke-dasharray=\"4 4\">\n");
    let mid = margin + plot / 2.0;
    let _ = writeln!(svg, "<line x1=\"{mid:.1}\" y1=\"{margin:.1}\" x2=\"{mid:.1}\" y2=\"{:.1}\"/>", margin + plot);
    let _ = writeln!(svg, "<line x1=\"{margin:.1}\" y1=\"{mid:.1}\" x2=\"{:.1}\" y2=\"{mid:.1}\"/>", margin + plot);
    svg.push_str("</g>\n");

    if let Some(points) = points {
        svg.push_str("<g class=\"points\" fill=\"none\" stroke=\"white\">\n");
        for p in points {
            let x = margin + p.valence * plot;
            let y = margin + plot - p.arousal * plot;
            let _ = writeln!(
                svg,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{:.1}\"><title>{}</title></circle>",
                2.0 + p.weight.sqrt(),
                escape(&p.stem)
            );
        }
        svg.push_str("</g>\n");
    }

    let _ = writeln!(
        svg,
        "<rect x=\"{margin:.1}\" y=\"{margin:.1}\" width=\"{plot:.1}\" height=\"{plot:.1}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{mid:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\">valence</text>",
        size - 20.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"{mid:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 20 {mid:.1})\">arousal</text>"
    );
    svg.push_str("</svg>\n");
    svg
}

/// Stacked bars of positive, neutral and negative fractions per cue, with
/// each cue caption colored by the cue's own label.
pub fn render_fraction_bars_svg(rows: &[FractionRow]) -> String {
    let spec = RenderSpec::default();
    let bar_w = 40.0;
    let gap = 20.0;
    let plot_h = 300.0;
    let margin = 50.0;
    let width = margin * 2.0 + rows.len() as f64 * (bar_w + gap);
    let height = plot_h + margin * 2.0 + 40.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, r) in rows.iter().enumerate() {
        let x = margin + i as f64 * (bar_w + gap);
        let mut y = margin + plot_h;
        for (frac, color) in [(r.negative, "red"), (r.neutral, "gray"), (r.positive, "cyan")] {
            let h = frac * plot_h;
            y -= h;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.1}\" y=\"{y:.2}\" width=\"{bar_w:.1}\" height=\"{h:.2}\" fill=\"{color}\"/>"
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>",
            x + bar_w / 2.0,
            margin + plot_h + 20.0,
            spec.node_color(r.cue_label),
            escape(&r.cue)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::kde_density;
    use crate::network::FrameAssociate;

    fn frame(labels: &[(&str, ValenceLabel, u64)], cue_label: ValenceLabel) -> SemanticFrame {
        SemanticFrame {
            cue_stem: "math".into(),
            cue_display: "math".into(),
            cue_label,
            cue_mean_valence: None,
            associates: labels
                .iter()
                .map(|(s, l, m)| FrameAssociate {
                    stem: s.to_string(),
                    display_form: s.to_string(),
                    label: *l,
                    multiplicity: *m,
                    idiosyncratic: *m == 1,
                })
                .collect(),
        }
    }

    #[test]
    fn three_associates_one_ring() {
        use ValenceLabel::*;
        let f = frame(&[("b", Neutral, 2), ("a", Neutral, 1), ("c", Neutral, 1)], Neutral);
        let pos = star_positions(&f, &RenderSpec::default());
        assert!(pos.iter().all(|p| p.0 == 0));
        let mut angles: Vec<(String, f64)> = f.associates.iter().zip(&pos).map(|(a, p)| (a.stem.clone(), p.1)).collect();
        angles.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(angles.iter().map(|a| a.1).collect::<Vec<_>>(), [0.0, 120.0, 240.0]);
    }

    #[test]
    fn rings_spill_outward() {
        use ValenceLabel::*;
        let names: Vec<String> = (0..20).map(|i| format!("w{i:02}")).collect();
        let items: Vec<(&str, ValenceLabel, u64)> = names.iter().map(|n| (n.as_str(), Neutral, 1)).collect();
        let pos = star_positions(&frame(&items, Neutral), &RenderSpec::default());
        assert_eq!(pos.iter().filter(|p| p.0 == 0).count(), 16);
        assert_eq!(pos.iter().filter(|p| p.0 == 1).count(), 4);
    }

    #[test]
    fn colors_widths_and_determinism() {
        use ValenceLabel::*;
        let f = frame(&[("joy", Positive, 2), ("fear", Negative, 1), ("sum", Neutral, 1)], Negative);
        let svg = render_star_svg(&f, &Bfmn::default(), &RenderSpec::default()).unwrap();
        assert!(svg.contains("stroke=\"purple\" stroke-width=\"3.0\""));
        assert!(svg.contains("stroke=\"red\" stroke-width=\"1.0\""));
        assert!(svg.contains("stroke=\"gray\""));
        assert!(svg.contains("fill=\"cyan\""));
        assert!(svg.contains("font-size=\"21.6\""));
        assert_eq!(svg, render_star_svg(&f, &Bfmn::default(), &RenderSpec::default()).unwrap());
    }

    #[test]
    fn empty_frame_is_an_error() {
        let f = frame(&[], ValenceLabel::Neutral);
        assert_eq!(render_star_svg(&f, &Bfmn::default(), &RenderSpec::default()), Err(RenderError::EmptyFrame));
    }

    #[test]
    fn heat_map_is_monotone() {
        let lum = |hex: &str| {
            let v = u32::from_str_radix(&hex[1..], 16).unwrap();
            let (r, g, b) = ((v >> 16) as f64, ((v >> 8) & 255) as f64, (v & 255) as f64);
            0.2126 * r + 0.7152 * g + 0.0722 * b
        };
        let mut prev = -1.0;
        for i in 0..=100 {
            let l = lum(&heat_color(i as f64 / 100.0));
            assert!(l >= prev, "step {i}");
            prev = l;
        }
    }

    #[test]
    fn brightest_cell_at_center() {
        let p = CircumplexPoint { stem: "x".into(), valence: 0.5, arousal: 0.5, weight: 1.0 };
        let g = kde_density(std::slice::from_ref(&p), 11, Some((0.1, 0.1))).unwrap();
        let svg = render_circumplex_svg(&g, Some(&[p]));
        let yellow = heat_color(1.0);
        let hits: Vec<&str> = svg.lines().filter(|l| l.contains(&format!("fill=\"{yellow}\""))).collect();
        assert_eq!(hits.len(), 1);
        // Cell (5, 5) of an 11-grid over a 500px plot with a 60px margin.
        let cell = 500.0 / 11.0;
        assert!(hits[0].contains(&format!("x=\"{:.3}\"", 60.0 + 5.0 * cell)));
        assert!(svg.contains(">valence<") && svg.contains(">arousal<"));
    }
}
