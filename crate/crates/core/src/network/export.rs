//! GraphML, DOT and JSON serializations of a [`Bfmn`].
//!
//! GraphML is the interchange format: it reads back into an identical graph.
//! Edges are written undirected with the cue as the `source` endpoint and a
//! `cue` attribute naming it explicitly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Bfmn, Edge, Node};
use crate::report::RenderSpec;
use crate::types::{MeanEstimate, ValenceLabel};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("graphml parse: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("graphml: {0}")]
    Format(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

const NODE_KEYS: [(&str, &str, &str); 6] = [
    ("d0", "label", "string"),
    ("d1", "count", "long"),
    ("d2", "display_form", "string"),
    ("d3", "valence_n", "long"),
    ("d4", "valence_mean", "double"),
    ("d5", "valence_se", "double"),
];

const EDGE_KEYS: [(&str, &str, &str); 4] = [
    ("e0", "multiplicity", "long"),
    ("e1", "idiosyncratic", "boolean"),
    ("e2", "class", "string"),
    ("e3", "cue", "string"),
];

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn to_graphml(g: &Bfmn) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, name, ty) in NODE_KEYS {
        let _ = writeln!(out, "  <key id=\"{id}\" for=\"node\" attr.name=\"{name}\" attr.type=\"{ty}\"/>");
    }
    for (id, name, ty) in EDGE_KEYS {
        let _ = writeln!(out, "  <key id=\"{id}\" for=\"edge\" attr.name=\"{name}\" attr.type=\"{ty}\"/>");
    }
    out.push_str("  <graph id=\"bfmn\" edgedefault=\"undirected\">\n");
    for node in g.nodes.values() {
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(&node.stem));
        let _ = writeln!(out, "      <data key=\"d0\">{}</data>", node.label);
        let _ = writeln!(out, "      <data key=\"d1\">{}</data>", node.occurrence_count);
        let _ = writeln!(out, "      <data key=\"d2\">{}</data>", xml_escape(&node.display_form));
        if let Some(v) = node.valence {
            let _ = writeln!(out, "      <data key=\"d3\">{}</data>", v.n);
            let _ = writeln!(out, "      <data key=\"d4\">{}</data>", v.mean);
            let _ = writeln!(out, "      <data key=\"d5\">{}</data>", v.std_error);
        }
        out.push_str("    </node>\n");
    }
    for edge in g.edges.values() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(&edge.cue_stem),
            xml_escape(&edge.associate_stem)
        );
        let _ = writeln!(out, "      <data key=\"e0\">{}</data>", edge.multiplicity);
        let _ = writeln!(out, "      <data key=\"e1\">{}</data>", edge.idiosyncratic);
        let _ = writeln!(out, "      <data key=\"e2\">{}</data>", g.edge_class(edge).as_str());
        let _ = writeln!(out, "      <data key=\"e3\">{}</data>", xml_escape(&edge.cue_stem));
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn from_graphml(text: &str) -> Result<Bfmn, ExportError> {
    let doc = roxmltree::Document::parse(text)?;
    let bad = |msg: String| ExportError::Format(msg);

    let mut key_names: BTreeMap<String, String> = BTreeMap::new();
    for key in doc.descendants().filter(|n| n.has_tag_name("key")) {
        if let (Some(id), Some(name)) = (key.attribute("id"), key.attribute("attr.name")) {
            key_names.insert(id.to_string(), name.to_string());
        }
    }
    let data_of = |el: roxmltree::Node| -> BTreeMap<String, String> {
        el.children()
            .filter(|c| c.has_tag_name("data"))
            .filter_map(|c| {
                let name = key_names.get(c.attribute("key")?)?.clone();
                Some((name, c.text().unwrap_or_default().to_string()))
            })
            .collect()
    };

    let mut g = Bfmn::default();
    for el in doc.descendants().filter(|n| n.has_tag_name("node")) {
        let stem = el.attribute("id").ok_or_else(|| bad("node without id".into()))?.to_string();
        let data = data_of(el);
        let get = |k: &str| data.get(k).ok_or_else(|| bad(format!("node {stem:?} lacks {k}")));
        let label: ValenceLabel = get("label")?.parse().map_err(|e| bad(format!("{e}")))?;
        let occurrence_count = get("count")?.parse().map_err(|_| bad("bad count".into()))?;
        let display_form = get("display_form")?.clone();
        let valence = match (data.get("valence_n"), data.get("valence_mean"), data.get("valence_se")) {
            (Some(n), Some(m), Some(se)) => Some(MeanEstimate {
                n: n.parse().map_err(|_| bad("bad valence_n".into()))?,
                mean: m.parse().map_err(|_| bad("bad valence_mean".into()))?,
                std_error: se.parse().map_err(|_| bad("bad valence_se".into()))?,
            }),
            _ => None,
        };
        g.nodes.insert(
            stem.clone(),
            Node {
                stem,
                display_form,
                label,
                occurrence_count,
                valence,
            },
        );
    }
    for el in doc.descendants().filter(|n| n.has_tag_name("edge")) {
        let source = el.attribute("source").ok_or_else(|| bad("edge without source".into()))?;
        let target = el.attribute("target").ok_or_else(|| bad("edge without target".into()))?;
        let data = data_of(el);
        let (cue, assoc) = match data.get("cue").map(String::as_str) {
            Some(c) if c == target => (target, source),
            _ => (source, target),
        };
        for end in [cue, assoc] {
            if !g.nodes.contains_key(end) {
                return Err(bad(format!("edge endpoint {end:?} is not a node")));
            }
        }
        let multiplicity: u64 = data
            .get("multiplicity")
            .ok_or_else(|| bad("edge lacks multiplicity".into()))?
            .parse()
            .map_err(|_| bad("bad multiplicity".into()))?;
        g.edges.insert(
            (cue.to_string(), assoc.to_string()),
            Edge {
                cue_stem: cue.to_string(),
                associate_stem: assoc.to_string(),
                multiplicity,
                idiosyncratic: multiplicity == 1,
            },
        );
    }
    Ok(g)
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(g: &Bfmn) -> String {
    let spec = RenderSpec::default();
    let mut out = String::from("graph bfmn {\n");
    for node in g.nodes.values() {
        let _ = writeln!(
            out,
            "  {} [label={}, display_form={}, valence={}, count={}, fontcolor={}];",
            dot_quote(&node.stem),
            dot_quote(&node.display_form),
            dot_quote(&node.display_form),
            dot_quote(node.label.as_str()),
            node.occurrence_count,
            dot_quote(spec.node_color(node.label)),
        );
    }
    for edge in g.edges.values() {
        let class = g.edge_class(edge);
        let _ = writeln!(
            out,
            "  {} -- {} [multiplicity={}, idiosyncratic={}, class={}, cue={}, color={}, penwidth={}];",
            dot_quote(&edge.cue_stem),
            dot_quote(&edge.associate_stem),
            edge.multiplicity,
            edge.idiosyncratic,
            dot_quote(class.as_str()),
            dot_quote(&edge.cue_stem),
            dot_quote(spec.edge_color(class)),
            spec.edge_width(edge.idiosyncratic),
        );
    }
    out.push_str("}\n");
    out
}

pub fn to_json(g: &Bfmn) -> String {
    let mut out = serde_json::to_string_pretty(g).expect("graph serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Bfmn, ExportError> {
    Ok(serde_json::from_str(text)?)
}
