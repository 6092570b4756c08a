//! Instance file format (line-oriented text, plus a JSON mirror).
//!
//! ```text
//! rv 1
//! <n> <m>
//! <u> <v>                  m lines
//! s <s> t <t> k <k>        `s=<s> t=<t> k=<k>` is accepted too
//! label <v> <string>       optional
//! coord <v> <row> <col>    optional
//! ```
//! `#` starts a comment anywhere on a line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, GraphError, Instance, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("line {line}: unsupported format version {version}")]
    UnsupportedVersion { line: usize, version: String },
    #[error("line {line}: malformed edge")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: malformed terminal line")]
    MalformedTerminals { line: usize },
    #[error("line {line}: terminal {vertex} out of range (n = {n})")]
    TerminalOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: agent count must be at least 1")]
    InvalidAgentCount { line: usize },
    #[error("line {line}: unexpected content")]
    UnexpectedLine { line: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("missing terminal line `s .. t .. k ..`")]
    MissingTerminals,
    #[error("invalid JSON instance: {0}")]
    Json(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn tokens(raw: &str) -> Vec<&str> {
    let body = raw.split('#').next().unwrap_or("");
    body.split_whitespace().collect()
}

fn parse_terminals(toks: &[&str], line: usize) -> Result<(usize, usize, usize), ParseError> {
    let bad = ParseError::MalformedTerminals { line };
    // Normalise `s=0` / `s 0` into key/value pairs.
    let mut flat = Vec::new();
    for tok in toks {
        match tok.split_once('=') {
            Some((k, v)) => {
                flat.push(k);
                if !v.is_empty() {
                    flat.push(v);
                }
            }
            None => flat.push(tok),
        }
    }
    if flat.len() != 6 {
        return Err(bad);
    }
    let mut vals = [None; 3];
    for pair in flat.chunks(2) {
        let idx = match pair[0] {
            "s" => 0,
            "t" => 1,
            "k" => 2,
            _ => return Err(bad),
        };
        let v: usize = pair[1].parse().map_err(|_| bad.clone())?;
        if vals[idx].replace(v).is_some() {
            return Err(bad);
        }
    }
    match vals {
        [Some(s), Some(t), Some(k)] => Ok((s, t, k)),
        _ => Err(bad),
    }
}

/// Parses the text format. Disconnected graphs are accepted and flagged on
/// the returned instance.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokens(l)))
        .filter(|(_, t)| !t.is_empty());

    let (mut line, mut toks) = lines.next().ok_or(ParseError::MalformedHeader { line: 1 })?;
    if toks[0] == "rv" {
        if toks.len() != 2 {
            return Err(ParseError::MalformedHeader { line });
        }
        if toks[1] != "1" {
            return Err(ParseError::UnsupportedVersion { line, version: toks[1].to_string() });
        }
        (line, toks) = lines.next().ok_or(ParseError::MalformedHeader { line: line + 1 })?;
    }
    let header: Vec<usize> = toks
        .iter()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError::MalformedHeader { line })?;
    let [n, m] = header[..] else {
        return Err(ParseError::MalformedHeader { line });
    };

    let mut b = GraphBuilder::with_vertices(n);
    let mut found = 0;
    let mut terminals = None;
    let mut labels = Vec::new();
    let mut coords = Vec::new();
    let check = |v: usize, line: usize| {
        if v >= n {
            Err(ParseError::VertexOutOfRange { line, vertex: v, n })
        } else {
            Ok(v)
        }
    };

    for (line, toks) in lines {
        let head = toks[0];
        if head.starts_with('s') && (head == "s" || head.starts_with("s=")) {
            if found != m {
                return Err(ParseError::EdgeCountMismatch { expected: m, found });
            }
            if terminals.is_some() {
                return Err(ParseError::UnexpectedLine { line });
            }
            let (s, t, k) = parse_terminals(&toks, line)?;
            for v in [s, t] {
                if v >= n {
                    return Err(ParseError::TerminalOutOfRange { line, vertex: v, n });
                }
            }
            if k < 1 {
                return Err(ParseError::InvalidAgentCount { line });
            }
            terminals = Some((s, t, k));
        } else if head == "label" {
            if toks.len() < 3 || terminals.is_none() {
                return Err(ParseError::UnexpectedLine { line });
            }
            let v = toks[1].parse().map_err(|_| ParseError::UnexpectedLine { line })?;
            labels.push((check(v, line)?, toks[2..].join(" ")));
        } else if head == "coord" {
            if toks.len() != 4 || terminals.is_none() {
                return Err(ParseError::UnexpectedLine { line });
            }
            let nums: Vec<usize> = toks[1..]
                .iter()
                .map(|t| t.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| ParseError::UnexpectedLine { line })?;
            coords.push((check(nums[0], line)?, nums[1] as u32, nums[2] as u32));
        } else {
            if terminals.is_some() {
                return Err(ParseError::UnexpectedLine { line });
            }
            if found == m {
                return Err(ParseError::EdgeCountMismatch { expected: m, found: found + 1 });
            }
            let [u, v] = toks[..] else {
                return Err(ParseError::MalformedEdge { line });
            };
            let u: usize = u.parse().map_err(|_| ParseError::MalformedEdge { line })?;
            let v: usize = v.parse().map_err(|_| ParseError::MalformedEdge { line })?;
            b.add_edge(check(u, line)?, check(v, line)?).map_err(|e| match e {
                GraphError::SelfLoop(vertex) => ParseError::SelfLoop { line, vertex },
                GraphError::DuplicateEdge(u, v) => ParseError::DuplicateEdge { line, u, v },
                GraphError::VertexOutOfRange { vertex, n } => {
                    ParseError::VertexOutOfRange { line, vertex, n }
                }
            })?;
            found += 1;
        }
    }
    if found != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found });
    }
    let (s, t, k) = terminals.ok_or(ParseError::MissingTerminals)?;
    for (v, l) in labels {
        b.set_label(v, l);
    }
    for (v, r, c) in coords {
        b.set_coord(v, r, c);
    }
    Ok(Instance::new(b.build(), s, t, k).expect("terminals validated above"))
}

/// Canonical text form; identical graphs serialize byte-identically.
pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    writeln!(out, "rv 1").unwrap();
    writeln!(out, "{} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    writeln!(out, "s {} t {} k {}", inst.s, inst.t, inst.k).unwrap();
    for v in 0..g.n() {
        if let Some(l) = g.label(v) {
            writeln!(out, "label {v} {l}").unwrap();
        }
    }
    for v in 0..g.n() {
        if let Some((r, c)) = g.coord(v) {
            writeln!(out, "coord {v} {r} {c}").unwrap();
        }
    }
    out
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub s: Vertex,
    pub t: Vertex,
    pub k: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<Vertex, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coords: BTreeMap<Vertex, (u32, u32)>,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        let g = &inst.graph;
        Self {
            n: g.n(),
            edges: g.edges().collect(),
            s: inst.s,
            t: inst.t,
            k: inst.k,
            labels: (0..g.n()).filter_map(|v| g.label(v).map(|l| (v, l.to_string()))).collect(),
            coords: (0..g.n()).filter_map(|v| g.coord(v).map(|c| (v, c))).collect(),
        }
    }
}

impl InstanceJson {
    pub fn into_instance(self) -> Result<Instance, ParseError> {
        let n = self.n;
        let mut b = GraphBuilder::with_vertices(n);
        for (u, v) in self.edges {
            b.add_edge(u, v).map_err(|e| ParseError::Json(e.to_string()))?;
        }
        for (v, l) in self.labels {
            if v >= n {
                return Err(ParseError::Json(format!("label vertex {v} out of range")));
            }
            b.set_label(v, l);
        }
        for (v, (r, c)) in self.coords {
            if v >= n {
                return Err(ParseError::Json(format!("coord vertex {v} out of range")));
            }
            b.set_coord(v, r, c);
        }
        Instance::new(b.build(), self.s, self.t, self.k).map_err(|e| ParseError::Json(e.to_string()))
    }
}

pub fn parse_instance_json(text: &str) -> Result<Instance, ParseError> {
    let raw: InstanceJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    raw.into_instance()
}

pub fn serialize_instance_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from(inst)).expect("plain data serializes")
}

/// Reads an instance, choosing the JSON mirror for `.json` files.
pub fn read_instance(path: &Path) -> Result<Instance, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_instance_json(&text)
    } else {
        parse_instance(&text)
    }
}

/// Convenience for tests and generators.
pub fn instance_from_edges(n: usize, edges: &[(Vertex, Vertex)], s: Vertex, t: Vertex, k: usize) -> Instance {
    Instance::new(Graph::from_edges(n, edges).expect("valid edge list"), s, t, k)
        .expect("valid terminals")
}
