use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::nae::NaeInstance;
use super::setcover::SetCoverInstance;
use super::threedm::ThreeDmInstance;
use crate::graph::{Graph, GraphBuilder, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReductionKind {
    #[serde(rename = "3dm")]
    ThreeDm,
    #[serde(rename = "nae")]
    Nae,
    #[serde(rename = "setcover")]
    SetCover,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::ThreeDm => "3dm",
            ReductionKind::Nae => "nae",
            ReductionKind::SetCover => "setcover",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    S,
    T,
}

impl Terminal {
    pub fn name(self) -> &'static str {
        match self {
            Terminal::S => "s",
            Terminal::T => "t",
        }
    }
}

/// Left or right copy of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wing {
    Left,
    Right,
}

impl Wing {
    pub fn tag(self) -> &'static str {
        match self {
            Wing::Left => "l",
            Wing::Right => "r",
        }
    }
}

/// Which end of a variable (or row) path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Low,
    High,
}

/// Element type of a matching triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elem {
    Alpha,
    Beta,
    Gamma,
}

impl Elem {
    pub const ALL: [Elem; 3] = [Elem::Alpha, Elem::Beta, Elem::Gamma];

    pub fn name(self) -> &'static str {
        match self {
            Elem::Alpha => "alpha",
            Elem::Beta => "beta",
            Elem::Gamma => "gamma",
        }
    }

    /// Name of the far end of the element's tail path.
    pub fn tail_name(self) -> &'static str {
        match self {
            Elem::Alpha => "x",
            Elem::Beta => "y",
            Elem::Gamma => "z",
        }
    }

    pub fn slot(self) -> usize {
        self as usize
    }
}

/// What a registered path encodes. Indices are 1-based, as in the source
/// instances. Paths with zero internal vertices are plain edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum PathRole {
    /// Terminal to one of the two common neighbours.
    Guard { terminal: Terminal, which: u8 },
    /// Row (3dm) or variable (nae) path between its two ends.
    Spine { var: usize },
    EndLink { terminal: Terminal, var: usize, end: End },
    ElementPath { elem: Elem, wing: Wing, index: usize },
    Tail { elem: Elem, wing: Wing, index: usize },
    SetLink { elem: Elem, wing: Wing, row: usize, set: usize },
    Spoke { terminal: Terminal, elem: Elem, wing: Wing },
    Fan { terminal: Terminal, elem: Elem, wing: Wing, index: usize },
    Literal { clause: usize, literal: usize, wing: Wing },
    ClauseLink { terminal: Terminal, clause: usize, wing: Wing },
    Membership { copy: usize, set: usize, element: usize },
    Hub { copy: usize, set: usize },
    ElementLink { terminal: Terminal, element: usize },
    HubLink { terminal: Terminal, copy: usize },
    Shortcut { terminal: Terminal },
}

impl fmt::Display for PathRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PathRole::*;
        match *self {
            Guard { terminal, which } => write!(f, "{}-g{which}", terminal.name()),
            Spine { var } => write!(f, "spine{var}"),
            EndLink { terminal, var, end } => write!(f, "{}-u{var}{}", terminal.name(), if end == End::Low { "lo" } else { "hi" }),
            ElementPath { elem, wing, index } => write!(f, "{}{}-{index}", elem.name(), wing.tag()),
            Tail { elem, wing, index } => write!(f, "{}{index}{}", elem.tail_name(), wing.tag()),
            SetLink { elem, wing, row, set } => write!(f, "{}{}-u{row}.{set}", elem.name(), wing.tag()),
            Spoke { terminal, elem, wing } => write!(f, "{}-crit-{}{}", terminal.name(), elem.name(), wing.tag()),
            Fan { terminal, elem, wing, index } => {
                write!(f, "{}-crit-{}{}-{}{index}", terminal.name(), elem.name(), wing.tag(), elem.tail_name())
            }
            Literal { clause, literal, wing } => write!(f, "c{clause}{}-lit{literal}", wing.tag()),
            ClauseLink { terminal, clause, wing } => write!(f, "{}-c{clause}{}", terminal.name(), wing.tag()),
            Membership { copy, set, element } => write!(f, "set{set}.{copy}-u{element}"),
            Hub { copy, set } => write!(f, "w{copy}-set{set}"),
            ElementLink { terminal, element } => write!(f, "{}-u{element}", terminal.name()),
            HubLink { terminal, copy } => write!(f, "{}-w{copy}", terminal.name()),
            Shortcut { terminal } => write!(f, "{}-z", terminal.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEntry {
    #[serde(flatten)]
    pub role: PathRole,
    pub from: Vertex,
    pub to: Vertex,
    pub internal: usize,
    /// Internal vertices in order from `from` to `to`.
    pub vertices: Vec<Vertex>,
}

impl PathEntry {
    /// Every vertex of the path, starting at `start` (one of the two ends).
    pub fn walk_from(&self, start: Vertex) -> Vec<Vertex> {
        let mut all = Vec::with_capacity(self.vertices.len() + 2);
        all.push(self.from);
        all.extend_from_slice(&self.vertices);
        all.push(self.to);
        if start == self.to && start != self.from {
            all.reverse();
        }
        all
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Source {
    #[serde(rename = "3dm")]
    ThreeDm(ThreeDmInstance),
    Nae(NaeInstance),
    #[serde(rename = "setcover")]
    SetCover(SetCoverInstance),
}

impl Source {
    pub fn kind(&self) -> ReductionKind {
        match self {
            Source::ThreeDm(_) => ReductionKind::ThreeDm,
            Source::Nae(_) => ReductionKind::Nae,
            Source::SetCover(_) => ReductionKind::SetCover,
        }
    }
}

/// Map from source objects to the generated vertices and paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetIndex {
    pub kind: ReductionKind,
    pub source: Source,
    /// Length scale: n² + m² for 3dm, d* for nae, 1 for set cover.
    pub scale: u64,
    pub k: usize,
    pub named: BTreeMap<String, Vertex>,
    pub paths: Vec<PathEntry>,
}

impl GadgetIndex {
    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.named.get(name).copied()
    }

    pub fn path(&self, role: &PathRole) -> Option<&PathEntry> {
        self.paths.iter().find(|p| p.role == *role)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gadget index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Builder that keeps the graph, the named map and the registry in step.
pub(crate) struct Assembler {
    b: GraphBuilder,
    named: BTreeMap<String, Vertex>,
    paths: Vec<PathEntry>,
}

impl Assembler {
    pub fn new() -> Self {
        Self { b: GraphBuilder::new(), named: BTreeMap::new(), paths: Vec::new() }
    }

    pub fn named(&mut self, name: String) -> Vertex {
        let v = self.b.add_labeled(name.clone());
        let prev = self.named.insert(name, v);
        debug_assert!(prev.is_none(), "duplicate gadget name");
        v
    }

    pub fn get(&self, name: &str) -> Vertex {
        self.named[name]
    }

    pub fn path(&mut self, role: PathRole, from: Vertex, to: Vertex, internal: usize) {
        let vertices = self
            .b
            .add_path(from, to, internal, &role.to_string())
            .expect("fresh path between distinct named vertices");
        self.paths.push(PathEntry { role, from, to, internal, vertices });
    }

    /// Names an existing vertex (spine internals double as named vertices).
    pub fn rename(&mut self, v: Vertex, name: String) {
        self.b.set_label(v, name.clone());
        self.named.insert(name, v);
    }

    pub fn last_path(&self) -> &PathEntry {
        self.paths.last().expect("a path was added")
    }

    pub fn finish(self, source: Source, scale: u64, k: usize) -> (Graph, GadgetIndex) {
        let graph = self.b.build();
        let gi = GadgetIndex { kind: source.kind(), source, scale, k, named: self.named, paths: self.paths };
        (graph, gi)
    }
}
