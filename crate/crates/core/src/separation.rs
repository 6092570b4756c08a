//! Static separation: minimum vertex (s,t)-cuts via unit-capacity max-flow
//! on the vertex-split network.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// A count that may be infinite; `Infinite` sorts after every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedCount {
    Finite(u32),
    Infinite,
}

impl ExtendedCount {
    pub fn finite(self) -> Option<u32> {
        match self {
            ExtendedCount::Finite(v) => Some(v),
            ExtendedCount::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtendedCount::Infinite
    }
}

impl fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCount::Finite(v) => write!(f, "{v}"),
            ExtendedCount::Infinite => f.write_str("inf"),
        }
    }
}

// JSON: a plain number, or the string "inf".
impl Serialize for ExtendedCount {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedCount::Finite(v) => ser.serialize_u32(*v),
            ExtendedCount::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCount {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(v) => Ok(ExtendedCount::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtendedCount::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a count or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("vertex {vertex} out of range (n = {n})")]
    InvalidVertex { vertex: Vertex, n: usize },
    #[error("no vertex cut exists: terminals coincide or are adjacent")]
    CutUndefined,
}

/// A minimum vertex cut, sorted, never containing a terminal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub vertices: Vec<Vertex>,
}

struct FlowNet {
    head: Vec<usize>,
    // Edge arrays; edge e and e^1 are a residual pair.
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
}

const NONE: usize = usize::MAX;
const BIG: u32 = u32::MAX / 2;

impl FlowNet {
    fn new(nodes: usize) -> Self {
        Self { head: vec![NONE; nodes], to: Vec::new(), cap: Vec::new(), next: Vec::new() }
    }

    fn arc(&mut self, u: usize, v: usize, c: u32) {
        for (a, b, c) in [(u, v, c), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    /// BFS from `src` over positive-residual arcs; returns the parent arc per node.
    fn bfs(&self, src: usize) -> Vec<usize> {
        let mut parent = vec![NONE; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[src] = true;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            let mut e = self.head[u];
            while e != NONE {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    parent[v] = e;
                    q.push_back(v);
                }
                e = self.next[e];
            }
        }
        parent
    }
}

fn check(g: &Graph, v: Vertex) -> Result<(), SeparationError> {
    if v >= g.n() {
        Err(SeparationError::InvalidVertex { vertex: v, n: g.n() })
    } else {
        Ok(())
    }
}

/// Runs the flow and returns (value, witness). Assumes s != t and st not an edge.
fn max_flow_cut(g: &Graph, s: Vertex, t: Vertex) -> (u32, Vec<Vertex>) {
    let inn = |v: Vertex| 2 * v;
    let out = |v: Vertex| 2 * v + 1;
    let mut net = FlowNet::new(2 * g.n());
    for v in 0..g.n() {
        let c = if v == s || v == t { BIG } else { 1 };
        net.arc(inn(v), out(v), c);
    }
    for (u, v) in g.edges() {
        net.arc(out(u), inn(v), BIG);
        net.arc(out(v), inn(u), BIG);
    }
    let (src, sink) = (out(s), inn(t));
    let mut flow = 0;
    loop {
        let parent = net.bfs(src);
        if parent[sink] == NONE {
            break;
        }
        // Every augmenting path crosses at least one unit vertex arc.
        let mut node = sink;
        while node != src {
            let e = parent[node];
            net.cap[e] -= 1;
            net.cap[e ^ 1] += 1;
            node = net.to[e ^ 1];
        }
        flow += 1;
    }
    let parent = net.bfs(src);
    let reach = |x: usize| x == src || parent[x] != NONE;
    let cut = (0..g.n())
        .filter(|&v| v != s && v != t && reach(inn(v)) && !reach(out(v)))
        .collect();
    (flow, cut)
}

/// Minimum number of non-terminal vertices separating `s` from `t`.
pub fn lambda(g: &Graph, s: Vertex, t: Vertex) -> Result<ExtendedCount, SeparationError> {
    check(g, s)?;
    check(g, t)?;
    if s == t || g.has_edge(s, t) {
        return Ok(ExtendedCount::Infinite);
    }
    Ok(ExtendedCount::Finite(max_flow_cut(g, s, t).0))
}

pub fn min_vertex_cut(g: &Graph, s: Vertex, t: Vertex) -> Result<CutWitness, SeparationError> {
    check(g, s)?;
    check(g, t)?;
    if s == t || g.has_edge(s, t) {
        return Err(SeparationError::CutUndefined);
    }
    let (flow, vertices) = max_flow_cut(g, s, t);
    debug_assert_eq!(vertices.len(), flow as usize);
    debug_assert!(!g.connected_avoiding(s, t, &vertices));
    Ok(CutWitness { vertices })
}
