//! Undirected simple graphs, game instances and the multiset placements the
//! solver works with.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Dense vertex index.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
}

/// Undirected simple graph with sorted adjacency lists and optional sidecar
/// metadata (labels, grid coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    labels: Vec<Option<String>>,
    coords: Vec<Option<(u32, u32)>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops and parallel edges.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::with_vertices(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn set_label(&mut self, v: Vertex, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    pub fn coord(&self, v: Vertex) -> Option<(u32, u32)> {
        self.coords[v]
    }

    pub fn set_coord(&mut self, v: Vertex, row: u32, col: u32) {
        self.coords[v] = Some((row, col));
    }

    /// True when every vertex carries grid coordinates.
    pub fn has_full_coords(&self) -> bool {
        self.n() > 0 && self.coords.iter().all(Option::is_some)
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<Vertex> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.distances_from(0, &[]).iter().all(Option::is_some)
    }

    /// BFS distances from `src` in the graph with `blocked` vertices removed.
    /// A blocked source yields all-`None`.
    pub fn distances_from(&self, src: Vertex, blocked: &[Vertex]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        if blocked.contains(&src) {
            return dist;
        }
        let mut removed = vec![false; self.n()];
        for &b in blocked {
            removed[b] = true;
        }
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if !removed[w] && dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Whether `s` and `t` are connected once `removed` is deleted.
    pub fn connected_avoiding(&self, s: Vertex, t: Vertex, removed: &[Vertex]) -> bool {
        self.distances_from(s, removed)[t].is_some()
    }

    /// Connected components of the graph minus `removed`, each sorted.
    pub fn components_avoiding(&self, removed: &[Vertex]) -> Vec<Vec<Vertex>> {
        let mut gone = vec![false; self.n()];
        for &r in removed {
            gone[r] = true;
        }
        let mut seen = gone.clone();
        let mut out = Vec::new();
        for root in 0..self.n() {
            if seen[root] {
                continue;
            }
            let mut comp = vec![root];
            seen[root] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Induced subgraph on `keep` (must be sorted, duplicate-free), relabelled
    /// densely in the order given. Metadata is carried over.
    pub fn induced(&self, keep: &[Vertex]) -> Graph {
        let mut map = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut ns: Vec<Vertex> = self.adj[v]
                    .iter()
                    .filter(|&&w| map[w] != usize::MAX)
                    .map(|&w| map[w])
                    .collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        Graph {
            adj,
            labels: keep.iter().map(|&v| self.labels[v].clone()).collect(),
            coords: keep.iter().map(|&v| self.coords[v]).collect(),
        }
    }
}

/// Incremental construction; `build` canonicalizes adjacency order.
#[derive(Default, Debug, Clone)]
pub struct GraphBuilder {
    adj: Vec<Vec<Vertex>>,
    labels: Vec<Option<String>>,
    coords: Vec<Option<(u32, u32)>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            labels: vec![None; n],
            coords: vec![None; n],
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(Vec::new());
        self.labels.push(None);
        self.coords.push(None);
        self.adj.len() - 1
    }

    pub fn add_labeled(&mut self, label: impl Into<String>) -> Vertex {
        let v = self.add_vertex();
        self.labels[v] = Some(label.into());
        v
    }

    pub fn set_label(&mut self, v: Vertex, label: impl Into<String>) {
        self.labels[v] = Some(label.into());
    }

    pub fn set_coord(&mut self, v: Vertex, row: u32, col: u32) {
        self.coords[v] = Some((row, col));
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(u).is_some_and(|ns| ns.contains(&v))
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        Ok(())
    }

    /// Adds a path `from - x1 - ... - x_internal - to` and returns the
    /// internal vertices in order from `from` to `to`.
    pub fn add_path(
        &mut self,
        from: Vertex,
        to: Vertex,
        internal: usize,
        label_prefix: &str,
    ) -> Result<Vec<Vertex>, GraphError> {
        let mut inner = Vec::with_capacity(internal);
        let mut prev = from;
        for i in 0..internal {
            let x = self.add_labeled(format!("{label_prefix}.{}", i + 1));
            self.add_edge(prev, x)?;
            inner.push(x);
            prev = x;
        }
        self.add_edge(prev, to)?;
        Ok(inner)
    }

    pub fn build(mut self) -> Graph {
        for ns in &mut self.adj {
            ns.sort_unstable();
        }
        Graph {
            adj: self.adj,
            labels: self.labels,
            coords: self.coords,
        }
    }
}

/// One query: can Facilitator, starting from `s` and `t`, beat `k` Divider agents?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub s: Vertex,
    pub t: Vertex,
    pub k: usize,
    /// Recorded at construction; the solver refuses disconnected arenas.
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("terminal {vertex} out of range for a graph on {n} vertices")]
    TerminalOutOfRange { vertex: Vertex, n: usize },
    #[error("agent count must be at least 1")]
    NoAgents,
}

impl Instance {
    pub fn new(graph: Graph, s: Vertex, t: Vertex, k: usize) -> Result<Self, InstanceError> {
        let n = graph.n();
        for v in [s, t] {
            if v >= n {
                return Err(InstanceError::TerminalOutOfRange { vertex: v, n });
            }
        }
        if k == 0 {
            return Err(InstanceError::NoAgents);
        }
        let connected = graph.is_connected();
        Ok(Self { graph, s, t, k, connected })
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    /// `s = t` or `st` is an edge: Facilitator meets at once.
    pub fn terminals_touch(&self) -> bool {
        self.s == self.t || self.graph.has_edge(self.s, self.t)
    }

    pub fn start(&self) -> FPlacement {
        FPlacement::new(self.s, self.t)
    }
}

/// The two Facilitator agents as a sorted pair; the agents may coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPlacement([Vertex; 2]);

impl FPlacement {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        Self([a.min(b), a.max(b)])
    }

    pub fn vertices(&self) -> [Vertex; 2] {
        self.0
    }

    pub fn is_meeting(&self) -> bool {
        self.0[0] == self.0[1]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0[0] == v || self.0[1] == v
    }
}

impl fmt::Display for FPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0[0], self.0[1])
    }
}

/// The Divider's agents as a sorted multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DPlacement(Vec<Vertex>);

impl DPlacement {
    pub fn new(mut agents: Vec<Vertex>) -> Self {
        agents.sort_unstable();
        Self(agents)
    }

    pub fn agents(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

impl fmt::Display for DPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Facilitator,
    Divider,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Facilitator => Side::Divider,
            Side::Divider => Side::Facilitator,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Facilitator => "Facilitator",
            Side::Divider => "Divider",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    pub f: FPlacement,
    pub d: DPlacement,
    pub to_move: Side,
}

impl Position {
    pub fn new(f: FPlacement, d: DPlacement, to_move: Side) -> Self {
        Self { f, d, to_move }
    }

    pub fn is_compatible(&self) -> bool {
        compatible(&self.f, &self.d)
    }
}

/// No vertex holds agents of both players.
pub fn compatible(f: &FPlacement, d: &DPlacement) -> bool {
    !f.vertices().iter().any(|&v| d.contains(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("multisets of different sizes ({0} vs {1})")]
pub struct SizeMismatch(pub usize, pub usize);

/// Whether some bijection maps every element of `x` to itself or to a
/// neighbour in `y`.
pub fn multiset_adjacent(x: &[Vertex], y: &[Vertex], g: &Graph) -> Result<bool, SizeMismatch> {
    if x.len() != y.len() {
        return Err(SizeMismatch(x.len(), y.len()));
    }
    let step = |a: Vertex, b: Vertex| a == b || g.has_edge(a, b);
    Ok(match x.len() {
        0 => true,
        1 => step(x[0], y[0]),
        2 => (step(x[0], y[0]) && step(x[1], y[1])) || (step(x[0], y[1]) && step(x[1], y[0])),
        _ => has_perfect_matching(x, y, step),
    })
}

/// Kuhn's augmenting-path matching on the bipartite stay-or-step graph.
fn has_perfect_matching(x: &[Vertex], y: &[Vertex], step: impl Fn(Vertex, Vertex) -> bool) -> bool {
    let k = x.len();
    let ok: Vec<Vec<bool>> = x.iter().map(|&a| y.iter().map(|&b| step(a, b)).collect()).collect();
    let mut match_y = vec![usize::MAX; k];

    fn augment(i: usize, ok: &[Vec<bool>], seen: &mut [bool], match_y: &mut [usize]) -> bool {
        for j in 0..ok[i].len() {
            if ok[i][j] && !seen[j] {
                seen[j] = true;
                if match_y[j] == usize::MAX || augment(match_y[j], ok, seen, match_y) {
                    match_y[j] = i;
                    return true;
                }
            }
        }
        false
    }

    (0..k).all(|i| {
        let mut seen = vec![false; k];
        augment(i, &ok, &mut seen, &mut match_y)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn builder_rejects_bad_edges() {
        let mut b = GraphBuilder::with_vertices(3);
        b.add_edge(0, 1).unwrap();
        assert_eq!(b.add_edge(1, 0), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(b.add_edge(2, 2), Err(GraphError::SelfLoop(2)));
        assert_eq!(b.add_edge(0, 5), Err(GraphError::VertexOutOfRange { vertex: 5, n: 3 }));
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::from_edges(4, &[(3, 0), (0, 1), (2, 0)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2, 3]);
        assert!(g.has_edge(3, 0) && g.has_edge(0, 3));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn pair_adjacency_cases() {
        let g = path(4); // 0-1-2-3
        assert!(multiset_adjacent(&[0, 0], &[0, 1], &g).unwrap());
        assert!(multiset_adjacent(&[1, 2], &[1, 2], &g).unwrap());
        assert!(!multiset_adjacent(&[0, 1], &[2, 3], &g).unwrap());
        assert!(multiset_adjacent(&[0, 1], &[1, 2], &g).unwrap());
        assert_eq!(multiset_adjacent(&[0], &[0, 1], &g), Err(SizeMismatch(1, 2)));
    }

    #[test]
    fn compatibility() {
        let f = FPlacement::new(0, 3);
        assert!(compatible(&f, &DPlacement::new(vec![1, 2])));
        assert!(!compatible(&FPlacement::new(2, 2), &DPlacement::new(vec![2, 1])));
    }

    #[test]
    fn components_and_induced() {
        let g = path(5);
        assert_eq!(g.components_avoiding(&[2]), vec![vec![0, 1], vec![3, 4]]);
        let h = g.induced(&[1, 2, 3]);
        assert_eq!(h.n(), 3);
        assert_eq!(h.edge_count(), 2);
        assert!(!g.connected_avoiding(0, 4, &[2]));
    }
}
