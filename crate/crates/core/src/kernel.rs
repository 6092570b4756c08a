//! Preprocessing under the vertex-cover parameter: the trivial-yes rule and
//! twin-class curtailment, giving an exponential kernel.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Instance, Vertex};

pub const DEFAULT_COVER_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("edge {0}-{1} has no endpoint in the cover")]
    CoverInvalid(Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCoverWitness {
    /// Sorted; always contains both terminals.
    pub x: Vec<Vertex>,
    /// True when `x` is a minimum cover among those containing the terminals.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwinClass {
    /// The shared neighbourhood, a subset of the cover.
    pub y: Vec<Vertex>,
    pub members: Vec<Vertex>,
}

fn greedy_matching(g: &Graph, covered: &[bool]) -> Vec<(Vertex, Vertex)> {
    let mut used = vec![false; g.n()];
    let mut m = Vec::new();
    for (u, v) in g.edges() {
        if covered[u] || covered[v] || used[u] || used[v] {
            continue;
        }
        used[u] = true;
        used[v] = true;
        m.push((u, v));
    }
    m
}

struct Brancher<'g> {
    g: &'g Graph,
    in_cover: Vec<bool>,
    size: usize,
    limit: usize,
}

impl Brancher<'_> {
    /// Depth-first: highest-degree uncovered vertex goes in, or all its
    /// uncovered neighbours do.
    fn search(&mut self) -> bool {
        let lower = greedy_matching(self.g, &self.in_cover).len();
        if self.size + lower > self.limit {
            return false;
        }
        let pick = (0..self.g.n())
            .filter(|&v| !self.in_cover[v])
            .map(|v| (self.open_neighbors(v).len(), v))
            .filter(|&(d, _)| d > 0)
            .max_by_key(|&(d, v)| (d, std::cmp::Reverse(v)));
        let Some((_, v)) = pick else {
            return true;
        };
        self.take(&[v]);
        if self.search() {
            return true;
        }
        self.untake(&[v]);
        let ns = self.open_neighbors(v);
        if self.size + ns.len() <= self.limit {
            self.take(&ns);
            if self.search() {
                return true;
            }
            self.untake(&ns);
        }
        false
    }

    fn open_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.g.neighbors(v).iter().copied().filter(|&w| !self.in_cover[w]).collect()
    }

    fn take(&mut self, vs: &[Vertex]) {
        for &v in vs {
            self.in_cover[v] = true;
        }
        self.size += vs.len();
    }

    fn untake(&mut self, vs: &[Vertex]) {
        for &v in vs {
            self.in_cover[v] = false;
        }
        self.size -= vs.len();
    }
}

/// Minimum vertex cover containing `s` and `t` when one of size at most
/// `budget` exists; otherwise a matching-based 2-approximation.
pub fn vertex_cover(g: &Graph, s: Vertex, t: Vertex, budget: usize) -> VertexCoverWitness {
    let mut forced = vec![false; g.n()];
    forced[s] = true;
    forced[t] = true;
    let base = if s == t { 1 } else { 2 };
    for limit in base..=budget {
        let mut b = Brancher { g, in_cover: forced.clone(), size: base, limit };
        if b.search() {
            let x = (0..g.n()).filter(|&v| b.in_cover[v]).collect();
            return VertexCoverWitness { x, exact: true };
        }
    }
    let mut in_cover = forced;
    for (u, v) in greedy_matching(g, &in_cover.clone()) {
        in_cover[u] = true;
        in_cover[v] = true;
    }
    VertexCoverWitness { x: (0..g.n()).filter(|&v| in_cover[v]).collect(), exact: false }
}

/// Partition of the vertices outside the cover by their neighbourhood.
pub fn twin_classes(g: &Graph, x: &VertexCoverWitness) -> Result<Vec<TwinClass>, KernelError> {
    let mut in_x = vec![false; g.n()];
    for &v in &x.x {
        in_x[v] = true;
    }
    if let Some((u, v)) = g.edges().find(|&(u, v)| !in_x[u] && !in_x[v]) {
        return Err(KernelError::CoverInvalid(u, v));
    }
    let mut classes: BTreeMap<Vec<Vertex>, Vec<Vertex>> = BTreeMap::new();
    for v in (0..g.n()).filter(|&v| !in_x[v]) {
        classes.entry(g.neighbors(v).to_vec()).or_default().push(v);
    }
    Ok(classes.into_iter().map(|(y, members)| TwinClass { y, members }).collect())
}

/// Whether the instance is a trivial Facilitator win: `s = t`, or `st` is an
/// edge, or more than `k` common neighbours exist (any condition suffices).
pub fn apply_rule1(inst: &Instance) -> bool {
    if inst.terminals_touch() {
        return true;
    }
    let common = inst
        .graph
        .neighbors(inst.s)
        .iter()
        .filter(|&&v| inst.graph.has_edge(inst.t, v))
        .count();
    common > inst.k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curtailed {
    pub instance: Instance,
    /// Deleted vertices, in the input's numbering.
    pub deleted: Vec<Vertex>,
    /// Surviving vertices in order: new index `i` was old `kept[i]`.
    pub kept: Vec<Vertex>,
    pub classes_touched: usize,
}

/// Cuts every twin class down to its `k + 1` lowest-index members.
pub fn apply_rule2(inst: &Instance, x: &VertexCoverWitness) -> Result<Curtailed, KernelError> {
    let classes = twin_classes(&inst.graph, x)?;
    let mut drop = vec![false; inst.graph.n()];
    let mut touched = 0;
    for class in &classes {
        if class.members.len() > inst.k + 1 {
            touched += 1;
            for &v in &class.members[inst.k + 1..] {
                drop[v] = true;
            }
        }
    }
    let kept: Vec<Vertex> = (0..inst.graph.n()).filter(|&v| !drop[v]).collect();
    let deleted: Vec<Vertex> = (0..inst.graph.n()).filter(|&v| drop[v]).collect();
    let remap = |v: Vertex| kept.binary_search(&v).expect("terminals are never deleted");
    let graph = inst.graph.induced(&kept);
    let instance = Instance::new(graph, remap(inst.s), remap(inst.t), inst.k).expect("terminals kept");
    Ok(Curtailed { instance, deleted, kept, classes_touched: touched })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub trivial_yes: bool,
    #[serde(skip)]
    pub reduced: Option<Instance>,
    /// Deleted vertices, in the input's numbering.
    pub deleted: Vec<Vertex>,
    pub classes_touched: usize,
    pub vc: usize,
    pub exact: bool,
    /// `|X| + 2^|X| * (k + 1)`, saturating.
    pub bound: u64,
    pub size_bound_ok: bool,
}

pub fn kernel_bound(cover_size: usize, k: usize) -> u64 {
    let pow = if cover_size >= 63 { u64::MAX } else { 1u64 << cover_size };
    pow.saturating_mul(k as u64 + 1).saturating_add(cover_size as u64)
}

pub fn kernelize(inst: &Instance) -> Result<KernelReport, KernelError> {
    kernelize_with_budget(inst, DEFAULT_COVER_BUDGET)
}

pub fn kernelize_with_budget(inst: &Instance, cover_budget: usize) -> Result<KernelReport, KernelError> {
    if apply_rule1(inst) {
        return Ok(KernelReport {
            trivial_yes: true,
            reduced: None,
            deleted: Vec::new(),
            classes_touched: 0,
            vc: 0,
            exact: false,
            bound: 0,
            size_bound_ok: true,
        });
    }
    let cover = vertex_cover(&inst.graph, inst.s, inst.t, cover_budget);
    let step = apply_rule2(inst, &cover)?;
    let bound = kernel_bound(cover.x.len(), inst.k);
    let n = step.instance.graph.n() as u64;
    // One pass reaches the fixpoint: the cover survives and every class is
    // already at most k + 1.
    Ok(KernelReport {
        trivial_yes: false,
        deleted: step.deleted,
        classes_touched: step.classes_touched,
        vc: cover.x.len(),
        exact: cover.exact,
        bound,
        size_bound_ok: n <= bound,
        reduced: Some(step.instance),
    })
}
