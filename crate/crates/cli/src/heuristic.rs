//! Fallback Divider play for sessions whose position space is over budget.
//! The Facilitator side falls back to the core crate's joint rush.

use rendezvous_core::graph::{DPlacement, Graph, Instance, Position, Vertex};
use rendezvous_core::min_vertex_cut;
use rendezvous_core::sim::{rush_move, DividerStrategy, StrategyError};

/// Divider heuristic: when a minimum cut fits in k agents, park agents on it
/// for good; every other agent shadows the Facilitator's predicted rush.
#[derive(Debug, Clone)]
pub struct CutHolder {
    holders: Vec<Vertex>,
}

impl CutHolder {
    pub fn new(inst: &Instance) -> Self {
        let cut = min_vertex_cut(&inst.graph, inst.s, inst.t).map(|c| c.vertices).unwrap_or_default();
        let holders = if cut.len() <= inst.k { cut } else { Vec::new() };
        Self { holders }
    }

    pub fn holds_cut(&self) -> bool {
        !self.holders.is_empty()
    }

    pub fn placement(&self, inst: &Instance) -> Option<DPlacement> {
        let g = &inst.graph;
        let mut agents = self.holders.clone();
        // remaining agents start as close to a terminal as possible
        let ds = g.distances_from(inst.s, &[]);
        let dt = g.distances_from(inst.t, &[]);
        let mut free: Vec<(usize, Vertex)> = (0..g.n())
            .filter(|&v| v != inst.s && v != inst.t && !agents.contains(&v))
            .map(|v| (ds[v].unwrap_or(usize::MAX).min(dt[v].unwrap_or(usize::MAX)), v))
            .collect();
        free.sort_unstable();
        let mut spare = free.into_iter().map(|(_, v)| v);
        while agents.len() < inst.k {
            let v = spare.next().or_else(|| agents.first().copied())?;
            agents.push(v);
        }
        Some(DPlacement::new(agents))
    }

    pub fn reply(&self, g: &Graph, pos: &Position) -> DPlacement {
        let f = pos.f.vertices();
        let predicted = rush_move(g, &pos.f, pos.d.agents()).vertices();
        let mut targets: Vec<Vertex> = predicted.into_iter().filter(|v| !f.contains(v)).collect();
        let mut held: Vec<Vertex> = self.holders.clone();
        let mut out = Vec::with_capacity(pos.d.len());
        for &v in pos.d.agents() {
            if let Some(i) = held.iter().position(|&h| h == v) {
                held.swap_remove(i);
                out.push(v);
                continue;
            }
            if let Some(i) = targets.iter().position(|&p| p == v || g.has_edge(v, p)) {
                out.push(targets.swap_remove(i));
                continue;
            }
            out.push(close_in(g, v, &f));
        }
        DPlacement::new(out)
    }
}

/// One step from `v` toward the nearer Facilitator agent, never onto one.
fn close_in(g: &Graph, v: Vertex, f: &[Vertex; 2]) -> Vertex {
    let dist: Vec<Vec<Option<usize>>> = f.iter().map(|&a| g.distances_from(a, &[])).collect();
    let near = |w: Vertex| dist.iter().filter_map(|d| d[w]).min().unwrap_or(usize::MAX);
    std::iter::once(v)
        .chain(g.neighbors(v).iter().copied())
        .filter(|w| !f.contains(w))
        .min_by_key(|&w| (near(w), w != v))
        .unwrap_or(v)
}

/// `CutHolder` as a strategy for the referee.
pub struct HeuristicDivider<'g> {
    graph: &'g Graph,
    plan: CutHolder,
}

impl<'g> HeuristicDivider<'g> {
    pub fn new(inst: &'g Instance) -> Self {
        Self { graph: &inst.graph, plan: CutHolder::new(inst) }
    }
}

impl DividerStrategy for HeuristicDivider<'_> {
    fn place(&mut self, inst: &Instance) -> Result<DPlacement, StrategyError> {
        self.plan.placement(inst).ok_or_else(|| StrategyError::NoMove("no legal placement".into()))
    }

    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError> {
        Ok(self.plan.reply(self.graph, pos))
    }
}
