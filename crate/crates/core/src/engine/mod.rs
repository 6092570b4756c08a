//! Exact decision of the game by backward induction over the explicit
//! position space.

mod index;
mod solve;
mod timed;

use std::collections::BTreeSet;

use thiserror::Error;

pub use index::{binom, compatible_pair_count, position_side_count, PositionIndex};
pub use solve::{solve, solve_shared, solve_with_budget, SolveReport, SolveStats, DEFAULT_BUDGET};
pub use timed::{solve_in_time, solve_in_time_with_budget, TimedReport};

use crate::graph::{compatible, DPlacement, FPlacement, Graph, Instance, Position, Side, Vertex};
use crate::separation::{lambda, ExtendedCount};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("position space of {positions} position-sides exceeds the budget of {budget}")]
    CapacityExceeded { positions: u64, budget: u64 },
    #[error("the graph is disconnected")]
    DisconnectedGraph,
    #[error("round budget must be at least 1")]
    InvalidRoundBudget,
}

/// Builds the placement index after a budget check.
pub fn enumerate_positions(g: &Graph, k: usize, budget: u64) -> Result<PositionIndex, EngineError> {
    let positions = position_side_count(g.n(), k);
    if positions > budget {
        return Err(EngineError::CapacityExceeded { positions, budget });
    }
    Ok(PositionIndex::build(g, k))
}

/// Each vertex of `agents` either stays or steps to a neighbour; returns the
/// distinct resulting multisets.
pub fn multiset_moves(g: &Graph, agents: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut out = BTreeSet::new();
    let mut cur = Vec::with_capacity(agents.len());
    fn rec(g: &Graph, agents: &[Vertex], cur: &mut Vec<Vertex>, out: &mut BTreeSet<Vec<Vertex>>) {
        if cur.len() == agents.len() {
            let mut m = cur.clone();
            m.sort_unstable();
            out.insert(m);
            return;
        }
        let v = agents[cur.len()];
        for w in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
            cur.push(w);
            rec(g, agents, cur, out);
            cur.pop();
        }
    }
    rec(g, agents, &mut cur, &mut out);
    out.into_iter().collect()
}

/// Legal half-moves from `pos`, side flipped. Staying put is always included.
pub fn successors(pos: &Position, g: &Graph) -> Vec<Position> {
    match pos.to_move {
        Side::Facilitator => multiset_moves(g, &pos.f.vertices())
            .into_iter()
            .map(|m| FPlacement::new(m[0], m[1]))
            .filter(|f| compatible(f, &pos.d))
            .map(|f| Position::new(f, pos.d.clone(), Side::Divider))
            .collect(),
        Side::Divider => multiset_moves(g, pos.d.agents())
            .into_iter()
            .map(DPlacement::new)
            .filter(|d| compatible(&pos.f, d))
            .map(|d| Position::new(pos.f, d, Side::Facilitator))
            .collect(),
    }
}

/// Legal initial Divider placements: multisets of size k avoiding s and t.
pub fn initial_placements(inst: &Instance) -> Vec<DPlacement> {
    let free: Vec<Vertex> = (0..inst.graph.n()).filter(|&v| v != inst.s && v != inst.t).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(inst.k);
    fn rec(free: &[Vertex], from: usize, k: usize, cur: &mut Vec<Vertex>, out: &mut Vec<DPlacement>) {
        if cur.len() == k {
            out.push(DPlacement::new(cur.clone()));
            return;
        }
        for i in from..free.len() {
            cur.push(free[i]);
            rec(free, i, k, cur, out);
            cur.pop();
        }
    }
    rec(&free, 0, inst.k, &mut cur, &mut out);
    out
}

/// Least number of Divider agents that wins; infinite when the terminals
/// coincide or are adjacent. Scans k upward from 1, solving each k exactly,
/// so the bound by lambda is observed rather than assumed.
pub fn dynamic_separation(g: &Graph, s: Vertex, t: Vertex) -> Result<ExtendedCount, EngineError> {
    dynamic_separation_with_budget(g, s, t, DEFAULT_BUDGET)
}

pub fn dynamic_separation_with_budget(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    budget: u64,
) -> Result<ExtendedCount, EngineError> {
    if s == t || g.has_edge(s, t) {
        return Ok(ExtendedCount::Infinite);
    }
    if !g.is_connected() {
        return Err(EngineError::DisconnectedGraph);
    }
    // n - 2 agents can occupy every non-terminal vertex, which always wins.
    for k in 1..=g.n().saturating_sub(2) {
        let inst = Instance::new(g.clone(), s, t, k).expect("valid terminals");
        if solve_with_budget(&inst, budget)?.winner == Side::Divider {
            return Ok(ExtendedCount::Finite(k as u32));
        }
    }
    unreachable!("Divider occupying every non-terminal vertex separates non-adjacent terminals")
}

/// Dynamic separation alongside lambda, for reports.
pub fn separation_numbers(g: &Graph, s: Vertex, t: Vertex, budget: u64) -> Result<(ExtendedCount, ExtendedCount), EngineError> {
    let lam = lambda(g, s, t).expect("valid terminals");
    Ok((dynamic_separation_with_budget(g, s, t, budget)?, lam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::instance_from_edges;

    fn c4(k: usize) -> Instance {
        instance_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], 0, 2, k)
    }

    #[test]
    fn c4_opposite() {
        let r1 = solve(&c4(1)).unwrap();
        assert_eq!(r1.winner, Side::Facilitator);
        assert_eq!(r1.min_rounds(), Some(1));
        assert_eq!(solve(&c4(2)).unwrap().winner, Side::Divider);
        assert_eq!(dynamic_separation(&c4(1).graph, 0, 2), Ok(ExtendedCount::Finite(2)));
        let t = solve_in_time(&c4(1), 1).unwrap();
        assert!(t.facilitator_wins);
        assert_eq!(t.min_rounds, Some(1));
    }

    #[test]
    fn c4_successors_include_meeting() {
        let pos = Position::new(FPlacement::new(0, 2), DPlacement::new(vec![1]), Side::Facilitator);
        let succ = successors(&pos, &c4(1).graph);
        assert!(succ.iter().any(|p| p.f == FPlacement::new(3, 3)));
        assert!(succ.iter().all(|p| !p.f.contains(1)));
        assert!(succ.iter().any(|p| p.f == pos.f));
    }

    #[test]
    fn boxed_divider_can_only_stay() {
        // path 0-1-2, Facilitator on both ends, Divider in the middle
        let g = instance_from_edges(3, &[(0, 1), (1, 2)], 0, 2, 1).graph;
        let pos = Position::new(FPlacement::new(0, 2), DPlacement::new(vec![1]), Side::Divider);
        let succ = successors(&pos, &g);
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].d, pos.d);
    }

    #[test]
    fn coinciding_terminals() {
        let inst = instance_from_edges(3, &[(0, 1), (1, 2)], 1, 1, 2);
        let r = solve(&inst).unwrap();
        assert_eq!(r.winner, Side::Facilitator);
        assert_eq!(r.min_rounds(), Some(0));
        assert_eq!(dynamic_separation(&inst.graph, 1, 1), Ok(ExtendedCount::Infinite));
    }

    #[test]
    fn adjacent_terminals_meet_in_one() {
        let inst = instance_from_edges(3, &[(0, 1), (1, 2)], 0, 1, 2);
        let r = solve(&inst).unwrap();
        assert_eq!(r.winner, Side::Facilitator);
        assert_eq!(r.min_rounds(), Some(1));
        assert_eq!(solve_in_time(&inst, 1).unwrap().min_rounds, Some(1));
    }

    #[test]
    fn budget_is_checked_first() {
        let err = solve_with_budget(&c4(1), 10).unwrap_err();
        assert_eq!(err, EngineError::CapacityExceeded { positions: 48, budget: 10 });
    }

    #[test]
    fn disconnected_is_rejected() {
        let inst = instance_from_edges(3, &[(0, 1)], 0, 2, 1);
        assert_eq!(solve(&inst).unwrap_err(), EngineError::DisconnectedGraph);
    }
}
