//! Playing games out: strategy providers and a legality-checking referee.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{initial_placements, successors, SolveReport};
use crate::graph::{compatible, multiset_adjacent, DPlacement, FPlacement, Graph, Instance, Position, Side, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy has no move for this position: {0}")]
    NoMove(String),
    #[error("case not covered by the strategy: {0}")]
    Uncovered(String),
    #[error("no violated clause: the strategy does not apply")]
    NoViolatedClause,
}

pub trait FacilitatorStrategy {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError>;
}

pub trait DividerStrategy {
    fn place(&mut self, inst: &Instance) -> Result<DPlacement, StrategyError>;
    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{side} made an illegal move in round {round}")]
    IllegalMove { side: Side, round: u32 },
    #[error("{side} strategy failed in round {round}: {source}")]
    StrategyFailed { side: Side, round: u32, source: StrategyError },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Met { vertex: Vertex, round: u32 },
    Ongoing { rounds: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub round: u32,
    pub f: [Vertex; 2],
    pub d: Vec<Vertex>,
    pub to_move: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
}

impl Trace {
    pub fn met(&self) -> bool {
        matches!(self.outcome, Outcome::Met { .. })
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.steps.iter().map(|s| {
            Position::new(FPlacement::new(s.f[0], s.f[1]), DPlacement::new(s.d.clone()), s.to_move)
        })
    }
}

fn record(steps: &mut Vec<TraceStep>, round: u32, pos: &Position) {
    steps.push(TraceStep { round, f: pos.f.vertices(), d: pos.d.agents().to_vec(), to_move: pos.to_move });
}

/// Checks a Divider placement: k agents on valid vertices other than s and t.
pub fn legal_placement(inst: &Instance, d: &DPlacement) -> bool {
    d.len() == inst.k
        && d.agents().iter().all(|&v| v < inst.graph.n())
        && compatible(&inst.start(), d)
}

/// Whether `next` is a legal half-move from `pos` (by the side to move).
pub fn legal_move(g: &Graph, pos: &Position, next: &Position) -> bool {
    match pos.to_move {
        Side::Facilitator => {
            next.d == pos.d
                && next.f.vertices().iter().all(|&v| v < g.n())
                && compatible(&next.f, &next.d)
                && multiset_adjacent(&pos.f.vertices(), &next.f.vertices(), g).unwrap_or(false)
        }
        Side::Divider => {
            next.f == pos.f
                && next.d.len() == pos.d.len()
                && next.d.agents().iter().all(|&v| v < g.n())
                && compatible(&next.f, &next.d)
                && multiset_adjacent(pos.d.agents(), next.d.agents(), g).unwrap_or(false)
        }
    }
}

/// Plays up to `max_rounds` Facilitator moves. Round 0 is the placement.
pub fn simulate(
    inst: &Instance,
    fac: &mut dyn FacilitatorStrategy,
    div: &mut dyn DividerStrategy,
    max_rounds: u32,
) -> Result<Trace, SimError> {
    let mut steps = Vec::new();
    let start = inst.start();
    if start.is_meeting() {
        return Ok(Trace { steps, outcome: Outcome::Met { vertex: inst.s, round: 0 } });
    }
    let fail = |side, round| move |source| SimError::StrategyFailed { side, round, source };
    let d0 = div.place(inst).map_err(fail(Side::Divider, 0))?;
    if !legal_placement(inst, &d0) {
        return Err(SimError::IllegalMove { side: Side::Divider, round: 0 });
    }
    let mut pos = Position::new(start, d0, Side::Facilitator);
    record(&mut steps, 0, &pos);
    for round in 1..=max_rounds {
        let f = fac.next(&pos).map_err(fail(Side::Facilitator, round))?;
        let next = Position::new(f, pos.d.clone(), Side::Divider);
        if !legal_move(&inst.graph, &pos, &next) {
            return Err(SimError::IllegalMove { side: Side::Facilitator, round });
        }
        pos = next;
        record(&mut steps, round, &pos);
        if pos.f.is_meeting() {
            return Ok(Trace { steps, outcome: Outcome::Met { vertex: pos.f.vertices()[0], round } });
        }
        let d = div.next(&pos).map_err(fail(Side::Divider, round))?;
        let next = Position::new(pos.f, d, Side::Facilitator);
        if !legal_move(&inst.graph, &pos, &next) {
            return Err(SimError::IllegalMove { side: Side::Divider, round });
        }
        pos = next;
        record(&mut steps, round, &pos);
    }
    Ok(Trace { steps, outcome: Outcome::Ongoing { rounds: max_rounds } })
}

/// Plays the solver's Facilitator strategy; falls back to staying when
/// outside the winning region.
pub struct OptimalFacilitator {
    report: Arc<SolveReport>,
}

impl OptimalFacilitator {
    pub fn new(report: Arc<SolveReport>) -> Self {
        Self { report }
    }
}

impl FacilitatorStrategy for OptimalFacilitator {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError> {
        Ok(self.report.fac_move(pos).unwrap_or(pos.f))
    }
}

/// Plays the solver's Divider strategy; outside its region it stays put.
pub struct OptimalDivider {
    report: Arc<SolveReport>,
}

impl OptimalDivider {
    pub fn new(report: Arc<SolveReport>) -> Self {
        Self { report }
    }
}

impl DividerStrategy for OptimalDivider {
    fn place(&mut self, inst: &Instance) -> Result<DPlacement, StrategyError> {
        if let Some(d) = self.report.div_placement() {
            return Ok(d);
        }
        initial_placements(inst)
            .into_iter()
            .next()
            .ok_or_else(|| StrategyError::NoMove("no legal placement".into()))
    }

    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError> {
        Ok(self.report.div_move(pos).unwrap_or_else(|| pos.d.clone()))
    }
}

/// Uniformly random legal moves.
pub struct RandomFacilitator<'g, R> {
    graph: &'g Graph,
    rng: R,
}

impl<'g, R: Rng> RandomFacilitator<'g, R> {
    pub fn new(graph: &'g Graph, rng: R) -> Self {
        Self { graph, rng }
    }
}

impl<R: Rng> FacilitatorStrategy for RandomFacilitator<'_, R> {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError> {
        let succ = successors(pos, self.graph);
        Ok(succ.choose(&mut self.rng).map(|p| p.f).unwrap_or(pos.f))
    }
}

pub struct RandomDivider<'g, R> {
    graph: &'g Graph,
    rng: R,
}

impl<'g, R: Rng> RandomDivider<'g, R> {
    pub fn new(graph: &'g Graph, rng: R) -> Self {
        Self { graph, rng }
    }
}

impl<R: Rng> DividerStrategy for RandomDivider<'_, R> {
    fn place(&mut self, inst: &Instance) -> Result<DPlacement, StrategyError> {
        let free: Vec<Vertex> = (0..inst.graph.n()).filter(|&v| v != inst.s && v != inst.t).collect();
        if free.is_empty() {
            return Err(StrategyError::NoMove("no legal placement".into()));
        }
        Ok(DPlacement::new((0..inst.k).map(|_| *free.choose(&mut self.rng).unwrap()).collect()))
    }

    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError> {
        let succ = successors(pos, self.graph);
        Ok(succ.choose(&mut self.rng).map(|p| p.d.clone()).unwrap_or_else(|| pos.d.clone()))
    }
}

/// Rushes both agents toward the free vertex minimizing the later arrival,
/// routing around the Divider's current agents.
pub struct GreedyRushFacilitator<'g> {
    graph: &'g Graph,
}

impl<'g> GreedyRushFacilitator<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }
}

/// Next vertex on a shortest path from `from` to `to` avoiding `blocked`,
/// lowest index on ties; `None` if unreachable.
pub fn step_toward(g: &Graph, from: Vertex, to: Vertex, blocked: &[Vertex]) -> Option<Vertex> {
    if from == to {
        return Some(from);
    }
    let dist = g.distances_from(to, blocked);
    let here = dist[from]?;
    g.neighbors(from).iter().copied().find(|&w| dist[w] == Some(here - 1))
}

/// The joint rush used by greedy play: target minimizing the later arrival.
pub fn rush_move(g: &Graph, f: &FPlacement, blocked: &[Vertex]) -> FPlacement {
    let [r, j] = f.vertices();
    let dr = g.distances_from(r, blocked);
    let dj = g.distances_from(j, blocked);
    let target = (0..g.n())
        .filter_map(|v| Some((dr[v]?.max(dj[v]?), dr[v]? + dj[v]?, v)))
        .min()
        .map(|(_, _, v)| v);
    let Some(v) = target else {
        return *f;
    };
    let nr = step_toward(g, r, v, blocked).unwrap_or(r);
    let nj = step_toward(g, j, v, blocked).unwrap_or(j);
    FPlacement::new(nr, nj)
}

impl FacilitatorStrategy for GreedyRushFacilitator<'_> {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError> {
        Ok(rush_move(self.graph, &pos.f, pos.d.agents()))
    }
}

/// Never moves; the paper's "keeping their positions" baseline.
pub struct IdleFacilitator;

impl FacilitatorStrategy for IdleFacilitator {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError> {
        Ok(pos.f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::solve_shared;
    use crate::format::instance_from_edges;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c4(k: usize) -> Instance {
        instance_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], 0, 2, k)
    }

    #[test]
    fn optimal_facilitator_meets_on_c4() {
        let inst = c4(1);
        let report = solve_shared(&inst, 1000).unwrap();
        let mut fac = OptimalFacilitator::new(report);
        let mut div = RandomDivider::new(&inst.graph, ChaCha8Rng::seed_from_u64(1));
        let trace = simulate(&inst, &mut fac, &mut div, 10).unwrap();
        assert!(matches!(trace.outcome, Outcome::Met { round: 1, .. }));
    }

    #[test]
    fn optimal_divider_holds_on_c4() {
        let inst = c4(2);
        let report = solve_shared(&inst, 10_000).unwrap();
        let mut fac = RandomFacilitator::new(&inst.graph, ChaCha8Rng::seed_from_u64(2));
        let mut div = OptimalDivider::new(report);
        let trace = simulate(&inst, &mut fac, &mut div, 100).unwrap();
        assert_eq!(trace.outcome, Outcome::Ongoing { rounds: 100 });
    }

    struct Teleporter;
    impl FacilitatorStrategy for Teleporter {
        fn next(&mut self, _: &Position) -> Result<FPlacement, StrategyError> {
            Ok(FPlacement::new(2, 4))
        }
    }

    #[test]
    fn illegal_move_is_reported() {
        // path 0-1-2-3-4; jumping an agent two steps is illegal
        let inst = instance_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], 0, 4, 1);
        let mut div = RandomDivider::new(&inst.graph, ChaCha8Rng::seed_from_u64(3));
        let err = simulate(&inst, &mut Teleporter, &mut div, 5).unwrap_err();
        assert!(matches!(err, SimError::IllegalMove { side: Side::Facilitator, round: 1 }));
    }
}
