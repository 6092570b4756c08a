//! Unbounded game: layered backward attractor with successor counters.

use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::index::{position_side_count, PositionIndex};
use super::EngineError;
use crate::graph::{DPlacement, FPlacement, Instance, Position, Side};

pub const DEFAULT_BUDGET: u64 = 50_000_000;

const UNSET: u16 = u16::MAX;
const UNCOUNTED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Compatible positions, both sides to move.
    pub positions: u64,
    /// Attractor layers processed.
    pub iterations: u32,
    pub wall_time_ms: u64,
}

/// Ranks and counters from the fixed point. Facilitator-to-move ranks count
/// the Facilitator moves still needed to force a meeting.
#[derive(Debug)]
struct Tables {
    index: PositionIndex,
    fac_rank: Vec<u16>,
    // Outstanding Divider successors not yet won; 0 means won.
    div_count: Vec<u32>,
}

#[derive(Debug)]
pub struct SolveReport {
    pub winner: Side,
    pub k: usize,
    pub stats: SolveStats,
    start: FPlacement,
    tables: Option<Tables>,
}

impl SolveReport {
    pub fn index(&self) -> Option<&PositionIndex> {
        self.tables.as_ref().map(|t| &t.index)
    }

    /// Facilitator-to-move rank, `None` outside the winning region.
    pub fn fac_rank(&self, f: &FPlacement, d: &DPlacement) -> Option<u32> {
        if f.is_meeting() {
            return Some(0);
        }
        let t = self.tables.as_ref()?;
        let id = t.index.position_id(&Position::new(*f, d.clone(), Side::Facilitator))?;
        match t.fac_rank[id] {
            UNSET => None,
            r => Some(r as u32),
        }
    }

    /// Divider-to-move rank (worst case over Divider replies).
    pub fn div_rank(&self, f: &FPlacement, d: &DPlacement) -> Option<u32> {
        if f.is_meeting() {
            return Some(0);
        }
        let t = self.tables.as_ref()?;
        let fr = t.index.rank_f(f)?;
        let dr = t.index.rank_d(d)?;
        t.div_rank_ids(fr, dr)
    }

    /// Membership in Facilitator's winning region.
    pub fn in_region(&self, pos: &Position) -> bool {
        match pos.to_move {
            Side::Facilitator => self.fac_rank(&pos.f, &pos.d).is_some(),
            Side::Divider => self.div_rank(&pos.f, &pos.d).is_some(),
        }
    }

    /// Facilitator's stored move: lowest-index successor one rank closer to
    /// meeting. `None` outside the region or when not her turn.
    pub fn fac_move(&self, pos: &Position) -> Option<FPlacement> {
        if pos.to_move != Side::Facilitator || pos.f.is_meeting() {
            return None;
        }
        let t = self.tables.as_ref()?;
        let idx = &t.index;
        let f = idx.rank_f(&pos.f)?;
        let d = idx.rank_d(&pos.d)?;
        let r = t.fac_rank[idx.id(f, d)];
        if r == UNSET {
            return None;
        }
        idx.fsucc(f)
            .iter()
            .map(|&fp| fp as usize)
            .filter(|&fp| idx.compatible_ranks(fp, d))
            .find(|&fp| t.div_rank_ids(fp, d) == Some(r as u32 - 1))
            .map(|fp| idx.f_placement(fp))
    }

    /// Divider's stored move: lowest-index successor outside the region.
    pub fn div_move(&self, pos: &Position) -> Option<DPlacement> {
        if pos.to_move != Side::Divider || pos.f.is_meeting() {
            return None;
        }
        let t = self.tables.as_ref()?;
        let idx = &t.index;
        let f = idx.rank_f(&pos.f)?;
        let d = idx.rank_d(&pos.d)?;
        if t.div_count[idx.id(f, d)] == 0 {
            return None;
        }
        idx.dsucc(d)
            .iter()
            .map(|&dp| dp as usize)
            .find(|&dp| idx.compatible_ranks(f, dp) && t.fac_rank[idx.id(f, dp)] == UNSET)
            .map(|dp| idx.d_placement(dp))
    }

    /// Lowest-index initial placement from which Divider survives.
    pub fn div_placement(&self) -> Option<DPlacement> {
        let t = self.tables.as_ref()?;
        let idx = &t.index;
        let [a, b] = self.start.vertices();
        let f = idx.f_rank(a, b);
        (0..idx.nd())
            .find(|&d| idx.compatible_ranks(f, d) && t.fac_rank[idx.id(f, d)] == UNSET)
            .map(|d| idx.d_placement(d))
    }

    /// Every initial placement with its Facilitator rank (`None` = Divider survives).
    pub fn initial_ranks(&self) -> Vec<(DPlacement, Option<u32>)> {
        let Some(t) = self.tables.as_ref() else {
            return Vec::new();
        };
        let idx = &t.index;
        let [a, b] = self.start.vertices();
        let f = idx.f_rank(a, b);
        (0..idx.nd())
            .filter(|&d| idx.compatible_ranks(f, d))
            .map(|d| {
                let r = t.fac_rank[idx.id(f, d)];
                (idx.d_placement(d), (r != UNSET).then_some(r as u32))
            })
            .collect()
    }

    /// Minimax number of Facilitator moves to meet, when she wins. With no
    /// legal Divider placement at all the terminals are adjacent, so one move.
    pub fn min_rounds(&self) -> Option<u32> {
        if self.winner != Side::Facilitator {
            return None;
        }
        if self.start.is_meeting() {
            return Some(0);
        }
        self.initial_ranks().into_iter().map(|(_, r)| r).max().flatten().or(Some(1))
    }
}

impl Tables {
    fn div_rank_ids(&self, f: usize, d: usize) -> Option<u32> {
        let idx = &self.index;
        if idx.f_is_meeting(f) {
            return Some(0);
        }
        if self.div_count[idx.id(f, d)] != 0 {
            return None;
        }
        idx.dsucc(d)
            .iter()
            .map(|&dp| dp as usize)
            .filter(|&dp| idx.compatible_ranks(f, dp))
            .map(|dp| self.fac_rank[idx.id(f, dp)] as u32)
            .max()
    }
}

/// Fails with `CapacityExceeded` before allocating anything over budget.
pub(crate) fn check_budget(inst: &Instance, budget: u64) -> Result<u64, EngineError> {
    let positions = position_side_count(inst.graph.n(), inst.k);
    let dense = (inst.graph.n() as u64 * (inst.graph.n() as u64 + 1) / 2)
        .saturating_mul(super::index::binom((inst.graph.n() + inst.k - 1) as i64, inst.k as i64));
    if positions > budget || dense >= u32::MAX as u64 {
        return Err(EngineError::CapacityExceeded { positions, budget });
    }
    Ok(positions)
}

// wasm32-unknown-unknown has no clock; wall time is reported as 0 there
fn clock() -> Option<Instant> {
    if cfg!(all(target_arch = "wasm32", target_os = "unknown")) {
        None
    } else {
        Some(Instant::now())
    }
}

pub fn solve(inst: &Instance) -> Result<SolveReport, EngineError> {
    solve_with_budget(inst, DEFAULT_BUDGET)
}

pub fn solve_with_budget(inst: &Instance, budget: u64) -> Result<SolveReport, EngineError> {
    let started = clock();
    if !inst.connected {
        return Err(EngineError::DisconnectedGraph);
    }
    let start = inst.start();
    if inst.s == inst.t {
        return Ok(SolveReport {
            winner: Side::Facilitator,
            k: inst.k,
            stats: SolveStats {
                positions: position_side_count(inst.graph.n(), inst.k),
                iterations: 0,
                wall_time_ms: 0,
            },
            start,
            tables: None,
        });
    }
    let positions = check_budget(inst, budget)?;
    let index = PositionIndex::build(&inst.graph, inst.k);
    let (fac_rank, div_count, iterations) = attractor(&index);
    let tables = Tables { index, fac_rank, div_count };

    let f0 = tables.index.f_rank(inst.s, inst.t);
    let fac_wins = (0..tables.index.nd())
        .filter(|&d| tables.index.compatible_ranks(f0, d))
        .all(|d| tables.fac_rank[tables.index.id(f0, d)] != UNSET);
    Ok(SolveReport {
        winner: if fac_wins { Side::Facilitator } else { Side::Divider },
        k: inst.k,
        stats: SolveStats {
            positions,
            iterations,
            wall_time_ms: started.map_or(0, |t| t.elapsed().as_millis() as u64),
        },
        start,
        tables: Some(tables),
    })
}

/// Convenience wrapper for shared ownership (sessions, strategy providers).
pub fn solve_shared(inst: &Instance, budget: u64) -> Result<Arc<SolveReport>, EngineError> {
    solve_with_budget(inst, budget).map(Arc::new)
}

fn attractor(idx: &PositionIndex) -> (Vec<u16>, Vec<u32>, u32) {
    let nd = idx.nd();
    let total = idx.ids_per_side();
    let mut fac_rank = vec![UNSET; total];
    let mut div_count = vec![UNCOUNTED; total];

    // Layer 0: Divider to move after Facilitator has already met.
    let mut div_frontier: Vec<u32> = Vec::new();
    for f in (0..idx.nf()).filter(|&f| idx.f_is_meeting(f)) {
        for d in (0..nd).filter(|&d| idx.compatible_ranks(f, d)) {
            let id = idx.id(f, d);
            div_count[id] = 0;
            fac_rank[id] = 0;
            div_frontier.push(id as u32);
        }
    }

    let mut layer: u32 = 0;
    let mut fac_frontier: Vec<u32> = Vec::new();
    while !div_frontier.is_empty() {
        let next_rank = layer + 1;
        assert!(next_rank < UNSET as u32, "attractor depth exceeds rank storage");
        fac_frontier.clear();
        for &id in &div_frontier {
            let (f, d) = idx.split(id as usize);
            for &fp in idx.fsucc(f) {
                let fp = fp as usize;
                if idx.f_is_meeting(fp) || !idx.compatible_ranks(fp, d) {
                    continue;
                }
                let pid = idx.id(fp, d);
                if fac_rank[pid] == UNSET {
                    fac_rank[pid] = next_rank as u16;
                    fac_frontier.push(pid as u32);
                }
            }
        }
        div_frontier.clear();
        for &id in &fac_frontier {
            let (f, d) = idx.split(id as usize);
            for &dp in idx.dsucc(d) {
                let dp = dp as usize;
                if !idx.compatible_ranks(f, dp) {
                    continue;
                }
                let pid = idx.id(f, dp);
                let c = &mut div_count[pid];
                if *c == UNCOUNTED {
                    *c = idx.dsucc(dp).iter().filter(|&&x| idx.compatible_ranks(f, x as usize)).count() as u32;
                }
                *c -= 1;
                if *c == 0 {
                    div_frontier.push(pid as u32);
                }
            }
        }
        layer = next_rank;
    }
    (fac_rank, div_count, layer)
}
