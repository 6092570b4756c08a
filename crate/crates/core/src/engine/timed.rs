//! Timed game: level-synchronous sweep. Level `l` holds the
//! Facilitator-to-move positions from which she forces a meeting within `l`
//! of her own moves; Divider places at round 0 and never moves after
//! Facilitator's last allowed move.

use serde::Serialize;

use super::index::PositionIndex;
use super::solve::check_budget;
use super::EngineError;
use crate::graph::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TimedReport {
    pub facilitator_wins: bool,
    /// Minimax meeting round, when it is at most `tau`.
    pub min_rounds: Option<u32>,
    /// Levels actually computed (stops early at a fixpoint).
    pub levels: u32,
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }
}

pub fn solve_in_time(inst: &Instance, tau: u32) -> Result<TimedReport, EngineError> {
    solve_in_time_with_budget(inst, tau, super::solve::DEFAULT_BUDGET)
}

pub fn solve_in_time_with_budget(inst: &Instance, tau: u32, budget: u64) -> Result<TimedReport, EngineError> {
    if tau == 0 {
        return Err(EngineError::InvalidRoundBudget);
    }
    if !inst.connected {
        return Err(EngineError::DisconnectedGraph);
    }
    if inst.s == inst.t {
        return Ok(TimedReport { facilitator_wins: true, min_rounds: Some(0), levels: 0 });
    }
    check_budget(inst, budget)?;
    let idx = PositionIndex::build(&inst.graph, inst.k);
    let total = idx.ids_per_side();
    let nd = idx.nd();
    let f0 = idx.f_rank(inst.s, inst.t);
    let initial: Vec<usize> = (0..nd).filter(|&d| idx.compatible_ranks(f0, d)).collect();

    // in_l: Facilitator-to-move winning within the current level.
    // in_v: Divider-to-move (non-meeting) positions all of whose replies are in in_l.
    let mut in_l = Bits::new(total);
    let mut in_v = Bits::new(total);
    let live = |f: usize, d: usize| !idx.f_is_meeting(f) && idx.compatible_ranks(f, d);

    for level in 1..=tau {
        let mut grew = false;
        // V_level from L_{level-1}; computed into a fresh list so the sweep
        // reads only the previous level.
        let mut new_v = Vec::new();
        if level > 1 {
            for f in 0..idx.nf() {
                for d in 0..nd {
                    let id = f * nd + d;
                    if !live(f, d) || in_v.get(id) {
                        continue;
                    }
                    // Staying put is listed among the successors; it usually fails first.
                    let all = idx
                        .dsucc(d)
                        .iter()
                        .map(|&x| x as usize)
                        .filter(|&x| idx.compatible_ranks(f, x))
                        .all(|x| in_l.get(f * nd + x));
                    if all {
                        new_v.push(id);
                    }
                }
            }
        }
        for id in new_v {
            in_v.set(id);
        }
        let mut new_l = Vec::new();
        for f in 0..idx.nf() {
            if idx.f_is_meeting(f) {
                continue;
            }
            for d in 0..nd {
                let id = f * nd + d;
                if !idx.compatible_ranks(f, d) || in_l.get(id) {
                    continue;
                }
                let wins = idx.fsucc(f).iter().map(|&x| x as usize).any(|fp| {
                    idx.compatible_ranks(fp, d) && (idx.f_is_meeting(fp) || in_v.get(fp * nd + d))
                });
                if wins {
                    new_l.push(id);
                }
            }
        }
        grew |= !new_l.is_empty();
        for id in new_l {
            in_l.set(id);
        }
        if initial.iter().all(|&d| in_l.get(f0 * nd + d)) {
            return Ok(TimedReport { facilitator_wins: true, min_rounds: Some(level), levels: level });
        }
        if !grew && level > 1 {
            return Ok(TimedReport { facilitator_wins: false, min_rounds: None, levels: level });
        }
    }
    Ok(TimedReport { facilitator_wins: false, min_rounds: None, levels: tau })
}
