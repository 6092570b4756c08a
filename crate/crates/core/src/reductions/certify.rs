//! Sound checks of scripted strategies on instances too large for the exact
//! engine. A Divider script is replayed against every Facilitator move
//! sequence; a Facilitator rush is checked against every Divider reply
//! through per-agent reachability, which is exact for a fixed plan because
//! Divider agents never constrain one another.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::nae::NaeFacilitator;
use super::script::{RunnerDivider, ScriptState};
use crate::engine::{initial_placements, multiset_moves};
use crate::graph::{compatible, multiset_adjacent, DPlacement, FPlacement, Instance, Position, Side, Vertex};
use crate::sim::{legal_move, legal_placement, DividerStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DividerCertificate {
    /// True when no Facilitator play ever meets or breaks the script.
    pub holds: bool,
    pub states: usize,
    /// First failure found: a meeting, an illegal reply or an uncovered case.
    pub failure: Option<String>,
}

/// Explores every Facilitator move sequence against the script. Inconclusive
/// (reported as not holding) when more than `max_states` states are reached.
pub fn certify_divider(inst: &Instance, script: &RunnerDivider, max_states: usize) -> DividerCertificate {
    let mut div = script.clone();
    let fail = |states, msg: String| DividerCertificate { holds: false, states, failure: Some(msg) };
    let d0 = match div.place(inst) {
        Ok(d) => d,
        Err(e) => return fail(0, e.to_string()),
    };
    if !legal_placement(inst, &d0) {
        return fail(0, format!("illegal placement {d0}"));
    }
    let mut seen: HashSet<(FPlacement, ScriptState)> = HashSet::new();
    let mut stack = vec![(inst.start(), d0, div)];
    seen.insert((inst.start(), stack[0].2.state().clone()));
    while let Some((f, d, div)) = stack.pop() {
        if seen.len() > max_states {
            return fail(seen.len(), format!("explored more than {max_states} states"));
        }
        let here = Position::new(f, d.clone(), Side::Facilitator);
        for m in multiset_moves(&inst.graph, &f.vertices()) {
            let nf = FPlacement::new(m[0], m[1]);
            if !compatible(&nf, &d) {
                continue;
            }
            if nf.is_meeting() {
                return fail(seen.len(), format!("meeting at {} from {here:?}", m[0]));
            }
            let mid = Position::new(nf, d.clone(), Side::Divider);
            let mut next = div.clone();
            let nd = match next.next(&mid) {
                Ok(nd) => nd,
                Err(e) => return fail(seen.len(), format!("{e} at {mid:?}")),
            };
            if !legal_move(&inst.graph, &mid, &Position::new(nf, nd.clone(), Side::Facilitator)) {
                return fail(seen.len(), format!("illegal reply {nd} at {mid:?}"));
            }
            if seen.insert((nf, next.state().clone())) {
                stack.push((nf, nd, next));
            }
        }
    }
    DividerCertificate { holds: true, states: seen.len(), failure: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FacilitatorCertificate {
    /// True when every opening placement is met within the deadline.
    pub holds: bool,
    pub placements: usize,
    /// Longest committed plan over all placements.
    pub max_rounds: u32,
    pub failure: Option<String>,
}

/// Whether one Divider agent starting at `start` can occupy a vertex the plan
/// needs, at the moment it is needed.
fn agent_blocks(inst: &Instance, plan: &[FPlacement], start: Vertex) -> bool {
    let g = &inst.graph;
    let mut reach = vec![start];
    let mut mark = vec![false; g.n()];
    for step in plan {
        if step.vertices().iter().any(|v| reach.contains(v)) {
            return true;
        }
        let mut next = Vec::new();
        for &v in &reach {
            for w in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
                if !mark[w] && !step.contains(w) {
                    mark[w] = true;
                    next.push(w);
                }
            }
        }
        for &w in &next {
            mark[w] = false;
        }
        reach = next;
    }
    false
}

/// Checks the scripted rush against every opening placement and every
/// Divider reply.
pub fn certify_facilitator_plan(inst: &Instance, fac: &NaeFacilitator, deadline: u32) -> FacilitatorCertificate {
    let mut plan_ids: HashMap<Vec<FPlacement>, usize> = HashMap::new();
    let mut memo: HashMap<(usize, Vertex), bool> = HashMap::new();
    let mut max_rounds = 0;
    let placements = initial_placements(inst);
    let fail = |msg: String, max_rounds| FacilitatorCertificate {
        holds: false,
        placements: placements.len(),
        max_rounds,
        failure: Some(msg),
    };
    for d0 in &placements {
        let plan = match fac.plan(d0) {
            Ok(p) => p,
            Err(e) => return fail(format!("{e} for placement {d0}"), max_rounds),
        };
        max_rounds = max_rounds.max(plan.len() as u32);
        if plan.len() as u32 > deadline || !plan.last().is_some_and(|f| f.is_meeting()) {
            return fail(format!("plan for {d0} does not meet within {deadline}"), max_rounds);
        }
        let fresh = plan_ids.len();
        let id = *plan_ids.entry(plan.clone()).or_insert(fresh);
        if id == fresh {
            let mut prev = inst.start();
            for f in &plan {
                if !multiset_adjacent(&prev.vertices(), &f.vertices(), &inst.graph).unwrap_or(false) {
                    return fail(format!("plan step {f} is not a move"), max_rounds);
                }
                prev = *f;
            }
        }
        for &v in d0.agents() {
            let blocked = *memo.entry((id, v)).or_insert_with(|| agent_blocks(inst, &plan, v));
            if blocked {
                return fail(format!("agent from {v} can block the plan for {}", DPlacement::new(d0.agents().to_vec())), max_rounds);
            }
        }
    }
    FacilitatorCertificate { holds: true, placements: placements.len(), max_rounds, failure: None }
}
