use serde::{Deserialize, Serialize};

use super::gadget::{Assembler, GadgetIndex, PathRole, Source, Terminal};
use super::{ReductionError, ORACLE_BUDGET};
use crate::graph::{Instance, Vertex};

/// Universe [1, universe_size]; can `budget` members of `family` cover it?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub universe_size: usize,
    pub family: Vec<Vec<usize>>,
    pub budget: usize,
}

impl SetCoverInstance {
    pub fn validate(&self) -> Result<(), ReductionError> {
        for (j, set) in self.family.iter().enumerate() {
            if set.iter().any(|&h| h == 0 || h > self.universe_size) {
                return Err(ReductionError::InvalidSource(format!(
                    "set {} has an element outside [1, {}]",
                    j + 1,
                    self.universe_size
                )));
            }
        }
        Ok(())
    }

    fn contains(&self, set: usize, h: usize) -> bool {
        self.family[set].contains(&h)
    }
}

pub(crate) fn expected_internal(role: &PathRole) -> Option<u64> {
    match role {
        PathRole::Membership { .. } | PathRole::Hub { .. } | PathRole::Shortcut { .. } => Some(0),
        PathRole::ElementLink { .. } | PathRole::HubLink { .. } => Some(1),
        _ => None,
    }
}

/// Vertex count: s, t, z, the universe with its two links each, and per copy
/// the family, a hub and the hub's two links.
pub(crate) fn vertex_count(src: &SetCoverInstance) -> u64 {
    let (n, m, k) = (src.universe_size as u64, src.family.len() as u64, src.budget as u64);
    3 + 3 * n + k * (m + 3)
}

/// Builds the reduced instance; the Divider gets `budget + 1` agents.
pub fn reduce_setcover(src: &SetCoverInstance) -> Result<(Instance, GadgetIndex), ReductionError> {
    src.validate()?;
    let mut a = Assembler::new();
    let s = a.named("s".into());
    let t = a.named("t".into());
    let z = a.named("z".into());
    a.path(PathRole::Shortcut { terminal: Terminal::S }, s, z, 0);
    a.path(PathRole::Shortcut { terminal: Terminal::T }, t, z, 0);
    let universe: Vec<Vertex> = (1..=src.universe_size).map(|h| a.named(format!("u_{h}"))).collect();
    for (h0, &u) in universe.iter().enumerate() {
        a.path(PathRole::ElementLink { terminal: Terminal::S, element: h0 + 1 }, s, u, 1);
        a.path(PathRole::ElementLink { terminal: Terminal::T, element: h0 + 1 }, u, t, 1);
    }
    for i in 1..=src.budget {
        let w = a.named(format!("w_{i}"));
        a.path(PathRole::HubLink { terminal: Terminal::S, copy: i }, s, w, 1);
        a.path(PathRole::HubLink { terminal: Terminal::T, copy: i }, w, t, 1);
        for j in 1..=src.family.len() {
            let sv = a.named(format!("set_{j}^({i})"));
            a.path(PathRole::Hub { copy: i, set: j }, w, sv, 0);
            for (h0, &u) in universe.iter().enumerate() {
                if src.contains(j - 1, h0 + 1) {
                    a.path(PathRole::Membership { copy: i, set: j, element: h0 + 1 }, sv, u, 0);
                }
            }
        }
    }
    let k = src.budget + 1;
    let (graph, gi) = a.finish(Source::SetCover(src.clone()), 1, k);
    let inst = Instance::new(graph, s, t, k).expect("terminals exist");
    Ok((inst, gi))
}

/// The universe, the terminals and the hubs: a vertex cover of the output.
pub(crate) fn cover_witness(gi: &GadgetIndex, src: &SetCoverInstance) -> Vec<Vertex> {
    let mut out = vec![gi.vertex("s").unwrap(), gi.vertex("t").unwrap()];
    out.extend((1..=src.universe_size).filter_map(|h| gi.vertex(&format!("u_{h}"))));
    out.extend((1..=src.budget).filter_map(|i| gi.vertex(&format!("w_{i}"))));
    out.sort_unstable();
    out
}

pub fn oracle_setcover(src: &SetCoverInstance) -> Result<bool, ReductionError> {
    src.validate()?;
    let m = src.family.len();
    let size = 1u64.checked_shl(m as u32).unwrap_or(u64::MAX);
    if m >= 64 || size > ORACLE_BUDGET {
        return Err(ReductionError::BudgetExceeded { size, budget: ORACLE_BUDGET });
    }
    let full: u64 = if src.universe_size == 0 { 0 } else { (1u64 << src.universe_size) - 1 };
    let masks: Vec<u64> = src.family.iter().map(|set| set.iter().fold(0, |acc, &h| acc | 1 << (h - 1))).collect();
    Ok((0..size).any(|pick: u64| {
        pick.count_ones() as usize <= src.budget
            && masks.iter().enumerate().filter(|&(j, _)| pick >> j & 1 == 1).fold(0, |acc, (_, &mk)| acc | mk) == full
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_singletons_need_two_sets() {
        let src = SetCoverInstance { universe_size: 2, family: vec![vec![1], vec![2]], budget: 1 };
        assert!(!oracle_setcover(&src).unwrap());
        assert!(oracle_setcover(&SetCoverInstance { budget: 2, ..src }).unwrap());
    }

    #[test]
    fn z_is_a_common_neighbour() {
        let src = SetCoverInstance { universe_size: 2, family: vec![vec![1, 2]], budget: 1 };
        let (inst, gi) = reduce_setcover(&src).unwrap();
        let z = gi.vertex("z").unwrap();
        assert!(inst.graph.has_edge(inst.s, z) && inst.graph.has_edge(inst.t, z));
        assert_eq!(inst.k, 2);
        assert_eq!(inst.graph.n() as u64, vertex_count(&src));
    }
}
