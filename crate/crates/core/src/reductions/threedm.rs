use serde::{Deserialize, Serialize};

use super::gadget::{Assembler, Elem, End, GadgetIndex, PathRole, Source, Terminal, Wing};
use super::script::{Case, RunnerDivider, ScriptPlan};
use super::{ReductionError, ORACLE_BUDGET};
use crate::engine::binom;
use crate::graph::{Instance, Vertex};

/// Universe {alpha, beta, gamma} x [n]; each set holds one element of each
/// type, written as `[a, b, c]` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeDmInstance {
    pub n: usize,
    pub m: usize,
    pub sets: Vec<[usize; 3]>,
}

impl ThreeDmInstance {
    pub fn new(n: usize, sets: Vec<[usize; 3]>) -> Self {
        Self { n, m: sets.len(), sets }
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidSource(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.m != self.sets.len() {
            return bad(format!("m = {} but {} sets given", self.m, self.sets.len()));
        }
        for (j, set) in self.sets.iter().enumerate() {
            if set.iter().any(|&a| a == 0 || a > self.n) {
                return bad(format!("set {} has an element outside [1, {}]", j + 1, self.n));
            }
        }
        Ok(())
    }

    /// n² + m².
    pub fn scale(&self) -> u64 {
        (self.n * self.n + self.m * self.m) as u64
    }

    /// Closed-form vertex count of the reduced graph.
    pub fn reduced_vertex_count(&self) -> u64 {
        let (n, m) = (self.n as u64, self.m as u64);
        let mm = self.scale() * self.scale();
        let base = 4 + n * (m + 2 + 4 * m);
        let elements = 6 + 6 * n + 6 * n + 6 * n * mm + 6 * n * (2 * mm - 1);
        let sets = 6 * mm * n * m;
        let critical = 12 + 12 * (2 * mm + 1) + 24 * n * mm;
        base + elements + sets + critical
    }
}

pub(crate) fn u_name(row: usize, col: usize) -> String {
    format!("u_{row}^{col}")
}

fn terminal_name(e: Elem, w: Wing) -> String {
    format!("{}^{}", e.name(), w.tag())
}

fn element_name(e: Elem, w: Wing, i: usize) -> String {
    format!("{}_{i}^{}", e.name(), w.tag())
}

fn tail_name(e: Elem, w: Wing, i: usize) -> String {
    format!("{}_{i}^{}", e.tail_name(), w.tag())
}

fn critical_name(t: Terminal, e: Elem, w: Wing) -> String {
    format!("{}_{}^{}", t.name(), e.name(), w.tag())
}

/// Expected internal count of a 3dm path, from the source alone.
pub(crate) fn expected_internal(src: &ThreeDmInstance, role: &PathRole) -> Option<u64> {
    let big = src.scale();
    let sq = big * big;
    let m = src.m as u64;
    Some(match *role {
        PathRole::Guard { .. } => 0,
        PathRole::Spine { .. } | PathRole::EndLink { .. } => m,
        PathRole::ElementPath { wing: Wing::Left, index, .. } => sq - big * index as u64,
        PathRole::ElementPath { wing: Wing::Right, index, .. } => sq + big * index as u64,
        PathRole::Tail { .. } => 2 * sq - 1,
        PathRole::SetLink { elem, wing, set, .. } => {
            let a = src.sets[set - 1][elem.slot()] as u64;
            match wing {
                Wing::Left => sq + big * a,
                Wing::Right => sq - big * a,
            }
        }
        PathRole::Spoke { .. } => 2 * sq + 1,
        PathRole::Fan { .. } => 2 * sq,
        _ => return None,
    })
}

/// Builds the reduced instance with `k = n + 2`.
pub fn reduce_3dm(src: &ThreeDmInstance) -> Result<(Instance, GadgetIndex), ReductionError> {
    src.validate()?;
    let (n, m) = (src.n, src.m);
    let big = src.scale() as usize;
    let sq = big * big;
    let mut a = Assembler::new();

    let s = a.named("s".into());
    let t = a.named("t".into());
    for (which, g) in [(1u8, "g1"), (2, "g2")] {
        let gv = a.named(g.into());
        a.path(PathRole::Guard { terminal: Terminal::S, which }, s, gv, 0);
        a.path(PathRole::Guard { terminal: Terminal::T, which }, t, gv, 0);
    }

    // rows: u_i^0 .. u_i^{m+1}; the inner ones are the spine's internal vertices
    for i in 1..=n {
        let lo = a.named(u_name(i, 0));
        let hi = a.named(u_name(i, m + 1));
        a.path(PathRole::Spine { var: i }, lo, hi, m);
        let inner = a.last_path().vertices.clone();
        for (j, v) in inner.into_iter().enumerate() {
            a.rename(v, u_name(i, j + 1));
        }
        for (term, tv) in [(Terminal::S, s), (Terminal::T, t)] {
            a.path(PathRole::EndLink { terminal: term, var: i, end: End::Low }, tv, lo, m);
            a.path(PathRole::EndLink { terminal: term, var: i, end: End::High }, tv, hi, m);
        }
    }

    // elements
    for e in Elem::ALL {
        for w in [Wing::Left, Wing::Right] {
            let hub = a.named(terminal_name(e, w));
            for i in 1..=n {
                let ev = a.named(element_name(e, w, i));
                let len = match w {
                    Wing::Left => sq - big * i,
                    Wing::Right => sq + big * i,
                };
                a.path(PathRole::ElementPath { elem: e, wing: w, index: i }, hub, ev, len);
                let tail = a.named(tail_name(e, w, i));
                a.path(PathRole::Tail { elem: e, wing: w, index: i }, tail, ev, 2 * sq - 1);
            }
        }
    }

    // sets: column j of every row links to the six element terminals
    for (j0, set) in src.sets.iter().enumerate() {
        let j = j0 + 1;
        for i in 1..=n {
            let col = a.get(&u_name(i, j));
            for e in Elem::ALL {
                let val = set[e.slot()];
                for w in [Wing::Left, Wing::Right] {
                    let hub = a.get(&terminal_name(e, w));
                    let len = match w {
                        Wing::Left => sq + big * val,
                        Wing::Right => sq - big * val,
                    };
                    a.path(PathRole::SetLink { elem: e, wing: w, row: i, set: j }, hub, col, len);
                }
            }
        }
    }

    // critical vertices
    for (term, tv) in [(Terminal::S, s), (Terminal::T, t)] {
        for w in [Wing::Left, Wing::Right] {
            for e in Elem::ALL {
                let c = a.named(critical_name(term, e, w));
                a.path(PathRole::Spoke { terminal: term, elem: e, wing: w }, tv, c, 2 * sq + 1);
                for i in 1..=n {
                    let x = a.get(&tail_name(e, w, i));
                    a.path(PathRole::Fan { terminal: term, elem: e, wing: w, index: i }, c, x, 2 * sq);
                }
            }
        }
    }

    let k = n + 2;
    let (graph, gi) = a.finish(Source::ThreeDm(src.clone()), src.scale(), k);
    let inst = Instance::new(graph, s, t, k).expect("terminals exist");
    Ok((inst, gi))
}

/// The 14 vertices whose removal leaves a forest.
pub(crate) fn feedback_set(gi: &GadgetIndex) -> Vec<Vertex> {
    let mut names = vec!["s".to_string(), "t".to_string()];
    for w in [Wing::Left, Wing::Right] {
        for e in Elem::ALL {
            names.push(critical_name(Terminal::S, e, w));
            names.push(terminal_name(e, w));
        }
    }
    let mut out: Vec<Vertex> = names.iter().filter_map(|nm| gi.vertex(nm)).collect();
    out.sort_unstable();
    out
}

fn combinations(m: usize, n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    fn rec(m: usize, n: usize, from: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == n {
            return visit(cur);
        }
        for j in from..m {
            if m - j < n - cur.len() {
                break;
            }
            cur.push(j);
            if rec(m, n, j + 1, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(m, n, 0, &mut Vec::with_capacity(n), &mut visit);
}

/// Lowest-lexicographic choice of n sets covering the universe exactly
/// (0-based set indices).
pub fn perfect_matching_3dm(src: &ThreeDmInstance) -> Result<Option<Vec<usize>>, ReductionError> {
    src.validate()?;
    let size = binom(src.m as i64, src.n as i64);
    if size > ORACLE_BUDGET {
        return Err(ReductionError::BudgetExceeded { size, budget: ORACLE_BUDGET });
    }
    let mut found = None;
    combinations(src.m, src.n, |pick| {
        let mut seen = vec![[false; 3]; src.n + 1];
        let ok = pick.iter().all(|&j| {
            src.sets[j].iter().enumerate().all(|(slot, &a)| !std::mem::replace(&mut seen[a][slot], true))
        });
        if ok {
            found = Some(pick.to_vec());
        }
        ok
    });
    Ok(found)
}

pub fn oracle_3dm(src: &ThreeDmInstance) -> Result<bool, ReductionError> {
    perfect_matching_3dm(src).map(|m| m.is_some())
}

/// The Divider from the forward direction: one agent per row on the matched
/// column, two on the common neighbours; the first Facilitator agent to leave
/// home is chased from behind while the row agents seal the far end.
pub fn scripted_divider_3dm(
    inst: &Instance,
    gi: &GadgetIndex,
    matching: &[usize],
) -> Result<RunnerDivider, ReductionError> {
    let Source::ThreeDm(src) = &gi.source else {
        return Err(ReductionError::IndexMismatch("not a 3dm index".into()));
    };
    let n = src.n;
    if matching.len() != n || matching.iter().any(|&j| j >= src.m) {
        return Err(ReductionError::InvalidSource(format!("matching must list {n} set indices below {}", src.m)));
    }
    let mut cols: Vec<usize> = matching.iter().map(|&j| j + 1).collect();
    cols.sort_unstable();
    let name = |nm: &str| gi.vertex(nm).ok_or_else(|| ReductionError::IndexMismatch(format!("missing vertex {nm}")));
    let path = |role: PathRole| gi.path(&role).ok_or_else(|| ReductionError::IndexMismatch(format!("missing path {role}")));

    let mut placement = Vec::with_capacity(n + 2);
    for (i0, &j) in cols.iter().enumerate() {
        placement.push(name(&u_name(i0 + 1, j))?);
    }
    placement.push(name("g1")?);
    placement.push(name("g2")?);

    let mut plan = ScriptPlan::new(inst, placement);
    for term in [Terminal::S, Terminal::T] {
        for i in 1..=n {
            let spine = path(PathRole::Spine { var: i })?;
            for end in [End::Low, End::High] {
                let link = path(PathRole::EndLink { terminal: term, var: i, end })?;
                let target = if end == End::Low { spine.from } else { spine.to };
                let from = plan.placement[i - 1];
                let route = spine_route(spine, from, target);
                plan.add_case(term, link.vertices[0], Case::Runners(vec![(i - 1, route)]));
            }
        }
        for w in [Wing::Left, Wing::Right] {
            for e in Elem::ALL {
                let spoke = path(PathRole::Spoke { terminal: term, elem: e, wing: w })?;
                let mut runners = Vec::new();
                let mut missing = Vec::new();
                for a in 1..=n {
                    let row = cols.iter().position(|&j| src.sets[j - 1][e.slot()] == a);
                    let Some(r0) = row else {
                        missing.push(a);
                        continue;
                    };
                    let start = plan.placement[r0];
                    let hub = name(&terminal_name(e, w))?;
                    let mut route = path(PathRole::SetLink { elem: e, wing: w, row: r0 + 1, set: cols[r0] })?.walk_from(start);
                    let el = path(PathRole::ElementPath { elem: e, wing: w, index: a })?.walk_from(hub);
                    route.extend_from_slice(&el[1..]);
                    let elem_v = *route.last().unwrap();
                    let tail = path(PathRole::Tail { elem: e, wing: w, index: a })?.walk_from(elem_v);
                    route.extend_from_slice(&tail[1..]);
                    runners.push((r0, route));
                }
                let case = if missing.is_empty() {
                    Case::Runners(runners)
                } else {
                    Case::Uncovered(format!("{} elements {missing:?} are not covered by the matching", e.name()))
                };
                plan.add_case(term, spoke.vertices[0], case);
            }
        }
    }
    Ok(RunnerDivider::new(plan))
}

/// Spine vertices from `from` (one of its internal vertices) to an end.
pub(crate) fn spine_route(spine: &super::gadget::PathEntry, from: Vertex, end: Vertex) -> Vec<Vertex> {
    let all = spine.walk_from(end);
    let pos = all.iter().position(|&v| v == from).expect("agent sits on the spine");
    let mut route: Vec<Vertex> = all[..=pos].to_vec();
    route.reverse();
    route
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_set_is_a_matching() {
        let src = ThreeDmInstance::new(1, vec![[1, 1, 1]]);
        assert_eq!(perfect_matching_3dm(&src).unwrap(), Some(vec![0]));
    }

    #[test]
    fn overlapping_sets_have_no_matching() {
        let src = ThreeDmInstance::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 1, 2]]);
        assert!(!oracle_3dm(&src).unwrap());
        let yes = ThreeDmInstance::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 2, 2]]);
        assert_eq!(perfect_matching_3dm(&yes).unwrap(), Some(vec![0, 2]));
    }

    #[test]
    fn smallest_reduction_vertex_count() {
        let src = ThreeDmInstance::new(1, vec![[1, 1, 1]]);
        assert_eq!(src.reduced_vertex_count(), 335);
        let (inst, gi) = reduce_3dm(&src).unwrap();
        assert_eq!(inst.graph.n(), 335);
        assert_eq!(inst.k, 3);
        assert_eq!(gi.scale, 2);
    }

    #[test]
    fn invalid_sources_are_rejected() {
        assert!(reduce_3dm(&ThreeDmInstance::new(1, vec![[1, 2, 1]])).is_err());
        assert!(reduce_3dm(&ThreeDmInstance { n: 1, m: 2, sets: vec![[1, 1, 1]] }).is_err());
    }
}
