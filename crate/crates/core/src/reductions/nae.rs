use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gadget::{Assembler, End, GadgetIndex, PathRole, Source, Terminal, Wing};
use super::script::{Case, RunnerDivider, ScriptPlan};
use super::threedm::spine_route;
use super::{ReductionError, ORACLE_BUDGET};
use crate::graph::{DPlacement, FPlacement, Graph, Instance, Position, Vertex};
use crate::sim::{FacilitatorStrategy, StrategyError};

/// Variables range over [1, dstar]; a clause `[i1, d1, i2, d2, i3, d3]` asks
/// that the three comparisons `x_i <= d` are not all equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaeInstance {
    pub n: usize,
    pub dstar: usize,
    pub clauses: Vec<[usize; 6]>,
}

impl NaeInstance {
    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidSource(msg));
        if self.n == 0 || self.dstar == 0 {
            return bad("n and dstar must be at least 1".into());
        }
        for (j, c) in self.clauses.iter().enumerate() {
            for l in 0..3 {
                let (i, d) = (c[2 * l], c[2 * l + 1]);
                if i == 0 || i > self.n {
                    return bad(format!("clause {} uses variable {i} outside [1, {}]", j + 1, self.n));
                }
                if d == 0 || d > self.dstar {
                    return bad(format!("clause {} uses bound {d} outside [1, {}]", j + 1, self.dstar));
                }
            }
        }
        Ok(())
    }

    pub fn literals(&self, clause: usize) -> [(usize, usize); 3] {
        let c = self.clauses[clause];
        [(c[0], c[1]), (c[2], c[3]), (c[4], c[5])]
    }

    /// Truth values of a clause's comparisons under `values` (1-based variables).
    pub fn truth(&self, clause: usize, values: &[usize]) -> [bool; 3] {
        self.literals(clause).map(|(i, d)| values[i - 1] <= d)
    }

    pub fn satisfied_by(&self, values: &[usize]) -> bool {
        (0..self.clauses.len()).all(|j| {
            let v = self.truth(j, values);
            !(v[0] == v[1] && v[1] == v[2])
        })
    }

    pub fn reduced_vertex_count(&self) -> u64 {
        let (n, m, d) = (self.n as u64, self.clauses.len() as u64, self.dstar as u64);
        4 + n * (d + 2) + 4 * n * d + 2 * m + 4 * m * (2 * d + 1) + 9 * m * d
    }
}

pub(crate) fn expected_internal(src: &NaeInstance, role: &PathRole) -> Option<u64> {
    let d = src.dstar as u64;
    Some(match *role {
        PathRole::Guard { .. } => 0,
        PathRole::Spine { .. } | PathRole::EndLink { .. } => d,
        PathRole::Literal { clause, literal, wing } => {
            let bound = src.literals(clause - 1)[literal - 1].1 as u64;
            match wing {
                Wing::Left => 2 * d - bound,
                Wing::Right => d + bound,
            }
        }
        PathRole::ClauseLink { .. } => 2 * d + 1,
        _ => return None,
    })
}

fn u_name(var: usize, pos: usize) -> String {
    format!("u_{var}^{pos}")
}

fn clause_name(j: usize, w: Wing) -> String {
    format!("c_{j}^{}", w.tag())
}

/// Builds the reduced instance with `k = n + 2`.
pub fn reduce_nae(src: &NaeInstance) -> Result<(Instance, GadgetIndex), ReductionError> {
    src.validate()?;
    let (n, ds) = (src.n, src.dstar);
    let mut a = Assembler::new();
    let s = a.named("s".into());
    let t = a.named("t".into());
    for (which, g) in [(1u8, "g1"), (2, "g2")] {
        let gv = a.named(g.into());
        a.path(PathRole::Guard { terminal: Terminal::S, which }, s, gv, 0);
        a.path(PathRole::Guard { terminal: Terminal::T, which }, t, gv, 0);
    }
    for i in 1..=n {
        let lo = a.named(u_name(i, 0));
        let hi = a.named(u_name(i, ds + 1));
        a.path(PathRole::Spine { var: i }, lo, hi, ds);
        let inner = a.last_path().vertices.clone();
        for (d, v) in inner.into_iter().enumerate() {
            a.rename(v, u_name(i, d + 1));
        }
        for (term, tv) in [(Terminal::S, s), (Terminal::T, t)] {
            a.path(PathRole::EndLink { terminal: term, var: i, end: End::Low }, tv, lo, ds);
            a.path(PathRole::EndLink { terminal: term, var: i, end: End::High }, tv, hi, ds);
        }
    }
    for j in 1..=src.clauses.len() {
        let cl = a.named(clause_name(j, Wing::Left));
        let cr = a.named(clause_name(j, Wing::Right));
        for (l, (i, d)) in src.literals(j - 1).into_iter().enumerate() {
            let lo = a.get(&u_name(i, 0));
            let hi = a.get(&u_name(i, ds + 1));
            a.path(PathRole::Literal { clause: j, literal: l + 1, wing: Wing::Left }, cl, lo, 2 * ds - d);
            a.path(PathRole::Literal { clause: j, literal: l + 1, wing: Wing::Right }, cr, hi, ds + d);
        }
        for (term, tv) in [(Terminal::S, s), (Terminal::T, t)] {
            a.path(PathRole::ClauseLink { terminal: term, clause: j, wing: Wing::Left }, tv, cl, 2 * ds + 1);
            a.path(PathRole::ClauseLink { terminal: term, clause: j, wing: Wing::Right }, tv, cr, 2 * ds + 1);
        }
    }
    let k = n + 2;
    let (graph, gi) = a.finish(Source::Nae(src.clone()), ds as u64, k);
    let inst = Instance::new(graph, s, t, k).expect("terminals exist");
    Ok((inst, gi))
}

/// The 2n + 2 vertices whose removal leaves paths and subdivided stars.
pub(crate) fn feedback_set(gi: &GadgetIndex, src: &NaeInstance) -> Vec<Vertex> {
    let mut out = vec![gi.vertex("s").unwrap(), gi.vertex("t").unwrap()];
    for i in 1..=src.n {
        out.extend(gi.vertex(&u_name(i, 0)));
        out.extend(gi.vertex(&u_name(i, src.dstar + 1)));
    }
    out.sort_unstable();
    out
}

/// First satisfying assignment in lexicographic order.
pub fn satisfying_assignment(src: &NaeInstance) -> Result<Option<Vec<usize>>, ReductionError> {
    src.validate()?;
    let size = (src.dstar as u64).checked_pow(src.n as u32).unwrap_or(u64::MAX);
    if size > ORACLE_BUDGET {
        return Err(ReductionError::BudgetExceeded { size, budget: ORACLE_BUDGET });
    }
    let mut values = vec![1; src.n];
    loop {
        if src.satisfied_by(&values) {
            return Ok(Some(values));
        }
        let Some(pos) = values.iter().rposition(|&v| v < src.dstar) else {
            return Ok(None);
        };
        values[pos] += 1;
        for v in &mut values[pos + 1..] {
            *v = 1;
        }
    }
}

pub fn oracle_nae(src: &NaeInstance) -> Result<bool, ReductionError> {
    satisfying_assignment(src).map(|a| a.is_some())
}

fn nae_parts(gi: &GadgetIndex) -> Result<&NaeInstance, ReductionError> {
    match &gi.source {
        Source::Nae(src) => Ok(src),
        _ => Err(ReductionError::IndexMismatch("not an nae index".into())),
    }
}

fn need(gi: &GadgetIndex, role: PathRole) -> Result<&super::gadget::PathEntry, ReductionError> {
    gi.path(&role).ok_or_else(|| ReductionError::IndexMismatch(format!("missing path {role}")))
}

/// The Divider for a satisfying assignment: agent i waits on the variable
/// path at its value; a departure towards a clause vertex is met by the
/// agent of a comparison that can get there first.
pub fn scripted_divider_nae(
    inst: &Instance,
    gi: &GadgetIndex,
    values: &[usize],
) -> Result<RunnerDivider, ReductionError> {
    let src = nae_parts(gi)?;
    let n = src.n;
    if values.len() != n || values.iter().any(|&v| v == 0 || v > src.dstar) {
        return Err(ReductionError::InvalidSource(format!("assignment must give {n} values in [1, {}]", src.dstar)));
    }
    let mut placement = Vec::with_capacity(n + 2);
    for (i0, &v) in values.iter().enumerate() {
        placement.push(need(gi, PathRole::Spine { var: i0 + 1 })?.vertices[v - 1]);
    }
    placement.push(gi.vertex("g1").unwrap());
    placement.push(gi.vertex("g2").unwrap());
    let mut plan = ScriptPlan::new(inst, placement);

    for term in [Terminal::S, Terminal::T] {
        for i in 1..=n {
            let spine = need(gi, PathRole::Spine { var: i })?;
            for end in [End::Low, End::High] {
                let link = need(gi, PathRole::EndLink { terminal: term, var: i, end })?;
                let target = if end == End::Low { spine.from } else { spine.to };
                let route = spine_route(spine, plan.placement[i - 1], target);
                plan.add_case(term, link.vertices[0], Case::Runners(vec![(i - 1, route)]));
            }
        }
        for j in 1..=src.clauses.len() {
            let truth = src.truth(j - 1, values);
            for wing in [Wing::Left, Wing::Right] {
                let link = need(gi, PathRole::ClauseLink { terminal: term, clause: j, wing })?;
                // left needs a true comparison, right a false one
                let want = wing == Wing::Left;
                let case = match truth.iter().position(|&b| b == want) {
                    None => Case::Uncovered(format!("clause {j} has no {} comparison", if want { "true" } else { "false" })),
                    Some(l) => {
                        let (var, _) = src.literals(j - 1)[l];
                        let spine = need(gi, PathRole::Spine { var })?;
                        let end = if want { spine.from } else { spine.to };
                        let mut route = spine_route(spine, plan.placement[var - 1], end);
                        let lit = need(gi, PathRole::Literal { clause: j, literal: l + 1, wing })?.walk_from(end);
                        route.extend_from_slice(&lit[1..]);
                        Case::Runners(vec![(var - 1, route)])
                    }
                };
                plan.add_case(term, link.vertices[0], case);
            }
        }
    }
    Ok(RunnerDivider::new(plan))
}

/// A rush: the two routes (excluding the start vertices) to a common target.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rush {
    target: Vertex,
    from_s: Vec<Vertex>,
    from_t: Vec<Vertex>,
}

impl Rush {
    fn new(gi: &GadgetIndex, s_role: PathRole, t_role: PathRole) -> Result<Self, ReductionError> {
        let sp = need(gi, s_role)?;
        let tp = need(gi, t_role)?;
        let s = gi.vertex("s").unwrap();
        let t = gi.vertex("t").unwrap();
        let from_s = sp.walk_from(s)[1..].to_vec();
        let from_t = tp.walk_from(t)[1..].to_vec();
        Ok(Rush { target: *from_s.last().unwrap(), from_s, from_t })
    }

    fn steps(&self) -> Vec<FPlacement> {
        self.from_s.iter().zip(&self.from_t).map(|(&a, &b)| FPlacement::new(a, b)).collect()
    }
}

#[derive(Debug)]
struct FacilitatorTables {
    dstar: usize,
    src: NaeInstance,
    guards: [Rush; 2],
    // per variable: (spine internals, low-end rush, high-end rush, distances from each end)
    vars: Vec<(Vec<Vertex>, Rush, Rush, Vec<Option<usize>>, Vec<Option<usize>>)>,
    // per clause: (left rush, right rush)
    clauses: Vec<(Rush, Rush)>,
}

/// The Facilitator from the backward direction: reads the opening placement
/// and commits to one rush.
#[derive(Debug, Clone)]
pub struct NaeFacilitator {
    tables: Arc<FacilitatorTables>,
    plan: Option<Vec<FPlacement>>,
    step: usize,
}

pub fn scripted_facilitator_nae(inst: &Instance, gi: &GadgetIndex) -> Result<NaeFacilitator, ReductionError> {
    let src = nae_parts(gi)?;
    let g: &Graph = &inst.graph;
    let guard = |which: u8| {
        Rush::new(
            gi,
            PathRole::Guard { terminal: Terminal::S, which },
            PathRole::Guard { terminal: Terminal::T, which },
        )
    };
    let guards = [guard(1)?, guard(2)?];
    let mut vars = Vec::with_capacity(src.n);
    for i in 1..=src.n {
        let spine = need(gi, PathRole::Spine { var: i })?;
        let rush = |end| {
            Rush::new(
                gi,
                PathRole::EndLink { terminal: Terminal::S, var: i, end },
                PathRole::EndLink { terminal: Terminal::T, var: i, end },
            )
        };
        vars.push((
            spine.vertices.clone(),
            rush(End::Low)?,
            rush(End::High)?,
            g.distances_from(spine.from, &[]),
            g.distances_from(spine.to, &[]),
        ));
    }
    let mut clauses = Vec::with_capacity(src.clauses.len());
    for j in 1..=src.clauses.len() {
        let rush = |wing| {
            Rush::new(
                gi,
                PathRole::ClauseLink { terminal: Terminal::S, clause: j, wing },
                PathRole::ClauseLink { terminal: Terminal::T, clause: j, wing },
            )
        };
        clauses.push((rush(Wing::Left)?, rush(Wing::Right)?));
    }
    let tables = FacilitatorTables { dstar: src.dstar, src: src.clone(), guards, vars, clauses };
    Ok(NaeFacilitator { tables: Arc::new(tables), plan: None, step: 0 })
}

impl NaeFacilitator {
    /// The committed sequence of placements for an opening Divider placement.
    pub fn plan(&self, d0: &DPlacement) -> Result<Vec<FPlacement>, StrategyError> {
        let tb = &*self.tables;
        for rush in &tb.guards {
            if !d0.contains(rush.target) {
                return Ok(rush.steps());
            }
        }
        let near = |dist: &[Option<usize>]| d0.agents().iter().any(|&v| dist[v].is_some_and(|x| x <= tb.dstar));
        for (_, lo, hi, dlo, dhi) in &tb.vars {
            if !near(dlo) {
                return Ok(lo.steps());
            }
            if !near(dhi) {
                return Ok(hi.steps());
            }
        }
        let mut values = Vec::with_capacity(tb.vars.len());
        for (i, (spine, ..)) in tb.vars.iter().enumerate() {
            let Some(pos) = spine.iter().position(|&v| d0.contains(v)) else {
                return Err(StrategyError::Uncovered(format!("no agent on the path of variable {}", i + 1)));
            };
            values.push(pos + 1);
        }
        for (j, (left, right)) in tb.clauses.iter().enumerate() {
            let truth = tb.src.truth(j, &values);
            if truth.iter().all(|&b| b) {
                return Ok(right.steps());
            }
            if truth.iter().all(|&b| !b) {
                return Ok(left.steps());
            }
        }
        Err(StrategyError::NoViolatedClause)
    }

    pub fn deadline(&self) -> u32 {
        2 * self.tables.dstar as u32 + 2
    }
}

impl FacilitatorStrategy for NaeFacilitator {
    fn next(&mut self, pos: &Position) -> Result<FPlacement, StrategyError> {
        if self.plan.is_none() {
            self.plan = Some(self.plan(&pos.d)?);
            self.step = 0;
        }
        let plan = self.plan.as_ref().unwrap();
        let Some(&f) = plan.get(self.step) else {
            return Err(StrategyError::NoMove("rush already finished".into()));
        };
        if f.vertices().iter().any(|&v| pos.d.contains(v)) {
            return Err(StrategyError::Uncovered(format!("rush blocked at {f}")));
        }
        self.step += 1;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(d: usize, bounds: [usize; 3]) -> NaeInstance {
        NaeInstance { n: 1, dstar: d, clauses: vec![[1, bounds[0], 1, bounds[1], 1, bounds[2]]] }
    }

    #[test]
    fn forced_equal_clause_is_unsatisfiable() {
        assert!(!oracle_nae(&single(1, [1, 1, 1])).unwrap());
        assert!(oracle_nae(&single(2, [1, 1, 2])).unwrap());
        assert_eq!(satisfying_assignment(&single(2, [1, 1, 2])).unwrap(), Some(vec![2]));
    }

    #[test]
    fn smallest_reduction_has_34_vertices() {
        let src = single(1, [1, 1, 1]);
        assert_eq!(src.reduced_vertex_count(), 34);
        let (inst, gi) = reduce_nae(&src).unwrap();
        assert_eq!(inst.graph.n(), 34);
        assert_eq!(inst.k, 3);
        assert_eq!(gi.paths.iter().filter(|p| matches!(p.role, PathRole::Literal { .. })).count(), 6);
    }

    #[test]
    fn bounds_are_checked() {
        assert!(reduce_nae(&single(1, [1, 2, 1])).is_err());
        assert!(reduce_nae(&NaeInstance { n: 1, dstar: 1, clauses: vec![[2, 1, 1, 1, 1, 1]] }).is_err());
    }

    #[test]
    fn missing_guard_is_a_one_step_rush() {
        let src = single(1, [1, 1, 1]);
        let (inst, gi) = reduce_nae(&src).unwrap();
        let fac = scripted_facilitator_nae(&inst, &gi).unwrap();
        let g1 = gi.vertex("g1").unwrap();
        let u = gi.vertex("u_1^1").unwrap();
        let plan = fac.plan(&DPlacement::new(vec![g1, u, u])).unwrap();
        assert_eq!(plan, vec![FPlacement::new(gi.vertex("g2").unwrap(), gi.vertex("g2").unwrap())]);
    }
}
