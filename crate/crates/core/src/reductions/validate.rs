use std::collections::BTreeSet;

use serde::Serialize;

use super::gadget::{GadgetIndex, PathRole, Source};
use super::{nae, setcover, threedm};
use crate::graph::{Graph, Instance, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Empty on success; otherwise the first few offending items.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub kind: super::ReductionKind,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeShape {
    Path,
    /// At most one vertex of degree three or more.
    SubdividedStar,
    /// Vertices of degree three or more all lie on one path.
    SubdividedCaterpillar,
    OtherTree,
    Cyclic,
}

/// Shape of the subgraph induced by `comp` (a connected vertex set).
pub fn classify_tree(g: &Graph, comp: &[Vertex]) -> TreeShape {
    let inside: BTreeSet<Vertex> = comp.iter().copied().collect();
    let deg = |v: Vertex| g.neighbors(v).iter().filter(|w| inside.contains(w)).count();
    let edges: usize = comp.iter().map(|&v| deg(v)).sum::<usize>() / 2;
    if edges + 1 != comp.len() {
        return TreeShape::Cyclic;
    }
    let branch: Vec<Vertex> = comp.iter().copied().filter(|&v| deg(v) >= 3).collect();
    if branch.is_empty() {
        return TreeShape::Path;
    }
    if branch.len() == 1 {
        return TreeShape::SubdividedStar;
    }
    // prune non-branch leaves until only the subtree spanning the branch vertices remains
    let mut alive = inside.clone();
    let mut degree: std::collections::BTreeMap<Vertex, usize> = comp.iter().map(|&v| (v, deg(v))).collect();
    let mut leaves: Vec<Vertex> = comp.iter().copied().filter(|&v| degree[&v] <= 1).collect();
    while let Some(v) = leaves.pop() {
        if !alive.contains(&v) || branch.contains(&v) {
            continue;
        }
        alive.remove(&v);
        for &w in g.neighbors(v) {
            if alive.contains(&w) {
                let d = degree.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 1 {
                    leaves.push(w);
                }
            }
        }
    }
    if alive.iter().all(|v| degree[v] <= 2) {
        TreeShape::SubdividedCaterpillar
    } else {
        TreeShape::OtherTree
    }
}

fn expected_internal(source: &Source, role: &PathRole) -> Option<u64> {
    match source {
        Source::ThreeDm(src) => threedm::expected_internal(src, role),
        Source::Nae(src) => nae::expected_internal(src, role),
        Source::SetCover(_) => setcover::expected_internal(role),
    }
}

fn limited(items: Vec<String>) -> String {
    let shown: Vec<_> = items.iter().take(5).cloned().collect();
    if items.len() > 5 {
        format!("{} (+{} more)", shown.join("; "), items.len() - 5)
    } else {
        shown.join("; ")
    }
}

fn check(name: &'static str, problems: Vec<String>) -> Check {
    Check { name, passed: problems.is_empty(), detail: limited(problems) }
}

/// Recounts every registered path in the raw graph and checks the structural
/// claims attached to each construction.
pub fn validate_gadgets(inst: &Instance, gi: &GadgetIndex) -> ValidationReport {
    let g = &inst.graph;
    let mut checks = Vec::new();

    let source_ok = match &gi.source {
        Source::ThreeDm(src) => src.validate(),
        Source::Nae(src) => src.validate(),
        Source::SetCover(src) => src.validate(),
    };
    checks.push(check("source", source_ok.err().map(|e| e.to_string()).into_iter().collect()));
    if !checks[0].passed {
        return ValidationReport { kind: gi.kind, passed: false, checks };
    }

    let (want_n, want_k) = match &gi.source {
        Source::ThreeDm(src) => (src.reduced_vertex_count(), src.n + 2),
        Source::Nae(src) => (src.reduced_vertex_count(), src.n + 2),
        Source::SetCover(src) => (setcover::vertex_count(src), src.budget + 1),
    };
    let mut problems = Vec::new();
    if g.n() as u64 != want_n {
        problems.push(format!("{} vertices, formula gives {want_n}", g.n()));
    }
    if inst.k != want_k || gi.k != want_k {
        problems.push(format!("k = {} (index {}), expected {want_k}", inst.k, gi.k));
    }
    checks.push(check("counts", problems));

    // registered lengths against the source
    let mut problems = Vec::new();
    for p in &gi.paths {
        match expected_internal(&gi.source, &p.role) {
            None => problems.push(format!("{} does not belong to this construction", p.role)),
            Some(want) if want != p.internal as u64 || p.vertices.len() != p.internal => problems.push(format!(
                "{}: registered {} ({} listed), expected {want}",
                p.role,
                p.internal,
                p.vertices.len()
            )),
            _ => {}
        }
    }
    checks.push(check("registry-lengths", problems));

    // recount in raw adjacency: walk the chain of unnamed degree-2 vertices
    let named: BTreeSet<Vertex> = gi.named.values().copied().collect();
    let mut problems = Vec::new();
    let in_range = |v: Vertex| v < g.n();
    for p in &gi.paths {
        if !in_range(p.from) || !in_range(p.to) || p.vertices.iter().any(|&v| !in_range(v)) {
            problems.push(format!("{}: vertex out of range", p.role));
            continue;
        }
        if matches!(p.role, PathRole::Spine { .. }) {
            let all = p.walk_from(p.from);
            if all.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                problems.push(format!("{}: broken spine", p.role));
            }
            continue;
        }
        let want = expected_internal(&gi.source, &p.role).unwrap_or(u64::MAX);
        let Some(&first) = p.vertices.first() else {
            if !g.has_edge(p.from, p.to) {
                problems.push(format!("{}: missing edge", p.role));
            } else if want != 0 {
                problems.push(format!("{}: direct edge, expected {want} internal vertices", p.role));
            }
            continue;
        };
        if !g.has_edge(p.from, first) {
            problems.push(format!("{}: does not leave {}", p.role, p.from));
            continue;
        }
        let (mut prev, mut cur, mut count) = (p.from, first, 0usize);
        while !named.contains(&cur) && g.degree(cur) == 2 && count <= g.n() {
            count += 1;
            let nb = g.neighbors(cur);
            let next = if nb[0] == prev { nb[1] } else { nb[0] };
            prev = cur;
            cur = next;
        }
        if cur != p.to || count as u64 != want {
            problems.push(format!("{}: walked {count} internal vertices to {cur}, expected {want} to {}", p.role, p.to));
        }
    }
    checks.push(check("recount", problems));

    // every edge on exactly one registered path; every vertex named or internal once
    let mut problems = Vec::new();
    let mut edge_uses: std::collections::HashMap<(Vertex, Vertex), usize> = std::collections::HashMap::new();
    let mut vertex_uses = vec![0usize; g.n()];
    for &v in &named {
        if v < g.n() {
            vertex_uses[v] += 1;
        }
    }
    for p in &gi.paths {
        let all = p.walk_from(p.from);
        for w in all.windows(2) {
            *edge_uses.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
        }
        if !matches!(p.role, PathRole::Spine { .. }) {
            for &v in &p.vertices {
                if v < g.n() {
                    vertex_uses[v] += 1;
                }
            }
        }
    }
    for (u, v) in g.edges() {
        match edge_uses.get(&(u, v)) {
            Some(1) => {}
            Some(c) => problems.push(format!("edge {u}-{v} registered {c} times")),
            None => problems.push(format!("edge {u}-{v} is on no registered path")),
        }
    }
    for (&(u, v), _) in edge_uses.iter().filter(|&(&(u, v), _)| !g.has_edge(u, v)) {
        problems.push(format!("registered edge {u}-{v} is missing"));
    }
    for (v, &c) in vertex_uses.iter().enumerate() {
        if c != 1 {
            problems.push(format!("vertex {v} accounted for {c} times"));
        }
    }
    problems.sort();
    checks.push(check("partition", problems));

    // named vertices: degree equals the number of registered path ends there
    let mut problems = Vec::new();
    for (name, &v) in &gi.named {
        if v >= g.n() {
            continue;
        }
        let ends = gi
            .paths
            .iter()
            .map(|p| {
                let inner = matches!(p.role, PathRole::Spine { .. }) && p.vertices.contains(&v);
                usize::from(p.from == v) + usize::from(p.to == v) + 2 * usize::from(inner)
            })
            .sum::<usize>();
        if g.degree(v) != ends {
            problems.push(format!("{name}: degree {} but {ends} path ends", g.degree(v)));
        }
    }
    checks.push(check("named-degrees", problems));

    checks.push(check(
        "connected",
        if g.is_connected() { vec![] } else { vec!["graph is disconnected".into()] },
    ));

    match &gi.source {
        Source::ThreeDm(_) => {
            let s = threedm::feedback_set(gi);
            checks.extend(forest_checks(g, &s, 14, |shape| {
                matches!(shape, TreeShape::Path | TreeShape::SubdividedStar | TreeShape::SubdividedCaterpillar)
            }));
        }
        Source::Nae(src) => {
            let s = nae::feedback_set(gi, src);
            checks.extend(forest_checks(g, &s, 2 * src.n + 2, |shape| {
                matches!(shape, TreeShape::Path | TreeShape::SubdividedStar)
            }));
        }
        Source::SetCover(src) => {
            let x = setcover::cover_witness(gi, src);
            let mut problems = Vec::new();
            if x.len() != src.universe_size + src.budget + 2 {
                problems.push(format!("witness has {} vertices", x.len()));
            }
            let inx: BTreeSet<Vertex> = x.into_iter().collect();
            for (u, v) in g.edges().filter(|(u, v)| !inx.contains(u) && !inx.contains(v)) {
                problems.push(format!("edge {u}-{v} uncovered"));
            }
            checks.push(check("vertex-cover", problems));
        }
    }

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { kind: gi.kind, passed, checks }
}

/// Removes `set`: the rest must be a forest, with components allowed by `allowed`.
fn forest_checks(g: &Graph, set: &[Vertex], size: usize, allowed: impl Fn(TreeShape) -> bool) -> [Check; 2] {
    let mut cyclic = Vec::new();
    let mut shapes = Vec::new();
    if set.len() != size {
        cyclic.push(format!("witness has {} vertices, expected {size}", set.len()));
    }
    for comp in g.components_avoiding(set) {
        let shape = classify_tree(g, &comp);
        let label = g.label(comp[0]).unwrap_or("?");
        if shape == TreeShape::Cyclic {
            cyclic.push(format!("component of {} vertices around {label} has a cycle", comp.len()));
        } else if !allowed(shape) {
            shapes.push(format!("component of {} vertices around {label} is {shape:?}", comp.len()));
        }
    }
    [check("feedback-set", cyclic), check("component-shapes", shapes)]
}
