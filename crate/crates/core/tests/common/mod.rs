//! Independent oracles and instance generators shared by the integration
//! tests. Nothing here calls into the solver under test.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rendezvous_core::graph::{Graph, Instance, Vertex};

/// Edge list of a random connected graph: a random spanning tree plus each
/// remaining pair with probability `p`.
pub fn random_connected(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(Vertex, Vertex)> {
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    edges.into_iter().collect()
}

pub fn graph(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
    Graph::from_edges(n, edges).unwrap()
}

/// A random pair of distinct non-adjacent vertices, if any.
pub fn far_pair(rng: &mut impl Rng, g: &Graph) -> Option<(Vertex, Vertex)> {
    let pairs: Vec<(Vertex, Vertex)> = (0..g.n())
        .flat_map(|u| (u + 1..g.n()).map(move |v| (u, v)))
        .filter(|&(u, v)| !g.has_edge(u, v))
        .collect();
    pairs.choose(rng).copied()
}

/// Random two-terminal series-parallel graph on at most `max_n` vertices,
/// built by composing edges in series and in parallel. Returns the edges,
/// the vertex count and the two poles.
pub fn series_parallel(rng: &mut impl Rng, max_n: usize) -> (usize, Vec<(Vertex, Vertex)>, Vertex, Vertex) {
    // start from one edge; repeatedly subdivide an edge (series) or add a
    // parallel path of length two between an edge's ends (parallel)
    let mut n = 2;
    let mut edges: BTreeSet<(Vertex, Vertex)> = [(0, 1)].into_iter().collect();
    while n < max_n {
        let all: Vec<(Vertex, Vertex)> = edges.iter().copied().collect();
        let &(a, b) = all.choose(rng).unwrap();
        let w = n;
        n += 1;
        if rng.gen_bool(0.5) {
            edges.remove(&(a, b));
        }
        edges.insert((a, w));
        edges.insert((b, w));
    }
    (n, edges.into_iter().collect(), 0, 1)
}

/// K4 with each edge subdivided by a random number of vertices, plus random
/// pendant trees.
pub fn k4_subdivision(rng: &mut impl Rng, extra: usize) -> (usize, Vec<(Vertex, Vertex)>) {
    let mut n = 4;
    let mut edges = Vec::new();
    for u in 0..4 {
        for v in u + 1..4 {
            let len = rng.gen_range(0..3);
            let mut prev = u;
            for _ in 0..len {
                edges.push((prev.min(n), prev.max(n)));
                prev = n;
                n += 1;
            }
            edges.push((prev.min(v), prev.max(v)));
        }
    }
    for _ in 0..extra {
        let to = rng.gen_range(0..n);
        edges.push((to, n));
        n += 1;
    }
    (n, edges)
}

/// Every multiset of `k` vertices from `pool`, sorted.
pub fn multisets(pool: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    fn rec(pool: &[Vertex], from: usize, k: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            rec(pool, i, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, 0, k, &mut Vec::new(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Multiset step relation by trying every bijection.
pub fn brute_adjacent(g: &Graph, x: &[Vertex], y: &[Vertex]) -> bool {
    permutations(x.len())
        .into_iter()
        .any(|p| x.iter().enumerate().all(|(i, &a)| a == y[p[i]] || g.has_edge(a, y[p[i]])))
}

fn connected_without(g: &Graph, s: Vertex, t: Vertex, removed: &[bool]) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        if v == t {
            return true;
        }
        for &w in g.neighbors(v) {
            if !seen[w] && !removed[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Smallest vertex separator by trying subsets in order of size; `None`
/// when `s` and `t` are equal or adjacent.
pub fn brute_lambda(g: &Graph, s: Vertex, t: Vertex) -> Option<usize> {
    if s == t || g.has_edge(s, t) {
        return None;
    }
    let inner: Vec<Vertex> = (0..g.n()).filter(|&v| v != s && v != t).collect();
    for size in 0..=inner.len() {
        let mut found = false;
        subsets(&inner, size, &mut |set| {
            let mut removed = vec![false; g.n()];
            for &v in set {
                removed[v] = true;
            }
            if !connected_without(g, s, t, &removed) {
                found = true;
            }
            found
        });
        if found {
            return Some(size);
        }
    }
    unreachable!("removing every inner vertex separates non-adjacent terminals")
}

pub fn separates(g: &Graph, s: Vertex, t: Vertex, cut: &[Vertex]) -> bool {
    let mut removed = vec![false; g.n()];
    for &v in cut {
        removed[v] = true;
    }
    !connected_without(g, s, t, &removed)
}

pub fn subsets(pool: &[Vertex], size: usize, visit: &mut dyn FnMut(&[Vertex]) -> bool) {
    fn rec(pool: &[Vertex], from: usize, size: usize, cur: &mut Vec<Vertex>, visit: &mut dyn FnMut(&[Vertex]) -> bool) -> bool {
        if cur.len() == size {
            return visit(cur);
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            if rec(pool, i + 1, size, cur, visit) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(pool, 0, size, &mut Vec::new(), visit);
}

/// Minimum vertex cover containing `s` and `t`, by subset search.
pub fn brute_cover_size(g: &Graph, s: Vertex, t: Vertex) -> usize {
    let rest: Vec<Vertex> = (0..g.n()).filter(|&v| v != s && v != t).collect();
    for size in 0..=rest.len() {
        let mut ok = false;
        subsets(&rest, size, &mut |set| {
            let inx = |v: Vertex| v == s || v == t || set.contains(&v);
            ok = g.edges().all(|(u, v)| inx(u) || inx(v));
            ok
        });
        if ok {
            return size + usize::from(s != t) + 1;
        }
    }
    unreachable!()
}

/// Outcome of the naive solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Naive {
    pub facilitator_wins: bool,
    /// Minimax number of Facilitator moves, when she wins.
    pub rounds: Option<u32>,
    /// Number of compatible (F, D) pairs seen.
    pub pairs: usize,
}

type Pair = ([Vertex; 2], Vec<Vertex>);

fn f_moves(g: &Graph, f: [Vertex; 2]) -> BTreeSet<[Vertex; 2]> {
    let step = |v: Vertex| std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect::<Vec<_>>();
    let mut out = BTreeSet::new();
    for a in step(f[0]) {
        for b in step(f[1]) {
            out.insert([a.min(b), a.max(b)]);
        }
    }
    out
}

fn d_moves(g: &Graph, d: &[Vertex]) -> BTreeSet<Vec<Vertex>> {
    let mut out = BTreeSet::new();
    let mut cur = Vec::new();
    fn rec(g: &Graph, d: &[Vertex], cur: &mut Vec<Vertex>, out: &mut BTreeSet<Vec<Vertex>>) {
        if cur.len() == d.len() {
            let mut m = cur.clone();
            m.sort_unstable();
            out.insert(m);
            return;
        }
        let v = d[cur.len()];
        for w in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
            cur.push(w);
            rec(g, d, cur, out);
            cur.pop();
        }
    }
    rec(g, d, &mut cur, &mut out);
    out
}

fn disjoint(f: [Vertex; 2], d: &[Vertex]) -> bool {
    !d.contains(&f[0]) && !d.contains(&f[1])
}

/// Solves by rounds: `win[r]` holds the Facilitator-to-move pairs from which
/// she forces a meeting within `r` of her moves. Plain maps, no indexing.
pub fn naive_solve(inst: &Instance) -> Naive {
    let g = &inst.graph;
    let n = g.n();
    let all: Vec<Vertex> = (0..n).collect();
    if inst.s == inst.t {
        return Naive { facilitator_wins: true, rounds: Some(0), pairs: 0 };
    }
    let mut pairs: Vec<Pair> = Vec::new();
    for a in 0..n {
        for b in a..n {
            for d in multisets(&all, inst.k) {
                if disjoint([a, b], &d) {
                    pairs.push(([a, b], d));
                }
            }
        }
    }
    let count = pairs.len();
    // rank of a Facilitator-to-move pair; absent = not (yet) winning
    let mut rank: HashMap<Pair, u32> = HashMap::new();
    let fm: HashMap<[Vertex; 2], BTreeSet<[Vertex; 2]>> =
        (0..n).flat_map(|a| (a..n).map(move |b| [a, b])).map(|f| (f, f_moves(g, f))).collect();
    let dm: HashMap<Vec<Vertex>, BTreeSet<Vec<Vertex>>> =
        multisets(&all, inst.k).into_iter().map(|d| { let m = d_moves(g, &d); (d, m) }).collect();
    for r in 1.. {
        let mut added = Vec::new();
        for (f, d) in &pairs {
            if f[0] == f[1] || rank.contains_key(&(*f, d.clone())) {
                continue;
            }
            let wins = fm[f].iter().filter(|nf| disjoint(**nf, d)).any(|nf| {
                nf[0] == nf[1]
                    || dm[d]
                        .iter()
                        .filter(|nd| disjoint(*nf, nd))
                        .all(|nd| rank.get(&(*nf, nd.clone())).is_some_and(|&x| x < r))
            });
            if wins {
                added.push((*f, d.clone()));
            }
        }
        if added.is_empty() {
            break;
        }
        for p in added {
            rank.insert(p, r);
        }
    }
    let start = [inst.s.min(inst.t), inst.s.max(inst.t)];
    let free: Vec<Vertex> = (0..n).filter(|&v| v != inst.s && v != inst.t).collect();
    let mut worst = Some(0u32);
    let placements = multisets(&free, inst.k);
    if placements.is_empty() {
        // no legal placement; only adjacent terminals can get here in tests
        return Naive { facilitator_wins: true, rounds: Some(1), pairs: count };
    }
    for d in placements {
        worst = match (worst, rank.get(&(start, d))) {
            (Some(w), Some(&r)) => Some(w.max(r)),
            _ => None,
        };
    }
    Naive { facilitator_wins: worst.is_some(), rounds: worst, pairs: count }
}

/// The closed-form count of compatible pairs.
pub fn pair_formula(n: u64, k: u64) -> u64 {
    fn c(n: i64, k: i64) -> u64 {
        if k < 0 || n < k || n < 0 {
            return 0;
        }
        let mut r: u128 = 1;
        for i in 0..k {
            r = r * (n - i) as u128 / (i + 1) as u128;
        }
        r as u64
    }
    let (n, k) = (n as i64, k as i64);
    n as u64 * c(n + k - 2, k) + c(n, 2) * c(n + k - 3, k)
}

/// Instance with a planted cover: `cover` vertices (s = 0, t = 1 among them,
/// never adjacent), random edges inside the cover, and `classes` groups of
/// twins, sized from `size`, each attached to its own subset of the cover.
/// Resamples until connected.
pub fn planted(rng: &mut impl Rng, cover: usize, classes: usize, size: std::ops::RangeInclusive<usize>, k: usize) -> Instance {
    assert!(classes < (1 << cover));
    loop {
        let mut edges = Vec::new();
        for u in 0..cover {
            for v in u + 1..cover {
                if (u, v) != (0, 1) && rng.gen_bool(0.3) {
                    edges.push((u, v));
                }
            }
        }
        let mut used = BTreeSet::new();
        let mut n = cover;
        while used.len() < classes {
            let mask: usize = rng.gen_range(1..1 << cover);
            if !used.insert(mask) {
                continue;
            }
            let members = rng.gen_range(size.clone());
            for _ in 0..members {
                for y in (0..cover).filter(|y| mask >> y & 1 == 1) {
                    edges.push((y, n));
                }
                n += 1;
            }
        }
        let g = graph(n, &edges);
        if g.is_connected() {
            return Instance::new(g, 0, 1, k).unwrap();
        }
    }
}
