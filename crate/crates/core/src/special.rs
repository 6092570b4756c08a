//! Polynomial fast paths: trees, treewidth-2 graphs (dynamic separation
//! equals lambda) and grids (dynamic separation is 2), plus the grid
//! mimicking Divider.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DPlacement, FPlacement, Graph, GraphBuilder, Instance, Position, Vertex};
use crate::separation::{lambda, ExtendedCount};
use crate::sim::{DividerStrategy, StrategyError};
use crate::Side;

/// One elimination step: the removed vertex, and the edge added between its
/// two neighbours when it had degree 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tw2Step {
    pub vertex: Vertex,
    pub fill: Option<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tw2Witness {
    pub elimination: Vec<Tw2Step>,
}

/// Repeatedly deletes the lowest-index vertex of degree at most 2, joining
/// the neighbours of a degree-2 vertex. Succeeds iff treewidth is at most 2.
pub fn recognize_tw2(g: &Graph) -> Option<Tw2Witness> {
    let mut adj: Vec<BTreeSet<Vertex>> = (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<Vertex> = (0..g.n()).collect();
    let mut elimination = Vec::with_capacity(g.n());
    while !alive.is_empty() {
        let v = *alive.iter().find(|&&v| adj[v].len() <= 2)?;
        let ns: Vec<Vertex> = adj[v].iter().copied().collect();
        for &w in &ns {
            adj[w].remove(&v);
        }
        let fill = if let [a, b] = ns[..] {
            adj[a].insert(b);
            adj[b].insert(a);
            Some((a, b))
        } else {
            None
        };
        adj[v].clear();
        alive.remove(&v);
        elimination.push(Tw2Step { vertex: v, fill });
    }
    Some(Tw2Witness { elimination })
}

pub fn is_tree(g: &Graph) -> bool {
    g.n() > 0 && g.edge_count() == g.n() - 1 && g.is_connected()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid dimensions must be positive")]
    ZeroDimension,
    #[error("terminals are adjacent or equal")]
    AdjacentTerminals,
    #[error("coordinate ({0},{1}) outside the grid")]
    OutOfGrid(u32, u32),
}

/// Rows and columns of a grid plus the vertex at each cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMeta {
    pub rows: u32,
    pub cols: u32,
    cells: Vec<Vertex>,
    coords: Vec<(u32, u32)>,
}

impl GridMeta {
    /// 1-based cell lookup.
    pub fn vertex(&self, row: u32, col: u32) -> Option<Vertex> {
        (row >= 1 && row <= self.rows && col >= 1 && col <= self.cols)
            .then(|| self.cells[((row - 1) * self.cols + (col - 1)) as usize])
    }

    pub fn coord(&self, v: Vertex) -> (u32, u32) {
        self.coords[v]
    }

    /// Recovers grid structure from the coordinate sidecar, checking that
    /// cells are complete and edges are exactly the unit steps.
    pub fn from_graph(g: &Graph) -> Option<GridMeta> {
        if !g.has_full_coords() {
            return None;
        }
        let coords: Vec<(u32, u32)> = (0..g.n()).map(|v| g.coord(v).unwrap()).collect();
        let rows = coords.iter().map(|c| c.0).max()?;
        let cols = coords.iter().map(|c| c.1).max()?;
        if coords.iter().any(|&(r, c)| r == 0 || c == 0) || (rows * cols) as usize != g.n() {
            return None;
        }
        let mut cells = vec![usize::MAX; g.n()];
        for (v, &(r, c)) in coords.iter().enumerate() {
            let slot = &mut cells[((r - 1) * cols + (c - 1)) as usize];
            if *slot != usize::MAX {
                return None;
            }
            *slot = v;
        }
        let expected = 2 * (rows * cols) as usize - rows as usize - cols as usize;
        let unit = g.edges().all(|(u, v)| {
            let (a, b) = (coords[u], coords[v]);
            a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1
        });
        (unit && g.edge_count() == expected).then_some(GridMeta { rows, cols, cells, coords })
    }
}

/// `rows x cols` grid; vertex `(i, j)` (1-based) has index `(i-1)*cols + (j-1)`.
pub fn make_grid(rows: u32, cols: u32) -> Result<Graph, GridError> {
    if rows == 0 || cols == 0 {
        return Err(GridError::ZeroDimension);
    }
    let mut b = GraphBuilder::with_vertices((rows * cols) as usize);
    let at = |i: u32, j: u32| ((i - 1) * cols + (j - 1)) as usize;
    for i in 1..=rows {
        for j in 1..=cols {
            b.set_label(at(i, j), format!("({i},{j})"));
            b.set_coord(at(i, j), i, j);
            if j < cols {
                b.add_edge(at(i, j), at(i, j + 1)).expect("fresh edge");
            }
            if i < rows {
                b.add_edge(at(i, j), at(i + 1, j)).expect("fresh edge");
            }
        }
    }
    Ok(b.build())
}

pub fn grid_instance(rows: u32, cols: u32, s: (u32, u32), t: (u32, u32), k: usize) -> Result<Instance, GridError> {
    let g = make_grid(rows, cols)?;
    let meta = GridMeta::from_graph(&g).expect("fresh grid");
    let sv = meta.vertex(s.0, s.1).ok_or(GridError::OutOfGrid(s.0, s.1))?;
    let tv = meta.vertex(t.0, t.1).ok_or(GridError::OutOfGrid(t.0, t.1))?;
    Ok(Instance::new(g, sv, tv, k.max(1)).expect("valid terminals"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FastPath {
    Adjacent,
    Tree,
    Tw2,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecialReport {
    pub winner: Side,
    pub d: ExtendedCount,
    pub provenance: FastPath,
}

/// Answers without search when the instance falls in a known class;
/// `None` means the caller should use the exact engine.
pub fn solve_special(inst: &Instance) -> Option<SpecialReport> {
    let winner_for = |d: ExtendedCount| match d {
        ExtendedCount::Finite(d) if inst.k >= d as usize => Side::Divider,
        _ => Side::Facilitator,
    };
    let report = |d: ExtendedCount, provenance| Some(SpecialReport { winner: winner_for(d), d, provenance });
    if inst.terminals_touch() {
        return report(ExtendedCount::Infinite, FastPath::Adjacent);
    }
    if !inst.connected {
        return None;
    }
    if is_tree(&inst.graph) {
        return report(ExtendedCount::Finite(1), FastPath::Tree);
    }
    if recognize_tw2(&inst.graph).is_some() {
        let lam = lambda(&inst.graph, inst.s, inst.t).expect("valid terminals");
        return report(lam, FastPath::Tw2);
    }
    if GridMeta::from_graph(&inst.graph).is_some() {
        return report(ExtendedCount::Finite(2), FastPath::Grid);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Row,
    Col,
}

/// Two-agent grid Divider: the first agent sits one step past Romeo toward
/// Juliet, the second one step past Juliet toward Romeo, and both copy
/// every move of their agent. The gap along the chosen axis never shrinks.
#[derive(Debug, Clone)]
pub struct MimicDivider {
    meta: GridMeta,
    axis: Axis,
    // +1 when Romeo's axis coordinate is smaller than Juliet's.
    sign: i64,
    romeo: Vertex,
    juliet: Vertex,
}

impl MimicDivider {
    /// Picks the axis with the larger coordinate gap (rows on ties).
    pub fn new(meta: GridMeta, s: Vertex, t: Vertex) -> Result<Self, GridError> {
        let (sr, sc) = meta.coord(s);
        let (tr, tc) = meta.coord(t);
        let (dr, dc) = (sr.abs_diff(tr), sc.abs_diff(tc));
        if dr + dc <= 1 {
            return Err(GridError::AdjacentTerminals);
        }
        let (axis, a, b) = if dr >= dc { (Axis::Row, sr, tr) } else { (Axis::Col, sc, tc) };
        let sign = if a < b { 1 } else { -1 };
        Ok(Self { meta, axis, sign, romeo: s, juliet: t })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Gap between Juliet and Romeo along the axis, oriented to be positive.
    pub fn gap(&self, romeo: Vertex, juliet: Vertex) -> i64 {
        let c = |v| {
            let (r, col) = self.meta.coord(v);
            match self.axis {
                Axis::Row => r as i64,
                Axis::Col => col as i64,
            }
        };
        (c(juliet) - c(romeo)) * self.sign
    }

    fn shifted(&self, v: Vertex, steps: i64) -> Option<Vertex> {
        let (r, c) = self.meta.coord(v);
        let (r, c) = match self.axis {
            Axis::Row => (r as i64 + steps, c as i64),
            Axis::Col => (r as i64, c as i64 + steps),
        };
        if r < 1 || c < 1 {
            return None;
        }
        self.meta.vertex(r as u32, c as u32)
    }

    fn guards(&self, romeo: Vertex, juliet: Vertex) -> Result<DPlacement, StrategyError> {
        let d1 = self.shifted(romeo, self.sign);
        let d2 = self.shifted(juliet, -self.sign);
        match (d1, d2) {
            (Some(a), Some(b)) if ![a, b].iter().any(|&x| x == romeo || x == juliet) => {
                Ok(DPlacement::new(vec![a, b]))
            }
            _ => Err(StrategyError::Uncovered(format!(
                "mimic target blocked with Romeo at {:?}, Juliet at {:?}",
                self.meta.coord(romeo),
                self.meta.coord(juliet)
            ))),
        }
    }

    /// Which of the new pair is Romeo: each agent moved at most one step.
    fn track(&self, f: &FPlacement, g: &Graph) -> Option<(Vertex, Vertex)> {
        let [a, b] = f.vertices();
        let near = |x: Vertex, y: Vertex| x == y || g.has_edge(x, y);
        if near(self.romeo, a) && near(self.juliet, b) {
            Some((a, b))
        } else if near(self.romeo, b) && near(self.juliet, a) {
            Some((b, a))
        } else {
            None
        }
    }
}

/// Mimic strategy bound to its graph (needed to track agent identity).
pub struct GridDivider<'g> {
    pub mimic: MimicDivider,
    graph: &'g Graph,
}

impl<'g> GridDivider<'g> {
    pub fn new(inst: &'g Instance) -> Result<Self, GridError> {
        let meta = GridMeta::from_graph(&inst.graph).ok_or(GridError::ZeroDimension)?;
        Ok(Self { mimic: MimicDivider::new(meta, inst.s, inst.t)?, graph: &inst.graph })
    }

    pub fn romeo_juliet(&self) -> (Vertex, Vertex) {
        (self.mimic.romeo, self.mimic.juliet)
    }
}

impl DividerStrategy for GridDivider<'_> {
    fn place(&mut self, _inst: &Instance) -> Result<DPlacement, StrategyError> {
        self.mimic.guards(self.mimic.romeo, self.mimic.juliet)
    }

    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError> {
        let (r, j) = self
            .mimic
            .track(&pos.f, self.graph)
            .ok_or_else(|| StrategyError::Uncovered("lost track of Romeo and Juliet".into()))?;
        self.mimic.romeo = r;
        self.mimic.juliet = j;
        self.mimic.guards(r, j)
    }
}
