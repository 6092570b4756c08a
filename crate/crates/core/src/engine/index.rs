//! Dense ranking of placements and the precomputed successor lists the
//! solvers run on.
//!
//! A position id is `f_rank * nd + d_rank` for each side, so the id space is
//! the full product of placements; incompatible pairs are simply never
//! marked.

use crate::graph::{compatible, DPlacement, FPlacement, Graph, Position, Side, Vertex};

/// Saturating binomial coefficient.
pub fn binom(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of compatible (F, D) pairs on `n` vertices with `k` Divider agents.
pub fn compatible_pair_count(n: usize, k: usize) -> u64 {
    let (n, k) = (n as i64, k as i64);
    let meet = (n as u64).saturating_mul(binom(n + k - 2, k));
    let apart = binom(n, 2).saturating_mul(binom(n + k - 3, k));
    meet.saturating_add(apart)
}

/// Position-sides: every compatible pair once per side to move.
pub fn position_side_count(n: usize, k: usize) -> u64 {
    compatible_pair_count(n, k).saturating_mul(2)
}

/// Compressed successor lists, one row per placement rank.
#[derive(Debug, Clone, Default)]
pub struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    pub fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn entries(&self) -> usize {
        self.targets.len()
    }
}

/// All placements for a graph and agent count, with ranking and
/// unrestricted (compatibility-free) successor lists.
#[derive(Debug, Clone)]
pub struct PositionIndex {
    n: usize,
    k: usize,
    f_table: Vec<[u32; 2]>,
    d_table: Vec<u32>,
    binoms: Vec<Vec<u64>>,
    fsucc: Csr,
    dsucc: Csr,
    compatible_pairs: u64,
}

impl PositionIndex {
    /// Builds tables; the caller is responsible for budget checks.
    pub fn build(g: &Graph, k: usize) -> Self {
        let n = g.n();
        // binoms[c][j] = C(c, j) for c < n + k, j <= k
        let binoms: Vec<Vec<u64>> = (0..n + k)
            .map(|c| (0..=k).map(|j| binom(c as i64, j as i64)).collect())
            .collect();

        let f_table: Vec<[u32; 2]> = (0..n)
            .flat_map(|a| (a..n).map(move |b| [a as u32, b as u32]))
            .collect();

        let nd = binom((n + k - 1) as i64, k as i64) as usize;
        let mut d_table = Vec::with_capacity(nd * k);
        let mut cur = vec![0u32; k];
        // Colex order over multisets matches the combinatorial-number rank.
        for _ in 0..nd {
            d_table.extend_from_slice(&cur);
            // advance: find the lowest position that can grow
            let mut i = 0;
            while i < k {
                let cap = if i + 1 < k { cur[i + 1] } else { n as u32 - 1 };
                if cur[i] < cap {
                    cur[i] += 1;
                    for c in cur.iter_mut().take(i) {
                        *c = 0;
                    }
                    break;
                }
                i += 1;
            }
        }

        let mut idx = Self {
            n,
            k,
            f_table,
            d_table,
            binoms,
            fsucc: Csr::default(),
            dsucc: Csr::default(),
            compatible_pairs: 0,
        };
        idx.fsucc = idx.build_fsucc(g);
        idx.dsucc = idx.build_dsucc(g);
        idx.compatible_pairs = (0..idx.nf())
            .map(|f| (0..nd).filter(|&d| idx.compatible_ranks(f, d)).count() as u64)
            .sum();
        debug_assert_eq!(idx.compatible_pairs, compatible_pair_count(n, k));
        idx
    }

    fn build_fsucc(&self, g: &Graph) -> Csr {
        let mut offsets = vec![0u32];
        let mut targets = Vec::new();
        let mut row = Vec::new();
        for &[a, b] in &self.f_table {
            row.clear();
            let (a, b) = (a as usize, b as usize);
            for x in std::iter::once(a).chain(g.neighbors(a).iter().copied()) {
                for y in std::iter::once(b).chain(g.neighbors(b).iter().copied()) {
                    row.push(self.f_rank(x, y) as u32);
                }
            }
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(&row);
            offsets.push(targets.len() as u32);
        }
        Csr { offsets, targets }
    }

    fn build_dsucc(&self, g: &Graph) -> Csr {
        let k = self.k;
        let mut offsets = vec![0u32];
        let mut targets = Vec::new();
        let mut row = Vec::new();
        let mut choice = vec![0usize; k];
        let mut buf = vec![0usize; k];
        for d in 0..self.nd() {
            row.clear();
            let agents: Vec<Vertex> = self.d_agents(d).iter().map(|&v| v as usize).collect();
            let opts: Vec<Vec<Vertex>> = agents
                .iter()
                .map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect())
                .collect();
            choice.iter_mut().for_each(|c| *c = 0);
            'product: loop {
                for i in 0..k {
                    buf[i] = opts[i][choice[i]];
                }
                buf.sort_unstable();
                row.push(self.d_rank_sorted(&buf) as u32);
                let mut i = 0;
                loop {
                    if i == k {
                        break 'product;
                    }
                    choice[i] += 1;
                    if choice[i] < opts[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
            }
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(&row);
            offsets.push(targets.len() as u32);
        }
        Csr { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nf(&self) -> usize {
        self.f_table.len()
    }

    pub fn nd(&self) -> usize {
        self.d_table.len() / self.k
    }

    /// Size of the dense id space for one side to move.
    pub fn ids_per_side(&self) -> usize {
        self.nf() * self.nd()
    }

    /// Compatible (F, D) pairs, counted by enumeration.
    pub fn compatible_pairs(&self) -> u64 {
        self.compatible_pairs
    }

    /// Every compatible pair once per side to move.
    pub fn len(&self) -> u64 {
        self.compatible_pairs * 2
    }

    pub fn is_empty(&self) -> bool {
        self.compatible_pairs == 0
    }

    pub fn f_rank(&self, a: Vertex, b: Vertex) -> usize {
        let (a, b) = (a.min(b), a.max(b));
        a * (2 * self.n - a + 1) / 2 + (b - a)
    }

    pub fn f_pair(&self, f: usize) -> [u32; 2] {
        self.f_table[f]
    }

    pub fn f_is_meeting(&self, f: usize) -> bool {
        let [a, b] = self.f_table[f];
        a == b
    }

    pub fn d_rank_sorted(&self, agents: &[Vertex]) -> usize {
        agents
            .iter()
            .enumerate()
            .map(|(i, &d)| self.binoms[d + i][i + 1] as usize)
            .sum()
    }

    pub fn d_agents(&self, d: usize) -> &[u32] {
        &self.d_table[d * self.k..(d + 1) * self.k]
    }

    pub fn fsucc(&self, f: usize) -> &[u32] {
        self.fsucc.row(f)
    }

    pub fn dsucc(&self, d: usize) -> &[u32] {
        self.dsucc.row(d)
    }

    pub fn successor_entries(&self) -> (usize, usize) {
        (self.fsucc.entries(), self.dsucc.entries())
    }

    /// Whether F-rank `f` and D-rank `d` share no vertex.
    #[inline]
    pub fn compatible_ranks(&self, f: usize, d: usize) -> bool {
        let [a, b] = self.f_table[f];
        !self.d_agents(d).iter().any(|&v| v == a || v == b)
    }

    pub fn id(&self, f: usize, d: usize) -> usize {
        f * self.nd() + d
    }

    pub fn split(&self, id: usize) -> (usize, usize) {
        (id / self.nd(), id % self.nd())
    }

    pub fn f_placement(&self, f: usize) -> FPlacement {
        let [a, b] = self.f_table[f];
        FPlacement::new(a as usize, b as usize)
    }

    pub fn d_placement(&self, d: usize) -> DPlacement {
        DPlacement::new(self.d_agents(d).iter().map(|&v| v as usize).collect())
    }

    pub fn rank_f(&self, f: &FPlacement) -> Option<usize> {
        let [a, b] = f.vertices();
        (b < self.n).then(|| self.f_rank(a, b))
    }

    pub fn rank_d(&self, d: &DPlacement) -> Option<usize> {
        (d.len() == self.k && d.agents().iter().all(|&v| v < self.n)).then(|| self.d_rank_sorted(d.agents()))
    }

    /// Dense id of a compatible position (side is carried separately).
    pub fn position_id(&self, pos: &Position) -> Option<usize> {
        if !compatible(&pos.f, &pos.d) {
            return None;
        }
        Some(self.id(self.rank_f(&pos.f)?, self.rank_d(&pos.d)?))
    }

    pub fn position(&self, id: usize, to_move: Side) -> Option<Position> {
        if id >= self.ids_per_side() {
            return None;
        }
        let (f, d) = self.split(id);
        self.compatible_ranks(f, d)
            .then(|| Position::new(self.f_placement(f), self.d_placement(d), to_move))
    }
}
