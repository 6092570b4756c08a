use std::collections::HashMap;
use std::sync::Arc;

use super::gadget::Terminal;
use crate::graph::{DPlacement, FPlacement, Graph, Instance, Position, Vertex};
use crate::sim::{DividerStrategy, StrategyError};

/// Reply to a departure: which agents run where, or why the script has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Case {
    /// (agent, route starting at the agent's home vertex)
    Runners(Vec<(usize, Vec<Vertex>)>),
    Uncovered(String),
}

/// Static part of a scripted Divider.
#[derive(Debug)]
pub(crate) struct ScriptPlan {
    graph: Graph,
    pub placement: Vec<Vertex>,
    home: [Vertex; 2],
    cases: Vec<Case>,
    // (side, first vertex left onto) -> case
    departures: HashMap<(u8, Vertex), usize>,
}

impl ScriptPlan {
    /// The last two placement entries are the guards chasing Romeo and Juliet.
    pub fn new(inst: &Instance, placement: Vec<Vertex>) -> Self {
        ScriptPlan {
            graph: inst.graph.clone(),
            placement,
            home: [inst.s, inst.t],
            cases: Vec::new(),
            departures: HashMap::new(),
        }
    }

    pub fn add_case(&mut self, side: Terminal, first: Vertex, case: Case) {
        self.cases.push(case);
        self.departures.insert((side as u8, first), self.cases.len() - 1);
    }

    fn chaser(&self, side: usize) -> usize {
        self.placement.len() - 2 + side
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Phase {
    Waiting,
    Confining { side: u8, case: u32, progress: Vec<u32> },
}

/// Everything that changes during play; two dividers with equal state reply
/// identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScriptState {
    agents: Vec<Vertex>,
    // Romeo's and Juliet's current vertices
    who: [Vertex; 2],
    phase: Phase,
}

/// A Divider that waits for the first Facilitator agent to leave home, chases
/// it from behind with a guard and sends runners along fixed routes to seal
/// the far side.
#[derive(Debug, Clone)]
pub struct RunnerDivider {
    plan: Arc<ScriptPlan>,
    state: ScriptState,
    lenient: bool,
    uncovered: Option<String>,
}

impl RunnerDivider {
    pub(crate) fn new(plan: ScriptPlan) -> Self {
        let state = ScriptState { agents: plan.placement.clone(), who: plan.home, phase: Phase::Waiting };
        RunnerDivider { plan: Arc::new(plan), state, lenient: false, uncovered: None }
    }

    /// On a case the script does not cover, keep chasing without runners
    /// instead of failing. The uncovered case is remembered.
    pub fn lenient(mut self) -> Self {
        self.lenient = true;
        self
    }

    /// The uncovered case met so far in lenient play.
    pub fn uncovered(&self) -> Option<&str> {
        self.uncovered.as_deref()
    }

    pub fn placement(&self) -> DPlacement {
        DPlacement::new(self.plan.placement.clone())
    }

    pub fn state(&self) -> &ScriptState {
        &self.state
    }

    /// The agent being confined (0 = the one that started at s), once chosen.
    pub fn confined(&self) -> Option<usize> {
        match self.state.phase {
            Phase::Waiting => None,
            Phase::Confining { side, .. } => Some(side as usize),
        }
    }

    fn track(&mut self, f: &FPlacement) {
        let g = &self.plan.graph;
        let [r, j] = self.state.who;
        let [a, b] = f.vertices();
        let near = |x: Vertex, y: Vertex| x == y || g.has_edge(x, y);
        self.state.who = if near(r, a) && near(j, b) && (a == r || b == j || !(near(r, b) && near(j, a))) {
            [a, b]
        } else {
            [b, a]
        };
    }

    fn chase(&self, f: &FPlacement, side: usize) -> Vertex {
        let g = &self.plan.graph;
        let me = self.state.agents[self.plan.chaser(side)];
        let prey = self.state.who[side];
        let other = self.state.who[1 - side];
        let dist = g.distances_from(prey, if other == prey { &[] } else { std::slice::from_ref(&other) });
        match dist[me] {
            Some(d) if d > 1 => g
                .neighbors(me)
                .iter()
                .copied()
                .find(|&w| dist[w] == Some(d - 1) && !f.contains(w))
                .unwrap_or(me),
            _ => me,
        }
    }
}

impl DividerStrategy for RunnerDivider {
    fn place(&mut self, _inst: &Instance) -> Result<DPlacement, StrategyError> {
        self.state = ScriptState { agents: self.plan.placement.clone(), who: self.plan.home, phase: Phase::Waiting };
        self.uncovered = None;
        Ok(self.placement())
    }

    fn next(&mut self, pos: &Position) -> Result<DPlacement, StrategyError> {
        self.track(&pos.f);
        if self.state.phase == Phase::Waiting {
            let [r, j] = self.state.who;
            let side = if r != self.plan.home[0] {
                0
            } else if j != self.plan.home[1] {
                1
            } else {
                return Ok(DPlacement::new(self.state.agents.clone()));
            };
            let first = self.state.who[side];
            let Some(&case) = self.plan.departures.get(&(side as u8, first)) else {
                return Err(StrategyError::Uncovered(format!("no reply to a departure onto {first}")));
            };
            let progress = match &self.plan.cases[case] {
                Case::Uncovered(why) if !self.lenient => return Err(StrategyError::Uncovered(why.clone())),
                Case::Uncovered(why) => {
                    self.uncovered = Some(why.clone());
                    Vec::new()
                }
                Case::Runners(rs) => vec![0; rs.len()],
            };
            self.state.phase = Phase::Confining { side: side as u8, case: case as u32, progress };
        }
        let Phase::Confining { side, case, mut progress } = std::mem::replace(&mut self.state.phase, Phase::Waiting) else {
            unreachable!()
        };
        let runners = match &self.plan.cases[case as usize] {
            Case::Runners(rs) => rs.as_slice(),
            Case::Uncovered(_) => &[],
        };
        for ((agent, route), p) in runners.iter().zip(progress.iter_mut()) {
            let at = *p as usize;
            if let Some(&next) = route.get(at + 1) {
                if !pos.f.contains(next) {
                    *p += 1;
                    self.state.agents[*agent] = next;
                }
            }
        }
        // each guard follows its agent once that agent has left home
        for prey in 0..2 {
            if prey == side as usize || self.state.who[prey] != self.plan.home[prey] {
                let c = self.plan.chaser(prey);
                self.state.agents[c] = self.chase(&pos.f, prey);
            }
        }
        self.state.phase = Phase::Confining { side, case, progress };
        Ok(DPlacement::new(self.state.agents.clone()))
    }
}
