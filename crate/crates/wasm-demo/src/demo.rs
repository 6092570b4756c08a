//! Plain-Rust side of the browser demo. Everything here returns JSON strings
//! so the wasm wrappers stay thin and the logic can be tested natively.

use rendezvous_core::engine::{
    dynamic_separation_with_budget, initial_placements, solve_with_budget, successors, EngineError,
};
use rendezvous_core::sim::rush_move;
use rendezvous_core::special::{grid_instance, solve_special};
use rendezvous_core::{lambda, parse_instance, serialize_instance, Instance, Position, Side, SolveReport};
use serde_json::{json, Value};

/// Position-sides the browser is allowed to solve before giving up.
pub const DEMO_BUDGET: u64 = 2_000_000;

fn engine_error(e: EngineError) -> String {
    match e {
        EngineError::CapacityExceeded { positions, budget } => {
            format!("instance too large for the demo: {positions} positions, limit {budget}")
        }
        other => other.to_string(),
    }
}

pub fn generate_grid(rows: u32, cols: u32, s: (u32, u32), t: (u32, u32), k: usize) -> Result<String, String> {
    let inst = grid_instance(rows, cols, s, t, k).map_err(|e| e.to_string())?;
    Ok(serialize_instance(&inst))
}

fn layout(inst: &Instance) -> Value {
    let g = &inst.graph;
    let vertices: Vec<Value> = (0..g.n())
        .map(|v| json!({ "id": v, "label": g.label(v), "coord": g.coord(v) }))
        .collect();
    let edges: Vec<[usize; 2]> = g.edges().map(|(u, v)| [u, v]).collect();
    json!({ "vertices": vertices, "edges": edges, "s": inst.s, "t": inst.t, "k": inst.k })
}

/// Winner, separation numbers and round count for an instance in text format.
pub fn analyze(text: &str) -> Result<String, String> {
    let inst = parse_instance(text).map_err(|e| e.to_string())?;
    let report = solve_with_budget(&inst, DEMO_BUDGET).map_err(engine_error)?;
    let lam = lambda(&inst.graph, inst.s, inst.t).map_err(|e| e.to_string())?;
    let d = dynamic_separation_with_budget(&inst.graph, inst.s, inst.t, DEMO_BUDGET).ok();
    Ok(json!({
        "winner": report.winner,
        "k": inst.k,
        "lambda": lam,
        "d": d,
        "rounds": report.min_rounds(),
        "positions": report.stats.positions / 2,
        "fast_path": solve_special(&inst),
        "graph": layout(&inst),
    })
    .to_string())
}

/// A human against the exact engine.
pub struct Game {
    inst: Instance,
    report: SolveReport,
    human: Side,
    position: Option<Position>,
    history: Vec<Position>,
    round: u32,
}

impl Game {
    pub fn new(text: &str, human: &str) -> Result<Game, String> {
        let inst = parse_instance(text).map_err(|e| e.to_string())?;
        let human = match human.to_ascii_lowercase().as_str() {
            "facilitator" => Side::Facilitator,
            "divider" => Side::Divider,
            other => return Err(format!("unknown role {other:?}")),
        };
        let report = solve_with_budget(&inst, DEMO_BUDGET).map_err(engine_error)?;
        Ok(Game { inst, report, human, position: None, history: Vec::new(), round: 0 })
    }

    fn to_move(&self) -> Side {
        self.position.as_ref().map_or(Side::Divider, |p| p.to_move)
    }

    pub fn finished(&self) -> bool {
        self.position.as_ref().is_some_and(|p| p.f.is_meeting()) || (self.position.is_none() && self.options().is_empty())
    }

    fn options(&self) -> Vec<Position> {
        match &self.position {
            None => initial_placements(&self.inst)
                .into_iter()
                .map(|d| Position::new(self.inst.start(), d, Side::Facilitator))
                .collect(),
            Some(p) if p.f.is_meeting() => Vec::new(),
            Some(p) => successors(p, &self.inst.graph),
        }
    }

    fn record(&mut self, next: Position) {
        if next.to_move == Side::Divider {
            self.round += 1;
        }
        self.history.push(next.clone());
        self.position = Some(next);
    }

    pub fn state(&self) -> String {
        let pos = self.position.as_ref();
        let winner = if self.finished() { Some(Side::Facilitator) } else { None };
        json!({
            "human": self.human,
            "to_move": if self.finished() { None } else { Some(self.to_move()) },
            "placed": pos.is_some(),
            "f": pos.map(|p| p.f.vertices()),
            "d": pos.map(|p| p.d.agents().to_vec()),
            "round": self.round,
            "finished": self.finished(),
            "winner": winner,
            "predicted_winner": self.report.winner,
            "fac_rank": pos.and_then(|p| self.rank(p)),
            "history": self.history.len(),
            "graph": layout(&self.inst),
        })
        .to_string()
    }

    // Facilitator rounds still needed under optimal play, None if Divider holds.
    fn rank(&self, p: &Position) -> Option<u32> {
        match p.to_move {
            Side::Facilitator => self.report.fac_rank(&p.f, &p.d),
            Side::Divider => self.report.div_rank(&p.f, &p.d),
        }
    }

    /// The human's legal moves, in the order `play` indexes them.
    pub fn moves(&self) -> String {
        if self.finished() || self.to_move() != self.human {
            return "[]".into();
        }
        let list: Vec<Value> = self
            .options()
            .iter()
            .map(|p| match p.to_move {
                Side::Divider => json!({ "f": p.f.vertices() }),
                Side::Facilitator => json!({ "d": p.d.agents() }),
            })
            .collect();
        Value::Array(list).to_string()
    }

    pub fn play(&mut self, choice: usize) -> Result<String, String> {
        if self.finished() {
            return Err("game is over".into());
        }
        if self.to_move() != self.human {
            return Err("not your turn".into());
        }
        let next = self.options().into_iter().nth(choice).ok_or_else(|| format!("no move {choice}"))?;
        self.record(next);
        Ok(self.state())
    }

    pub fn engine_move(&mut self) -> Result<String, String> {
        if self.finished() {
            return Err("game is over".into());
        }
        if self.to_move() == self.human {
            return Err("waiting for the human player".into());
        }
        let next = self.engine_choice().ok_or("engine has no legal move")?;
        self.record(next);
        Ok(self.state())
    }

    fn engine_choice(&self) -> Option<Position> {
        let g = &self.inst.graph;
        let Some(pos) = &self.position else {
            // a losing Divider still picks the placement that lasts longest
            let d = self.report.div_placement().or_else(|| {
                self.report.initial_ranks().into_iter().max_by_key(|(_, r)| *r).map(|(d, _)| d)
            })?;
            return Some(Position::new(self.inst.start(), d, Side::Facilitator));
        };
        match pos.to_move {
            Side::Facilitator => {
                let f = self.report.fac_move(pos).unwrap_or_else(|| rush_move(g, &pos.f, pos.d.agents()));
                Some(Position::new(f, pos.d.clone(), Side::Divider))
            }
            Side::Divider => {
                if let Some(d) = self.report.div_move(pos) {
                    return Some(Position::new(pos.f, d, Side::Facilitator));
                }
                successors(pos, g)
                    .into_iter()
                    .max_by_key(|p| self.report.fac_rank(&p.f, &p.d).map_or(u32::MAX, |r| r))
            }
        }
    }
}
