//! JSON-over-HTTP play service: in-memory game sessions between a human and
//! the engine.
//!
//! Endpoints:
//! - `POST /games` `{instance, human_role, engine?, auto_reply?}`
//! - `GET /games/{id}`, `GET /games/{id}/moves`, `GET /games/{id}/eval`
//! - `POST /games/{id}/placement` `{agents}`, `POST /games/{id}/move` `{f}` or `{d}`
//! - `POST /games/{id}/engine-move`
//!
//! With `auto_reply` (the default) the engine answers each human half-move
//! immediately, and places its agents at creation when it is the Divider.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lru::LruCache;
use rendezvous_core::engine::{dynamic_separation_with_budget, initial_placements, solve_shared, successors};
use rendezvous_core::format::InstanceJson;
use rendezvous_core::graph::{compatible, multiset_adjacent, DPlacement, FPlacement, Instance, Position, Side, Vertex};
use rendezvous_core::sim::{legal_move, legal_placement, rush_move, TraceStep};
use rendezvous_core::{lambda, parse_instance, ExtendedCount, SolveReport};
use serde::Deserialize;
use serde_json::{json, Value};
use uuid::Uuid;

use crate::heuristic::CutHolder;

pub const SESSION_CAPACITY: usize = 256;
/// Longest list `GET /moves` returns.
pub const MOVE_LIST_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy)]
pub struct ServiceConfig {
    /// Position-side budget for exact engine play.
    pub budget: u64,
    pub capacity: usize,
}

struct AppState {
    sessions: Mutex<LruCache<Uuid, Arc<Mutex<Session>>>>,
    budget: u64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

pub fn router(config: ServiceConfig) -> Router {
    let capacity = NonZeroUsize::new(config.capacity).unwrap_or(NonZeroUsize::MIN);
    let state = Arc::new(AppState { sessions: Mutex::new(LruCache::new(capacity)), budget: config.budget });
    Router::new()
        .route("/games", post(create))
        .route("/games/{id}", get(show))
        .route("/games/{id}/moves", get(moves))
        .route("/games/{id}/placement", post(place))
        .route("/games/{id}/move", post(play))
        .route("/games/{id}/engine-move", post(engine_move))
        .route("/games/{id}/eval", get(eval))
        .with_state(state)
}

pub fn serve(host: &str, port: u16, budget: u64) -> std::io::Result<()> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(ServiceConfig { budget, capacity: SESSION_CAPACITY })).await
    })
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: &'static str,
    reason: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, reason: impl Into<String>) -> Self {
        Self { status, error, reason: reason.into() }
    }

    fn malformed(reason: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed", reason)
    }

    fn illegal(reason: &str) -> Self {
        Self::new(StatusCode::CONFLICT, "illegal-move", reason)
    }

    fn conflict(reason: &str) -> Self {
        Self::new(StatusCode::CONFLICT, "conflict", reason)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.error, "reason": self.reason }))).into_response()
    }
}

type Reply = Result<Json<Value>, ApiError>;

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
enum Role {
    #[serde(alias = "facilitator")]
    Facilitator,
    #[serde(alias = "divider")]
    Divider,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum EngineRequest {
    Exact,
    Heuristic,
}

#[derive(Deserialize)]
struct NewGame {
    /// The text format as a string, or its JSON mirror.
    instance: Value,
    human_role: Role,
    #[serde(default)]
    engine: Option<EngineRequest>,
    #[serde(default = "yes")]
    auto_reply: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementBody {
    agents: Vec<Vertex>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveBody {
    f: Option<[Vertex; 2]>,
    d: Option<Vec<Vertex>>,
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(e.to_string()))
}

struct Session {
    id: Uuid,
    inst: Instance,
    human: Side,
    auto_reply: bool,
    report: Option<Arc<SolveReport>>,
    fallback: CutHolder,
    lambda: ExtendedCount,
    d: Option<ExtendedCount>,
    position: Option<Position>,
    history: Vec<TraceStep>,
    round: u32,
    outcome: Option<Value>,
}

impl Session {
    fn engine_side(&self) -> Side {
        self.human.opponent()
    }

    fn side_to_move(&self) -> Side {
        self.position.as_ref().map_or(Side::Divider, |p| p.to_move)
    }

    fn status(&self) -> &'static str {
        if self.outcome.is_some() {
            "Finished"
        } else if self.side_to_move() != self.human {
            "EngineTurn"
        } else if self.position.is_none() {
            "AwaitingPlacement"
        } else {
            "HumanTurn"
        }
    }

    fn view(&self) -> Value {
        json!({
            "id": self.id.to_string(),
            "status": self.status(),
            "human_role": self.human,
            "engine_mode": if self.report.is_some() { "exact" } else { "heuristic" },
            "round": self.round,
            "position": self.position.as_ref().map(|p| json!({
                "f": p.f.vertices(),
                "d": p.d.agents(),
                "to_move": p.to_move,
            })),
            "history": self.history,
            "outcome": self.outcome,
            "lambda": self.lambda,
            "d": self.d,
            "n": self.inst.graph.n(),
            "s": self.inst.s,
            "t": self.inst.t,
            "k": self.inst.k,
        })
    }

    fn record(&mut self, pos: Position) {
        if pos.to_move == Side::Divider {
            self.round += 1;
        }
        self.history.push(TraceStep {
            round: self.round,
            f: pos.f.vertices(),
            d: pos.d.agents().to_vec(),
            to_move: pos.to_move,
        });
        if pos.f.is_meeting() {
            self.outcome = Some(json!({ "winner": Side::Facilitator, "met_at": pos.f.vertices()[0], "round": self.round }));
        }
        self.position = Some(pos);
    }

    fn ensure_live(&self) -> Result<(), ApiError> {
        match self.outcome {
            Some(_) => Err(ApiError::new(StatusCode::GONE, "finished", "the game is over")),
            None => Ok(()),
        }
    }

    fn human_turn(&self) -> Result<(), ApiError> {
        self.ensure_live()?;
        if self.side_to_move() != self.human {
            return Err(ApiError::conflict("out-of-turn"));
        }
        Ok(())
    }

    fn check_vertices(&self, vs: &[Vertex]) -> Result<(), ApiError> {
        match vs.iter().find(|&&v| v >= self.inst.graph.n()) {
            Some(_) => Err(ApiError::illegal("no-such-vertex")),
            None => Ok(()),
        }
    }

    fn human_placement(&mut self, agents: Vec<Vertex>) -> Result<(), ApiError> {
        self.human_turn()?;
        if self.position.is_some() {
            return Err(ApiError::conflict("already-placed"));
        }
        if agents.len() != self.inst.k {
            return Err(ApiError::illegal("wrong-agent-count"));
        }
        self.check_vertices(&agents)?;
        let d = DPlacement::new(agents);
        if !compatible(&self.inst.start(), &d) {
            return Err(ApiError::illegal("occupied-by-adversary"));
        }
        debug_assert!(legal_placement(&self.inst, &d));
        self.record(Position::new(self.inst.start(), d, Side::Facilitator));
        Ok(())
    }

    fn human_move(&mut self, body: MoveBody) -> Result<(), ApiError> {
        self.human_turn()?;
        let Some(pos) = self.position.clone() else {
            return Err(ApiError::conflict("awaiting-placement"));
        };
        let g = &self.inst.graph;
        let next = match (self.human, body.f, body.d) {
            (Side::Facilitator, Some(f), None) => {
                self.check_vertices(&f)?;
                if f.iter().any(|&v| pos.d.contains(v)) {
                    return Err(ApiError::illegal("occupied-by-adversary"));
                }
                if !multiset_adjacent(&pos.f.vertices(), &f, g).unwrap_or(false) {
                    return Err(ApiError::illegal("not-adjacent"));
                }
                Position::new(FPlacement::new(f[0], f[1]), pos.d.clone(), Side::Divider)
            }
            (Side::Divider, None, Some(d)) => {
                if d.len() != self.inst.k {
                    return Err(ApiError::illegal("wrong-agent-count"));
                }
                self.check_vertices(&d)?;
                if d.iter().any(|&v| pos.f.contains(v)) {
                    return Err(ApiError::illegal("occupied-by-adversary"));
                }
                if !multiset_adjacent(pos.d.agents(), &d, g).unwrap_or(false) {
                    return Err(ApiError::illegal("not-adjacent"));
                }
                Position::new(pos.f, DPlacement::new(d), Side::Facilitator)
            }
            (Side::Facilitator, ..) => return Err(ApiError::malformed("expected {\"f\": [u, v]}")),
            (Side::Divider, ..) => return Err(ApiError::malformed("expected {\"d\": [...]}")),
        };
        debug_assert!(legal_move(g, &pos, &next));
        self.record(next);
        Ok(())
    }

    /// Whether `pos` lies in the engine's winning region, when the solver
    /// declared the engine's side the winner.
    fn engine_region(&self, pos: &Position) -> Option<bool> {
        let report = self.report.as_ref().filter(|r| r.winner == self.engine_side())?;
        let fac_wins = report.in_region(pos);
        Some(if self.engine_side() == Side::Facilitator { fac_wins } else { !fac_wins })
    }

    fn engine_half_move(&mut self) -> Result<(), ApiError> {
        self.ensure_live()?;
        if self.side_to_move() == self.human {
            return Err(ApiError::conflict("out-of-turn"));
        }
        let fault = |reason: &str| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "engine-fault", reason);
        let report = self.report.clone();
        let Some(pos) = self.position.clone() else {
            let d = report.as_ref().and_then(|r| r.div_placement()).or_else(|| self.fallback.placement(&self.inst));
            let Some(d) = d.filter(|d| legal_placement(&self.inst, d)) else {
                // nowhere to stand: the Facilitator walks straight to a meeting
                self.outcome = Some(json!({ "winner": Side::Facilitator, "reason": "no-legal-placement" }));
                return Ok(());
            };
            let next = Position::new(self.inst.start(), d, Side::Facilitator);
            if self.engine_region(&next) == Some(false) {
                return Err(fault("engine-left-winning-region"));
            }
            self.record(next);
            return Ok(());
        };
        let g = &self.inst.graph;
        let next = match pos.to_move {
            Side::Facilitator => {
                let f = report.as_ref().and_then(|r| r.fac_move(&pos)).unwrap_or_else(|| rush_move(g, &pos.f, pos.d.agents()));
                Position::new(f, pos.d.clone(), Side::Divider)
            }
            Side::Divider => {
                let d = report.as_ref().and_then(|r| r.div_move(&pos)).unwrap_or_else(|| self.fallback.reply(g, &pos));
                Position::new(pos.f, d, Side::Facilitator)
            }
        };
        if !legal_move(g, &pos, &next) {
            return Err(fault("illegal-engine-move"));
        }
        if self.engine_region(&pos) == Some(true) && self.engine_region(&next) == Some(false) && !next.f.is_meeting() {
            return Err(fault("engine-left-winning-region"));
        }
        self.record(next);
        Ok(())
    }

    fn maybe_reply(&mut self) -> Result<(), ApiError> {
        if self.auto_reply && self.outcome.is_none() && self.side_to_move() != self.human {
            self.engine_half_move()?;
        }
        Ok(())
    }
}

fn session(state: &AppState, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    let missing = || ApiError::new(StatusCode::NOT_FOUND, "unknown-session", id.to_string());
    let id = Uuid::parse_str(id).map_err(|_| missing())?;
    lock(&state.sessions).get(&id).cloned().ok_or_else(missing)
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> Reply {
    let req: NewGame = parse_body(&body)?;
    let inst = match req.instance {
        Value::String(text) => parse_instance(&text).map_err(|e| e.to_string()),
        other => serde_json::from_value::<InstanceJson>(other)
            .map_err(|e| e.to_string())
            .and_then(|j| j.into_instance().map_err(|e| e.to_string())),
    }
    .map_err(ApiError::malformed)?;
    let human = match req.human_role {
        Role::Facilitator => Side::Facilitator,
        Role::Divider => Side::Divider,
    };
    let budget = state.budget;
    let exact = req.engine != Some(EngineRequest::Heuristic);
    // solving can take a while; keep it off the async workers
    let session = tokio::task::spawn_blocking(move || {
        let report = if exact { solve_shared(&inst, budget).ok() } else { None };
        let d = report.as_ref().and_then(|_| dynamic_separation_with_budget(&inst.graph, inst.s, inst.t, budget).ok());
        let lam = lambda(&inst.graph, inst.s, inst.t).expect("terminals validated");
        let mut s = Session {
            id: Uuid::new_v4(),
            fallback: CutHolder::new(&inst),
            inst,
            human,
            auto_reply: req.auto_reply,
            report,
            lambda: lam,
            d,
            position: None,
            history: Vec::new(),
            round: 0,
            outcome: None,
        };
        if s.inst.s == s.inst.t {
            s.outcome = Some(json!({ "winner": Side::Facilitator, "met_at": s.inst.s, "round": 0 }));
        }
        s
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "engine-fault", e.to_string()))?;
    let mut session = session;
    session.maybe_reply()?;
    let view = session.view();
    lock(&state.sessions).push(session.id, Arc::new(Mutex::new(session)));
    Ok(Json(view))
}

async fn show(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    let s = session(&state, &id)?;
    let view = lock(&s).view();
    Ok(Json(view))
}

async fn moves(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    let s = session(&state, &id)?;
    let s = lock(&s);
    s.ensure_live()?;
    let (kind, all): (&str, Vec<Value>) = match &s.position {
        None => ("placement", initial_placements(&s.inst).iter().map(|d| json!({ "agents": d.agents() })).collect()),
        Some(pos) => (
            "move",
            successors(pos, &s.inst.graph)
                .iter()
                .map(|p| match pos.to_move {
                    Side::Facilitator => json!({ "f": p.f.vertices() }),
                    Side::Divider => json!({ "d": p.d.agents() }),
                })
                .collect(),
        ),
    };
    let truncated = all.len() > MOVE_LIST_LIMIT;
    let list: Vec<Value> = all.into_iter().take(MOVE_LIST_LIMIT).collect();
    Ok(Json(json!({ "side": s.side_to_move(), "kind": kind, "moves": list, "truncated": truncated })))
}

async fn place(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let s = session(&state, &id)?;
    let req: PlacementBody = parse_body(&body)?;
    let mut s = lock(&s);
    s.human_placement(req.agents)?;
    s.maybe_reply()?;
    Ok(Json(s.view()))
}

async fn play(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Reply {
    let s = session(&state, &id)?;
    let req: MoveBody = parse_body(&body)?;
    let mut s = lock(&s);
    s.human_move(req)?;
    s.maybe_reply()?;
    Ok(Json(s.view()))
}

async fn engine_move(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    let s = session(&state, &id)?;
    let mut s = lock(&s);
    s.engine_half_move()?;
    Ok(Json(s.view()))
}

async fn eval(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    let s = session(&state, &id)?;
    let s = lock(&s);
    let Some(report) = &s.report else {
        return Err(ApiError::conflict("heuristic-session"));
    };
    // who wins from here with optimal play, once agents are on the board
    let current = s.position.as_ref().map(|p| if report.in_region(p) { Side::Facilitator } else { Side::Divider });
    Ok(Json(json!({
        "winner_optimal": report.winner,
        "d": s.d,
        "lambda": s.lambda,
        "rounds": report.min_rounds(),
        "current_winner": current,
    })))
}
