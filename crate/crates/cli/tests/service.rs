use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rendezvous_cli::service::{router, ServiceConfig};
use rendezvous_core::format::{instance_from_edges, serialize_instance, InstanceJson};
use rendezvous_core::graph::{DPlacement, FPlacement, Position, Side};
use rendezvous_core::sim::{legal_move, legal_placement};
use rendezvous_core::special::grid_instance;
use rendezvous_core::Instance;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(ServiceConfig { budget: 50_000_000, capacity: 256 })
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn c4(k: usize) -> Instance {
    instance_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], 0, 2, k)
}

fn instance_json(inst: &Instance) -> Value {
    serde_json::to_value(InstanceJson::from(inst)).unwrap()
}

async fn new_game(app: &Router, inst: &Instance, human: &str, extra: Value) -> Value {
    let mut body = json!({ "instance": instance_json(inst), "human_role": human });
    if let (Some(b), Some(e)) = (body.as_object_mut(), extra.as_object()) {
        b.extend(e.clone());
    }
    let (status, v) = call(app, "POST", "/games", Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v
}

fn id(v: &Value) -> String {
    v["id"].as_str().unwrap().to_string()
}

fn verts(v: &Value) -> Vec<usize> {
    serde_json::from_value(v.clone()).unwrap()
}

/// Re-checks a session's history move by move and returns the final position.
fn replay(inst: &Instance, history: &Value) -> Option<Position> {
    let mut pos: Option<Position> = None;
    for step in history.as_array().unwrap() {
        let f = verts(&step["f"]);
        let next = Position::new(
            FPlacement::new(f[0], f[1]),
            DPlacement::new(verts(&step["d"])),
            serde_json::from_value(step["to_move"].clone()).unwrap(),
        );
        let ok = match &pos {
            None => next.f == inst.start() && legal_placement(inst, &next.d),
            Some(prev) => legal_move(&inst.graph, prev, &next),
        };
        assert!(ok, "illegal step in history: {step}");
        pos = Some(next);
    }
    pos
}

fn position_of(state: &Value) -> Position {
    let p = &state["position"];
    let f = verts(&p["f"]);
    Position::new(
        FPlacement::new(f[0], f[1]),
        DPlacement::new(verts(&p["d"])),
        serde_json::from_value(p["to_move"].clone()).unwrap(),
    )
}

#[tokio::test]
async fn divider_human_on_c4_loses_in_one_round() {
    let app = app();
    let v = new_game(&app, &c4(1), "Divider", json!({})).await;
    assert_eq!(v["status"], "AwaitingPlacement");
    assert_eq!(v["engine_mode"], "exact");
    let game = id(&v);

    let (status, v) = call(&app, "POST", &format!("/games/{game}/placement"), Some(json!({ "agents": [1] }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["status"], "Finished");
    assert_eq!(v["outcome"]["met_at"], 3);
    assert_eq!(v["outcome"]["round"], 1);
    assert_eq!(v["position"]["f"], json!([3, 3]));

    let (status, v) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "d": [0] }))).await;
    assert_eq!(status, StatusCode::GONE, "{v}");
    let (status, _) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
    assert_eq!(status, StatusCode::GONE);
    let (status, v) = call(&app, "GET", &format!("/games/{game}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["history"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn moving_onto_the_adversary_is_rejected() {
    let app = app();
    let v = new_game(&app, &c4(1), "Facilitator", json!({})).await;
    assert_eq!(v["status"], "HumanTurn");
    let game = id(&v);
    let blocker = v["position"]["d"][0].as_u64().unwrap();
    let (status, err) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "f": [blocker, 2] }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["reason"], "occupied-by-adversary");

    let (status, err) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "f": [2, 2] }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["reason"], "not-adjacent");

    let (status, _) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "d": [1] }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn placing_on_a_terminal_is_rejected() {
    let app = app();
    let game = id(&new_game(&app, &c4(1), "Divider", json!({})).await);
    let uri = format!("/games/{game}/placement");
    let (status, err) = call(&app, "POST", &uri, Some(json!({ "agents": [0] }))).await;
    assert_eq!((status, err["reason"].as_str()), (StatusCode::CONFLICT, Some("occupied-by-adversary")));
    let (status, err) = call(&app, "POST", &uri, Some(json!({ "agents": [1, 3] }))).await;
    assert_eq!((status, err["reason"].as_str()), (StatusCode::CONFLICT, Some("wrong-agent-count")));
    let (status, err) = call(&app, "POST", &uri, Some(json!({ "agents": [9] }))).await;
    assert_eq!((status, err["reason"].as_str()), (StatusCode::CONFLICT, Some("no-such-vertex")));
    let (status, _) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "d": [1] }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn eval_on_the_grid_session() {
    let app = app();
    let grid = grid_instance(3, 3, (1, 1), (3, 3), 2).unwrap();
    let v = new_game(&app, &grid, "Divider", json!({})).await;
    assert_eq!((v["d"].as_u64(), v["lambda"].as_u64()), (Some(2), Some(2)));
    let (status, e) = call(&app, "GET", &format!("/games/{}/eval", id(&v)), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(e["winner_optimal"], "Divider");
    assert_eq!((e["d"].as_u64(), e["lambda"].as_u64()), (Some(2), Some(2)));
}

#[tokio::test]
async fn malformed_and_unknown_requests() {
    let app = app();
    let (status, _) = call(&app, "POST", "/games", Some(json!({ "instance": "rv 1\nnonsense" , "human_role": "Divider" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/games", Some(json!({ "human_role": "Divider" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "GET", "/games/not-a-session", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/games/6f1d8f4e-8a43-4c55-9b1e-3f7f4f4f4f4f/eval", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    // the text format is accepted as well as the JSON mirror
    let text = serialize_instance(&c4(1));
    let (status, v) = call(&app, "POST", "/games", Some(json!({ "instance": text, "human_role": "facilitator" }))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, "POST", &format!("/games/{}/move", id(&v)), Some(json!({ "f": "x" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn engine_waits_when_auto_reply_is_off() {
    let app = app();
    let v = new_game(&app, &c4(1), "Facilitator", json!({ "auto_reply": false })).await;
    assert_eq!(v["status"], "EngineTurn");
    assert!(v["position"].is_null());
    let game = id(&v);
    let (status, err) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "f": [1, 2] }))).await;
    assert_eq!((status, err["reason"].as_str()), (StatusCode::CONFLICT, Some("out-of-turn")));
    let (status, v) = call(&app, "POST", &format!("/games/{game}/engine-move"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "HumanTurn");
    let (status, _) = call(&app, "POST", &format!("/games/{game}/engine-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn heuristic_sessions_are_labelled_and_have_no_eval() {
    let app = router(ServiceConfig { budget: 10, capacity: 8 });
    let grid = grid_instance(3, 3, (1, 1), (3, 3), 2).unwrap();
    let v = new_game(&app, &grid, "Facilitator", json!({})).await;
    assert_eq!(v["engine_mode"], "heuristic");
    assert!(v["d"].is_null());
    let game = id(&v);
    let (status, err) = call(&app, "GET", &format!("/games/{game}/eval"), None).await;
    assert_eq!((status, err["reason"].as_str()), (StatusCode::CONFLICT, Some("heuristic-session")));

    // the fallback Divider parks on a minimum cut, so every human move leaves it standing
    let mut state = v;
    for _ in 0..10 {
        let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
        let mv = m["moves"].as_array().unwrap().last().unwrap().clone();
        let (status, next) = call(&app, "POST", &format!("/games/{game}/move"), Some(mv)).await;
        assert_eq!(status, StatusCode::OK, "{next}");
        state = next;
    }
    assert_eq!(state["status"], "HumanTurn");
    assert_eq!(replay(&grid, &state["history"]), Some(position_of(&state)));

    let v = new_game(&app, &c4(1), "Divider", json!({ "engine": "heuristic" })).await;
    assert_eq!(v["engine_mode"], "heuristic");
}

#[tokio::test]
async fn following_listed_moves_never_conflicts_and_history_replays() {
    let app = app();
    let grid = grid_instance(3, 3, (1, 1), (3, 3), 2).unwrap();
    let v = new_game(&app, &grid, "Divider", json!({})).await;
    let game = id(&v);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
    assert_eq!(m["kind"], "placement");
    let placement = m["moves"].as_array().unwrap().choose(&mut rng).unwrap().clone();
    let (status, mut state) = call(&app, "POST", &format!("/games/{game}/placement"), Some(placement)).await;
    assert_eq!(status, StatusCode::OK);
    let mut half_moves = 0;
    while half_moves < 20 && state["status"] == "HumanTurn" {
        let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
        assert_eq!(m["side"], "Divider");
        let mv = m["moves"].as_array().unwrap().choose(&mut rng).unwrap().clone();
        let (status, next) = call(&app, "POST", &format!("/games/{game}/move"), Some(mv)).await;
        assert_eq!(status, StatusCode::OK, "{next}");
        state = next;
        half_moves += 1;
    }
    let (_, state) = call(&app, "GET", &format!("/games/{game}"), None).await;
    let replayed = replay(&grid, &state["history"]).unwrap();
    assert_eq!(replayed, position_of(&state));
}

#[tokio::test]
async fn exact_engine_keeps_its_winning_region() {
    // engine as Facilitator on instances it wins, human Divider moving at random
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let wheel = instance_from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 4), (2, 4), (3, 4), (4, 5), (1, 5)], 0, 4, 2);
    for inst in [c4(1), grid_instance(3, 3, (1, 1), (3, 3), 1).unwrap(), wheel] {
        let v = new_game(&app, &inst, "Divider", json!({})).await;
        let game = id(&v);
        let (_, e) = call(&app, "GET", &format!("/games/{game}/eval"), None).await;
        assert_eq!(e["winner_optimal"], "Facilitator");
        let bound = e["rounds"].as_u64().unwrap();
        let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
        let placement = m["moves"].as_array().unwrap().choose(&mut rng).unwrap().clone();
        let (status, mut state) = call(&app, "POST", &format!("/games/{game}/placement"), Some(placement)).await;
        assert_eq!(status, StatusCode::OK, "{state}");
        while state["status"] == "HumanTurn" {
            let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
            let mv = m["moves"].as_array().unwrap().choose(&mut rng).unwrap().clone();
            let (status, next) = call(&app, "POST", &format!("/games/{game}/move"), Some(mv)).await;
            assert_eq!(status, StatusCode::OK, "{next}");
            state = next;
        }
        assert_eq!(state["status"], "Finished");
        assert!(state["outcome"]["round"].as_u64().unwrap() <= bound);
    }

    // engine as Divider on the grid with two agents: random play never meets
    let grid = grid_instance(3, 3, (1, 1), (3, 3), 2).unwrap();
    let v = new_game(&app, &grid, "Facilitator", json!({})).await;
    let game = id(&v);
    for _ in 0..30 {
        let (_, m) = call(&app, "GET", &format!("/games/{game}/moves"), None).await;
        let mv = m["moves"].as_array().unwrap().choose(&mut rng).unwrap().clone();
        let (status, next) = call(&app, "POST", &format!("/games/{game}/move"), Some(mv)).await;
        assert_eq!(status, StatusCode::OK, "{next}");
        assert_eq!(next["status"], "HumanTurn");
    }
    let (_, e) = call(&app, "GET", &format!("/games/{game}/eval"), None).await;
    assert_eq!(e["current_winner"], "Divider");
}

#[tokio::test]
async fn adjacent_terminals_meet_in_round_one() {
    let app = app();
    let path = instance_from_edges(3, &[(0, 1), (1, 2)], 0, 1, 1);
    let v = new_game(&app, &path, "Facilitator", json!({})).await;
    let game = id(&v);
    let (status, v) = call(&app, "POST", &format!("/games/{game}/move"), Some(json!({ "f": [1, 1] }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["status"], "Finished");
    assert_eq!(v["outcome"]["round"], 1);
    assert_eq!(v["outcome"]["winner"], serde_json::to_value(Side::Facilitator).unwrap());
}

#[tokio::test]
async fn sessions_are_evicted_least_recently_used_first() {
    let app = router(ServiceConfig { budget: 1_000_000, capacity: 2 });
    let a = id(&new_game(&app, &c4(1), "Divider", json!({})).await);
    let b = id(&new_game(&app, &c4(1), "Divider", json!({})).await);
    // touch a so that b is the oldest
    assert_eq!(call(&app, "GET", &format!("/games/{a}"), None).await.0, StatusCode::OK);
    let c = id(&new_game(&app, &c4(1), "Divider", json!({})).await);
    assert_eq!(call(&app, "GET", &format!("/games/{b}"), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", &format!("/games/{a}"), None).await.0, StatusCode::OK);
    assert_eq!(call(&app, "GET", &format!("/games/{c}"), None).await.0, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions_are_independent() {
    let app = app();
    let mut tasks = Vec::new();
    for i in 0..8 {
        let app = app.clone();
        tasks.push(tokio::spawn(async move {
            let grid = grid_instance(3, 3, (1, 1), (3, 3), 1 + i % 2).unwrap();
            let v = new_game(&app, &grid, "Divider", json!({})).await;
            let game = id(&v);
            let (status, state) = call(&app, "POST", &format!("/games/{game}/placement"), Some(json!({ "agents": vec![4; 1 + i % 2] }))).await;
            assert_eq!(status, StatusCode::OK, "{state}");
            (game, state["history"].as_array().unwrap().len())
        }));
    }
    let mut ids = std::collections::HashSet::new();
    for t in tasks {
        let (game, steps) = t.await.unwrap();
        assert!(steps >= 2);
        ids.insert(game);
    }
    assert_eq!(ids.len(), 8);
}
