use rendezvous_wasm_demo::demo::{analyze, generate_grid, Game};
use serde_json::Value;

const C4: &str = "rv 1\n4 4\n0 1\n1 2\n2 3\n3 0\ns 0 t 2 k 1\n";

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn analyze_reports_grid_numbers() {
    let text = generate_grid(3, 3, (1, 1), (3, 3), 2).unwrap();
    let v = parse(&analyze(&text).unwrap());
    assert_eq!(v["winner"], "Divider");
    assert_eq!((v["lambda"].as_u64(), v["d"].as_u64()), (Some(2), Some(2)));
    assert_eq!(v["fast_path"]["provenance"], "grid");
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 9);
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 12);
    assert!(v["graph"]["vertices"][4]["coord"].is_array());

    let v = parse(&analyze(C4).unwrap());
    assert_eq!((v["winner"].as_str(), v["rounds"].as_u64()), (Some("Facilitator"), Some(1)));
}

#[test]
fn bad_input_is_an_error_not_a_panic() {
    assert!(analyze("not an instance").is_err());
    assert!(generate_grid(3, 3, (1, 1), (9, 9), 1).is_err());
    assert!(Game::new(C4, "referee").is_err());
    // 8x8 grid with three agents is beyond the browser budget
    let big = generate_grid(8, 8, (1, 1), (8, 8), 3).unwrap();
    assert!(analyze(&big).unwrap_err().contains("too large"));
}

#[test]
fn engine_facilitator_meets_every_divider_reply() {
    // exhaust every human Divider line on C4: the engine must meet in round 1
    let placements = parse(&Game::new(C4, "divider").unwrap().moves()).as_array().unwrap().len();
    assert_eq!(placements, 2);
    for first in 0..placements {
        let mut game = Game::new(C4, "Divider").unwrap();
        game.play(first).unwrap();
        let s = parse(&game.engine_move().unwrap());
        assert_eq!(s["finished"], true);
        assert_eq!(s["winner"], "Facilitator");
        assert_eq!(s["round"], 1);
        assert!(game.play(0).is_err());
    }
}

#[test]
fn engine_divider_holds_the_grid() {
    let text = generate_grid(3, 3, (1, 1), (3, 3), 2).unwrap();
    let mut game = Game::new(&text, "facilitator").unwrap();
    assert!(game.play(0).is_err(), "Divider places first");
    game.engine_move().unwrap();
    // the human cycles through its move list; the engine never lets them meet
    for round in 0..40 {
        let moves = parse(&game.moves());
        let n = moves.as_array().unwrap().len();
        assert!(n > 0);
        let s = parse(&game.play(round % n).unwrap());
        assert_eq!(s["finished"], false);
        let s = parse(&game.engine_move().unwrap());
        assert_eq!(s["fac_rank"], Value::Null);
        let f = s["f"].as_array().unwrap();
        let d = s["d"].as_array().unwrap();
        assert!(d.iter().all(|x| !f.contains(x)));
    }
    assert!(game.engine_move().is_err(), "human to move");
}
