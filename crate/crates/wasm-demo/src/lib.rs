//! wasm-bindgen exports for the static demo page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Instance text for a rows x cols grid; cells are 1-based `(row, col)`.
#[wasm_bindgen(js_name = generateGrid)]
#[allow(clippy::too_many_arguments)]
pub fn generate_grid(rows: u32, cols: u32, sr: u32, sc: u32, tr: u32, tc: u32, k: usize) -> Result<String, JsError> {
    demo::generate_grid(rows, cols, (sr, sc), (tr, tc), k).map_err(js)
}

/// JSON summary: winner, lambda, d, rounds, fast path and a drawable graph.
#[wasm_bindgen]
pub fn analyze(text: &str) -> Result<String, JsError> {
    demo::analyze(text).map_err(js)
}

#[wasm_bindgen]
pub struct Game(demo::Game);

#[wasm_bindgen]
impl Game {
    #[wasm_bindgen(constructor)]
    pub fn new(text: &str, human: &str) -> Result<Game, JsError> {
        demo::Game::new(text, human).map(Game).map_err(js)
    }

    pub fn state(&self) -> String {
        self.0.state()
    }

    pub fn moves(&self) -> String {
        self.0.moves()
    }

    pub fn play(&mut self, choice: usize) -> Result<String, JsError> {
        self.0.play(choice).map_err(js)
    }

    #[wasm_bindgen(js_name = engineMove)]
    pub fn engine_move(&mut self) -> Result<String, JsError> {
        self.0.engine_move().map_err(js)
    }
}
