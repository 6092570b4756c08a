//! Exact solver and toolkit for the rendezvous game with adversaries on
//! graphs.
//!
//! Facilitator moves two agents and wins when they meet; Divider moves `k`
//! agents and wins by keeping them apart forever. No agent may enter a vertex
//! held by the other player.

pub mod engine;
pub mod format;
pub mod graph;
pub mod kernel;
pub mod separation;
pub mod sim;
pub mod reductions;
pub mod special;

pub use engine::{dynamic_separation, solve, solve_in_time, EngineError, SolveReport};
pub use format::{parse_instance, serialize_instance};
pub use graph::{DPlacement, FPlacement, Graph, GraphBuilder, Instance, Position, Side, Vertex};
pub use separation::{lambda, min_vertex_cut, ExtendedCount};
