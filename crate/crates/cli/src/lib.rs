//! The `rendezvous` command line and its HTTP play service.

mod commands;
pub mod heuristic;
pub mod service;

pub use commands::{run, Cli, Command};
