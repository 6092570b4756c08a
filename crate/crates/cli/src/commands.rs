//! Subcommand definitions and their handlers. Handlers return a JSON value
//! plus a plain-text rendering; `run` picks one based on `--json`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rendezvous_core::engine::{
    dynamic_separation_with_budget, solve_in_time_with_budget, solve_shared, DEFAULT_BUDGET,
};
use rendezvous_core::format::read_instance;
use rendezvous_core::kernel::kernelize;
use rendezvous_core::reductions::{
    reduce_3dm, reduce_nae, reduce_setcover, validate_gadgets, GadgetIndex, NaeInstance, SetCoverInstance,
    ThreeDmInstance,
};
use rendezvous_core::sim::{
    simulate, DividerStrategy, FacilitatorStrategy, GreedyRushFacilitator, IdleFacilitator, OptimalDivider,
    OptimalFacilitator, Outcome, RandomDivider, RandomFacilitator,
};
use rendezvous_core::special::{grid_instance, is_tree, recognize_tw2, solve_special, GridDivider, GridMeta};
use rendezvous_core::{lambda, min_vertex_cut, serialize_instance, EngineError, ExtendedCount, Instance, Side};
use serde_json::{json, Value};

use crate::heuristic::HeuristicDivider;

#[derive(Parser, Debug)]
#[command(name = "rendezvous", version, about = "Exact solver and play service for the rendezvous game on graphs")]
pub struct Cli {
    /// Print one JSON document on stdout instead of text
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide who wins with the instance's k (or --k)
    Solve {
        instance: PathBuf,
        /// Override the instance's Divider agent count
        #[arg(long)]
        k: Option<usize>,
        /// Position-side budget for the exact engine
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Dynamic separation number: the least k for which the Divider wins
    Dsep {
        instance: PathBuf,
        /// Position-side budget for each exact solve
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Minimum vertex cut between the terminals, with a witness
    Lambda { instance: PathBuf },
    /// Can the Facilitator force a meeting within --tau rounds?
    SolveInTime {
        instance: PathBuf,
        /// Round budget (Facilitator moves), at least 1
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        tau: u32,
        /// Override the instance's Divider agent count
        #[arg(long)]
        k: Option<usize>,
        /// Position-side budget for the exact engine
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Apply the reduction rules; prints the reduced instance file
    Kernelize {
        instance: PathBuf,
        /// Write the reduced instance here and print only the report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report tree / treewidth-two / grid structure and any fast-path answer
    Recognize { instance: PathBuf },
    /// Build instances: grids directly, reductions from a source JSON file
    #[command(subcommand)]
    Generate(Generate),
    /// Check a generated instance against its gadget index
    Validate { instance: PathBuf, index: PathBuf },
    /// Play two strategies against each other and print the trace
    Simulate {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = FacPlayer::Optimal)]
        fac: FacPlayer,
        /// `grid` is the mimic strategy for grids
        #[arg(long, value_enum, default_value_t = DivPlayer::Optimal)]
        div: DivPlayer,
        /// Facilitator moves to play before calling it a draw
        #[arg(long, default_value_t = 100)]
        rounds: u32,
        /// Seed for the random players
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        k: Option<usize>,
        /// Position-side budget when an optimal player needs a solve
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run the JSON-over-HTTP play service
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Sessions over this many position-sides get heuristic engine play
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Generate {
    /// Rows x cols grid; terminals as row,col (1-based)
    Grid {
        #[arg(long)]
        rows: u32,
        #[arg(long)]
        cols: u32,
        #[arg(long, value_parser = parse_cell)]
        s: (u32, u32),
        #[arg(long, value_parser = parse_cell)]
        t: (u32, u32),
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Instance file to write (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// From a 3-dimensional matching source {n, m, sets}
    #[command(name = "3dm")]
    ThreeDm(ReductionArgs),
    /// From a NAE-integer-3-SAT source {n, dstar, clauses}
    Nae(ReductionArgs),
    /// From a set cover source {universe_size, family, budget}
    Setcover(ReductionArgs),
}

#[derive(clap::Args, Debug)]
pub struct ReductionArgs {
    /// Source problem as JSON
    #[arg(long)]
    pub src: PathBuf,
    /// Instance file to write (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gadget index to write (defaults to <out>.index.json)
    #[arg(long)]
    pub index: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FacPlayer {
    Optimal,
    Greedy,
    Random,
    Idle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DivPlayer {
    Optimal,
    Heuristic,
    Random,
    Grid,
}

fn parse_cell(text: &str) -> Result<(u32, u32), String> {
    let (r, c) = text.split_once(',').ok_or_else(|| format!("expected row,col, got {text:?}"))?;
    let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(r)?, num(c)?))
}

/// A failed command: exit code, machine-readable body, message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub body: Value,
}

impl Failure {
    fn computation(kind: &str, message: impl ToString) -> Self {
        Failure { code: 2, body: json!({ "error": kind, "message": message.to_string() }) }
    }

    fn message(&self) -> String {
        match self.body.get("message").and_then(Value::as_str) {
            Some(m) => format!("{}: {m}", self.body["error"].as_str().unwrap_or("error")),
            None => self.body.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::CapacityExceeded { positions, budget } => Failure {
                code: 2,
                body: json!({ "error": "CapacityExceeded", "positions": positions, "budget": budget, "message": e.to_string() }),
            },
            EngineError::DisconnectedGraph => Failure::computation("DisconnectedGraph", e),
            EngineError::InvalidRoundBudget => Failure::computation("InvalidRoundBudget", e),
        }
    }
}

pub struct Output {
    pub json: Value,
    pub text: String,
}

fn load(path: &Path, k: Option<usize>) -> Result<Instance, Failure> {
    let inst = read_instance(path).map_err(|e| Failure::computation("InvalidInstance", e))?;
    Ok(match k {
        Some(k) => inst.with_k(k),
        None => inst,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::computation("Io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::computation("InvalidSource", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::computation("Io", format!("{}: {e}", path.display())))
}

fn lambda_of(inst: &Instance) -> ExtendedCount {
    lambda(&inst.graph, inst.s, inst.t).expect("instance terminals are in range")
}

fn cmd_solve(inst: &Instance, budget: u64) -> Result<Output, Failure> {
    let report = solve_shared(inst, budget)?;
    let lam = lambda_of(inst);
    let pairs = report.index().map_or(0, |i| i.compatible_pairs());
    let rounds = report.min_rounds();
    let json = json!({
        "winner": report.winner,
        "k": inst.k,
        "lambda": lam,
        "positions": pairs,
        "rounds": rounds,
        "budget_used": report.stats.positions,
        "budget": budget,
        "wall_time_ms": report.stats.wall_time_ms,
    });
    let mut text = format!("winner: {}\nk = {}, lambda = {lam}\n", report.winner, inst.k);
    if let Some(r) = rounds {
        text += &format!("the Facilitator forces a meeting by round {r}\n");
    }
    text += &format!("{} position-sides solved in {} ms\n", report.stats.positions, report.stats.wall_time_ms);
    Ok(Output { json, text })
}

fn cmd_dsep(inst: &Instance, budget: u64) -> Result<Output, Failure> {
    let d = dynamic_separation_with_budget(&inst.graph, inst.s, inst.t, budget)?;
    let lam = lambda_of(inst);
    Ok(Output { json: json!({ "d": d, "lambda": lam }), text: format!("d = {d}\nlambda = {lam}\n") })
}

fn cmd_lambda(inst: &Instance) -> Output {
    let lam = lambda_of(inst);
    let witness = min_vertex_cut(&inst.graph, inst.s, inst.t).ok().map(|c| c.vertices);
    let text = match &witness {
        Some(w) => format!("lambda = {lam}\ncut: {}\n", join(w)),
        None => format!("lambda = {lam}\nno cut: the terminals coincide or are adjacent\n"),
    };
    Output { json: json!({ "lambda": lam, "witness": witness }), text }
}

fn cmd_solve_in_time(inst: &Instance, tau: u32, budget: u64) -> Result<Output, Failure> {
    let report = solve_in_time_with_budget(inst, tau, budget)?;
    let winner = if report.facilitator_wins { Side::Facilitator } else { Side::Divider };
    let lam = lambda_of(inst);
    let json = json!({
        "winner": winner,
        "k": inst.k,
        "tau": tau,
        "lambda": lam,
        "rounds": report.min_rounds,
        "levels": report.levels,
    });
    let text = match report.min_rounds {
        Some(r) => format!("winner within {tau} rounds: Facilitator (meets by round {r})\n"),
        None => format!("winner within {tau} rounds: Divider\n"),
    };
    Ok(Output { json, text })
}

fn cmd_kernelize(inst: &Instance, out: Option<&Path>) -> Result<Output, Failure> {
    let report = kernelize(inst).map_err(|e| Failure::computation("KernelError", e))?;
    let reduced = report.reduced.as_ref().map(serialize_instance);
    if let (Some(path), Some(text)) = (out, &reduced) {
        write_file(path, text)?;
    }
    let mut json = serde_json::to_value(&report).expect("plain data");
    json["vertices_before"] = json!(inst.graph.n());
    json["vertices_after"] = json!(report.reduced.as_ref().map(|r| r.graph.n()));
    if out.is_none() {
        json["instance"] = json!(reduced);
    }
    let mut text = String::new();
    if report.trivial_yes {
        text += "# trivial: the Facilitator wins outright\n";
    } else {
        text += &format!(
            "# kernel: {} -> {} vertices, vertex cover {} ({}), bound {}\n",
            inst.graph.n(),
            report.reduced.as_ref().map_or(0, |r| r.graph.n()),
            report.vc,
            if report.exact { "minimum" } else { "approximate" },
            report.bound
        );
        text += &format!("# deleted: {}\n", join(&report.deleted));
        match (out, &reduced) {
            (None, Some(r)) => text += r,
            (Some(path), _) => text += &format!("# written to {}\n", path.display()),
            _ => {}
        }
    }
    Ok(Output { json, text })
}

fn cmd_recognize(inst: &Instance) -> Output {
    let tree = is_tree(&inst.graph);
    let tw2 = recognize_tw2(&inst.graph).is_some();
    let grid = GridMeta::from_graph(&inst.graph).is_some();
    let fast = solve_special(inst);
    let mut text = format!("tree: {tree}\ntreewidth <= 2: {tw2}\ngrid: {grid}\n");
    match &fast {
        Some(f) => text += &format!("fast path ({:?}): d = {}, winner with k = {}: {}\n", f.provenance, f.d, inst.k, f.winner),
        None => text += "no fast path; use solve or dsep\n",
    }
    Output { json: json!({ "tree": tree, "tw2": tw2, "grid": grid, "fast_path": fast }), text }
}

fn emit_generated(inst: &Instance, gi: Option<&GadgetIndex>, args_out: Option<&Path>, index: Option<&Path>) -> Result<Output, Failure> {
    let text = serialize_instance(inst);
    let index_path = index.map(Path::to_path_buf).or_else(|| {
        args_out.filter(|_| gi.is_some()).map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".index.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = args_out {
        write_file(path, &text)?;
    }
    if let (Some(path), Some(gi)) = (&index_path, gi) {
        write_file(path, &gi.to_json())?;
    }
    let mut json = json!({ "vertices": inst.graph.n(), "edges": inst.graph.edge_count(), "k": inst.k });
    if args_out.is_none() {
        json["instance"] = json!(text);
    }
    if let Some(gi) = gi {
        if index_path.is_none() {
            json["index"] = serde_json::from_str(&gi.to_json()).expect("index is JSON");
        }
    }
    let mut summary = format!("{} vertices, {} edges, k = {}\n", inst.graph.n(), inst.graph.edge_count(), inst.k);
    match args_out {
        Some(p) => summary = format!("wrote {}: {summary}", p.display()),
        None => summary = text,
    }
    if let Some(p) = &index_path {
        summary += &format!("{}gadget index written to {}\n", if args_out.is_none() { "# " } else { "" }, p.display());
    } else if gi.is_some() && args_out.is_none() {
        eprintln!("note: no --index given; the gadget index is only included with --json");
    }
    Ok(Output { json, text: summary })
}

fn cmd_generate(what: &Generate) -> Result<Output, Failure> {
    let invalid = |e: rendezvous_core::reductions::ReductionError| Failure::computation("InvalidSource", e);
    match what {
        Generate::Grid { rows, cols, s, t, k, out } => {
            let inst = grid_instance(*rows, *cols, *s, *t, *k).map_err(|e| Failure::computation("InvalidGrid", e))?;
            emit_generated(&inst, None, out.as_deref(), None)
        }
        Generate::ThreeDm(a) => {
            let (inst, gi) = reduce_3dm(&read_json::<ThreeDmInstance>(&a.src)?).map_err(invalid)?;
            emit_generated(&inst, Some(&gi), a.out.as_deref(), a.index.as_deref())
        }
        Generate::Nae(a) => {
            let (inst, gi) = reduce_nae(&read_json::<NaeInstance>(&a.src)?).map_err(invalid)?;
            emit_generated(&inst, Some(&gi), a.out.as_deref(), a.index.as_deref())
        }
        Generate::Setcover(a) => {
            let (inst, gi) = reduce_setcover(&read_json::<SetCoverInstance>(&a.src)?).map_err(invalid)?;
            emit_generated(&inst, Some(&gi), a.out.as_deref(), a.index.as_deref())
        }
    }
}

fn cmd_validate(inst: &Instance, index: &Path) -> Result<Output, Failure> {
    let text = std::fs::read_to_string(index).map_err(|e| Failure::computation("Io", format!("{}: {e}", index.display())))?;
    let gi = GadgetIndex::from_json(&text).map_err(|e| Failure::computation("InvalidIndex", e))?;
    let report = validate_gadgets(inst, &gi);
    let mut lines = String::new();
    for c in &report.checks {
        lines += &format!("{} {}{}\n", if c.passed { "ok  " } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
    }
    let json = serde_json::to_value(&report).expect("plain data");
    if report.passed {
        Ok(Output { json, text: lines })
    } else {
        Err(Failure { code: 2, body: json!({ "error": "ValidationFailed", "report": json, "message": lines.trim_end() }) })
    }
}

fn cmd_simulate(inst: &Instance, fac: FacPlayer, div: DivPlayer, rounds: u32, seed: u64, budget: u64) -> Result<Output, Failure> {
    let needs_solve = matches!(fac, FacPlayer::Optimal) || matches!(div, DivPlayer::Optimal);
    let report = if needs_solve { Some(solve_shared(inst, budget)?) } else { None };
    let g = &inst.graph;
    let mut f: Box<dyn FacilitatorStrategy> = match fac {
        FacPlayer::Optimal => Box::new(OptimalFacilitator::new(Arc::clone(report.as_ref().unwrap()))),
        FacPlayer::Greedy => Box::new(GreedyRushFacilitator::new(g)),
        FacPlayer::Random => Box::new(RandomFacilitator::new(g, ChaCha8Rng::seed_from_u64(seed))),
        FacPlayer::Idle => Box::new(IdleFacilitator),
    };
    let mut d: Box<dyn DividerStrategy> = match div {
        DivPlayer::Optimal => Box::new(OptimalDivider::new(Arc::clone(report.as_ref().unwrap()))),
        DivPlayer::Heuristic => Box::new(HeuristicDivider::new(inst)),
        DivPlayer::Random => Box::new(RandomDivider::new(g, ChaCha8Rng::seed_from_u64(seed.wrapping_add(1)))),
        DivPlayer::Grid => Box::new(GridDivider::new(inst).map_err(|e| Failure::computation("NotAGrid", e))?),
    };
    let trace = simulate(inst, f.as_mut(), d.as_mut(), rounds).map_err(|e| Failure::computation("SimulationFailed", e))?;
    let mut text = String::new();
    for s in &trace.steps {
        text += &format!("round {:>3}  F {{{}}}  D {{{}}}  {} to move\n", s.round, join(&s.f), join(&s.d), s.to_move);
    }
    text += &match trace.outcome {
        Outcome::Met { vertex, round } => format!("met at {vertex} in round {round}\n"),
        Outcome::Ongoing { rounds } => format!("no meeting within {rounds} rounds\n"),
    };
    let json = json!({ "outcome": trace.outcome, "steps": trace.steps, "declared_winner": report.map(|r| r.winner) });
    Ok(Output { json, text })
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Solve { instance, k, budget } => cmd_solve(&load(instance, *k)?, *budget),
        Command::Dsep { instance, budget } => cmd_dsep(&load(instance, None)?, *budget),
        Command::Lambda { instance } => Ok(cmd_lambda(&load(instance, None)?)),
        Command::SolveInTime { instance, tau, k, budget } => cmd_solve_in_time(&load(instance, *k)?, *tau, *budget),
        Command::Kernelize { instance, out } => cmd_kernelize(&load(instance, None)?, out.as_deref()),
        Command::Recognize { instance } => Ok(cmd_recognize(&load(instance, None)?)),
        Command::Generate(what) => cmd_generate(what),
        Command::Validate { instance, index } => cmd_validate(&load(instance, None)?, index),
        Command::Simulate { instance, fac, div, rounds, seed, k, budget } => {
            cmd_simulate(&load(instance, *k)?, *fac, *div, *rounds, *seed, *budget)
        }
        Command::Serve { host, port, budget } => {
            crate::service::serve(host, *port, *budget).map_err(|e| Failure::computation("Io", e))?;
            Ok(Output { json: Value::Null, text: String::new() })
        }
    }
}

/// Parses `args` (program name first), runs the command, and maps the result
/// to exit codes: 0 success, 1 usage error, 2 computation error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            if let Some(mut sub) = subcommand_for(&args) {
                eprintln!();
                let _ = write!(std::io::stderr(), "{}", sub.render_help());
            }
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if cli.json {
                println!("{}", f.body);
            } else {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code)
        }
    }
}

/// The deepest subcommand named in `args`, for printing its help.
fn subcommand_for(args: &[OsString]) -> Option<clap::Command> {
    let mut cmd = Cli::command();
    cmd.build();
    let mut found = None;
    for a in args.iter().skip(1).filter_map(|a| a.to_str()) {
        let Some(sub) = cmd.find_subcommand(a).cloned() else { continue };
        found = Some(sub.clone());
        cmd = sub;
    }
    found
}
