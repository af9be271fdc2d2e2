//! `gamedec`: command-line front end for game decomposition.
//!
//! Exit codes: 0 on success, 1 when a requested check fails, 2 on input
//! or usage errors.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gamedec", version, about = "Minimal graphs and potential/harmonic decomposition of finite games")]
pub struct Cli {
    /// Absolute comparison tolerance, scaled by the largest utility magnitude.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GameInput {
    /// Game JSON file; `-` or omitted reads stdin.
    pub input: Option<std::path::PathBuf>,
    /// Operate on the normalized version of the game.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Extension {
    Symmetric,
    Triangle,
    Splitting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statement {
    Theorem1,
    Corollary3,
    Corollary4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    /// Eight players: public-good player 1, majority players 2..8.
    #[value(name = "paper-8node")]
    Paper8Node,
    MatchingPennies,
    Coordination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Dense,
    Graphical,
    Pairwise,
    Potential,
    Harmonic,
    Nonstrategic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the minimal graph of a game (Graph JSON, or DOT with --dot).
    MinimalGraph {
        #[command(flatten)]
        game: GameInput,
        #[arg(long)]
        dot: bool,
    },
    /// Print the normalized version of a game.
    Normalize {
        #[command(flatten)]
        game: GameInput,
    },
    /// Decompose a game into non-strategic, potential and harmonic parts.
    Decompose {
        #[command(flatten)]
        game: GameInput,
        /// Also split the potential over the maximal cliques of the class-minimal graph.
        #[arg(long)]
        local_potentials: bool,
    },
    /// Test properties of a game; exits 1 if any requested property fails.
    Check {
        #[command(flatten)]
        game: GameInput,
        #[arg(long)]
        potential: bool,
        #[arg(long)]
        harmonic: bool,
        #[arg(long)]
        zero_sum: bool,
        #[arg(long)]
        non_strategic: bool,
        /// The game is normalized.
        #[arg(long)]
        is_normalized: bool,
        /// The game is graphical on the graph given by --graph.
        #[arg(long, requires = "graph")]
        graphical: bool,
        #[arg(long)]
        graph: Option<std::path::PathBuf>,
    },
    /// Extend a graph (symmetric closure, triangle extension or splitting extension).
    ExtendGraph {
        /// Graph JSON file; `-` or omitted reads stdin.
        input: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value_t = Extension::Symmetric)]
        kind: Extension,
        #[arg(long, required_if_eq("kind", "splitting"))]
        splitting: Option<std::path::PathBuf>,
        #[arg(long)]
        dot: bool,
        /// Print the maximal cliques of the extended graph instead.
        #[arg(long, conflicts_with = "dot")]
        cliques: bool,
    },
    /// Test S-separability of a game; exits 1 if not separable.
    Separable {
        #[command(flatten)]
        game: GameInput,
        #[arg(long)]
        splitting: std::path::PathBuf,
        /// Reference graph (defaults to the minimal graph of the game).
        #[arg(long)]
        graph: Option<std::path::PathBuf>,
    },
    /// Run a structural verification and print its report; exits 1 on failure.
    Verify {
        #[arg(value_enum)]
        statement: Statement,
        /// Game JSON (edge-utilities JSON for corollary4); `-` or omitted reads stdin.
        input: Option<std::path::PathBuf>,
        /// Required for theorem1.
        #[arg(long, required_if_eq("statement", "theorem1"))]
        splitting: Option<std::path::PathBuf>,
    },
    /// Print a built-in example game.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Cost of acquiring the good in the public-good game.
        #[arg(long, default_value_t = 0.5)]
        cost: f64,
        /// Topology for paper-8node (player 0 plays the public-good game).
        #[arg(long)]
        graph: Option<std::path::PathBuf>,
    },
    /// Generate a random game.
    Random {
        #[arg(long, value_enum, default_value_t = Kind::Dense)]
        kind: Kind,
        /// Comma-separated action counts, one per player.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 2])]
        actions: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        graph: Option<std::path::PathBuf>,
        /// For --kind pairwise: print the edge utilities instead of the game.
        #[arg(long)]
        edges: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = commands::emit(&cli, &outcome.output) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
