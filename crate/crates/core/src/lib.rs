//! Finite strategic-form games on graphs.
//!
//! This crate computes minimal interaction graphs of games, the normalized
//! representative of a strategic-equivalence class, and the decomposition
//! of any game into non-strategic, normalized potential and normalized
//! harmonic parts. It also provides executable checks of how that
//! decomposition interacts with graphical and separable structure.
//!
//! ```
//! use gamedec::{decompose, matching_pennies, Tolerance};
//!
//! let d = decompose(&matching_pennies(), &Tolerance::default()).unwrap();
//! assert!(d.potential_part.max_abs() < 1e-12);
//! assert!(d.harmonic_part.max_abs_diff(&matching_pennies()).unwrap() < 1e-12);
//! ```
//!
//! Profile-level loops run on rayon when the default `parallel` feature is
//! enabled; every operation also accepts [`Execution::Sequential`] where
//! an explicit policy is taken, and results are identical either way.

pub mod error;
pub mod exec;
pub mod game;
pub mod graph;
pub mod hodge;
pub mod io;
pub mod lsq;
pub mod random;
pub mod response;
pub mod separability;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use game::{
    coordination_game, linear_combination, matching_pennies, nonstrategic_part, normalize, is_non_strategic,
    is_normalized, strategically_equivalent, Game, GameShape, PlayerLabel, Profile, Tolerance,
};
pub use graph::{class_minimal_graph, is_graphical, minimal_graph, minimal_graph_with, Graph, Splitting};
pub use hodge::{
    clique_potential_decomposition, decompose, decompose_with, divergence, exact_potential, fit_potential,
    game_flow, gradient, harmonic_normalized_check, is_harmonic, is_zero_sum, potential_component,
    CliqueDecomposition, CliqueOutcome, Decomposition, Potential, PotentialCheck, Residuals,
};
pub use lsq::LocalTable;
pub use random::{generate_random, GameKind};
pub use response::{ResponseEdge, ResponseGraph};
pub use separability::{
    build_pairwise_game, example_graph, is_s_separable, make_example_game, verify_corollary3, verify_corollary4,
    verify_theorem1, EdgeUtilities, SeparableDecomposition, Separability, VerificationReport,
};
