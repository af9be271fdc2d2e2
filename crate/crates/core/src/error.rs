use thiserror::Error;

/// Errors produced by game, graph and decomposition routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid game shape: {0}")]
    InvalidShape(String),
    #[error("profile count {count} exceeds the limit of {limit} (set GAMEDEC_MAX_PROFILES to raise it)")]
    ProfileLimit { count: u128, limit: usize },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("games have different shapes")]
    ShapeMismatch,
    #[error("invalid utilities: {0}")]
    InvalidUtilities(String),
    #[error("linear combination needs at least one game and one coefficient per game")]
    EmptyCombination,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("node count mismatch: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },
    #[error("graph is not symmetric")]
    NotSymmetric,
    #[error("clique enumeration supports at most 64 nodes, got {0}")]
    TooManyNodes(usize),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("game is not normalized (worst violation {violation:e})")]
    NotNormalized { violation: f64 },
    #[error("player {player} depends on player {neighbor}, which is not an out-neighbour in the graph")]
    NotGraphical { player: usize, neighbor: usize },
    #[error("conjugate gradients did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
