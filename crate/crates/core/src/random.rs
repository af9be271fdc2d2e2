//! Seeded random instance generators.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, GameShape, Tolerance};
use crate::graph::{Graph, Splitting};
use crate::hodge::{decompose, potential_component, Potential};
use crate::lsq::LocalTable;
use crate::separability::{build_pairwise_game, EdgeUtilities};

pub type GameRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Dense,
    Graphical,
    Pairwise,
    Potential,
    Harmonic,
    NonStrategic,
}

impl GameKind {
    pub const ALL: [GameKind; 6] = [
        GameKind::Dense,
        GameKind::Graphical,
        GameKind::Pairwise,
        GameKind::Potential,
        GameKind::Harmonic,
        GameKind::NonStrategic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Dense => "dense",
            GameKind::Graphical => "graphical",
            GameKind::Pairwise => "pairwise",
            GameKind::Potential => "potential",
            GameKind::Harmonic => "harmonic",
            GameKind::NonStrategic => "nonstrategic",
        }
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GameKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown game kind `{s}`")))
    }
}

fn uniform(rng: &mut GameRng) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Random table over the given players with entries in `[-1, 1)`.
pub fn random_table(players: Vec<usize>, shape: &GameShape, rng: &mut GameRng) -> LocalTable {
    let mut t = LocalTable::zeros(players, shape);
    t.values.iter_mut().for_each(|v| *v = uniform(rng));
    t
}

/// Directed graph with each ordered pair present with probability `p`.
pub fn random_digraph(n: usize, p: f64, rng: &mut GameRng) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                g.add_edge(i, j).expect("valid edge");
            }
        }
    }
    g
}

/// Symmetric graph with each unordered pair present with probability `p`.
pub fn random_undirected(n: usize, p: f64, rng: &mut GameRng) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.add_edge(i, j).expect("valid edge");
                g.add_edge(j, i).expect("valid edge");
            }
        }
    }
    g
}

pub fn random_dense(shape: &GameShape, rng: &mut GameRng) -> Game {
    Game::from_fn(shape.clone(), |_, _| uniform(rng)).expect("finite utilities")
}

fn from_local_tables(shape: &GameShape, tables: &[Vec<LocalTable>]) -> Game {
    Game::from_fn(shape.clone(), |i, x| tables[i].iter().map(|t| t.eval(shape, x)).sum())
        .expect("finite utilities")
}

/// Each `u_i` is a random function of the closed neighbourhood of `i`.
pub fn random_graphical(shape: &GameShape, g: &Graph, rng: &mut GameRng) -> Game {
    let tables: Vec<Vec<LocalTable>> = (0..shape.num_players())
        .map(|i| vec![random_table(g.closed_neighborhood(i), shape, rng)])
        .collect();
    from_local_tables(shape, &tables)
}

/// Each `u_i` is a random function of every action except the player's own.
pub fn random_nonstrategic(shape: &GameShape, rng: &mut GameRng) -> Game {
    let n = shape.num_players();
    let tables: Vec<Vec<LocalTable>> = (0..n)
        .map(|i| vec![random_table((0..n).filter(|&j| j != i).collect(), shape, rng)])
        .collect();
    from_local_tables(shape, &tables)
}

pub fn random_edge_utilities(shape: &GameShape, g: &Graph, rng: &mut GameRng) -> EdgeUtilities {
    let counts = shape.action_counts();
    let tables: BTreeMap<(usize, usize), Vec<Vec<f64>>> = g
        .edges()
        .map(|(i, j)| {
            let table = (0..counts[i])
                .map(|_| (0..counts[j]).map(|_| uniform(rng)).collect())
                .collect();
            ((i, j), table)
        })
        .collect();
    EdgeUtilities::new(g.clone(), counts.to_vec(), tables).expect("consistent edge utilities")
}

/// Splits each out-neighbourhood with at least two members into two
/// non-empty disjoint groups; smaller neighbourhoods keep one group.
pub fn random_two_group_splitting(g: &Graph, rng: &mut GameRng) -> Splitting {
    let groups = (0..g.num_nodes())
        .map(|i| {
            let mut nbrs: Vec<usize> = g.out_neighbors(i).iter().copied().collect();
            match nbrs.len() {
                0 => Vec::new(),
                1 => vec![nbrs.into_iter().collect()],
                len => {
                    nbrs.shuffle(rng);
                    let cut = rng.random_range(1..len);
                    let first: BTreeSet<usize> = nbrs[..cut].iter().copied().collect();
                    let second: BTreeSet<usize> = nbrs[cut..].iter().copied().collect();
                    vec![first, second]
                }
            }
        })
        .collect();
    Splitting::new(groups)
}

/// Random S-separable game: `u_i = u_i^0(x_{N_i}) + sum_h u_i^h(x_i, x_{S_i^h})`.
pub fn random_separable(shape: &GameShape, g: &Graph, s: &Splitting, rng: &mut GameRng) -> Result<Game> {
    s.validate(g)?;
    let tables: Vec<Vec<LocalTable>> = (0..shape.num_players())
        .map(|i| {
            let mut ts = vec![random_table(g.out_neighbors(i).iter().copied().collect(), shape, rng)];
            for group in s.groups(i) {
                let mut players: Vec<usize> = group.iter().copied().collect();
                players.push(i);
                players.sort_unstable();
                ts.push(random_table(players, shape, rng));
            }
            ts
        })
        .collect();
    Ok(from_local_tables(shape, &tables))
}

/// Potential that is a sum of random tables over the maximal cliques of `g`.
pub fn random_clique_potential(shape: &GameShape, g: &Graph, rng: &mut GameRng) -> Result<Potential> {
    let cliques = g.maximal_cliques()?;
    let tables: Vec<LocalTable> = cliques.into_iter().map(|c| random_table(c, shape, rng)).collect();
    Potential::new(
        (0..shape.profile_count())
            .map(|x| tables.iter().map(|t| t.eval(shape, x)).sum())
            .collect(),
    )
}

/// Random normalized potential game built from a dense random potential.
pub fn random_potential_game(shape: &GameShape, rng: &mut GameRng) -> Game {
    let phi = Potential::new((0..shape.profile_count()).map(|_| uniform(rng)).collect()).expect("finite");
    potential_component(&phi, shape).expect("matching shape")
}

/// Generates a game of the requested kind, deterministic in `seed`.
/// `graph` defaults to the complete graph for the graphical kinds.
pub fn generate_random(kind: GameKind, shape: &GameShape, graph: Option<&Graph>, seed: u64) -> Result<Game> {
    let mut rng = rng_from_seed(seed);
    let complete;
    let g = match graph {
        Some(g) if g.num_nodes() != shape.num_players() => {
            return Err(Error::NodeCountMismatch {
                left: shape.num_players(),
                right: g.num_nodes(),
            })
        }
        Some(g) => g,
        None => {
            complete = Graph::complete(shape.num_players());
            &complete
        }
    };
    let t = Tolerance::default();
    Ok(match kind {
        GameKind::Dense => random_dense(shape, &mut rng),
        GameKind::Graphical => random_graphical(shape, g, &mut rng),
        GameKind::Pairwise => build_pairwise_game(&random_edge_utilities(shape, g, &mut rng))?,
        GameKind::NonStrategic => random_nonstrategic(shape, &mut rng),
        GameKind::Potential => decompose(&random_graphical(shape, g, &mut rng), &t)?.potential_part,
        GameKind::Harmonic => decompose(&random_graphical(shape, g, &mut rng), &t)?.harmonic_part,
    })
}
