//! Pairwise-separable games, S-separability testing and executable checks
//! of how the decomposition interacts with graphical structure.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{is_non_strategic, is_normalized, normalize, Game, GameShape, Tolerance};
use crate::graph::{class_minimal_graph, dependence, minimal_graph, Graph, Splitting};
use crate::hodge::{decompose, exact_potential, is_harmonic, Decomposition};
use crate::lsq::{fit_sum_of_subspaces, LocalTable};

/// Two-player tables on the directed edges of a graph. Row index is the
/// tail player's action, column index the head player's.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeUtilities {
    graph: Graph,
    action_counts: Vec<usize>,
    tables: BTreeMap<(usize, usize), Vec<Vec<f64>>>,
}

impl EdgeUtilities {
    pub fn new(
        graph: Graph,
        action_counts: Vec<usize>,
        tables: BTreeMap<(usize, usize), Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if action_counts.len() != graph.num_nodes() {
            return Err(Error::NodeCountMismatch {
                left: action_counts.len(),
                right: graph.num_nodes(),
            });
        }
        GameShape::new(action_counts.clone())?;
        for (i, j) in graph.edges() {
            if !tables.contains_key(&(i, j)) {
                return Err(Error::InvalidUtilities(format!("edge ({i}, {j}) has no table")));
            }
        }
        for (&(i, j), table) in &tables {
            if !graph.has_edge(i, j) {
                return Err(Error::InvalidUtilities(format!("table for ({i}, {j}) but no such edge")));
            }
            if table.len() != action_counts[i] || table.iter().any(|row| row.len() != action_counts[j]) {
                return Err(Error::InvalidUtilities(format!(
                    "table ({i}, {j}) must be {} x {}",
                    action_counts[i], action_counts[j]
                )));
            }
            if table.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidUtilities(format!("table ({i}, {j}) has non-finite entries")));
            }
        }
        Ok(EdgeUtilities {
            graph,
            action_counts,
            tables,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn tables(&self) -> &BTreeMap<(usize, usize), Vec<Vec<f64>>> {
        &self.tables
    }
}

/// `u_i(x) = sum_{j in N_i} u_ij(x_i, x_j)`.
pub fn build_pairwise_game(e: &EdgeUtilities) -> Result<Game> {
    let shape = GameShape::new(e.action_counts.clone())?;
    let mut utilities = vec![vec![0.0; shape.profile_count()]; shape.num_players()];
    for (&(i, j), table) in &e.tables {
        for (x, slot) in utilities[i].iter_mut().enumerate() {
            *slot += table[shape.action_at(x, i)][shape.action_at(x, j)];
        }
    }
    Game::new(shape, utilities)
}

/// Per-player tables realizing `u_i = u_i^0 + sum_h u_i^h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerSeparation {
    /// Depends on `x_{N_i}` only.
    pub base: LocalTable,
    /// One table per group, over `{i} ∪ S_i^h`.
    pub groups: Vec<LocalTable>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub players: Vec<PlayerSeparation>,
    /// Largest per-player projection residual.
    pub residual: f64,
}

impl SeparableDecomposition {
    /// Re-summed utility of `player` at profile `x`.
    pub fn evaluate(&self, shape: &GameShape, player: usize, x: usize) -> f64 {
        let p = &self.players[player];
        p.base.eval(shape, x) + p.groups.iter().map(|t| t.eval(shape, x)).sum::<f64>()
    }

    pub fn reconstruct(&self, shape: &GameShape) -> Result<Game> {
        Game::from_fn(shape.clone(), |i, x| self.evaluate(shape, i, x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separability {
    Separable(SeparableDecomposition),
    NotSeparable { player: usize, residual: f64 },
}

impl Separability {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separability::Separable(_))
    }
}

fn sorted_union(a: &[usize], b: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().copied().chain(b).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn separate_player(u: &Game, s: &Splitting, g: &Graph, i: usize, exec: Execution) -> Result<PlayerSeparation> {
    let shape = u.shape();
    let coords = g.closed_neighborhood(i);
    let grid = GameShape::new(coords.iter().map(|&p| shape.actions(p)).collect())?;
    let position = |p: usize| coords.binary_search(&p).expect("player in closed neighbourhood");

    // u_i restricted to the closed neighbourhood, other players at action 0
    let target: Vec<f64> = (0..grid.profile_count())
        .map(|local| {
            let x: usize = coords
                .iter()
                .enumerate()
                .map(|(k, &p)| grid.action_at(local, k) * shape.stride(p))
                .sum();
            u.utility(i, x)
        })
        .collect();

    let base_players: Vec<usize> = g.out_neighbors(i).iter().copied().collect();
    let group_players: Vec<Vec<usize>> = s
        .groups(i)
        .iter()
        .map(|grp| sorted_union(&[i], grp.iter().copied()))
        .collect();
    let subsets: Vec<Vec<usize>> = std::iter::once(&base_players)
        .chain(&group_players)
        .map(|ps| ps.iter().map(|&p| position(p)).collect())
        .collect();
    let fit = fit_sum_of_subspaces(&grid, &subsets, &target, exec)?;

    let mut tables = fit.tables.into_iter();
    let mut base = LocalTable {
        players: base_players,
        values: tables.next().expect("base table"),
    };
    base.values.iter_mut().for_each(|v| *v += fit.mean);
    let groups = group_players
        .into_iter()
        .zip(tables)
        .map(|(players, values)| LocalTable { players, values })
        .collect();
    let norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(PlayerSeparation {
        base,
        groups,
        residual: fit.residual / (1.0 + norm),
    })
}

/// Tests whether `u` is S-separable for the splitting `s` of `g` by
/// projecting each utility onto functions of `x_{N_i}` plus functions of
/// `(x_i, x_{S_i^h})`. Per-player residuals are reported relative to
/// `1 + ||u_i||` and compared against `abs_tol`.
pub fn is_s_separable(u: &Game, s: &Splitting, g: &Graph, t: &Tolerance) -> Result<Separability> {
    is_s_separable_with(u, s, g, t, Execution::default())
}

pub fn is_s_separable_with(
    u: &Game,
    s: &Splitting,
    g: &Graph,
    t: &Tolerance,
    exec: Execution,
) -> Result<Separability> {
    if g.num_nodes() != u.num_players() {
        return Err(Error::NodeCountMismatch {
            left: u.num_players(),
            right: g.num_nodes(),
        });
    }
    s.validate(g)?;
    let tol = t.threshold(&[u]);
    for i in 0..u.num_players() {
        for j in (0..u.num_players()).filter(|&j| j != i && !g.has_edge(i, j)) {
            if dependence(u, i, j) > tol {
                return Err(Error::NotGraphical { player: i, neighbor: j });
            }
        }
    }
    let players = map_indexed(u.num_players(), exec, |i| {
        separate_player(u, s, g, i, Execution::Sequential)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (worst, residual) = players
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.residual))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if residual > t.abs_tol {
        return Ok(Separability::NotSeparable { player: worst, residual });
    }
    Ok(Separability::Separable(SeparableDecomposition { players, residual }))
}

/// One checked statement of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    /// Measured quantity behind the verdict (a residual, or the number
    /// of offending edges for graph inclusions).
    pub value: f64,
}

impl Clause {
    fn new(name: &str, passed: bool, value: f64) -> Self {
        Clause {
            name: name.to_string(),
            passed,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentGraphs {
    pub non_strategic: Graph,
    pub potential: Graph,
    pub harmonic: Graph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub statement: String,
    pub clauses: Vec<Clause>,
    pub game_graph: Graph,
    pub class_graph: Graph,
    /// The graph the potential and harmonic parts must live on.
    pub reference_graph: Graph,
    pub components: ComponentGraphs,
    pub decomposition: Decomposition,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

fn component_graphs(d: &Decomposition, t: &Tolerance) -> ComponentGraphs {
    ComponentGraphs {
        non_strategic: minimal_graph(&d.non_strategic, t),
        potential: minimal_graph(&d.potential_part, t),
        harmonic: minimal_graph(&d.harmonic_part, t),
    }
}

fn inclusion_clause(name: &str, a: &Graph, b: &Graph) -> Result<Clause> {
    let extra = a.difference(b)?.len();
    Ok(Clause::new(name, extra == 0, extra as f64))
}

fn separability_clause(name: &str, game: &Game, s: &Splitting, g: &Graph, t: &Tolerance) -> Result<Clause> {
    Ok(match is_s_separable(game, s, g, t) {
        Ok(Separability::Separable(d)) => Clause::new(name, true, d.residual),
        Ok(Separability::NotSeparable { residual, .. }) => Clause::new(name, false, residual),
        Err(Error::NotGraphical { .. }) => Clause::new(name, false, f64::INFINITY),
        Err(e) => return Err(e),
    })
}

fn membership_clauses(d: &Decomposition, u: &Game, t: &Tolerance) -> Vec<Clause> {
    let tol = t.threshold(&[u]);
    let r = &d.residuals;
    vec![
        Clause::new("sum reconstructs the game", r.sum_check <= tol, r.sum_check),
        Clause::new(
            "u_N is non-strategic",
            is_non_strategic(&d.non_strategic, t),
            d.non_strategic.own_action_variation(),
        ),
        Clause::new(
            "u_P is normalized",
            is_normalized(&d.potential_part, t),
            d.potential_part.normalization_violation(),
        ),
        Clause::new(
            "u_P is an exact potential game",
            exact_potential(&d.potential_part, t).is_potential(),
            r.potential_check,
        ),
        Clause::new(
            "u_H is normalized",
            is_normalized(&d.harmonic_part, t),
            d.harmonic_part.normalization_violation(),
        ),
        Clause::new("u_H is harmonic", is_harmonic(&d.harmonic_part, t), r.harmonic_check),
    ]
}

/// Checks the separable decomposition statement for `u` and a splitting.
///
/// `s` may be a splitting of any graph containing the class-minimal graph
/// `G_[u]`; it is restricted to `G_[u]` first. Separability of the
/// components is tested on `G_[u]^S` with the lifted splitting (see
/// [`Splitting::lifted`]).
pub fn verify_theorem1(u: &Game, s: &Splitting, t: &Tolerance) -> Result<VerificationReport> {
    let game_graph = minimal_graph(u, t);
    let class_graph = class_minimal_graph(u, t);
    let restricted = s.restricted_to(&class_graph)?;
    let normalized = normalize(u);
    match is_s_separable(&normalized, &restricted, &class_graph, t)? {
        Separability::Separable(_) => {}
        Separability::NotSeparable { player, residual } => {
            return Err(Error::Precondition(format!(
                "game is not separable for the splitting (player {player}, residual {residual:e})"
            )))
        }
    }
    let d = decompose(u, t)?;
    let extension = class_graph.splitting_extension(&restricted)?;
    let lifted = restricted.lifted(&class_graph)?;
    let components = component_graphs(&d, t);

    let mut clauses = membership_clauses(&d, u, t);
    clauses.push(inclusion_clause("u_N is graphical on G_u", &components.non_strategic, &game_graph)?);
    clauses.push(inclusion_clause("u_P is graphical on G_[u]^S", &components.potential, &extension)?);
    clauses.push(separability_clause("u_P is separable", &d.potential_part, &lifted, &extension, t)?);
    clauses.push(inclusion_clause("u_H is graphical on G_[u]^S", &components.harmonic, &extension)?);
    clauses.push(separability_clause("u_H is separable", &d.harmonic_part, &lifted, &extension, t)?);
    Ok(VerificationReport {
        statement: "theorem1".into(),
        clauses,
        game_graph,
        class_graph,
        reference_graph: extension,
        components,
        decomposition: d,
    })
}

/// Checks that the potential and harmonic parts live on `G_[u]^△`.
pub fn verify_corollary3(u: &Game, t: &Tolerance) -> Result<VerificationReport> {
    let game_graph = minimal_graph(u, t);
    let class_graph = class_minimal_graph(u, t);
    let triangle = class_graph.triangle_extension();
    let d = decompose(u, t)?;
    let components = component_graphs(&d, t);
    let mut clauses = membership_clauses(&d, u, t);
    clauses.push(inclusion_clause("u_N is graphical on G_u", &components.non_strategic, &game_graph)?);
    clauses.push(inclusion_clause("u_P is graphical on G_[u]^△", &components.potential, &triangle)?);
    clauses.push(inclusion_clause("u_H is graphical on G_[u]^△", &components.harmonic, &triangle)?);
    Ok(VerificationReport {
        statement: "corollary3".into(),
        clauses,
        game_graph,
        class_graph,
        reference_graph: triangle,
        components,
        decomposition: d,
    })
}

/// Checks that a pairwise-separable game decomposes into pairwise-separable
/// components on the symmetric closure of its graph.
pub fn verify_corollary4(e: &EdgeUtilities, t: &Tolerance) -> Result<VerificationReport> {
    let u = build_pairwise_game(e)?;
    let game_graph = minimal_graph(&u, t);
    let class_graph = class_minimal_graph(&u, t);
    let sym = e.graph.symmetric_closure();
    let singletons = Splitting::singletons(&sym);
    let d = decompose(&u, t)?;
    let components = component_graphs(&d, t);
    let mut clauses = membership_clauses(&d, &u, t);
    clauses.push(inclusion_clause("u_N is graphical on G", &components.non_strategic, &e.graph)?);
    clauses.push(inclusion_clause("u_P is graphical on G^↔", &components.potential, &sym)?);
    clauses.push(separability_clause("u_P is pairwise separable", &d.potential_part, &singletons, &sym, t)?);
    clauses.push(inclusion_clause("u_H is graphical on G^↔", &components.harmonic, &sym)?);
    clauses.push(separability_clause("u_H is pairwise separable", &d.harmonic_part, &singletons, &sym, t)?);
    Ok(VerificationReport {
        statement: "corollary4".into(),
        clauses,
        game_graph,
        class_graph,
        reference_graph: sym,
        components,
        decomposition: d,
    })
}

/// The 8-player topology used by the built-in `paper-8node` example.
/// Player 0 (the public-good player) has out-neighbours 1, 2 and 3.
pub fn example_graph() -> Graph {
    Graph::undirected(
        8,
        [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 5), (4, 6), (5, 6), (5, 7), (6, 7)],
    )
    .expect("valid example graph")
}

/// Binary-action game where player 0 plays a public-good game and every
/// other player a majority game on `graph`.
///
/// Action 1 means acquiring the good. Player 0 gets `1 - cost` when
/// acquiring, `1` when some out-neighbour acquires and it does not, and
/// `0` otherwise. Any other player gets the number of out-neighbours
/// playing its own action.
pub fn make_example_game(graph: &Graph, cost: f64) -> Result<Game> {
    if !cost.is_finite() {
        return Err(Error::InvalidUtilities("cost must be finite".into()));
    }
    if !(0.0 < cost && cost < 1.0) {
        log::warn!("cost {cost} is outside (0, 1); the public-good reading needs 0 < c < 1");
    }
    let n = graph.num_nodes();
    let shape = GameShape::new(vec![2; n])?;
    let mut game = Game::from_fn(shape.clone(), |i, x| {
        let own = shape.action_at(x, i);
        let neighbors = graph.out_neighbors(i);
        if i == 0 {
            if own == 1 {
                1.0 - cost
            } else if neighbors.iter().any(|&j| shape.action_at(x, j) == 1) {
                1.0
            } else {
                0.0
            }
        } else {
            neighbors.iter().filter(|&&j| shape.action_at(x, j) == own).count() as f64
        }
    })?;
    let labels = (0..n)
        .map(|i| crate::game::PlayerLabel {
            name: format!("{}", i + 1),
            actions: vec!["not acquire".into(), "acquire".into()],
        })
        .collect();
    game.set_labels(labels)?;
    Ok(game)
}
