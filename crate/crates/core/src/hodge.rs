//! Potential and harmonic games, potential recovery and the decomposition
//! of a game into non-strategic, normalized potential and normalized
//! harmonic components.
//!
//! The potential part is obtained by a least-squares fit of a gradient to
//! the game's flow on the response graph (see [`crate::response`]). The
//! components are then certified by direct membership checks, which is
//! enough for uniqueness because the three classes form a direct sum.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{nonstrategic_part, normalize, Game, GameShape, Tolerance};
use crate::graph::Graph;
use crate::lsq::{fit_sum_of_subspaces, LocalTable};
use crate::response::{apply_laplacian, deviation_totals, ResponseEdge, ResponseGraph};
use crate::solver::{conjugate_gradient, project_zero_mean};

/// A function on strategy profiles, stored in mixed-radix order.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
}

impl Potential {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidUtilities(format!("potential[{k}] is not finite")));
        }
        Ok(Potential { values })
    }

    pub fn for_shape(shape: &GameShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.profile_count() {
            return Err(Error::InvalidUtilities(format!(
                "potential has {} values, expected {}",
                values.len(),
                shape.profile_count()
            )));
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Same potential shifted to zero mean.
    pub fn regauged(mut self) -> Self {
        project_zero_mean(&mut self.values);
        self
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn game_flow(u: &Game) -> Vec<f64> {
    ResponseGraph::new(u.shape()).flow(u)
}

pub fn gradient(phi: &Potential, shape: &GameShape) -> Vec<f64> {
    ResponseGraph::new(shape).gradient(phi.values())
}

pub fn divergence(flow: &[f64], shape: &GameShape) -> Vec<f64> {
    ResponseGraph::new(shape).divergence(flow)
}

/// Largest `|sum_i sum_{y ~_i x} [u_i(x) - u_i(y)]|` over profiles.
pub fn harmonic_defect(u: &Game) -> f64 {
    deviation_totals(u, Execution::default())
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

pub fn is_harmonic(u: &Game, t: &Tolerance) -> bool {
    harmonic_defect(u) <= t.threshold(&[u])
}

fn weighted_sum_defect(u: &Game, weighted: bool) -> f64 {
    let shape = u.shape();
    (0..shape.profile_count())
        .map(|x| {
            (0..shape.num_players())
                .map(|i| {
                    let w = if weighted { shape.actions(i) as f64 } else { 1.0 };
                    w * u.utility(i, x)
                })
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max)
}

/// Harmonicity test for normalized games: `sum_i |A_i| u_i(x) = 0` everywhere.
pub fn harmonic_normalized_check(u: &Game, t: &Tolerance) -> Result<bool> {
    let violation = u.normalization_violation();
    if violation > t.threshold(&[u]) {
        return Err(Error::NotNormalized { violation });
    }
    Ok(weighted_sum_defect(u, true) <= t.threshold(&[u]))
}

pub fn is_zero_sum(u: &Game, t: &Tolerance) -> bool {
    weighted_sum_defect(u, false) <= t.threshold(&[u])
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialCheck {
    Potential(Potential),
    NotPotential { edge: ResponseEdge, violation: f64 },
}

impl PotentialCheck {
    pub fn potential(&self) -> Option<&Potential> {
        match self {
            PotentialCheck::Potential(p) => Some(p),
            PotentialCheck::NotPotential { .. } => None,
        }
    }

    pub fn is_potential(&self) -> bool {
        matches!(self, PotentialCheck::Potential(_))
    }
}

/// Worst `|u_i(y) - u_i(x) - (phi(y) - phi(x))|` over response-graph edges.
pub fn potential_violation(u: &Game, phi: &[f64]) -> (f64, Option<ResponseEdge>) {
    let shape = u.shape();
    let mut worst = 0.0;
    let mut at = None;
    for x in 0..shape.profile_count() {
        for i in 0..shape.num_players() {
            for b in shape.action_at(x, i) + 1..shape.actions(i) {
                let y = shape.with_action(x, i, b);
                let v = ((u.utility(i, y) - u.utility(i, x)) - (phi[y] - phi[x])).abs();
                if at.is_none() || v > worst {
                    worst = v;
                    at = Some(ResponseEdge {
                        tail: x,
                        head: y,
                        player: i,
                    });
                }
            }
        }
    }
    (worst, at)
}

/// Integrates the game's flow along a spanning tree of the response graph
/// rooted at profile 0 and checks every remaining edge.
///
/// The tree links each profile to the one obtained by resetting its
/// lowest-numbered non-zero action to 0, which always has a smaller index.
pub fn exact_potential(u: &Game, t: &Tolerance) -> PotentialCheck {
    let shape = u.shape();
    let n = shape.profile_count();
    let mut phi = vec![0.0; n];
    for x in 1..n {
        let i = (0..shape.num_players())
            .find(|&i| shape.action_at(x, i) != 0)
            .expect("non-zero index has a non-zero action");
        let parent = shape.with_action(x, i, 0);
        phi[x] = phi[parent] + u.utility(i, x) - u.utility(i, parent);
    }
    let (violation, edge) = potential_violation(u, &phi);
    match edge {
        Some(edge) if violation > t.threshold(&[u]) => PotentialCheck::NotPotential { edge, violation },
        _ => PotentialCheck::Potential(Potential { values: phi }.regauged()),
    }
}

fn flow_norm(u: &Game) -> f64 {
    let shape = u.shape();
    let mut acc = 0.0;
    for i in 0..shape.num_players() {
        let table = u.utility_table(i);
        let s = shape.stride(i);
        for base in shape.group_bases(i) {
            for a in 0..shape.actions(i) {
                for b in a + 1..shape.actions(i) {
                    let d = table[base + b * s] - table[base + a * s];
                    acc += d * d;
                }
            }
        }
    }
    acc.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFit {
    pub potential: Potential,
    pub iterations: usize,
    /// 2-norm of `divergence(flow - gradient(phi))`.
    pub residual: f64,
}

/// Zero-mean least-squares potential of a normalized game.
pub fn fit_potential(u_norm: &Game) -> Result<Potential> {
    fit_potential_with(u_norm, Execution::default()).map(|f| f.potential)
}

/// Solves `L phi = divergence(game_flow(u))` on the zero-mean subspace by
/// conjugate gradients, where `L` is the response-graph Laplacian.
pub fn fit_potential_with(u_norm: &Game, exec: Execution) -> Result<PotentialFit> {
    let violation = u_norm.normalization_violation();
    if violation > Tolerance::default().threshold(&[u_norm]) {
        return Err(Error::NotNormalized { violation });
    }
    let shape = u_norm.shape();
    let rhs = deviation_totals(u_norm, exec);
    let tol = 1e-12 * (1.0 + flow_norm(u_norm));
    let max_iter = 10 * shape.profile_count();
    let solution = conjugate_gradient(
        |v, out| apply_laplacian(shape, v, out, exec),
        project_zero_mean,
        &rhs,
        tol,
        max_iter,
        exec,
    )?;
    Ok(PotentialFit {
        potential: Potential::new(solution.x)?.regauged(),
        iterations: solution.iterations,
        residual: solution.residual,
    })
}

/// The normalized game whose unilateral differences are those of `phi`:
/// `u_i(x) = phi(x) - (1/|A_i|) sum_{y ~_i x} phi(y)`.
pub fn potential_component(phi: &Potential, shape: &GameShape) -> Result<Game> {
    if phi.values.len() != shape.profile_count() {
        return Err(Error::ShapeMismatch);
    }
    let per_player = Game::new(shape.clone(), vec![phi.values.clone(); shape.num_players()])?;
    Ok(normalize(&per_player))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// `max |u - (u_N + u_P + u_H)|`.
    pub sum_check: f64,
    /// Largest own-action variation of `u_N`.
    pub non_strategic_check: f64,
    /// Largest normalization violation of `u_P` and `u_H`.
    pub normalization_check: f64,
    /// Worst disagreement between the flow of `u_P` and the gradient of the potential.
    pub potential_check: f64,
    /// Largest total deviation gain of `u_H`.
    pub harmonic_check: f64,
    pub solver_iterations: usize,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.sum_check,
            self.non_strategic_check,
            self.normalization_check,
            self.potential_check,
            self.harmonic_check,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub non_strategic: Game,
    pub potential_part: Game,
    pub harmonic_part: Game,
    pub potential: Potential,
    pub residuals: Residuals,
}

impl Decomposition {
    /// All membership checks hold within the tolerance, scaled to `u`.
    pub fn is_certified(&self, u: &Game, t: &Tolerance) -> bool {
        self.residuals.max() <= t.threshold(&[u])
    }

    pub fn components(&self) -> [&Game; 3] {
        [&self.non_strategic, &self.potential_part, &self.harmonic_part]
    }
}

pub fn decompose(u: &Game, t: &Tolerance) -> Result<Decomposition> {
    decompose_with(u, t, Execution::default())
}

pub fn decompose_with(u: &Game, t: &Tolerance, exec: Execution) -> Result<Decomposition> {
    let non_strategic = nonstrategic_part(u);
    let normalized = normalize(u);
    let fit = fit_potential_with(&normalized, exec)?;
    let potential_part = potential_component(&fit.potential, u.shape())?;
    let harmonic_part = normalized.checked_sub(&potential_part)?;

    let rebuilt = crate::game::linear_combination(
        &[1.0, 1.0, 1.0],
        &[&non_strategic, &potential_part, &harmonic_part],
    )?;
    let residuals = Residuals {
        sum_check: u.max_abs_diff(&rebuilt)?,
        non_strategic_check: non_strategic.own_action_variation(),
        normalization_check: potential_part
            .normalization_violation()
            .max(harmonic_part.normalization_violation()),
        potential_check: potential_violation(&potential_part, fit.potential.values()).0,
        harmonic_check: deviation_totals(&harmonic_part, exec)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs())),
        solver_iterations: fit.iterations,
    };
    let d = Decomposition {
        non_strategic,
        potential_part,
        harmonic_part,
        potential: fit.potential,
        residuals,
    };
    if !d.is_certified(u, t) {
        log::warn!("decomposition residuals {:?} exceed tolerance", d.residuals);
    }
    Ok(d)
}

/// Local potentials, one table per maximal clique.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueDecomposition {
    pub tables: Vec<LocalTable>,
    pub residual: f64,
}

impl CliqueDecomposition {
    pub fn evaluate(&self, shape: &GameShape, x: usize) -> f64 {
        self.tables.iter().map(|t| t.eval(shape, x)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliqueOutcome {
    Feasible(CliqueDecomposition),
    Infeasible { residual: f64 },
}

/// Writes `phi` as a sum of functions of the maximal cliques of `g`.
///
/// Tables are zero-mean except the lexicographically first one, which
/// also carries the mean of `phi`. The instance is infeasible when the
/// projection residual exceeds `abs_tol * (1 + ||phi||)`.
pub fn clique_potential_decomposition(
    phi: &Potential,
    shape: &GameShape,
    g: &Graph,
    t: &Tolerance,
) -> Result<CliqueOutcome> {
    if g.num_nodes() != shape.num_players() {
        return Err(Error::NodeCountMismatch {
            left: shape.num_players(),
            right: g.num_nodes(),
        });
    }
    if phi.values.len() != shape.profile_count() {
        return Err(Error::ShapeMismatch);
    }
    let cliques = g.maximal_cliques()?;
    let fit = fit_sum_of_subspaces(shape, &cliques, phi.values(), Execution::default())?;
    if fit.residual > t.abs_tol * (1.0 + phi.norm()) {
        return Ok(CliqueOutcome::Infeasible { residual: fit.residual });
    }
    let mut tables: Vec<LocalTable> = cliques
        .into_iter()
        .zip(fit.tables)
        .map(|(players, values)| LocalTable { players, values })
        .collect();
    if let Some(first) = tables.first_mut() {
        first.values.iter_mut().for_each(|v| *v += fit.mean);
    }
    Ok(CliqueOutcome::Feasible(CliqueDecomposition {
        tables,
        residual: fit.residual,
    }))
}

/// Decomposes a batch of games, possibly in parallel; order is preserved.
pub fn decompose_batch(games: &[Game], t: &Tolerance, exec: Execution) -> Vec<Result<Decomposition>> {
    map_indexed(games.len(), exec, |k| decompose_with(&games[k], t, Execution::Sequential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{coordination_game, is_non_strategic, is_normalized, matching_pennies};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn cross_game() -> Game {
        let s = GameShape::new(vec![2, 2]).unwrap();
        Game::from_fn(s.clone(), |i, x| s.action_at(x, 1 - i) as f64).unwrap()
    }

    #[test]
    fn flow_examples() {
        let s = GameShape::new(vec![2, 3]).unwrap();
        let constant = Game::from_fn(s, |_, _| 2.0).unwrap();
        assert!(game_flow(&constant).iter().all(|&f| f == 0.0));
        assert!(game_flow(&cross_game()).iter().all(|&f| f == 0.0));
    }

    #[test]
    fn gradient_examples() {
        let s = GameShape::new(vec![2, 2]).unwrap();
        let constant = Potential::new(vec![3.0; 4]).unwrap();
        assert!(gradient(&constant, &s).iter().all(|&f| f == 0.0));
        let phi = Potential::new(vec![0.5, -0.5, -0.5, 0.5]).unwrap();
        assert!(gradient(&phi, &s).iter().all(|f| (f.abs() - 1.0).abs() < 1e-15));

        let psi = Potential::new(vec![1.0, 2.0, -1.0, 0.0]).unwrap();
        let combo = Potential::new(
            phi.values().iter().zip(psi.values()).map(|(a, b)| 2.0 * a - 3.0 * b).collect(),
        )
        .unwrap();
        let lhs = gradient(&combo, &s);
        let rhs: Vec<f64> = gradient(&phi, &s)
            .iter()
            .zip(gradient(&psi, &s))
            .map(|(a, b)| 2.0 * a - 3.0 * b)
            .collect();
        assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn divergence_matches_deviation_sum() {
        let coord = coordination_game();
        let div = divergence(&game_flow(&coord), coord.shape());
        // at (H,H) each player gains 1 over the single deviation
        assert_eq!(div[0], 2.0);
        assert!(divergence(&[0.0; 4], coord.shape()).iter().all(|&d| d == 0.0));
    }

    #[test]
    fn harmonic_examples() {
        let t = Tolerance::default();
        assert!(is_harmonic(&matching_pennies(), &t));
        assert!(!is_harmonic(&coordination_game(), &t));
        assert!(is_harmonic(&cross_game(), &t));

        assert!(harmonic_normalized_check(&matching_pennies(), &t).unwrap());
        assert!(!harmonic_normalized_check(&normalize(&coordination_game()), &t).unwrap());
        assert!(harmonic_normalized_check(&Game::zeros(GameShape::new(vec![2, 3]).unwrap()), &t).unwrap());
        assert!(matches!(
            harmonic_normalized_check(&coordination_game(), &t),
            Err(Error::NotNormalized { .. })
        ));

        assert!(is_zero_sum(&matching_pennies(), &t));
        assert!(!is_zero_sum(&coordination_game(), &t));
        assert!(is_zero_sum(&Game::zeros(GameShape::new(vec![3]).unwrap()), &t));
    }

    #[test]
    fn exact_potential_examples() {
        let t = Tolerance::default();
        let phi = exact_potential(&coordination_game(), &t);
        assert!(close(phi.potential().unwrap().values(), &[0.5, -0.5, -0.5, 0.5], 1e-12));
        match exact_potential(&matching_pennies(), &t) {
            PotentialCheck::NotPotential { violation, .. } => assert!(violation > 1.0),
            other => panic!("expected failure, got {other:?}"),
        }
        let phi = exact_potential(&cross_game(), &t);
        assert!(phi.potential().unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fit_potential_examples() {
        let coord = normalize(&coordination_game());
        let phi = fit_potential(&coord).unwrap();
        assert!(close(phi.values(), &[0.5, -0.5, -0.5, 0.5], 1e-12));
        let phi = fit_potential(&matching_pennies()).unwrap();
        assert!(phi.values().iter().all(|v| v.abs() < 1e-15));
        assert!(matches!(
            fit_potential(&coordination_game()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn potential_component_examples() {
        let s = GameShape::new(vec![2, 2]).unwrap();
        let constant = potential_component(&Potential::new(vec![4.0; 4]).unwrap(), &s).unwrap();
        assert_eq!(constant.max_abs(), 0.0);
        let phi = Potential::new(vec![0.5, -0.5, -0.5, 0.5]).unwrap();
        let u = potential_component(&phi, &s).unwrap();
        assert!(u.max_abs_diff(&normalize(&coordination_game())).unwrap() < 1e-15);
    }

    #[test]
    fn decompose_examples() {
        let t = Tolerance::default();
        let ns = cross_game();
        let d = decompose(&ns, &t).unwrap();
        assert_eq!(d.non_strategic, ns);
        assert!(d.potential_part.max_abs() < 1e-12 && d.harmonic_part.max_abs() < 1e-12);

        let mp = matching_pennies();
        let d = decompose(&mp, &t).unwrap();
        assert!(d.non_strategic.max_abs() < 1e-12 && d.potential_part.max_abs() < 1e-12);
        assert!(d.harmonic_part.max_abs_diff(&mp).unwrap() < 1e-12);

        let coord = coordination_game();
        let d = decompose(&coord, &t).unwrap();
        assert!(d.non_strategic.utilities().iter().flatten().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!(d.potential_part.max_abs_diff(&normalize(&coord)).unwrap() < 1e-12);
        assert!(d.harmonic_part.max_abs() < 1e-12);
        assert!(d.is_certified(&coord, &t));
        assert!(is_non_strategic(&d.non_strategic, &t));
        assert!(is_normalized(&d.harmonic_part, &t));
    }

    #[test]
    fn sequential_and_parallel_decompositions_match() {
        let s = GameShape::new(vec![2, 3, 2]).unwrap();
        let u = Game::from_fn(s, |i, x| (((x + 1) * (i + 3) * 37) % 17) as f64 - 8.0).unwrap();
        let t = Tolerance::default();
        let a = decompose_with(&u, &t, Execution::Sequential).unwrap();
        let b = decompose_with(&u, &t, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clique_examples() {
        let t = Tolerance::default();
        let s = GameShape::new(vec![2, 2, 2]).unwrap();
        let path = Graph::undirected(3, [(0, 1), (1, 2)]).unwrap();
        let bit = |x: usize, i: usize| s.action_at(x, i) as f64;

        let phi = Potential::new((0..8).map(|x| bit(x, 0) * bit(x, 1) + bit(x, 1) * bit(x, 2)).collect()).unwrap();
        match clique_potential_decomposition(&phi, &s, &path, &t).unwrap() {
            CliqueOutcome::Feasible(d) => {
                assert_eq!(d.tables.len(), 2);
                assert!(d.residual < 1e-10);
                for x in 0..8 {
                    assert!((d.evaluate(&s, x) - phi.values()[x]).abs() < 1e-10);
                }
                assert!(d.tables[1].values.iter().sum::<f64>().abs() < 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }

        let phi = Potential::new((0..8).map(|x| bit(x, 0) + 2.0 * bit(x, 2) * bit(x, 1) - 1.0).collect())
            .unwrap()
            .regauged();
        match clique_potential_decomposition(&phi, &s, &Graph::complete(3), &t).unwrap() {
            CliqueOutcome::Feasible(d) => {
                assert_eq!(d.tables.len(), 1);
                assert!(close(&d.tables[0].values, phi.values(), 1e-12));
            }
            other => panic!("expected feasible, got {other:?}"),
        }

        let phi = Potential::new((0..8).map(|x| bit(x, 0) * bit(x, 2)).collect()).unwrap();
        assert!(matches!(
            clique_potential_decomposition(&phi, &s, &path, &t).unwrap(),
            CliqueOutcome::Infeasible { .. }
        ));
        let directed = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(
            clique_potential_decomposition(&phi, &s, &directed, &t),
            Err(Error::NotSymmetric)
        );
    }
}
