//! Finite strategic-form games: shapes, mixed-radix profile indexing,
//! normalization and the strategic-equivalence predicates.
//!
//! Strategy profiles are stored in mixed-radix order with player 0 as the
//! fastest-varying digit, so the profile `x` lives at index
//! `sum_i x[i] * prod_{k<i} |A_k|`.

use crate::error::{Error, Result};

/// Environment variable overriding [`DEFAULT_PROFILE_LIMIT`].
pub const PROFILE_LIMIT_ENV: &str = "GAMEDEC_MAX_PROFILES";
pub const DEFAULT_PROFILE_LIMIT: usize = 1 << 24;

/// The largest profile count a [`GameShape`] may have.
pub fn profile_limit() -> usize {
    std::env::var(PROFILE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_PROFILE_LIMIT)
}

/// Player count plus per-player action counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameShape {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    profile_count: usize,
}

impl GameShape {
    pub fn new(action_counts: Vec<usize>) -> Result<Self> {
        if action_counts.is_empty() {
            return Err(Error::InvalidShape("a game needs at least one player".into()));
        }
        if let Some(i) = action_counts.iter().position(|&a| a == 0) {
            return Err(Error::InvalidShape(format!("player {i} has no actions")));
        }
        let limit = profile_limit();
        let mut strides = Vec::with_capacity(action_counts.len());
        let mut count: u128 = 1;
        for &a in &action_counts {
            strides.push(count.min(usize::MAX as u128) as usize);
            count = count.saturating_mul(a as u128);
            if count > limit as u128 {
                return Err(Error::ProfileLimit { count, limit });
            }
        }
        Ok(GameShape {
            action_counts,
            strides,
            profile_count: count as usize,
        })
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn actions(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn profile_count(&self) -> usize {
        self.profile_count
    }

    /// All players share one action count.
    pub fn is_uniform(&self) -> bool {
        self.action_counts.windows(2).all(|w| w[0] == w[1])
    }

    /// Mixed-radix index of a profile.
    pub fn index(&self, profile: &Profile) -> Result<usize> {
        if profile.0.len() != self.num_players() {
            return Err(Error::InvalidProfile(format!(
                "expected {} actions, got {}",
                self.num_players(),
                profile.0.len()
            )));
        }
        let mut idx = 0;
        for (i, &a) in profile.0.iter().enumerate() {
            if a >= self.action_counts[i] {
                return Err(Error::InvalidProfile(format!(
                    "action {a} of player {i} is out of range (player has {} actions)",
                    self.action_counts[i]
                )));
            }
            idx += a * self.strides[i];
        }
        Ok(idx)
    }

    pub fn decode(&self, index: usize) -> Result<Profile> {
        if index >= self.profile_count {
            return Err(Error::InvalidProfile(format!(
                "index {index} out of range (profile count {})",
                self.profile_count
            )));
        }
        Ok(Profile(
            (0..self.num_players()).map(|i| self.action_at(index, i)).collect(),
        ))
    }

    /// Action of `player` in the profile stored at `index`.
    #[inline]
    pub fn action_at(&self, index: usize, player: usize) -> usize {
        (index / self.strides[player]) % self.action_counts[player]
    }

    /// Index of the profile obtained from `index` by letting `player` play `action`.
    #[inline]
    pub fn with_action(&self, index: usize, player: usize, action: usize) -> usize {
        let s = self.strides[player];
        index - self.action_at(index, player) * s + action * s
    }

    /// Indices of the profiles where `player` plays action 0, one per
    /// element of the opponents' profile space, in increasing order.
    pub fn group_bases(&self, player: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.strides[player];
        let block = s * self.action_counts[player];
        (0..self.profile_count / block).flat_map(move |outer| (0..s).map(move |inner| outer * block + inner))
    }

    /// Indices of the profiles i-comparable to `index` (including itself), ordered by action.
    pub fn comparable_indices(&self, index: usize, player: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.with_action(index, player, 0);
        let s = self.strides[player];
        (0..self.action_counts[player]).map(move |a| base + a * s)
    }

    /// The set `{y : y ~_i x}`.
    pub fn i_comparable_set(&self, x: &Profile, player: usize) -> Result<Vec<Profile>> {
        if player >= self.num_players() {
            return Err(Error::InvalidProfile(format!("no player {player}")));
        }
        self.index(x)?;
        Ok((0..self.action_counts[player])
            .map(|a| {
                let mut y = x.clone();
                y.0[player] = a;
                y
            })
            .collect())
    }
}

/// One action per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn actions(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Profile {
    fn from(v: Vec<usize>) -> Self {
        Profile(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerLabel {
    pub name: String,
    pub actions: Vec<String>,
}

/// Comparison tolerance. With `rel_scale` set, `abs_tol` is multiplied by
/// the largest absolute utility of the games under test (floored at 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_scale: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-9,
            rel_scale: true,
        }
    }
}

impl Tolerance {
    pub fn absolute(abs_tol: f64) -> Self {
        Tolerance {
            abs_tol,
            rel_scale: false,
        }
    }

    pub fn relative(abs_tol: f64) -> Self {
        Tolerance {
            abs_tol,
            rel_scale: true,
        }
    }

    /// Threshold to use for the given games.
    pub fn threshold(&self, games: &[&Game]) -> f64 {
        if !self.rel_scale {
            return self.abs_tol;
        }
        let scale = games.iter().map(|g| g.max_abs()).fold(1.0, f64::max);
        self.abs_tol * scale
    }

    /// Threshold for a raw scale value (e.g. a potential).
    pub fn threshold_for_scale(&self, scale: f64) -> f64 {
        if self.rel_scale {
            self.abs_tol * scale.max(1.0)
        } else {
            self.abs_tol
        }
    }
}

/// A game `u`: one utility table per player over all strategy profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    shape: GameShape,
    utilities: Vec<Vec<f64>>,
    labels: Vec<PlayerLabel>,
}

fn default_labels(shape: &GameShape) -> Vec<PlayerLabel> {
    shape
        .action_counts()
        .iter()
        .enumerate()
        .map(|(i, &a)| PlayerLabel {
            name: format!("p{i}"),
            actions: (0..a).map(|k| k.to_string()).collect(),
        })
        .collect()
}

impl Game {
    pub fn new(shape: GameShape, utilities: Vec<Vec<f64>>) -> Result<Self> {
        let labels = default_labels(&shape);
        Self::with_labels(shape, utilities, labels)
    }

    pub fn with_labels(shape: GameShape, utilities: Vec<Vec<f64>>, labels: Vec<PlayerLabel>) -> Result<Self> {
        if utilities.len() != shape.num_players() {
            return Err(Error::InvalidUtilities(format!(
                "expected {} utility tables, got {}",
                shape.num_players(),
                utilities.len()
            )));
        }
        for (i, table) in utilities.iter().enumerate() {
            if table.len() != shape.profile_count() {
                return Err(Error::InvalidUtilities(format!(
                    "utilities[{i}]: expected length {}, got {}",
                    shape.profile_count(),
                    table.len()
                )));
            }
            if let Some(k) = table.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidUtilities(format!("utilities[{i}][{k}] is not finite")));
            }
        }
        if labels.len() != shape.num_players() {
            return Err(Error::InvalidUtilities(format!(
                "expected {} player labels, got {}",
                shape.num_players(),
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.actions.len() != shape.actions(i) {
                return Err(Error::InvalidUtilities(format!(
                    "player {i} lists {} action names but has {} actions",
                    l.actions.len(),
                    shape.actions(i)
                )));
            }
        }
        Ok(Game {
            shape,
            utilities,
            labels,
        })
    }

    pub fn zeros(shape: GameShape) -> Self {
        let utilities = vec![vec![0.0; shape.profile_count()]; shape.num_players()];
        let labels = default_labels(&shape);
        Game {
            shape,
            utilities,
            labels,
        }
    }

    /// Builds a game from `f(player, profile_index)`.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(shape: GameShape, mut f: F) -> Result<Self> {
        let utilities = (0..shape.num_players())
            .map(|i| (0..shape.profile_count()).map(|x| f(i, x)).collect())
            .collect();
        Self::new(shape, utilities)
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn num_players(&self) -> usize {
        self.shape.num_players()
    }

    pub fn labels(&self) -> &[PlayerLabel] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<PlayerLabel>) -> Result<()> {
        if labels.len() != self.num_players()
            || labels.iter().enumerate().any(|(i, l)| l.actions.len() != self.shape.actions(i))
        {
            return Err(Error::InvalidUtilities("labels do not match the game shape".into()));
        }
        self.labels = labels;
        Ok(())
    }

    pub fn utilities(&self) -> &[Vec<f64>] {
        &self.utilities
    }

    pub fn utility_table(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }

    #[inline]
    pub fn utility(&self, player: usize, index: usize) -> f64 {
        self.utilities[player][index]
    }

    pub fn utility_at(&self, player: usize, profile: &Profile) -> Result<f64> {
        Ok(self.utilities[player][self.shape.index(profile)?])
    }

    pub fn max_abs(&self) -> f64 {
        self.utilities
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference to another game of the same shape.
    pub fn max_abs_diff(&self, other: &Game) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .utilities
            .iter()
            .zip(&other.utilities)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }

    fn check_same_shape(&self, other: &Game) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    fn map_tables(&self, mut f: impl FnMut(usize, &[f64]) -> Vec<f64>) -> Game {
        Game {
            shape: self.shape.clone(),
            utilities: self.utilities.iter().enumerate().map(|(i, t)| f(i, t)).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Game {
        self.map_tables(|_, t| t.iter().map(|v| v * factor).collect())
    }

    pub fn checked_add(&self, other: &Game) -> Result<Game> {
        linear_combination(&[1.0, 1.0], &[self, other])
    }

    pub fn checked_sub(&self, other: &Game) -> Result<Game> {
        linear_combination(&[1.0, -1.0], &[self, other])
    }

    /// Per-player means over each i-comparable set, broadcast back to profiles.
    fn own_action_means(&self) -> Vec<Vec<f64>> {
        let shape = &self.shape;
        (0..shape.num_players())
            .map(|i| {
                let table = &self.utilities[i];
                let mut means = vec![0.0; table.len()];
                let count = shape.actions(i);
                let s = shape.stride(i);
                for base in shape.group_bases(i) {
                    let mean = (0..count).map(|a| table[base + a * s]).sum::<f64>() / count as f64;
                    for a in 0..count {
                        means[base + a * s] = mean;
                    }
                }
                means
            })
            .collect()
    }

    /// Largest `|sum_{y ~_i x} u_i(y)|` over players and profiles.
    pub fn normalization_violation(&self) -> f64 {
        let shape = &self.shape;
        let mut worst: f64 = 0.0;
        for i in 0..shape.num_players() {
            let table = &self.utilities[i];
            let s = shape.stride(i);
            for base in shape.group_bases(i) {
                let sum: f64 = (0..shape.actions(i)).map(|a| table[base + a * s]).sum();
                worst = worst.max(sum.abs());
            }
        }
        worst
    }

    /// Largest `|u_i(x) - u_i(y)|` over players and i-comparable pairs.
    pub fn own_action_variation(&self) -> f64 {
        let shape = &self.shape;
        let mut worst: f64 = 0.0;
        for i in 0..shape.num_players() {
            let table = &self.utilities[i];
            let s = shape.stride(i);
            for base in shape.group_bases(i) {
                let (lo, hi) = (0..shape.actions(i))
                    .map(|a| table[base + a * s])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                worst = worst.max(hi - lo);
            }
        }
        worst
    }
}

/// The normalized version `ū_i(x) = u_i(x) - (1/|A_i|) sum_{y ~_i x} u_i(y)`.
pub fn normalize(u: &Game) -> Game {
    let means = u.own_action_means();
    u.map_tables(|i, t| t.iter().zip(&means[i]).map(|(v, m)| v - m).collect())
}

/// The projection `u - ū` onto non-strategic games.
pub fn nonstrategic_part(u: &Game) -> Game {
    let means = u.own_action_means();
    u.map_tables(|i, _| means[i].clone())
}

pub fn is_normalized(u: &Game, t: &Tolerance) -> bool {
    u.normalization_violation() <= t.threshold(&[u])
}

pub fn is_non_strategic(u: &Game, t: &Tolerance) -> bool {
    u.own_action_variation() <= t.threshold(&[u])
}

/// `u - v` is non-strategic.
pub fn strategically_equivalent(u: &Game, v: &Game, t: &Tolerance) -> Result<bool> {
    let diff = u.checked_sub(v)?;
    Ok(diff.own_action_variation() <= t.threshold(&[u, v]))
}

/// Entrywise linear combination; labels are taken from the first game.
pub fn linear_combination(coeffs: &[f64], games: &[&Game]) -> Result<Game> {
    if games.is_empty() || coeffs.len() != games.len() {
        return Err(Error::EmptyCombination);
    }
    let first = games[0];
    for g in &games[1..] {
        first.check_same_shape(g)?;
    }
    let result = first.map_tables(|i, _| {
        let mut acc = vec![0.0; first.shape.profile_count()];
        for (c, g) in coeffs.iter().zip(games) {
            for (slot, v) in acc.iter_mut().zip(&g.utilities[i]) {
                *slot += c * v;
            }
        }
        acc
    });
    if result.utilities.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidUtilities("linear combination overflowed".into()));
    }
    Ok(result)
}

/// Two-player matching pennies: player 0 wins on equal actions.
pub fn matching_pennies() -> Game {
    let shape = GameShape::new(vec![2, 2]).expect("2x2 shape");
    Game::from_fn(shape.clone(), |i, x| {
        let same = shape.action_at(x, 0) == shape.action_at(x, 1);
        let u0 = if same { 1.0 } else { -1.0 };
        if i == 0 {
            u0
        } else {
            -u0
        }
    })
    .expect("finite utilities")
}

/// Two-player coordination: both players get 1 on equal actions, 0 otherwise.
pub fn coordination_game() -> Game {
    let shape = GameShape::new(vec![2, 2]).expect("2x2 shape");
    Game::from_fn(shape.clone(), |_, x| {
        if shape.action_at(x, 0) == shape.action_at(x, 1) {
            1.0
        } else {
            0.0
        }
    })
    .expect("finite utilities")
}
