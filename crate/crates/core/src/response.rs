//! The response graph on strategy profiles and the flow operators on it.
//!
//! Edges join i-comparable distinct profiles and are oriented from the
//! lower mixed-radix index to the higher one. With that orientation
//! `divergence(f)[x]` is the sum of edge values entering `x` minus those
//! leaving it, so `divergence(game_flow(u))[x]` equals the total deviation
//! gain `sum_i sum_{y ~_i x} (u_i(x) - u_i(y))` and `divergence` is the
//! adjoint of `gradient`.

use crate::exec::{fill_chunks, Execution};
use crate::game::{Game, GameShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseEdge {
    pub tail: usize,
    pub head: usize,
    pub player: usize,
}

#[derive(Debug, Clone)]
pub struct ResponseGraph {
    shape: GameShape,
    edges: Vec<ResponseEdge>,
}

impl ResponseGraph {
    pub fn new(shape: &GameShape) -> Self {
        let mut edges = Vec::with_capacity(Self::expected_edge_count(shape));
        for x in 0..shape.profile_count() {
            for i in 0..shape.num_players() {
                let a = shape.action_at(x, i);
                for b in a + 1..shape.actions(i) {
                    edges.push(ResponseEdge {
                        tail: x,
                        head: shape.with_action(x, i, b),
                        player: i,
                    });
                }
            }
        }
        ResponseGraph {
            shape: shape.clone(),
            edges,
        }
    }

    /// `|X| * sum_i (|A_i| - 1) / 2`.
    pub fn expected_edge_count(shape: &GameShape) -> usize {
        let total: usize = shape.action_counts().iter().map(|a| a - 1).sum();
        shape.profile_count() * total / 2
    }

    pub fn shape(&self) -> &GameShape {
        &self.shape
    }

    pub fn edges(&self) -> &[ResponseEdge] {
        &self.edges
    }

    /// `u_i(head) - u_i(tail)` per edge.
    pub fn flow(&self, u: &Game) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| u.utility(e.player, e.head) - u.utility(e.player, e.tail))
            .collect()
    }

    /// `phi(head) - phi(tail)` per edge.
    pub fn gradient(&self, phi: &[f64]) -> Vec<f64> {
        self.edges.iter().map(|e| phi[e.head] - phi[e.tail]).collect()
    }

    pub fn divergence(&self, flow: &[f64]) -> Vec<f64> {
        let mut div = vec![0.0; self.shape.profile_count()];
        for (e, f) in self.edges.iter().zip(flow) {
            div[e.head] += f;
            div[e.tail] -= f;
        }
        div
    }
}

/// Matrix-free `divergence(game_flow(u))`: at every profile,
/// `sum_i (|A_i| u_i(x) - sum_{y ~_i x} u_i(y))`.
pub fn deviation_totals(u: &Game, exec: Execution) -> Vec<f64> {
    let shape = u.shape();
    let mut out = vec![0.0; shape.profile_count()];
    fill_chunks(&mut out, exec, |start, chunk| {
        for (k, slot) in chunk.iter_mut().enumerate() {
            let x = start + k;
            let mut acc = 0.0;
            for i in 0..shape.num_players() {
                let table = u.utility_table(i);
                let sum: f64 = shape.comparable_indices(x, i).map(|y| table[y]).sum();
                acc += shape.actions(i) as f64 * table[x] - sum;
            }
            *slot = acc;
        }
    });
    out
}

/// Response-graph Laplacian `L phi = divergence(gradient(phi))`, matrix-free.
pub fn apply_laplacian(shape: &GameShape, phi: &[f64], out: &mut [f64], exec: Execution) {
    fill_chunks(out, exec, |start, chunk| {
        for (k, slot) in chunk.iter_mut().enumerate() {
            let x = start + k;
            let mut acc = 0.0;
            for i in 0..shape.num_players() {
                let sum: f64 = shape.comparable_indices(x, i).map(|y| phi[y]).sum();
                acc += shape.actions(i) as f64 * phi[x] - sum;
            }
            *slot = acc;
        }
    });
}
