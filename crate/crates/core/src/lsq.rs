//! Least-squares projection onto a sum of coordinate subspaces.
//!
//! Given a function `f` on a product grid and coordinate subsets
//! `S_1..S_m`, finds tables `g_k` over the coordinates in `S_k` minimizing
//! `|| f - mean(f) - sum_k g_k(x_{S_k}) ||_2`. Each table is kept at zero
//! mean and the minimum-norm minimizer is returned, which pins a unique
//! representative when the subspaces overlap.

use crate::error::Result;
use crate::exec::{dot, fill_chunks, map_indexed, norm2, Execution};
use crate::game::GameShape;
use crate::solver::{conjugate_gradient, project_zero_mean};

/// A function of the actions of a subset of players.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTable {
    /// Sorted player ids. The first listed player is the fastest-varying digit of `values`.
    pub players: Vec<usize>,
    pub values: Vec<f64>,
}

impl LocalTable {
    pub fn zeros(players: Vec<usize>, shape: &GameShape) -> Self {
        let len = players.iter().map(|&p| shape.actions(p)).product();
        LocalTable {
            players,
            values: vec![0.0; len],
        }
    }

    /// Table slot used at the global profile `x`.
    pub fn slot(&self, shape: &GameShape, x: usize) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for &p in &self.players {
            idx += shape.action_at(x, p) * stride;
            stride *= shape.actions(p);
        }
        idx
    }

    pub fn eval(&self, shape: &GameShape, x: usize) -> f64 {
        self.values[self.slot(shape, x)]
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceFit {
    /// One zero-mean table per subset, laid out over the subset's coordinates
    /// in the order given (first coordinate fastest).
    pub tables: Vec<Vec<f64>>,
    pub mean: f64,
    /// `||f - mean - sum_k g_k||_2`.
    pub residual: f64,
    pub iterations: usize,
}

struct SubsetIndex {
    map: Vec<usize>,
    len: usize,
}

fn subset_index(grid: &GameShape, subset: &[usize]) -> SubsetIndex {
    let len: usize = subset.iter().map(|&c| grid.actions(c)).product();
    let map = (0..grid.profile_count())
        .map(|x| {
            let mut idx = 0;
            let mut stride = 1;
            for &c in subset {
                idx += grid.action_at(x, c) * stride;
                stride *= grid.actions(c);
            }
            idx
        })
        .collect();
    SubsetIndex { map, len }
}

/// Projects `target` (over `grid`) onto the sum of the subspaces of
/// functions depending only on the coordinates in each subset.
pub fn fit_sum_of_subspaces(
    grid: &GameShape,
    subsets: &[Vec<usize>],
    target: &[f64],
    exec: Execution,
) -> Result<SubspaceFit> {
    let n = grid.profile_count();
    debug_assert_eq!(target.len(), n);
    let mean = target.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = target.iter().map(|v| v - mean).collect();

    let index: Vec<SubsetIndex> = subsets.iter().map(|s| subset_index(grid, s)).collect();
    let mut offsets = Vec::with_capacity(index.len() + 1);
    offsets.push(0);
    for ix in &index {
        offsets.push(offsets.last().unwrap() + ix.len);
    }
    let unknowns = *offsets.last().unwrap();

    let synthesize = |t: &[f64], out: &mut [f64]| {
        fill_chunks(out, exec, |start, chunk| {
            for (k, slot) in chunk.iter_mut().enumerate() {
                let x = start + k;
                *slot = index
                    .iter()
                    .zip(&offsets)
                    .map(|(ix, off)| t[off + ix.map[x]])
                    .sum();
            }
        });
    };
    let marginals = |f: &[f64], out: &mut [f64]| {
        let parts = map_indexed(index.len(), exec, |k| {
            let mut table = vec![0.0; index[k].len];
            for (x, &v) in f.iter().enumerate() {
                table[index[k].map[x]] += v;
            }
            table
        });
        for (k, table) in parts.into_iter().enumerate() {
            out[offsets[k]..offsets[k + 1]].copy_from_slice(&table);
        }
    };
    let project = |t: &mut [f64]| {
        for k in 0..index.len() {
            project_zero_mean(&mut t[offsets[k]..offsets[k + 1]]);
        }
    };

    let mut rhs = vec![0.0; unknowns];
    marginals(&centered, &mut rhs);
    let mut scratch = vec![0.0; n];
    let normal = |t: &[f64], out: &mut [f64]| {
        let mut s = vec![0.0; n];
        synthesize(t, &mut s);
        marginals(&s, out);
    };
    let tol = 1e-12 * (1.0 + norm2(&rhs, exec));
    let solution = if unknowns == 0 {
        None
    } else {
        Some(conjugate_gradient(normal, project, &rhs, tol, 10 * unknowns.max(10), exec)?)
    };
    let (t, iterations) = match solution {
        Some(s) => (s.x, s.iterations),
        None => (Vec::new(), 0),
    };
    if unknowns > 0 {
        synthesize(&t, &mut scratch);
    }
    let resid: Vec<f64> = centered.iter().zip(&scratch).map(|(a, b)| a - b).collect();
    let residual = dot(&resid, &resid, exec).sqrt();
    let tables = (0..index.len()).map(|k| t[offsets[k]..offsets[k + 1]].to_vec()).collect();
    Ok(SubspaceFit {
        tables,
        mean,
        residual,
        iterations,
    })
}
