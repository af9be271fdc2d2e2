//! Execution policy for the data-parallel inner loops.
//!
//! Every parallel loop here writes into disjoint output slots or reduces
//! over fixed-size chunks summed in order, so results are bit-identical
//! between [`Execution::Sequential`] and [`Execution::Parallel`] and do
//! not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by chunked fills and reductions.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise
    /// falls back to sequential execution.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fills `out` chunk by chunk; `f` receives the offset of the chunk.
pub fn fill_chunks<F>(out: &mut [f64], exec: Execution, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() > CHUNK {
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(k, chunk)| f(k * CHUNK, chunk));
        return;
    }
    let _ = exec;
    for (k, chunk) in out.chunks_mut(CHUNK).enumerate() {
        f(k * CHUNK, chunk);
    }
}

/// Sums `f(start, end)` over consecutive chunks of `0..n` in a fixed order.
pub fn chunked_sum<F>(n: usize, exec: Execution, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map_indexed(chunks, exec, |k| f(k * CHUNK, ((k + 1) * CHUNK).min(n)));
    partial.into_iter().sum()
}

pub fn dot(a: &[f64], b: &[f64], exec: Execution) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    chunked_sum(a.len(), exec, |s, e| {
        a[s..e].iter().zip(&b[s..e]).map(|(x, y)| x * y).sum()
    })
}

pub fn norm2(a: &[f64], exec: Execution) -> f64 {
    dot(a, a, exec).sqrt()
}
