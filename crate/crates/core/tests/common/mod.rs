//! Brute-force oracles shared by the integration tests. These work from
//! the definitions on explicit profile vectors and avoid the library's
//! response-graph, solver and projection code paths.

#![allow(dead_code)]

use gamedec::{Game, GameShape, Graph};

/// Every profile as an explicit action vector, in mixed-radix order.
pub fn all_profiles(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in counts {
        out = (0..c)
            .flat_map(|a| {
                out.iter().map(move |p| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn index_of(counts: &[usize], p: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for (a, c) in p.iter().zip(counts) {
        idx += a * stride;
        stride *= c;
    }
    idx
}

pub fn u_at(g: &Game, i: usize, p: &[usize]) -> f64 {
    g.utility(i, index_of(g.shape().action_counts(), p))
}

/// Exact potential test: zero circulation around every elementary
/// 4-cycle formed by two different players deviating.
pub fn four_cycle_potential_oracle(g: &Game, tol: f64) -> bool {
    let counts = g.shape().action_counts().to_vec();
    let n = counts.len();
    for x in all_profiles(&counts) {
        for i in 0..n {
            for j in i + 1..n {
                for a in 0..counts[i] {
                    for b in 0..counts[j] {
                        if a == x[i] || b == x[j] {
                            continue;
                        }
                        let mut y = x.clone();
                        y[i] = a;
                        let mut z = y.clone();
                        z[j] = b;
                        let mut w = x.clone();
                        w[j] = b;
                        let circ = (u_at(g, i, &y) - u_at(g, i, &x))
                            + (u_at(g, j, &z) - u_at(g, j, &y))
                            + (u_at(g, i, &w) - u_at(g, i, &z))
                            + (u_at(g, j, &x) - u_at(g, j, &w));
                        if circ.abs() > tol {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// `sum_i sum_{y ~_i x} [u_i(x) - u_i(y)]` at every profile.
pub fn deviation_sums(g: &Game) -> Vec<f64> {
    let counts = g.shape().action_counts().to_vec();
    all_profiles(&counts)
        .into_iter()
        .map(|x| {
            let mut total = 0.0;
            for i in 0..counts.len() {
                for a in 0..counts[i] {
                    let mut y = x.clone();
                    y[i] = a;
                    total += u_at(g, i, &x) - u_at(g, i, &y);
                }
            }
            total
        })
        .collect()
}

/// Minimal graph from the definition: `(i, j)` whenever changing `x_j`
/// alone changes `u_i` by more than `tol`.
pub fn minimal_graph_oracle(g: &Game, tol: f64) -> Graph {
    let counts = g.shape().action_counts().to_vec();
    let n = counts.len();
    let mut out = Graph::empty(n);
    for x in all_profiles(&counts) {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for b in 0..counts[j] {
                    let mut y = x.clone();
                    y[j] = b;
                    if (u_at(g, i, &x) - u_at(g, i, &y)).abs() > tol {
                        out.add_edge(i, j).unwrap();
                    }
                }
            }
        }
    }
    out
}

/// Maximal cliques by enumerating every node subset.
pub fn brute_force_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let is_clique = |m: u32| {
        (0..n).all(|i| m & (1 << i) == 0 || (0..n).all(|j| j == i || m & (1 << j) == 0 || g.has_edge(i, j)))
    };
    let cliques: Vec<u32> = (1u32..(1 << n)).filter(|&m| is_clique(m)).collect();
    let mut maximal: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|&&m| !cliques.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    maximal.sort();
    maximal
}

/// Rank of a dense matrix by Gaussian elimination with partial pivoting.
pub fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for k in r + 1..rows.len() {
            let f = rows[k][c] / pivot[c];
            for (dst, src) in rows[k][c..].iter_mut().zip(&pivot[c..]) {
                *dst -= f * src;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Indicator basis of the functions of the coordinates in `subset`.
pub fn subset_indicators(counts: &[usize], subset: &[usize]) -> Vec<Vec<f64>> {
    let profiles = all_profiles(counts);
    let sub_counts: Vec<usize> = subset.iter().map(|&c| counts[c]).collect();
    all_profiles(&sub_counts)
        .into_iter()
        .map(|target| {
            profiles
                .iter()
                .map(|x| {
                    if subset.iter().zip(&target).all(|(&c, &a)| x[c] == a) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Whether `f` lies in the span of functions of the given subsets.
pub fn in_subset_span(counts: &[usize], subsets: &[Vec<usize>], f: &[f64]) -> bool {
    let basis: Vec<Vec<f64>> = subsets.iter().flat_map(|s| subset_indicators(counts, s)).collect();
    let base_rank = rank(basis.clone(), 1e-9);
    let mut with_f = basis;
    with_f.push(f.to_vec());
    rank(with_f, 1e-9) == base_rank
}

pub fn shape(counts: &[usize]) -> GameShape {
    GameShape::new(counts.to_vec()).unwrap()
}

/// Integer-valued random game from a simple LCG, for exact arithmetic checks.
pub fn integer_game(counts: &[usize], seed: u64, range: i64) -> Game {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    Game::from_fn(shape(counts), |_, _| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as i64 % (2 * range + 1) - range) as f64
    })
    .unwrap()
}
