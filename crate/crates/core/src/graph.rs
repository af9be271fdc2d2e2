//! Directed graphs on the player set, splittings, the extensions
//! `G^↔`, `G^△`, `G^S`, minimal graphs of games and maximal cliques.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{normalize, Game, Tolerance};

/// A simple directed graph without self-loops. Undirected graphs are
/// symmetric edge sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    out: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            out: vec![BTreeSet::new(); num_nodes],
        }
    }

    pub fn complete(num_nodes: usize) -> Self {
        Graph {
            out: (0..num_nodes)
                .map(|i| (0..num_nodes).filter(|&j| j != i).collect())
                .collect(),
        }
    }

    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(num_nodes);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Symmetric graph from a list of unordered pairs.
    pub fn undirected(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(num_nodes);
        for (i, j) in edges {
            g.add_edge(i, j)?;
            g.add_edge(j, i)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.num_nodes();
        if i >= n || j >= n {
            return Err(Error::InvalidGraph(format!("edge ({i}, {j}) out of range for {n} nodes")));
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
        }
        self.out[i].insert(j);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        self.out.get_mut(i).is_some_and(|s| s.remove(&j))
    }

    pub fn num_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out.iter().map(BTreeSet::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out.get(i).is_some_and(|s| s.contains(&j))
    }

    /// Open out-neighbourhood `N_i`.
    pub fn out_neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.out[i]
    }

    /// Closed out-neighbourhood `N_i ∪ {i}`, sorted.
    pub fn closed_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.out[i].iter().copied().collect();
        let pos = v.partition_point(|&j| j < i);
        v.insert(pos, i);
        v
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(i, j)| self.has_edge(j, i))
    }

    fn check_nodes(&self, other: &Graph) -> Result<()> {
        if self.num_nodes() != other.num_nodes() {
            return Err(Error::NodeCountMismatch {
                left: self.num_nodes(),
                right: other.num_nodes(),
            });
        }
        Ok(())
    }

    pub fn is_subgraph(&self, other: &Graph) -> Result<bool> {
        self.check_nodes(other)?;
        Ok(self.edges().all(|(i, j)| other.has_edge(i, j)))
    }

    pub fn intersection(&self, other: &Graph) -> Result<Graph> {
        self.check_nodes(other)?;
        Ok(Graph {
            out: self
                .out
                .iter()
                .zip(&other.out)
                .map(|(a, b)| a.intersection(b).copied().collect())
                .collect(),
        })
    }

    pub fn union(&self, other: &Graph) -> Result<Graph> {
        self.check_nodes(other)?;
        Ok(Graph {
            out: self
                .out
                .iter()
                .zip(&other.out)
                .map(|(a, b)| a.union(b).copied().collect())
                .collect(),
        })
    }

    /// Edges of `self` not present in `other`.
    pub fn difference(&self, other: &Graph) -> Result<Vec<(usize, usize)>> {
        self.check_nodes(other)?;
        Ok(self.edges().filter(|&(i, j)| !other.has_edge(i, j)).collect())
    }

    /// `G^↔`: every link made undirected.
    pub fn symmetric_closure(&self) -> Graph {
        let mut g = self.clone();
        for (i, j) in self.edges() {
            g.out[j].insert(i);
        }
        g
    }

    fn link_group(&mut self, group: &BTreeSet<usize>) {
        for &j in group {
            for &l in group {
                if j != l {
                    self.out[j].insert(l);
                }
            }
        }
    }

    /// `G^△`: the symmetric closure plus links among the out-neighbours of every node.
    pub fn triangle_extension(&self) -> Graph {
        let mut g = self.symmetric_closure();
        for s in &self.out {
            g.link_group(s);
        }
        g
    }

    /// `G^S`: the symmetric closure plus links within every group of the splitting.
    pub fn splitting_extension(&self, s: &Splitting) -> Result<Graph> {
        s.validate(self)?;
        let mut g = self.symmetric_closure();
        for groups in &s.groups {
            for group in groups {
                g.link_group(group);
            }
        }
        Ok(g)
    }

    /// Inclusion-maximal cliques of a symmetric graph; each clique sorted,
    /// the list sorted lexicographically. Isolated nodes give singletons.
    pub fn maximal_cliques(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let n = self.num_nodes();
        if n > 64 {
            return Err(Error::TooManyNodes(n));
        }
        let adj: Vec<u64> = self
            .out
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &j| m | (1u64 << j)))
            .collect();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut found = Vec::new();
        bron_kerbosch(&adj, 0, all, 0, &mut found);
        let mut cliques: Vec<Vec<usize>> = found.into_iter().map(bits_to_nodes).collect();
        cliques.sort();
        Ok(cliques)
    }

    /// Graphviz text. Symmetric graphs are written as `graph` with one edge
    /// per unordered pair, others as `digraph`.
    pub fn to_dot(&self, name: &str) -> String {
        self.to_dot_labeled(name, None)
    }

    pub fn to_dot_labeled(&self, name: &str, labels: Option<&[String]>) -> String {
        let symmetric = self.is_symmetric();
        let (kind, arrow) = if symmetric { ("graph", "--") } else { ("digraph", "->") };
        let mut out = String::new();
        let _ = writeln!(out, "{kind} {name} {{");
        for i in 0..self.num_nodes() {
            match labels.and_then(|l| l.get(i)) {
                Some(label) => {
                    let _ = writeln!(out, "  {i} [label=\"{}\"];", label.replace('"', "\\\""));
                }
                None => {
                    let _ = writeln!(out, "  {i};");
                }
            }
        }
        for (i, j) in self.edges() {
            if symmetric && j < i {
                continue;
            }
            let _ = writeln!(out, "  {i} {arrow} {j};");
        }
        out.push_str("}\n");
        out
    }
}

fn bits_to_nodes(mut bits: u64) -> Vec<usize> {
    let mut v = Vec::with_capacity(bits.count_ones() as usize);
    while bits != 0 {
        v.push(bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    v
}

// Bron–Kerbosch with Tomita pivoting on bitmasks.
fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = bits_to_nodes(p | x)
        .into_iter()
        .max_by_key(|&u| (p & adj[u]).count_ones())
        .expect("p | x is nonempty");
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        candidates &= !bit;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], out);
        p &= !bit;
        x |= bit;
    }
}

/// Per-player covering of the open out-neighbourhood by groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    groups: Vec<Vec<BTreeSet<usize>>>,
}

impl Splitting {
    pub fn new(groups: Vec<Vec<BTreeSet<usize>>>) -> Self {
        Splitting { groups }
    }

    pub fn from_lists(groups: Vec<Vec<Vec<usize>>>) -> Self {
        Splitting {
            groups: groups
                .into_iter()
                .map(|gs| gs.into_iter().map(|g| g.into_iter().collect()).collect())
                .collect(),
        }
    }

    /// Every neighbour in its own group (the pairwise case).
    pub fn singletons(g: &Graph) -> Self {
        Splitting {
            groups: (0..g.num_nodes())
                .map(|i| g.out_neighbors(i).iter().map(|&j| BTreeSet::from([j])).collect())
                .collect(),
        }
    }

    /// One group per player holding the whole out-neighbourhood.
    pub fn whole(g: &Graph) -> Self {
        Splitting {
            groups: (0..g.num_nodes())
                .map(|i| {
                    let n = g.out_neighbors(i);
                    if n.is_empty() {
                        Vec::new()
                    } else {
                        vec![n.clone()]
                    }
                })
                .collect(),
        }
    }

    pub fn groups(&self, player: usize) -> &[BTreeSet<usize>] {
        &self.groups[player]
    }

    pub fn num_players(&self) -> usize {
        self.groups.len()
    }

    pub fn to_lists(&self) -> Vec<Vec<Vec<usize>>> {
        self.groups
            .iter()
            .map(|gs| gs.iter().map(|g| g.iter().copied().collect()).collect())
            .collect()
    }

    /// Checks that the groups of each player cover exactly `N_i` of `g`
    /// and never contain the player itself. Overlaps are allowed.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.groups.len() != g.num_nodes() {
            return Err(Error::InvalidSplitting(format!(
                "splitting has {} players, graph has {} nodes",
                self.groups.len(),
                g.num_nodes()
            )));
        }
        for (i, groups) in self.groups.iter().enumerate() {
            let mut union = BTreeSet::new();
            for group in groups {
                if group.contains(&i) {
                    return Err(Error::InvalidSplitting(format!("a group of player {i} contains {i}")));
                }
                union.extend(group.iter().copied());
            }
            if &union != g.out_neighbors(i) {
                return Err(Error::InvalidSplitting(format!(
                    "groups of player {i} cover {:?}, expected N_{i} = {:?}",
                    union,
                    g.out_neighbors(i)
                )));
            }
        }
        Ok(())
    }

    /// Restricts every group to the out-neighbourhoods of a subgraph,
    /// dropping groups that become empty. Fails if `sub` has a neighbour
    /// that no group covers.
    pub fn restricted_to(&self, sub: &Graph) -> Result<Splitting> {
        if self.groups.len() != sub.num_nodes() {
            return Err(Error::InvalidSplitting("splitting and graph sizes differ".into()));
        }
        let groups: Vec<Vec<BTreeSet<usize>>> = self
            .groups
            .iter()
            .enumerate()
            .map(|(i, gs)| {
                let mut kept: Vec<BTreeSet<usize>> = gs
                    .iter()
                    .map(|g| g.intersection(sub.out_neighbors(i)).copied().collect::<BTreeSet<_>>())
                    .filter(|g| !g.is_empty())
                    .collect();
                kept.dedup();
                kept
            })
            .collect();
        let s = Splitting { groups };
        s.validate(sub)?;
        Ok(s)
    }

    /// The splitting of `G^S` induced by this splitting of `g`: player `k`
    /// keeps its own groups and, for every group `S_i^h` containing `k`,
    /// gains the group `({i} ∪ S_i^h) \ {k}`.
    pub fn lifted(&self, g: &Graph) -> Result<Splitting> {
        self.validate(g)?;
        let mut groups = self.groups.clone();
        for (i, gs) in self.groups.iter().enumerate() {
            for group in gs {
                for &k in group {
                    let mut lifted: BTreeSet<usize> = group.iter().copied().filter(|&l| l != k).collect();
                    lifted.insert(i);
                    if !groups[k].contains(&lifted) {
                        groups[k].push(lifted);
                    }
                }
            }
        }
        Ok(Splitting { groups })
    }
}

/// Largest change in `u_i` caused by player `j` alone changing action.
pub fn dependence(u: &Game, i: usize, j: usize) -> f64 {
    let shape = u.shape();
    let table = u.utility_table(i);
    let s = shape.stride(j);
    let mut worst: f64 = 0.0;
    for base in shape.group_bases(j) {
        let first = table[base];
        for a in 1..shape.actions(j) {
            worst = worst.max((table[base + a * s] - first).abs());
        }
    }
    worst
}

/// The minimal graph `G_u`: `(i, j)` is an edge iff `u_i` changes by more
/// than the tolerance when `j` alone deviates.
pub fn minimal_graph(u: &Game, t: &Tolerance) -> Graph {
    minimal_graph_with(u, t, Execution::default())
}

pub fn minimal_graph_with(u: &Game, t: &Tolerance, exec: Execution) -> Graph {
    let n = u.num_players();
    let tol = t.threshold(&[u]);
    let flags = map_indexed(n * n, exec, |k| {
        let (i, j) = (k / n, k % n);
        i != j && dependence(u, i, j) > tol
    });
    let mut g = Graph::empty(n);
    for (k, _) in flags.iter().enumerate().filter(|(_, &f)| f) {
        g.out[k / n].insert(k % n);
    }
    g
}

/// `G_[u]`: the minimal graph of the normalized version.
pub fn class_minimal_graph(u: &Game, t: &Tolerance) -> Graph {
    minimal_graph(&normalize(u), t)
}

pub fn is_graphical(u: &Game, g: &Graph, t: &Tolerance) -> Result<bool> {
    if g.num_nodes() != u.num_players() {
        return Err(Error::NodeCountMismatch {
            left: u.num_players(),
            right: g.num_nodes(),
        });
    }
    minimal_graph(u, t).is_subgraph(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{coordination_game, matching_pennies, GameShape};

    fn set(v: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut v = v.to_vec();
        v.sort();
        v
    }

    fn edges(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().collect()
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        assert!(Graph::from_edges(2, [(0, 0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn minimal_graph_examples() {
        let t = Tolerance::default();
        let s = GameShape::new(vec![2, 2]).unwrap();
        let constant = Game::from_fn(s, |_, _| 3.0).unwrap();
        assert_eq!(minimal_graph(&constant, &t).num_edges(), 0);
        assert_eq!(edges(&minimal_graph(&matching_pennies(), &t)), vec![(0, 1), (1, 0)]);

        let s = GameShape::new(vec![2, 2, 2]).unwrap();
        let cycle = Game::from_fn(s.clone(), |i, x| s.action_at(x, (i + 1) % 3) as f64).unwrap();
        assert_eq!(edges(&minimal_graph(&cycle, &t)), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn class_minimal_graph_examples() {
        let t = Tolerance::default();
        let s = GameShape::new(vec![2, 2]).unwrap();
        let u = Game::from_fn(s.clone(), |i, x| if i == 0 { s.action_at(x, 1) as f64 } else { 0.0 }).unwrap();
        assert_eq!(edges(&minimal_graph(&u, &t)), vec![(0, 1)]);
        assert_eq!(class_minimal_graph(&u, &t).num_edges(), 0);
        let mp = matching_pennies();
        assert_eq!(class_minimal_graph(&mp, &t), minimal_graph(&mp, &t));
        assert_eq!(edges(&class_minimal_graph(&coordination_game(), &t)), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn sequential_and_parallel_minimal_graphs_agree() {
        let t = Tolerance::default();
        let u = coordination_game();
        assert_eq!(
            minimal_graph_with(&u, &t, Execution::Sequential),
            minimal_graph_with(&u, &t, Execution::Parallel)
        );
    }

    #[test]
    fn symmetric_closure_examples() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(edges(&g.symmetric_closure()), vec![(0, 1), (1, 0)]);
        let sym = g.symmetric_closure();
        assert_eq!(sym.symmetric_closure(), sym);
        let cycle = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = cycle.symmetric_closure();
        assert_eq!(c.num_edges(), 6);
        assert!(c.is_symmetric());
    }

    #[test]
    fn triangle_extension_examples() {
        let star = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(
            edges(&star.triangle_extension()),
            set(&[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)])
        );
        let single = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(edges(&single.triangle_extension()), vec![(0, 1), (1, 0)]);
        let cycle = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(cycle.triangle_extension(), Graph::complete(3));
        assert_eq!(cycle.triangle_extension(), cycle.symmetric_closure());
    }

    #[test]
    fn splitting_extension_examples() {
        let star = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let split = Splitting::from_lists(vec![vec![vec![1], vec![2]], vec![], vec![]]);
        assert_eq!(star.splitting_extension(&split).unwrap(), star.symmetric_closure());
        let whole = Splitting::from_lists(vec![vec![vec![1, 2]], vec![], vec![]]);
        assert_eq!(star.splitting_extension(&whole).unwrap(), star.triangle_extension());

        let star4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = Splitting::from_lists(vec![vec![vec![1, 2], vec![3]], vec![], vec![], vec![]]);
        let ext = star4.splitting_extension(&s).unwrap();
        let added = ext.difference(&star4.symmetric_closure()).unwrap();
        assert_eq!(added, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn splitting_validation() {
        let star = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let missing = Splitting::from_lists(vec![vec![vec![1]], vec![], vec![]]);
        assert!(matches!(star.splitting_extension(&missing), Err(Error::InvalidSplitting(_))));
        let selfish = Splitting::from_lists(vec![vec![vec![0, 1, 2]], vec![], vec![]]);
        assert!(selfish.validate(&star).is_err());
        let overlapping = Splitting::from_lists(vec![vec![vec![1, 2], vec![2]], vec![], vec![]]);
        assert!(overlapping.validate(&star).is_ok());
        assert_eq!(Splitting::singletons(&star).validate(&star), Ok(()));
        assert_eq!(Splitting::whole(&star).validate(&star), Ok(()));
    }

    #[test]
    fn lifted_singletons_are_symmetric_singletons() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let lifted = Splitting::singletons(&g).lifted(&g).unwrap();
        let sym = g.symmetric_closure();
        lifted.validate(&sym).unwrap();
        assert!((0..3).all(|i| lifted.groups(i).iter().all(|grp| grp.len() == 1)));
    }

    #[test]
    fn subgraph_and_intersection() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let empty = Graph::empty(3);
        assert!(empty.is_subgraph(&g).unwrap());
        assert!(g.is_subgraph(&g).unwrap());
        let a = Graph::from_edges(2, [(0, 1)]).unwrap();
        let b = Graph::from_edges(2, [(1, 0)]).unwrap();
        assert!(!a.is_subgraph(&b).unwrap());
        assert!(a.is_subgraph(&Graph::empty(3)).is_err());

        assert_eq!(g.intersection(&g).unwrap(), g);
        assert_eq!(g.intersection(&empty).unwrap(), empty);
        let h = Graph::from_edges(3, [(1, 2), (2, 0)]).unwrap();
        assert_eq!(edges(&g.intersection(&h).unwrap()), vec![(1, 2)]);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(Graph::complete(3).maximal_cliques().unwrap(), vec![vec![0, 1, 2]]);
        let path = Graph::undirected(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.maximal_cliques().unwrap(), vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(
            Graph::empty(3).maximal_cliques().unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        let directed = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(directed.maximal_cliques(), Err(Error::NotSymmetric));
    }

    #[test]
    fn graphicality_examples() {
        let t = Tolerance::default();
        let mp = matching_pennies();
        assert!(is_graphical(&mp, &Graph::complete(2), &t).unwrap());
        assert!(!is_graphical(&mp, &Graph::empty(2), &t).unwrap());
        let s = GameShape::new(vec![2, 2]).unwrap();
        assert!(is_graphical(&Game::from_fn(s, |_, _| 1.0).unwrap(), &Graph::empty(2), &t).unwrap());
        assert!(is_graphical(&mp, &Graph::empty(3), &t).is_err());
    }

    #[test]
    fn dot_output() {
        let g = Graph::undirected(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.to_dot("G"), "graph G {\n  0;\n  1;\n  2;\n  0 -- 1;\n  1 -- 2;\n}\n");
        let d = Graph::from_edges(2, [(1, 0)]).unwrap();
        assert_eq!(d.to_dot("D"), "digraph D {\n  0;\n  1;\n  1 -> 0;\n}\n");
    }
}
