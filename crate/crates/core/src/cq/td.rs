//! Tree decompositions from vertex elimination orders.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::vars::VarSet;
use crate::{Error, Result};

/// Largest vertex count for which decompositions are enumerated.
pub const MAX_TD_VARS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    pub vertices: VarSet,
    pub edges: Vec<VarSet>,
}

impl Hypergraph {
    pub fn new(edges: Vec<VarSet>) -> Self {
        let vertices = edges.iter().fold(VarSet::EMPTY, |s, e| s.union(*e));
        Hypergraph { vertices, edges }
    }

    fn neighbours(&self) -> BTreeMap<usize, VarSet> {
        let mut adj: BTreeMap<usize, VarSet> = self.vertices.iter().map(|v| (v, VarSet::EMPTY)).collect();
        for e in &self.edges {
            for v in e.iter() {
                let a = adj.get_mut(&v).unwrap();
                *a = a.union(e.without(v));
            }
        }
        adj
    }
}

/// Bags with tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeDecomposition {
    pub bags: Vec<VarSet>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn single(bag: VarSet) -> Self {
        TreeDecomposition { bags: alloc::vec![bag], edges: Vec::new() }
    }

    /// Links `bags` into a tree maximising shared vertices. The result is a
    /// valid decomposition whenever one over these bags exists.
    pub fn from_bags(bags: Vec<VarSet>, f: VarSet) -> Self {
        junction_tree(bags, f)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = alloc::vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_tree(&self) -> bool {
        let n = self.bags.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        connected(&self.adjacency(), &(0..n).collect::<Vec<_>>())
    }

    /// Every edge sits in a bag, and the bags holding any vertex form a
    /// connected subtree.
    pub fn is_valid_for(&self, h: &Hypergraph) -> bool {
        if !self.is_tree() {
            return false;
        }
        if !h.edges.iter().all(|e| self.bags.iter().any(|b| e.is_subset(*b))) {
            return false;
        }
        let adj = self.adjacency();
        h.vertices.iter().all(|v| {
            let nodes: Vec<usize> = (0..self.bags.len()).filter(|&i| self.bags[i].contains(v)).collect();
            !nodes.is_empty() && connected(&adj, &nodes)
        })
    }

    /// The bags inside `f` form a connected subtree covering `f` (vacuous for
    /// `f = ∅`).
    pub fn is_free_connex(&self, f: VarSet) -> bool {
        if f.is_empty() {
            return true;
        }
        let nodes: Vec<usize> = (0..self.bags.len()).filter(|&i| self.bags[i].is_subset(f)).collect();
        let covered = nodes.iter().fold(VarSet::EMPTY, |s, &i| s.union(self.bags[i]));
        covered == f && connected(&self.adjacency(), &nodes)
    }

    /// Every bag of `self` lies inside some bag of `other`.
    pub fn refines(&self, other: &TreeDecomposition) -> bool {
        self.bags.iter().all(|b| other.bags.iter().any(|c| b.is_subset(*c)))
    }
}

/// Whether `nodes` induce a connected subgraph.
fn connected(adj: &[Vec<usize>], nodes: &[usize]) -> bool {
    let Some(&start) = nodes.first() else { return true };
    let inside: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut stack = alloc::vec![start];
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if inside.contains(&b) && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    seen.len() == inside.len()
}

/// Drops bags contained in another bag. A bag inside `f` is only dropped in
/// favour of another bag inside `f`, so the free part survives.
fn canonical(bags: &BTreeSet<VarSet>, f: VarSet) -> Vec<VarSet> {
    let keep = |b: &VarSet| {
        !bags.iter().any(|c| {
            c != b && b.is_subset(*c) && (!b.is_subset(f) || c.is_subset(f) || f.is_empty())
        })
    };
    bags.iter().copied().filter(keep).collect()
}

/// Joins bags into a tree by a maximum-weight spanning tree on shared
/// vertices, preferring links between bags inside `f`.
fn junction_tree(bags: Vec<VarSet>, f: VarSet) -> TreeDecomposition {
    let n = bags.len();
    let mut cand = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let both_free = bags[i].is_subset(f) && bags[j].is_subset(f);
            cand.push((bags[i].intersection(bags[j]).len(), both_free, i, j));
        }
    }
    cand.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then((a.2, a.3).cmp(&(b.2, b.3))));
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], mut i: usize) -> usize {
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    let mut edges = Vec::new();
    for (_, _, i, j) in cand {
        let (a, b) = (root(&mut comp, i), root(&mut comp, j));
        if a != b {
            comp[a] = b;
            edges.push((i, j));
        }
    }
    TreeDecomposition { bags, edges }
}

/// Non-redundant free-connex decompositions of `h` for free variables `f`.
///
/// Bag sets come from every elimination order that removes the non-free
/// vertices first. A decomposition is dropped when another one refines it.
pub fn enumerate_tds(h: &Hypergraph, f: VarSet) -> Result<Vec<TreeDecomposition>> {
    let n = h.vertices.len();
    if n > MAX_TD_VARS {
        return Err(Error::TooManyVariables { max: MAX_TD_VARS });
    }
    if n == 0 {
        return Ok(alloc::vec![TreeDecomposition::single(VarSet::EMPTY)]);
    }
    let adj = h.neighbours();
    let mut memo: BTreeMap<VarSet, BTreeSet<Vec<VarSet>>> = BTreeMap::new();
    let collections = bag_sets(h.vertices, &adj, f, &mut memo);
    let mut tds: Vec<TreeDecomposition> = collections
        .into_iter()
        .map(|bags| junction_tree(bags, f))
        .filter(|td| td.is_valid_for(h) && td.is_free_connex(f))
        .collect();
    tds.sort();
    tds.dedup();
    let mut out: Vec<TreeDecomposition> = Vec::new();
    for (i, td) in tds.iter().enumerate() {
        let dominated = tds.iter().enumerate().any(|(j, o)| {
            j != i && o.refines(td) && (!td.refines(o) || j < i)
        });
        if !dominated {
            out.push(td.clone());
        }
    }
    Ok(out)
}

/// The graph left after eliminating everything outside `rest` depends only
/// on `rest`, so bag collections are memoised per remaining set.
fn bag_sets(
    rest: VarSet,
    adj: &BTreeMap<usize, VarSet>,
    f: VarSet,
    memo: &mut BTreeMap<VarSet, BTreeSet<Vec<VarSet>>>,
) -> BTreeSet<Vec<VarSet>> {
    if rest.is_empty() {
        return BTreeSet::from([Vec::new()]);
    }
    if let Some(c) = memo.get(&rest) {
        return c.clone();
    }
    let bound = rest.difference(f);
    let choices = if bound.is_empty() { rest } else { bound };
    let mut out = BTreeSet::new();
    for v in choices.iter() {
        let bag = neighbourhood(v, rest, adj).with(v);
        for tail in bag_sets(rest.without(v), adj, f, memo) {
            let mut all: BTreeSet<VarSet> = tail.into_iter().collect();
            all.insert(bag);
            out.insert(canonical(&all, f));
        }
    }
    memo.insert(rest, out.clone());
    out
}

/// Neighbours of `v` inside `rest` in the graph where every eliminated vertex
/// has had its neighbourhood turned into a clique.
fn neighbourhood(v: usize, rest: VarSet, adj: &BTreeMap<usize, VarSet>) -> VarSet {
    // Walk through eliminated vertices: a remaining vertex is adjacent to
    // `v` when a path connects them through eliminated ones only.
    let mut seen = VarSet::singleton(v);
    let mut stack = alloc::vec![v];
    let mut found = VarSet::EMPTY;
    while let Some(a) = stack.pop() {
        for b in adj[&a].iter() {
            if seen.contains(b) {
                continue;
            }
            seen = seen.with(b);
            if rest.contains(b) {
                found = found.with(b);
            } else {
                stack.push(b);
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(bits: &[usize]) -> VarSet {
        VarSet::from_vars(bits.iter().copied())
    }

    #[test]
    fn triangle_has_one_bag() {
        let h = Hypergraph::new(alloc::vec![s(&[0, 1]), s(&[1, 2]), s(&[0, 2])]);
        let tds = enumerate_tds(&h, h.vertices).unwrap();
        assert_eq!(tds, alloc::vec![TreeDecomposition::single(s(&[0, 1, 2]))]);
    }

    #[test]
    fn path_keeps_the_finer_decomposition() {
        let h = Hypergraph::new(alloc::vec![s(&[0, 1]), s(&[1, 2])]);
        let tds = enumerate_tds(&h, h.vertices).unwrap();
        assert_eq!(tds.len(), 1);
        assert_eq!(tds[0].bags, alloc::vec![s(&[0, 1]), s(&[1, 2])]);
    }

    #[test]
    fn four_cycle_has_two_decompositions() {
        let h = Hypergraph::new(alloc::vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 3]), s(&[0, 3])]);
        let tds = enumerate_tds(&h, h.vertices).unwrap();
        let bags: BTreeSet<Vec<VarSet>> = tds.iter().map(|t| t.bags.clone()).collect();
        assert_eq!(
            bags,
            BTreeSet::from([
                alloc::vec![s(&[0, 1, 2]), s(&[0, 2, 3])],
                alloc::vec![s(&[0, 1, 3]), s(&[1, 2, 3])],
            ])
        );
    }

    #[test]
    fn projection_keeps_a_free_subtree() {
        // Q(A) :- R(A,B): the bag {A} must stay.
        let h = Hypergraph::new(alloc::vec![s(&[0, 1])]);
        let tds = enumerate_tds(&h, s(&[0])).unwrap();
        assert_eq!(tds.len(), 1);
        assert!(tds[0].bags.contains(&s(&[0])));
        assert!(tds[0].is_free_connex(s(&[0])));
    }

    #[test]
    fn too_many_vertices() {
        let h = Hypergraph::new((0..11).map(|i| s(&[i, i + 1])).collect());
        assert!(enumerate_tds(&h, h.vertices).is_err());
    }
}
