//! Contraction minors with fixed branch sets, induced subgraphs, and passing
//! subgraphs on to a contraction.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    EndId, EndRegistry, GraphOracle, Oracle, Path, Truncation, Vertex, VertexPredicate,
};

/// One non-trivial branch set together with a spanning tree of it.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    /// Branch id: the smallest member.
    pub id: Vertex,
    pub members: Vec<Vertex>,
    pub tree_root: Vertex,
    /// Parent links of the branch's spanning tree (root excluded).
    pub tree_parent: BTreeMap<Vertex, Vertex>,
}

impl Branch {
    /// A branch spanned by the given tree, rooted at `root`.
    pub fn from_tree(root: Vertex, tree_parent: BTreeMap<Vertex, Vertex>) -> Branch {
        let mut members: Vec<Vertex> = tree_parent.keys().copied().collect();
        members.push(root);
        members.sort();
        members.dedup();
        Branch { id: members[0], members, tree_root: root, tree_parent }
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.tree_parent.iter().map(|(&c, &p)| (p, c))
    }
}

/// A partition of the vertex set into connected branch sets. Only the
/// non-singleton branches are listed; every other vertex is its own branch.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BranchPartition {
    branches: Vec<Branch>,
    #[serde(skip)]
    index: BTreeMap<Vertex, usize>,
}

impl BranchPartition {
    pub fn identity() -> Self {
        BranchPartition::default()
    }

    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut kept = Vec::new();
        for b in branches {
            if b.members.len() < 2 {
                continue;
            }
            for &m in &b.members {
                if index.insert(m, kept.len()).is_some() {
                    return Err(Error::Invariant(format!("vertex {m} lies in two branch sets")));
                }
            }
            kept.push(b);
        }
        kept.sort_by_key(|b| b.id);
        let index = kept
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.members.iter().map(move |&m| (m, i)))
            .collect();
        Ok(BranchPartition { branches: kept, index })
    }

    /// Merge the given vertex groups, each spanned by a breadth-first tree taken
    /// inside the window of `g` below `cap`.
    pub fn merging(g: &dyn GraphOracle, groups: &[Vec<Vertex>], cap: usize) -> Result<Self> {
        let mut branches = Vec::new();
        for group in groups {
            let set: BTreeSet<Vertex> = group.iter().copied().collect();
            let Some(&root) = set.iter().next() else { continue };
            let mut parent = BTreeMap::new();
            let mut frontier = vec![root];
            let mut seen: BTreeSet<Vertex> = [root].into();
            while let Some(v) = frontier.pop() {
                for u in g.neighbors_below(v, cap) {
                    if set.contains(&u) && seen.insert(u) {
                        parent.insert(u, v);
                        frontier.push(u);
                    }
                }
            }
            if seen.len() != set.len() {
                return Err(Error::Invariant(format!(
                    "branch set starting at {root} does not induce a connected subgraph"
                )));
            }
            branches.push(Branch::from_tree(root, parent));
        }
        BranchPartition::new(branches)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_of(&self, v: Vertex) -> Vertex {
        self.index.get(&v).map_or(v, |&i| self.branches[i].id)
    }

    pub fn branch(&self, id: Vertex) -> Option<&Branch> {
        self.index.get(&id).map(|&i| &self.branches[i]).filter(|b| b.id == id)
    }

    pub fn members(&self, id: Vertex) -> Vec<Vertex> {
        match self.index.get(&id) {
            Some(&i) => self.branches[i].members.clone(),
            None => vec![id],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.branches.is_empty()
    }

    /// Largest vertex index occurring in a listed branch.
    fn max_member(&self) -> Option<usize> {
        self.index.keys().next_back().map(|v| v.0)
    }

    /// Checks the partition invariants against `g`: branch trees use host edges,
    /// span their members, and are acyclic.
    pub fn validate(&self, g: &dyn GraphOracle) -> Result<()> {
        for b in &self.branches {
            for (p, c) in b.tree_edges() {
                if !g.adjacent(p, c) {
                    return Err(Error::Invariant(format!(
                        "branch tree edge {p}-{c} is not an edge of the host"
                    )));
                }
            }
            for &m in &b.members {
                let mut cur = m;
                let mut steps = 0;
                while cur != b.tree_root {
                    cur = *b.tree_parent.get(&cur).ok_or_else(|| {
                        Error::Invariant(format!("branch member {m} not spanned by its tree"))
                    })?;
                    steps += 1;
                    if steps > b.members.len() {
                        return Err(Error::Invariant(format!("cycle in branch tree at {m}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The contraction minor `H` of a base graph with fixed branch sets. Vertices
/// of `H` are branch ids; `[u][v]` is an edge iff some base edge joins the
/// branches.
pub struct Contraction {
    base: Oracle,
    partition: BranchPartition,
    transfer_ends: bool,
}

impl std::fmt::Debug for Contraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Contraction")
            .field("base", &self.base.name())
            .field("branches", &self.partition.branches().len())
            .field("transfer_ends", &self.transfer_ends)
            .finish()
    }
}

/// Contract `partition` in `g`. With `transfer_ends` the end registry of the
/// minor is derived from the base registry. Listed branch sets are finite by
/// construction.
pub fn contract(g: Oracle, partition: BranchPartition, transfer_ends: bool) -> Result<Contraction> {
    partition.validate(g.as_ref())?;
    Ok(Contraction { base: g, partition, transfer_ends })
}

impl Contraction {
    pub fn partition(&self) -> &BranchPartition {
        &self.partition
    }

    pub fn base(&self) -> &Oracle {
        &self.base
    }

    pub fn branch_of(&self, v: Vertex) -> Vertex {
        self.partition.branch_of(v)
    }

    fn is_representative(&self, v: Vertex) -> bool {
        self.partition.branch_of(v) == v
    }

    fn window(&self, cap: usize) -> Truncation {
        Truncation::first_n(self, cap)
    }
}

impl GraphOracle for Contraction {
    fn name(&self) -> String {
        format!("{}/contracted", self.base.name())
    }

    fn order(&self) -> Option<usize> {
        self.base.order().map(|n| {
            n - self
                .partition
                .branches
                .iter()
                .map(|b| b.members.len() - 1)
                .sum::<usize>()
        })
    }

    fn contains(&self, v: Vertex) -> bool {
        self.base.contains(v) && self.is_representative(v)
    }

    fn vertices_below(&self, cap: usize) -> Vec<Vertex> {
        self.base
            .vertices_below(cap)
            .into_iter()
            .filter(|&v| self.is_representative(v))
            .collect()
    }

    fn label(&self, v: Vertex) -> String {
        let members = self.partition.members(v);
        if members.len() == 1 {
            format!("[{}]", self.base.label(v))
        } else {
            format!("[{}]", members.iter().map(|&m| self.base.label(m)).join(","))
        }
    }

    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let members = self.partition.members(v);
        let horizon = self.partition.max_member().map_or(0, |m| m + 1);
        // Below the horizon branch ids are resolved exactly; above it every
        // vertex is a singleton, so the merged base streams are already sorted.
        let head: BTreeSet<Vertex> = members
            .iter()
            .flat_map(|&m| self.base.neighbors_below(m, horizon))
            .map(|u| self.partition.branch_of(u))
            .filter(|&u| u != v)
            .collect();
        let tail = members
            .into_iter()
            .map(|m| self.base.neighbors(m).skip_while(move |u| u.0 < horizon))
            .kmerge()
            .dedup()
            .filter(move |&u| u != v);
        Box::new(head.into_iter().chain(tail))
    }

    fn neighbors_below(&self, v: Vertex, cap: usize) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self
            .partition
            .members(v)
            .into_iter()
            .flat_map(|m| self.base.neighbors_below(m, cap))
            .map(|u| self.partition.branch_of(u))
            .filter(|&u| u != v && u.0 < cap)
            .collect();
        set.into_iter().collect()
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if u == v || !self.is_representative(u) || !self.is_representative(v) {
            return false;
        }
        let mu = self.partition.members(u);
        let mv = self.partition.members(v);
        mu.iter().any(|&a| mv.iter().any(|&b| self.base.adjacent(a, b)))
    }

    fn default_cap(&self, depth: usize) -> usize {
        self.base.default_cap(depth)
    }

    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

/// End registry of a contraction, obtained through the direction bijection:
/// the same ends, rays mapped branch-wise and shortcut, dominated iff some
/// member of the branch dominates in the base.
impl EndRegistry for Contraction {
    fn ends_below(&self, cap: usize) -> Vec<EndId> {
        if self.transfer_ends {
            self.base.registry().ends_below(cap)
        } else {
            Vec::new()
        }
    }

    fn is_dominated(&self, end: EndId) -> bool {
        self.base.registry().is_dominated(end)
    }

    fn ray_prefix(&self, end: EndId, cap: usize) -> Path {
        let base_ray = self.base.registry().ray_prefix(end, cap);
        let mapped: Vec<Vertex> = base_ray.iter().map(|&v| self.branch_of(v)).collect();
        let mut last = BTreeMap::new();
        for (i, &b) in mapped.iter().enumerate() {
            last.insert(b, i);
        }
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < mapped.len() {
            let b = mapped[pos];
            out.push(b);
            pos = last[&b] + 1;
        }
        out
    }

    fn dominates(&self, end: EndId, v: Vertex) -> bool {
        self.partition
            .members(v)
            .into_iter()
            .any(|m| self.base.registry().dominates(end, m))
    }

    fn dominators_below(&self, end: EndId, cap: usize) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self
            .base
            .registry()
            .dominators_below(end, cap)
            .into_iter()
            .map(|d| self.branch_of(d))
            .collect();
        set.into_iter().collect()
    }

    fn fan(&self, end: EndId, dominator: Vertex, k: usize, cap: usize) -> Option<Vec<Path>> {
        if !self.dominates(end, dominator) {
            return None;
        }
        let window = self.window(cap);
        let targets: BTreeSet<Vertex> = self
            .ray_prefix(end, cap)
            .into_iter()
            .filter(|&r| r != dominator)
            .collect();
        let fan = window.fan(dominator, &targets, k);
        (fan.len() >= k).then_some(fan)
    }
}

/// The subgraph induced by a vertex predicate.
pub struct InducedSubgraph {
    base: Oracle,
    keep: VertexPredicate,
    label: String,
}

impl InducedSubgraph {
    pub fn new(base: Oracle, keep: VertexPredicate, label: impl Into<String>) -> Self {
        InducedSubgraph { base, keep, label: label.into() }
    }

    pub fn keeps(&self, v: Vertex) -> bool {
        (self.keep)(v)
    }
}

impl GraphOracle for InducedSubgraph {
    fn name(&self) -> String {
        format!("{}[{}]", self.base.name(), self.label)
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn contains(&self, v: Vertex) -> bool {
        self.base.contains(v) && self.keeps(v)
    }
    fn vertices_below(&self, cap: usize) -> Vec<Vertex> {
        self.base
            .vertices_below(cap)
            .into_iter()
            .filter(|&v| self.keeps(v))
            .collect()
    }
    fn label(&self, v: Vertex) -> String {
        self.base.label(v)
    }
    /// May stall after the last neighbour when the predicate is finite; use
    /// [`GraphOracle::neighbors_below`].
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        if !self.keeps(v) {
            return Box::new(std::iter::empty());
        }
        Box::new(self.base.neighbors(v).filter(|&u| self.keeps(u)))
    }
    fn neighbors_below(&self, v: Vertex, cap: usize) -> Vec<Vertex> {
        if !self.keeps(v) {
            return Vec::new();
        }
        self.base
            .neighbors_below(v, cap)
            .into_iter()
            .filter(|&u| self.keeps(u))
            .collect()
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.keeps(u) && self.keeps(v) && self.base.adjacent(u, v)
    }
    fn default_cap(&self, depth: usize) -> usize {
        self.base.default_cap(depth)
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

/// Ends of the base whose representative ray has a tail inside the subgraph;
/// the representative becomes that tail. Fans are searched inside the subgraph.
impl EndRegistry for InducedSubgraph {
    fn ends_below(&self, cap: usize) -> Vec<EndId> {
        self.base
            .registry()
            .ends_below(cap)
            .into_iter()
            .filter(|&e| self.ray_prefix(e, cap).len() >= 2)
            .collect()
    }
    fn is_dominated(&self, end: EndId) -> bool {
        self.base.registry().is_dominated(end)
    }
    fn ray_prefix(&self, end: EndId, cap: usize) -> Path {
        let ray = self.base.registry().ray_prefix(end, cap);
        let start = ray.iter().rposition(|&v| !self.keeps(v)).map_or(0, |i| i + 1);
        let tail = ray[start..].to_vec();
        // Only a long tail is evidence that the ray eventually stays inside.
        if tail.len() * 2 >= ray.len() && !tail.is_empty() {
            tail
        } else {
            Vec::new()
        }
    }
    fn dominates(&self, end: EndId, v: Vertex) -> bool {
        self.keeps(v) && self.base.registry().dominates(end, v)
    }
    fn dominators_below(&self, end: EndId, cap: usize) -> Vec<Vertex> {
        self.base
            .registry()
            .dominators_below(end, cap)
            .into_iter()
            .filter(|&v| self.keeps(v))
            .collect()
    }
    fn fan(&self, end: EndId, dominator: Vertex, k: usize, cap: usize) -> Option<Vec<Path>> {
        if !self.keeps(dominator) {
            return None;
        }
        let window = Truncation::first_n(self, cap);
        let targets: BTreeSet<Vertex> = self
            .ray_prefix(end, cap)
            .into_iter()
            .filter(|&r| r != dominator)
            .collect();
        let fan = window.fan(dominator, &targets, k);
        (fan.len() >= k).then_some(fan)
    }
}

/// The result of passing a subgraph on to a contraction.
#[derive(Debug, Clone, Serialize)]
pub struct PassedOn {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
    /// Every branch in the image meets the original vertex set exactly once.
    pub proper: bool,
    /// For proper pass-ons: original vertex → branch id.
    pub bijection: BTreeMap<Vertex, Vertex>,
}

/// Pass the subgraph `(vertices, edges)` of the base on to `h`.
pub fn pass_on(h: &Contraction, vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> PassedOn {
    let mut hits: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &v in vertices {
        hits.entry(h.branch_of(v)).or_default().push(v);
    }
    let image_edges: BTreeSet<(Vertex, Vertex)> = edges
        .iter()
        .map(|&(a, b)| (h.branch_of(a), h.branch_of(b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    let proper = hits.values().all(|v| v.len() == 1);
    let bijection = if proper {
        hits.iter().map(|(&b, v)| (v[0], b)).collect()
    } else {
        BTreeMap::new()
    };
    PassedOn {
        vertices: hits.keys().copied().collect(),
        edges: image_edges.into_iter().collect(),
        proper,
        bijection,
    }
}

pub fn shared(g: impl GraphOracle + 'static) -> Oracle {
    Arc::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteGraph;

    #[test]
    fn identity_contraction_preserves_adjacency() {
        let g: Oracle = Arc::new(FiniteGraph::path(6));
        let h = contract(g.clone(), BranchPartition::identity(), true).unwrap();
        for u in 0..6 {
            for v in 0..6 {
                assert_eq!(g.adjacent(Vertex(u), Vertex(v)), h.adjacent(Vertex(u), Vertex(v)));
            }
        }
    }

    #[test]
    fn path_not_properly_passed_on() {
        let g: Oracle = Arc::new(FiniteGraph::path(3));
        let p = BranchPartition::merging(g.as_ref(), &[vec![Vertex(0), Vertex(1)]], 3).unwrap();
        let h = contract(g, p, false).unwrap();
        let res = pass_on(
            &h,
            &[Vertex(0), Vertex(1), Vertex(2)],
            &[(Vertex(0), Vertex(1)), (Vertex(1), Vertex(2))],
        );
        assert!(!res.proper);
        assert_eq!(res.edges, vec![(Vertex(0), Vertex(2))]);
    }

    #[test]
    fn disconnected_branch_rejected() {
        let g = FiniteGraph::path(4);
        let err = BranchPartition::merging(&g, &[vec![Vertex(0), Vertex(2)]], 4);
        assert!(err.is_err());
    }

    #[test]
    fn overlapping_branches_rejected() {
        let b1 = Branch::from_tree(Vertex(0), [(Vertex(1), Vertex(0))].into());
        let b2 = Branch::from_tree(Vertex(1), [(Vertex(2), Vertex(1))].into());
        assert!(BranchPartition::new(vec![b1, b2]).is_err());
    }
}
