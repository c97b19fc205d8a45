//! A tree containing `U` that reflects the undominated ends in its closure,
//! assembled part by part along a family decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EndId, GraphOracle, Oracle, Truncation, Vertex, VertexPredicate};
use crate::minor::{contract, BranchPartition, InducedSubgraph};
use crate::normal::DispersedCover;
use crate::rayless::{lift_rayless, theorem1_driver, Theorem1, Theorem1Config};
use crate::starcomb::closure_ends;
use crate::tree::RootedLazyTree;

use super::lazy::{LazyDecomposition, Node};
use super::star::restrict_displaying;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectRoute {
    /// One part: the duality driver on the whole graph.
    Driver,
    /// Rayless trees per part with contracted separators, glued along
    /// spanning trees of the separators.
    Parts,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartAudit {
    pub node: Node,
    pub part_size: usize,
    /// Separators contracted to single vertices in this part.
    pub dummies: usize,
    pub tree_edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflectionReport {
    pub contains_u: bool,
    /// Undominated ends in the closure of `U` with the number of tree branches
    /// past the audit separator that reach the frontier; one is expected.
    pub undominated: Vec<(EndId, usize)>,
    /// Dominated ends with the longest run of consecutive ray edges in the tree.
    pub dominated: Vec<(EndId, usize)>,
    pub audit_depth: usize,
}

impl ReflectionReport {
    pub fn ok(&self) -> bool {
        self.contains_u
            && self.undominated.iter().all(|&(_, t)| t == 1)
            && self.dominated.iter().all(|&(_, r)| r <= self.audit_depth)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflectingTree {
    pub route: ReflectRoute,
    pub tree: RootedLazyTree,
    pub parts: Vec<PartAudit>,
    pub report: ReflectionReport,
}

/// Longest run of consecutive ray vertices joined by tree edges.
fn ray_run(tree: &RootedLazyTree, ray: &[Vertex]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for w in ray.windows(2) {
        let edge = tree.parent(w[0]) == Some(w[1]) || tree.parent(w[1]) == Some(w[0]);
        run = if edge { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

pub fn build_reflecting_tree(
    g: Oracle,
    u: VertexPredicate,
    cover: &DispersedCover,
    dec: &LazyDecomposition,
    k: usize,
    depth: usize,
) -> Result<ReflectingTree> {
    let cap = g.default_cap(depth);
    let window = Truncation::first_n(g.as_ref(), cap);
    let audit_depth = depth / 2;
    if dec.children(0).is_empty() {
        let steps = window.vertices().filter(|&v| u(v)).count();
        let out = theorem1_driver(g.clone(), u.clone(), cover, Theorem1Config::new(k, depth, steps))?;
        let Theorem1::Rayless { tree, .. } = out else {
            return Err(Error::Duality("an undominated end lies in the closure of U".into()));
        };
        let report = report(g.as_ref(), &window, &u, &tree, None, cap, depth, audit_depth);
        return Ok(ReflectingTree { route: ReflectRoute::Driver, tree, parts: Vec::new(), report });
    }
    let restricted = restrict_displaying(g.as_ref(), dec, &|v| u(v), cap, depth);
    let closed = closed_nodes(dec, &restricted.kept, cap);
    let mut parts_of: BTreeMap<Node, BTreeSet<Vertex>> = closed.iter().map(|&n| (n, BTreeSet::new())).collect();
    for v in window.vertices() {
        for n in dec.nodes_of(v) {
            if let Some(p) = parts_of.get_mut(&n) {
                p.insert(v);
            }
        }
    }
    let mut edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut parts = Vec::new();
    for (&node, part) in &parts_of {
        let (part_edges, dummies) = part_tree(g.clone(), dec, node, part, &u, k, depth, cap)?;
        parts.push(PartAudit { node, part_size: part.len(), dummies, tree_edges: part_edges.len() });
        edges.extend(part_edges);
    }
    let region: BTreeSet<Vertex> = parts_of.values().flatten().copied().collect();
    let tree = glue(&region, &edges, &u)?;
    let report = report(g.as_ref(), &window, &u, &tree, Some((dec, &parts_of)), cap, depth, audit_depth);
    Ok(ReflectingTree { route: ReflectRoute::Parts, tree, parts, report })
}

/// Kept nodes whose child separators all lie in the window, closed downwards.
fn closed_nodes(dec: &LazyDecomposition, kept: &BTreeSet<Node>, cap: usize) -> BTreeSet<Node> {
    let inside = |n: Node| dec.children(n).into_iter().all(|c| dec.separator(c).iter().all(|v| v.0 < cap));
    kept.iter()
        .copied()
        .filter(|&n| {
            let mut cur = Some(n);
            while let Some(c) = cur {
                if !inside(c) {
                    return false;
                }
                cur = dec.parent(c);
            }
            true
        })
        .collect()
}

/// Rayless tree of one part with its separators contracted, lifted back.
#[allow(clippy::too_many_arguments)]
fn part_tree(
    g: Oracle,
    dec: &LazyDecomposition,
    node: Node,
    part: &BTreeSet<Vertex>,
    u: &VertexPredicate,
    k: usize,
    depth: usize,
    cap: usize,
) -> Result<(Vec<(Vertex, Vertex)>, usize)> {
    let mut seps: Vec<Vec<Vertex>> = dec.children(node).into_iter().map(|c| dec.separator(c)).collect();
    if node != 0 {
        seps.push(dec.separator(node));
    }
    let seps: Vec<Vec<Vertex>> = seps
        .into_iter()
        .map(|s| s.into_iter().filter(|v| part.contains(v)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    let keep: BTreeSet<Vertex> = part.clone();
    let induced: Oracle = Arc::new(InducedSubgraph::new(g, Arc::new(move |v| keep.contains(&v)), format!("part {node}")));
    let partition = BranchPartition::merging(induced.as_ref(), &seps, cap)?;
    let h = Arc::new(contract(induced, partition, true)?);
    let dummies: BTreeSet<Vertex> = seps.iter().map(|s| h.branch_of(s[0])).collect();
    let wanted: BTreeSet<Vertex> = part
        .iter()
        .copied()
        .filter(|&v| u(v))
        .map(|v| h.branch_of(v))
        .chain(dummies.iter().copied())
        .collect();
    let steps = wanted.len();
    let wanted_pred: VertexPredicate = Arc::new(move |v| wanted.contains(&v));
    let cover = DispersedCover::singletons(wanted_pred.clone());
    let out = theorem1_driver(h.clone(), wanted_pred, &cover, Theorem1Config { k, depth, steps, lookahead: 0 })
        .map_err(|e| match e {
            Error::BudgetExhausted { detail, .. } => Error::exhausted("reflect-part", format!("part {node}: {detail}")),
            other => other,
        })?;
    let Theorem1::Rayless { tree, .. } = out else {
        return Err(Error::Invariant(format!("part {node} of a finite-part decomposition produced a comb")));
    };
    let lifted = lift_rayless(&tree, &h, cap)?;
    let mut edges: Vec<(Vertex, Vertex)> = lifted.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
    // Separator trees are part of every part meeting them, lifted or not.
    for b in h.partition().branches() {
        edges.extend(b.tree_edges().map(|(a, c)| (a.min(c), a.max(c))));
    }
    edges.sort();
    edges.dedup();
    Ok((edges, dummies.len()))
}

/// Union of the part trees, rooted at the least `U`-vertex and cut down to
/// the root paths of `U`.
fn glue(region: &BTreeSet<Vertex>, edges: &BTreeSet<(Vertex, Vertex)>, u: &VertexPredicate) -> Result<RootedLazyTree> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let targets: Vec<Vertex> = region.iter().copied().filter(|&v| u(v)).collect();
    let Some(&root) = targets.first() else {
        return Err(Error::Precondition("U does not meet the decomposed region".into()));
    };
    let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut seen: BTreeSet<Vertex> = [root].into();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                parent.insert(w, v);
                stack.push(w);
            } else if parent.get(&v) != Some(&w) && parent.get(&w) != Some(&v) {
                return Err(Error::Invariant(format!("part trees close a cycle through {}-{}", v.0, w.0)));
            }
        }
    }
    let mut keep: BTreeSet<Vertex> = [root].into();
    for &t in &targets {
        if !seen.contains(&t) {
            return Err(Error::Invariant(format!("U-vertex {} is cut off from the glued tree", t.0)));
        }
        let mut cur = t;
        while keep.insert(cur) {
            cur = parent[&cur];
        }
    }
    let pruned: BTreeMap<Vertex, Vertex> = parent.into_iter().filter(|(c, _)| keep.contains(c)).collect();
    RootedLazyTree::from_parents(root, &pruned)
}

#[allow(clippy::too_many_arguments)]
fn report(
    g: &dyn GraphOracle,
    window: &Truncation,
    u: &VertexPredicate,
    tree: &RootedLazyTree,
    parts: Option<(&LazyDecomposition, &BTreeMap<Node, BTreeSet<Vertex>>)>,
    cap: usize,
    depth: usize,
    audit_depth: usize,
) -> ReflectionReport {
    let registry = g.registry();
    let region: BTreeSet<Vertex> = match parts {
        Some((_, p)) => p.values().flatten().copied().collect(),
        None => window.vertex_set(),
    };
    let contains_u = region.iter().filter(|&&v| u(v)).all(|&v| tree.contains(v));
    let ends = closure_ends(window, registry, &|v| u(v), cap, depth);
    let mut undominated = Vec::new();
    let mut dominated = Vec::new();
    for end in registry.ends_below(cap) {
        let ray: Vec<Vertex> = registry.ray_prefix(end, cap).into_iter().filter(|v| region.contains(v)).collect();
        if registry.is_dominated(end) {
            dominated.push((end, ray_run(tree, &ray)));
        } else if ends.contains(&end) {
            let tracks = parts.map_or(0, |(dec, p)| tracks(dec, p, tree, &ray));
            undominated.push((end, tracks));
        }
    }
    ReflectionReport { contains_u, undominated, dominated, audit_depth }
}

/// Branches of `T − X` reaching the deepest decomposed part along the ray,
/// where `X` is the separator entered halfway along the visible ray.
fn tracks(dec: &LazyDecomposition, parts: &BTreeMap<Node, BTreeSet<Vertex>>, tree: &RootedLazyTree, ray: &[Vertex]) -> usize {
    let node_of = |v: Vertex| dec.nodes_of(v).into_iter().filter(|n| parts.contains_key(n)).max();
    let Some(last) = ray.iter().rev().find_map(|&v| node_of(v)) else { return 0 };
    let Some(mid) = ray.get(ray.len() / 2).and_then(|&v| node_of(v)) else { return 0 };
    // the child of `mid` on the way to `last`
    let mut c = last;
    while dec.parent(c).is_some_and(|p| p != mid) && c != mid {
        c = dec.parent(c).expect("checked");
    }
    if c == mid {
        return usize::from(parts[&last].iter().any(|v| tree.contains(*v)));
    }
    let x: BTreeSet<Vertex> = dec.separator(c).into_iter().collect();
    let deep: BTreeSet<Vertex> = parts[&last].iter().copied().filter(|v| tree.contains(*v) && !x.contains(v)).collect();
    let mut comps = 0;
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    for &start in &deep {
        if seen.contains(&start) {
            continue;
        }
        comps += 1;
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(v) = stack.pop() {
            let nbrs = tree.children(v).iter().copied().chain(tree.parent(v));
            for w in nbrs.collect::<Vec<_>>() {
                if !x.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family;

    fn run(fam: &str, preset: &str, depth: usize) -> ReflectingTree {
        let spec = family(fam).unwrap();
        let p = spec.preset(preset).unwrap();
        let cover = spec.cover(preset).unwrap();
        build_reflecting_tree(spec.oracle.clone(), p.members.clone(), &cover, &spec.decomposition, 4, depth).unwrap()
    }

    #[test]
    fn ray_reflects_into_itself() {
        let r = run("ray", "all", 12);
        assert_eq!(r.route, ReflectRoute::Parts);
        assert!(r.report.ok(), "{:?}", r.report);
        assert!(r.tree.vertices().all(|v| r.tree.parent(v).is_none_or(|p| p.0 + 1 == v.0)));
    }

    #[test]
    fn fan_degenerates_to_driver() {
        let r = run("fan", "all", 10);
        assert_eq!(r.route, ReflectRoute::Driver);
        assert!(r.report.ok(), "{:?}", r.report);
        assert!(r.tree.radius() <= 2);
    }

    #[test]
    fn grid_tracks_its_end_once() {
        let r = run("grid", "all", 10);
        assert!(r.report.ok(), "{:?}", r.report);
        assert_eq!(r.report.undominated.len(), 1);
    }
}
