//! Normal trees: the normality check, construction from a dispersed cover,
//! and the separation and normal-ray checks.

pub mod cover;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{end_in_closure, EndId, GraphOracle, Path, Truncation, Vertex};
use crate::starcomb::{star_comb, StarComb, CLOSURE_DEPTH};
use crate::certificate::SpineAnchor;
use crate::tree::RootedLazyTree;

pub use cover::{CoverPiece, DispersedCover, PieceKind, WellOrderedU};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NormalCheck {
    Pass,
    /// A T-path whose endvertices are incomparable.
    Counterexample { path: Path },
}

impl NormalCheck {
    pub fn passed(&self) -> bool {
        matches!(self, NormalCheck::Pass)
    }
}

/// Checks that every T-path inside `window` has comparable endvertices.
///
/// A violating T-path is either a window edge between incomparable tree
/// vertices or runs through a component of `window − T` whose neighbourhood
/// in `T` is not a chain.
pub fn check_normal(tree: &RootedLazyTree, window: &Truncation) -> NormalCheck {
    for (a, b) in window.edges() {
        if tree.contains(a) && tree.contains(b) && !tree.comparable(a, b) {
            return NormalCheck::Counterexample { path: vec![a, b] };
        }
    }
    let in_tree: BTreeSet<Vertex> = window.vertices().filter(|&v| tree.contains(v)).collect();
    for comp in window.components_without(&in_tree) {
        let comp_set: BTreeSet<Vertex> = comp.iter().copied().collect();
        let attach: BTreeSet<Vertex> = comp
            .iter()
            .flat_map(|&v| window.neighbors(v).iter().copied())
            .filter(|u| in_tree.contains(u))
            .collect();
        let attach: Vec<Vertex> = attach.into_iter().collect();
        for (i, &a) in attach.iter().enumerate() {
            for &b in &attach[i + 1..] {
                if tree.comparable(a, b) {
                    continue;
                }
                let mut keep = comp_set.clone();
                keep.insert(a);
                keep.insert(b);
                let sub = window.induced(&keep);
                let blocked: BTreeSet<Vertex> = [a].into();
                let start = sub.neighbors(a).iter().copied().find(|v| comp_set.contains(v));
                if let Some(mid) = start {
                    if let Some(rest) = sub.shortest_path(mid, &[b].into(), &blocked) {
                        let mut path = vec![a];
                        path.extend(rest);
                        return NormalCheck::Counterexample { path };
                    }
                }
            }
        }
    }
    NormalCheck::Pass
}

/// Grow a normal tree in the window below `cap`, taking cover vertices in
/// their well-order. Each new vertex `u` is joined through its component `C`
/// of `window − T` to the deepest tree vertex adjacent to `C`.
pub fn build_normal_tree(
    g: &dyn GraphOracle,
    cover: &DispersedCover,
    steps: usize,
    cap: usize,
) -> Result<RootedLazyTree> {
    let order = cover.well_order(cap);
    let window = Truncation::first_n(g, cap);
    let wanted: Vec<Vertex> = order.iter().filter(|v| window.contains(*v)).take(steps).collect();
    let Some(&root) = wanted.first() else {
        return Ok(RootedLazyTree::new(Vertex(0)));
    };
    let mut tree = RootedLazyTree::new(root);
    for (done, &u) in wanted.iter().enumerate() {
        if tree.contains(u) {
            continue;
        }
        let in_tree = tree.vertex_set();
        let comp: BTreeSet<Vertex> = window.distances(&[u], &in_tree).into_keys().collect();
        let attach = comp
            .iter()
            .flat_map(|&v| window.neighbors(v).iter().copied())
            .filter(|w| in_tree.contains(w))
            .max_by_key(|&w| (tree.height(w), std::cmp::Reverse(w)));
        let Some(top) = attach else {
            return Err(Error::exhausted(
                "build-normal-tree",
                format!("vertex {} has no path to the tree inside {cap} vertices ({done} of {} placed)", u.0, wanted.len()),
            ));
        };
        let mut keep = comp.clone();
        keep.insert(top);
        let path = window
            .induced(&keep)
            .shortest_path(u, &[top].into(), &BTreeSet::new())
            .expect("component is connected and adjacent to its attachment");
        tree.attach_path(&path)?;
    }
    Ok(tree)
}

/// Every `x`–`y` path inside `window` meets `⌈x⌉ ∩ ⌈y⌉`. Returns a path
/// avoiding it if there is one.
pub fn separation_check(tree: &RootedLazyTree, window: &Truncation, x: Vertex, y: Vertex) -> Option<Path> {
    let sep: BTreeSet<Vertex> = tree.down_closure(x).intersection(&tree.down_closure(y)).copied().collect();
    if sep.contains(&x) || sep.contains(&y) {
        return None;
    }
    window.shortest_path(x, &[y].into(), &sep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalRayMatch {
    pub end: EndId,
    /// The tree chain tracking the end, from the root.
    pub chain: Path,
    /// Set when some step offered more than one child towards the end.
    pub ambiguous: bool,
}

/// For each declared end in the closure of the tree, follow the unique child
/// whose up-closure meets the component of `window − ⌈t⌉` holding the ray tail.
pub fn normal_ray_end_check(
    tree: &RootedLazyTree,
    g: &dyn GraphOracle,
    window: &Truncation,
    cap: usize,
    depth: usize,
    max_ends: usize,
) -> Vec<NormalRayMatch> {
    let registry = g.registry();
    let in_tree = |v: Vertex| tree.contains(v);
    let mut out = Vec::new();
    for end in registry.ends_below(cap).into_iter().take(max_ends) {
        if !end_in_closure(window, registry, end, &in_tree, cap, depth.min(CLOSURE_DEPTH)) {
            continue;
        }
        let ray: Vec<Vertex> = registry
            .ray_prefix(end, cap)
            .into_iter()
            .filter(|v| window.contains(*v))
            .collect();
        let mut chain = vec![tree.root()];
        let mut ambiguous = false;
        let mut cur = tree.root();
        loop {
            let sep = tree.down_closure(cur);
            let Some(&tail) = ray.iter().rev().find(|v| !sep.contains(v)) else { break };
            let comp: BTreeSet<Vertex> = window.distances(&[tail], &sep).into_keys().collect();
            let toward: Vec<Vertex> = tree
                .children(cur)
                .iter()
                .copied()
                .filter(|&c| tree.up_closure(c).iter().any(|v| comp.contains(v)))
                .collect();
            match toward.as_slice() {
                [] => break,
                [c] => {
                    chain.push(*c);
                    cur = *c;
                }
                [c, ..] => {
                    ambiguous = true;
                    chain.push(*c);
                    cur = *c;
                }
            }
        }
        out.push(NormalRayMatch { end, chain, ambiguous });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dispersal {
    /// No comb attaches to a finite set; the search found no registry comb either.
    Finite,
    /// Star outcome for every tested budget.
    Stars,
    /// A comb along a declared end: not dispersed.
    Comb,
}

/// Dispersedness evidence for one piece at budgets `1..=k`.
pub fn piece_evidence(g: &dyn GraphOracle, piece: &[Vertex], k: usize, depth: usize) -> Dispersal {
    let set: BTreeSet<Vertex> = piece.iter().copied().collect();
    let u = |v: Vertex| set.contains(&v);
    let mut any_star = false;
    for budget in 1..=k.min(set.len()) {
        match star_comb(g, &u, budget, depth) {
            Ok(StarComb::Comb(c)) if matches!(c.anchor, SpineAnchor::Registry { .. }) => return Dispersal::Comb,
            Ok(StarComb::Star(_)) => any_star = true,
            _ => {}
        }
    }
    if any_star && set.len() >= k {
        Dispersal::Stars
    } else {
        Dispersal::Finite
    }
}

/// Piece-by-piece dispersedness evidence for the first `pieces` pieces.
pub fn cover_evidence(
    g: &dyn GraphOracle,
    cover: &DispersedCover,
    pieces: usize,
    k: usize,
    depth: usize,
) -> BTreeMap<usize, Dispersal> {
    cover
        .pieces(g.default_cap(depth))
        .into_iter()
        .take(pieces)
        .map(|p| (p.index, piece_evidence(g, &p.members, k, depth)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteGraph;

    #[test]
    fn siblings_joined_through_outside_vertex() {
        // r=0 with children a=1, b=2; x=3 joins a and b
        let g = FiniteGraph::new("c4", 4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let mut t = RootedLazyTree::new(Vertex(0));
        t.attach_path(&[Vertex(1), Vertex(0)]).unwrap();
        t.attach_path(&[Vertex(2), Vertex(0)]).unwrap();
        let w = Truncation::first_n(&g, 4);
        assert_eq!(
            check_normal(&t, &w),
            NormalCheck::Counterexample { path: vec![Vertex(1), Vertex(3), Vertex(2)] }
        );
    }

    #[test]
    fn single_edge_is_normal() {
        let g = FiniteGraph::path(5);
        let mut t = RootedLazyTree::new(Vertex(2));
        t.attach_path(&[Vertex(3), Vertex(2)]).unwrap();
        assert!(check_normal(&t, &Truncation::first_n(&g, 5)).passed());
    }
}
