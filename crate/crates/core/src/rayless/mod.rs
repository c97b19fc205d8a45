//! Breadth-first rayless-tree construction, hat-closure, the domination
//! contraction and the duality driver.

pub mod contraction;
pub mod driver;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphOracle, Path, Truncation, Vertex};
use crate::normal::DispersedCover;
use crate::starcomb::closure_ends;
use crate::tree::{AttachEvent, RootedLazyTree};

pub use contraction::{build_domination_contraction, lift_rayless, DominationContraction, RayChoice};
pub use driver::{theorem1_driver, Route, Theorem1, Theorem1Config};

/// State of the breadth-first construction: the current tree and the part of
/// the well-ordered `U` consumed so far.
#[derive(Debug, Clone, Serialize)]
pub struct RaylessBuildState {
    pub tree: RootedLazyTree,
    /// `U` in its well-order, restricted to the window.
    pub order: Vec<Vertex>,
    pub consumed: usize,
}

impl RaylessBuildState {
    /// Starts with the least element of `order` as root.
    pub fn new(order: Vec<Vertex>) -> Result<Self> {
        let root = *order.first().ok_or_else(|| Error::Precondition("empty U".into()))?;
        Ok(RaylessBuildState { tree: RootedLazyTree::new(root), order, consumed: 1 })
    }

    pub fn step(&self) -> usize {
        self.tree.log().len()
    }

    pub fn log(&self) -> &[AttachEvent] {
        self.tree.log()
    }

    pub fn pending(&self) -> Option<Vertex> {
        self.order[self.consumed.min(self.order.len())..]
            .iter()
            .copied()
            .find(|v| !self.tree.contains(*v))
    }
}

/// The attachment rule: among all `u`–T paths of length at most `depth`
/// inside `window`, one whose endvertex in `T` has least height; ties go to
/// the lower endvertex index, then the lexicographically least shortest path.
pub fn min_height_attachment(
    tree: &RootedLazyTree,
    window: &Truncation,
    u: Vertex,
    depth: usize,
) -> Option<Path> {
    let in_tree = tree.vertex_set();
    let reach = window.distances(&[u], &in_tree);
    let endpoint = reach
        .iter()
        .filter(|&(_, &d)| d < depth)
        .flat_map(|(&v, &d)| window.neighbors(v).iter().map(move |&t| (t, d + 1)))
        .filter(|(t, _)| in_tree.contains(t))
        .min_by_key(|&(t, _)| (tree.height(t), t))?
        .0;
    let keep: BTreeSet<Vertex> = reach.keys().copied().chain([endpoint]).collect();
    let sub = window.induced(&keep);
    let dist = sub.distances(&[endpoint], &BTreeSet::new());
    if dist.get(&u).map_or(true, |&d| d > depth) {
        return None;
    }
    sub.shortest_path(u, &[endpoint].into(), &BTreeSet::new())
}

/// One step of the construction: attach the next pending `U`-vertex.
pub fn rayless_step(state: &mut RaylessBuildState, window: &Truncation, depth: usize) -> Result<Option<Vertex>> {
    while state.consumed < state.order.len() && state.tree.contains(state.order[state.consumed]) {
        state.consumed += 1;
    }
    let Some(&u) = state.order.get(state.consumed) else {
        return Ok(None);
    };
    let path = min_height_attachment(&state.tree, window, u, depth).ok_or_else(|| {
        Error::exhausted("rayless-step", format!("no path from {} to the tree within depth {depth}", u.0))
    })?;
    state.tree.attach_path(&path)?;
    state.consumed += 1;
    Ok(Some(u))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchAudit {
    /// The child of the root spanning this branch.
    pub branch: Vertex,
    pub size: usize,
    pub max_height: usize,
    /// No look-ahead attachment landed inside the branch.
    pub stopped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RaylessBuild {
    pub tree: RootedLazyTree,
    /// The `U`-prefix the tree was asked to contain.
    pub covered: Vec<Vertex>,
    pub audit: Vec<BranchAudit>,
}

/// Every declared end in the closure of `u` has a declared dominator in `u`.
/// Returns the offending end otherwise.
pub fn check_dominators_in_u(
    g: &dyn GraphOracle,
    window: &Truncation,
    u: &dyn Fn(Vertex) -> bool,
    cap: usize,
    depth: usize,
) -> Result<()> {
    let registry = g.registry();
    for end in closure_ends(window, registry, u, cap, depth) {
        if !registry.is_dominated(end) {
            return Err(Error::Precondition(format!("end {} in the closure of U is undominated", end.0)));
        }
        if !registry.dominators_below(end, cap).into_iter().any(|d| u(d)) {
            return Err(Error::Precondition(format!(
                "end {} in the closure of U has no declared dominator in U",
                end.0
            )));
        }
    }
    Ok(())
}

/// Run the construction for `steps` `U`-vertices, then audit growth with the
/// next `lookahead` ones.
#[allow(clippy::too_many_arguments)]
pub fn build_rayless_tree(
    g: &dyn GraphOracle,
    u: &dyn Fn(Vertex) -> bool,
    cover: &DispersedCover,
    steps: usize,
    lookahead: usize,
    cap: usize,
    depth: usize,
) -> Result<RaylessBuild> {
    let window = Truncation::first_n(g, cap);
    check_dominators_in_u(g, &window, u, cap, depth)?;
    let order: Vec<Vertex> = cover
        .well_order(cap)
        .iter()
        .filter(|v| window.contains(*v) && u(*v))
        .collect();
    let covered: Vec<Vertex> = order.iter().copied().take(steps).collect();
    let mut state = RaylessBuildState::new(order)?;
    while state.consumed < covered.len() {
        rayless_step(&mut state, &window, cap)?;
    }
    let tree = state.tree.clone();
    let audit = growth_audit(&tree, state, &window, lookahead, cap);
    Ok(RaylessBuild { tree, covered, audit })
}

fn growth_audit(
    tree: &RootedLazyTree,
    mut ahead: RaylessBuildState,
    window: &Truncation,
    lookahead: usize,
    depth: usize,
) -> Vec<BranchAudit> {
    let before = ahead.tree.log().len();
    for _ in 0..lookahead {
        match rayless_step(&mut ahead, window, depth) {
            Ok(Some(_)) => {}
            _ => break,
        }
    }
    let landed: Vec<Vertex> = ahead.tree.log()[before..].iter().map(|e| e.attached_at).collect();
    tree.children(tree.root())
        .iter()
        .map(|&c| {
            let up = tree.up_closure(c);
            BranchAudit {
                branch: c,
                size: up.len(),
                max_height: up.iter().filter_map(|&v| tree.height(v)).max().unwrap_or(1),
                stopped: !landed.iter().any(|a| up.contains(a)),
            }
        })
        .collect()
}

/// `Û`: `U` together with the declared dominators of ends in its closure.
pub fn hat_closure(g: &dyn GraphOracle, u: &dyn Fn(Vertex) -> bool, cap: usize, depth: usize) -> Vec<Vertex> {
    let window = Truncation::first_n(g, cap);
    let registry = g.registry();
    let mut added = BTreeSet::new();
    for end in closure_ends(&window, registry, u, cap, depth) {
        for d in registry.dominators_below(end, cap) {
            if !u(d) {
                added.insert(d);
            }
        }
    }
    added.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Complete, Ray};
    use std::sync::Arc;

    #[test]
    fn complete_graph_step_attaches_at_root() {
        let window = Truncation::first_n(&Complete, 10);
        let mut state = RaylessBuildState::new((0..10).map(Vertex).collect()).unwrap();
        rayless_step(&mut state, &window, 5).unwrap();
        assert_eq!(state.log()[0].path, vec![Vertex(1), Vertex(0)]);
        assert_eq!(state.log()[0].attach_height, 0);
    }

    #[test]
    fn ray_step_walks_down_to_root() {
        let window = Truncation::first_n(&Ray, 10);
        let mut state = RaylessBuildState::new(vec![Vertex(0), Vertex(3)]).unwrap();
        rayless_step(&mut state, &window, 3).unwrap();
        assert_eq!(state.log()[0].path, vec![Vertex(3), Vertex(2), Vertex(1), Vertex(0)]);
        let mut short = RaylessBuildState::new(vec![Vertex(0), Vertex(3)]).unwrap();
        assert!(rayless_step(&mut short, &window, 2).is_err());
    }

    #[test]
    fn ray_with_all_vertices_is_rejected() {
        let cover = DispersedCover::singletons(Arc::new(|_| true));
        let err = build_rayless_tree(&Ray, &|_| true, &cover, 5, 0, 30, 8).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
