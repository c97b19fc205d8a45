//! Finite-stage star-comb search, stars inside rayless trees, and fans.

use std::collections::{BTreeMap, BTreeSet};

use crate::certificate::{CombCertificate, FanCertificate, SpineAnchor, StarCertificate};
use crate::error::{Error, Result};
use crate::graph::{end_in_closure, EndId, EndRegistry, GraphOracle, Path, Truncation, Vertex};
use crate::tree::RootedLazyTree;

/// How many declared ends a search looks at.
const END_SCAN: usize = 32;
/// Largest separator radius used when testing closure membership.
pub const CLOSURE_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarComb {
    Star(StarCertificate),
    Comb(CombCertificate),
}

impl StarComb {
    pub fn is_star(&self) -> bool {
        matches!(self, StarComb::Star(_))
    }
}

/// Declared ends (among the first few) whose representative rays lie in the
/// closure of `u` inside `window`.
pub fn closure_ends(
    window: &Truncation,
    registry: &dyn EndRegistry,
    u: &dyn Fn(Vertex) -> bool,
    cap: usize,
    depth: usize,
) -> Vec<EndId> {
    registry
        .ends_below(cap)
        .into_iter()
        .take(END_SCAN)
        .filter(|&e| end_in_closure(window, registry, e, u, cap, depth.min(CLOSURE_DEPTH)))
        .collect()
}

/// Find a star with `k` leaves in `u` or a comb with `k` teeth in `u`.
///
/// Combs along declared ends in the closure of `u` are tried first, then a
/// star in the breadth-first tree from the least vertex, then a comb along the
/// deepest branch of that tree.
pub fn star_comb(g: &dyn GraphOracle, u: &dyn Fn(Vertex) -> bool, k: usize, depth: usize) -> Result<StarComb> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let cap = g.default_cap(depth);
    let window = Truncation::first_n(g, cap);
    let registry = g.registry();
    for end in closure_ends(&window, registry, u, cap, depth) {
        let ray = registry.ray_prefix(end, cap);
        if let Some(mut comb) = comb_along(&window, &ray, u, k) {
            comb.anchor = SpineAnchor::Registry { end };
            comb.undominated = !registry.is_dominated(end);
            return Ok(StarComb::Comb(comb));
        }
    }
    let Some(root) = window.vertices().next() else {
        return Err(Error::exhausted("star-comb", "empty window"));
    };
    let bfs = BfsTree::new(&window, root);
    if let Some(star) = bfs.star(u, k) {
        return Ok(StarComb::Star(star));
    }
    if let Some(comb) = bfs.branch_comb(u, k) {
        return Ok(StarComb::Comb(comb));
    }
    Err(Error::exhausted(
        "star-comb",
        format!("no star or comb with {k} attachments inside {cap} vertices (depth {depth})"),
    ))
}

/// Walk the ray prefix and hang disjoint tooth paths off it. Teeth on the
/// ray are trivial paths; other tooth paths avoid the whole prefix.
pub fn comb_along(window: &Truncation, ray: &[Vertex], u: &dyn Fn(Vertex) -> bool, k: usize) -> Option<CombCertificate> {
    let ray: Vec<Vertex> = ray.iter().copied().take_while(|v| window.contains(*v)).collect();
    let targets: BTreeSet<Vertex> = window.vertices().filter(|&v| u(v)).collect();
    let mut blocked: BTreeSet<Vertex> = ray.iter().copied().collect();
    let mut teeth = Vec::new();
    let mut tooth_paths = Vec::new();
    let mut last = 0;
    for (i, &r) in ray.iter().enumerate() {
        if teeth.len() == k {
            break;
        }
        let path = if u(r) {
            Some(vec![r])
        } else {
            blocked.remove(&r);
            let free: BTreeSet<Vertex> = targets.difference(&blocked).copied().collect();
            let p = window.shortest_path(r, &free, &blocked);
            blocked.insert(r);
            p
        };
        if let Some(path) = path {
            blocked.extend(path.iter().copied());
            teeth.push(*path.last().expect("non-empty path"));
            tooth_paths.push(path);
            last = i;
        }
    }
    (teeth.len() == k).then(|| CombCertificate {
        spine: ray[..=last].to_vec(),
        anchor: SpineAnchor::Continuation { rule: "declared-ray".into() },
        teeth,
        tooth_paths,
        undominated: false,
    })
}

/// Breadth-first tree of a window, lowest index first.
struct BfsTree {
    root: Vertex,
    children: BTreeMap<Vertex, Vec<Vertex>>,
    order: Vec<Vertex>,
}

impl BfsTree {
    fn new(window: &Truncation, root: Vertex) -> Self {
        let mut children: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        let mut order = vec![root];
        let mut seen: BTreeSet<Vertex> = [root].into();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &w in window.neighbors(v) {
                if seen.insert(w) {
                    children.entry(v).or_default().push(w);
                    order.push(w);
                }
            }
        }
        BfsTree { root, children, order }
    }

    fn kids(&self, v: Vertex) -> &[Vertex] {
        self.children.get(&v).map_or(&[], |c| c.as_slice())
    }

    /// For every vertex, the nearest `u`-vertex in its subtree (lowest depth,
    /// then lowest index).
    fn nearest_u(&self, u: &dyn Fn(Vertex) -> bool) -> BTreeMap<Vertex, Path> {
        let mut best: BTreeMap<Vertex, Path> = BTreeMap::new();
        for &v in self.order.iter().rev() {
            if u(v) {
                best.insert(v, vec![v]);
                continue;
            }
            let pick = self
                .kids(v)
                .iter()
                .filter_map(|c| best.get(c))
                .min_by_key(|p| (p.len(), *p.last().expect("non-empty")))
                .cloned();
            if let Some(p) = pick {
                let mut path = vec![v];
                path.extend(p);
                best.insert(v, path);
            }
        }
        best
    }

    fn star(&self, u: &dyn Fn(Vertex) -> bool, k: usize) -> Option<StarCertificate> {
        let near = self.nearest_u(u);
        for &v in &self.order {
            let branches: Vec<&Path> = self.kids(v).iter().filter_map(|c| near.get(c)).collect();
            if branches.len() >= k && k >= 1 {
                let paths: Vec<Path> = branches
                    .into_iter()
                    .take(k)
                    .map(|p| {
                        let mut path = vec![v];
                        path.extend(p.iter().copied());
                        path
                    })
                    .collect();
                let leaves = paths.iter().map(|p| *p.last().expect("non-empty")).collect();
                return Some(StarCertificate { center: v, leaves, paths, degenerate: k < 3 });
            }
        }
        None
    }

    fn branch_comb(&self, u: &dyn Fn(Vertex) -> bool, k: usize) -> Option<CombCertificate> {
        // deepest subtree height per vertex
        let mut reach: BTreeMap<Vertex, usize> = BTreeMap::new();
        for &v in self.order.iter().rev() {
            let h = self.kids(v).iter().map(|c| reach[c] + 1).max().unwrap_or(0);
            reach.insert(v, h);
        }
        let mut branch = vec![self.root];
        let mut cur = self.root;
        while let Some(&next) = self.kids(cur).iter().max_by_key(|c| (reach[c], std::cmp::Reverse(c.0))) {
            branch.push(next);
            cur = next;
        }
        let near = self.nearest_u(u);
        let on_branch: BTreeSet<Vertex> = branch.iter().copied().collect();
        let mut teeth = Vec::new();
        let mut tooth_paths = Vec::new();
        let mut last = 0;
        for (i, &b) in branch.iter().enumerate() {
            if teeth.len() == k {
                break;
            }
            let path = if u(b) {
                Some(vec![b])
            } else {
                self.kids(b)
                    .iter()
                    .filter(|c| !on_branch.contains(c))
                    .filter_map(|c| near.get(c))
                    .min_by_key(|p| (p.len(), *p.last().expect("non-empty")))
                    .map(|p| {
                        let mut path = vec![b];
                        path.extend(p.iter().copied());
                        path
                    })
            };
            if let Some(path) = path {
                teeth.push(*path.last().expect("non-empty"));
                tooth_paths.push(path);
                last = i;
            }
        }
        (teeth.len() == k).then(|| CombCertificate {
            spine: branch[..=last].to_vec(),
            anchor: SpineAnchor::Continuation {
                rule: "bfs-branch: follow the child with the deepest subtree, lowest index on ties".into(),
            },
            teeth,
            tooth_paths,
            undominated: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeStar {
    Found(StarCertificate),
    NotFound { available: usize },
}

/// A star attached to `u` inside the up-closure of its centre in a finite tree.
///
/// The centre is the deepest vertex having `u`-vertices in `k` distinct child
/// subtrees. If no vertex branches that much, the root-most vertex with the
/// most such directions is returned as a degenerate star.
pub fn star_in_rayless_tree(tree: &RootedLazyTree, u: &dyn Fn(Vertex) -> bool, k: usize) -> TreeStar {
    let available = tree.vertices().filter(|&v| u(v)).count();
    if available < k || k == 0 {
        return TreeStar::NotFound { available };
    }
    // nearest u-vertex in each up-closure, by height then index
    let mut by_height: Vec<Vertex> = tree.vertices().collect();
    by_height.sort_by_key(|&v| (std::cmp::Reverse(tree.height(v)), v));
    let mut near: BTreeMap<Vertex, Path> = BTreeMap::new();
    for &v in &by_height {
        if u(v) {
            near.insert(v, vec![v]);
            continue;
        }
        if let Some(p) = tree
            .children(v)
            .iter()
            .filter_map(|c| near.get(c))
            .min_by_key(|p| (p.len(), *p.last().expect("non-empty")))
        {
            let mut path = vec![v];
            path.extend(p.iter().copied());
            near.insert(v, path);
        }
    }
    let directions = |v: Vertex| -> Vec<Path> {
        tree.children(v)
            .iter()
            .filter_map(|c| near.get(c))
            .map(|p| {
                let mut path = vec![v];
                path.extend(p.iter().copied());
                path
            })
            .collect()
    };
    let make = |v: Vertex, mut paths: Vec<Path>, degenerate: bool| {
        paths.truncate(k);
        let leaves = paths.iter().map(|p| *p.last().expect("non-empty")).collect();
        StarCertificate { center: v, leaves, paths, degenerate }
    };
    // deepest branching centre: by_height is deepest first
    for &v in &by_height {
        let dirs = directions(v);
        if dirs.len() >= k {
            return TreeStar::Found(make(v, dirs, k < 3));
        }
    }
    let mut best: Option<(usize, Vertex)> = None;
    let mut root_first = by_height.clone();
    root_first.reverse();
    root_first.sort_by_key(|&v| (tree.height(v), v));
    for v in root_first {
        let d = directions(v).len();
        if best.map_or(true, |(bd, _)| d > bd) {
            best = Some((d, v));
        }
    }
    let (_, v) = best.expect("tree is non-empty");
    TreeStar::Found(make(v, directions(v), true))
}

/// A `k`-fan from `dominator` to the representative ray of `end`, from the
/// registry's generator when it has one, else by max-flow in the window.
pub fn find_fan(g: &dyn GraphOracle, end: EndId, dominator: Vertex, k: usize, cap: usize) -> Option<FanCertificate> {
    let registry = g.registry();
    let ray = registry.ray_prefix(end, cap);
    if let Some(paths) = registry.fan(end, dominator, k, cap) {
        if paths.len() == k {
            let needed = paths.iter().filter_map(|p| p.last()).map(|v| v.0 + 1).max().unwrap_or(0);
            let ray = registry.ray_prefix(end, cap.max(needed + 1));
            return Some(FanCertificate { dominator, end, ray_prefix: ray, paths });
        }
    }
    let window = Truncation::first_n(g, cap);
    let targets: BTreeSet<Vertex> = ray.iter().copied().filter(|&v| v != dominator).collect();
    let paths = window.fan(dominator, &targets, k);
    (paths.len() == k).then(|| FanCertificate { dominator, end, ray_prefix: ray, paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Grid, InfiniteStar, Ray};
    use crate::graph::FiniteGraph;

    #[test]
    fn infinite_star_gives_star_at_hub() {
        let out = star_comb(&InfiniteStar, &|v: Vertex| v.0 >= 1, 5, 10).unwrap();
        match out {
            StarComb::Star(s) => {
                assert_eq!(s.center, Vertex(0));
                assert_eq!(s.leaves.len(), 5);
            }
            other => panic!("expected star, got {other:?}"),
        }
    }

    #[test]
    fn ray_gives_trivial_teeth() {
        let out = star_comb(&Ray, &|_| true, 3, 10).unwrap();
        let StarComb::Comb(c) = out else { panic!("expected comb") };
        assert!(c.tooth_paths.iter().all(|p| p.len() == 1));
        assert_eq!(c.anchor, SpineAnchor::Registry { end: EndId(0) });
        assert!(c.undominated);
    }

    #[test]
    fn grid_gives_comb_along_axis() {
        let out = star_comb(&Grid, &|_| true, 8, 12).unwrap();
        let StarComb::Comb(c) = out else { panic!("expected comb") };
        assert_eq!(c.teeth.len(), 8);
    }

    #[test]
    fn finite_star_tree() {
        let edges: Vec<_> = (1..=12).map(|i| (0, i)).collect();
        let g = FiniteGraph::new("k1-12", 13, &edges);
        let mut t = RootedLazyTree::new(Vertex(0));
        for i in 1..=12 {
            t.attach_path(&[Vertex(i), Vertex(0)]).unwrap();
        }
        t.validate(&g).unwrap();
        let TreeStar::Found(s) = star_in_rayless_tree(&t, &|v: Vertex| v.0 > 0, 5) else {
            panic!("expected a star")
        };
        assert_eq!(s.center, Vertex(0));
        assert!(!s.degenerate);
    }

    #[test]
    fn too_few_u_vertices() {
        let t = RootedLazyTree::new(Vertex(0));
        assert_eq!(star_in_rayless_tree(&t, &|_| true, 2), TreeStar::NotFound { available: 1 });
    }
}
