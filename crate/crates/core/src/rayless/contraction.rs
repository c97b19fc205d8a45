//! Contracting dominating stars onto a normal tree, and lifting rayless trees
//! back through a contraction.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EndId, Oracle, Path, Truncation, Vertex};
use crate::minor::{contract, pass_on, Branch, BranchPartition, Contraction, PassedOn};
use crate::normal::normal_ray_end_check;
use crate::tree::RootedLazyTree;

/// The choices made for one normal ray `R` whose dominator lies off the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayChoice {
    pub end: EndId,
    /// The normal-ray prefix of `T` tracking the end.
    pub ray: Path,
    pub dominator: Vertex,
    /// The component of `window − T` containing the dominator, sorted.
    pub component: Vec<Vertex>,
    /// From the dominator to its landing vertex on the ray.
    pub path: Path,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationContraction {
    pub rays: Vec<RayChoice>,
    /// Normal rays whose chosen dominator already lies on the tree.
    pub dominated_by_tree: Vec<EndId>,
    pub partition: BranchPartition,
    pub passed_on: PassedOn,
    #[serde(skip)]
    pub minor: Arc<Contraction>,
}

/// Build the star branch sets `S_R` for the normal rays of `tree` and contract
/// them. Each dominator is the lowest-index declared one; each path lands on
/// the lowest-index ray vertex adjacent to the dominator's component.
pub fn build_domination_contraction(
    g: Oracle,
    tree: &RootedLazyTree,
    cap: usize,
    depth: usize,
) -> Result<DominationContraction> {
    let window = Truncation::first_n(g.as_ref(), cap);
    let registry = g.registry();
    let in_tree = tree.vertex_set();
    let mut rays = Vec::new();
    let mut dominated_by_tree = Vec::new();
    for m in normal_ray_end_check(tree, g.as_ref(), &window, cap, depth, usize::MAX) {
        if !registry.is_dominated(m.end) {
            continue;
        }
        let dominator = *registry
            .dominators_below(m.end, cap)
            .first()
            .ok_or_else(|| Error::Precondition(format!("end {} has no dominator inside the window", m.end.0)))?;
        if in_tree.contains(&dominator) {
            dominated_by_tree.push(m.end);
            continue;
        }
        let component: BTreeSet<Vertex> = window.distances(&[dominator], &in_tree).into_keys().collect();
        let landing = m
            .chain
            .iter()
            .copied()
            .filter(|r| window.neighbors(*r).iter().any(|v| component.contains(v)))
            .min()
            .ok_or_else(|| Error::Invariant(format!("dominator {} does not reach its ray", dominator.0)))?;
        let mut keep = component.clone();
        keep.insert(landing);
        let path = window
            .induced(&keep)
            .shortest_path(dominator, &[landing].into(), &BTreeSet::new())
            .expect("component touches the landing vertex");
        rays.push(RayChoice { end: m.end, ray: m.chain, dominator, component: component.into_iter().collect(), path });
    }
    for (i, a) in rays.iter().enumerate() {
        for b in &rays[i + 1..] {
            if a.component == b.component && a.dominator != b.dominator {
                return Err(Error::Invariant(format!(
                    "ends {} and {} share the component of their dominators",
                    a.end.0, b.end.0
                )));
            }
        }
    }
    // S_R: union of the paths landing at the same vertex, centred there.
    let mut stars: BTreeMap<Vertex, BTreeMap<Vertex, Vertex>> = BTreeMap::new();
    for choice in &rays {
        let centre = *choice.path.last().expect("non-empty path");
        let parents = stars.entry(centre).or_default();
        for w in choice.path.windows(2) {
            parents.entry(w[0]).or_insert(w[1]);
        }
    }
    let branches: Vec<Branch> = stars.into_iter().map(|(c, p)| Branch::from_tree(c, p)).collect();
    let partition = BranchPartition::new(branches)?;
    let minor = Arc::new(contract(g, partition.clone(), true)?);
    let verts: Vec<Vertex> = tree.vertices().collect();
    let edges: Vec<(Vertex, Vertex)> = tree.edges().collect();
    let passed_on = pass_on(&minor, &verts, &edges);
    Ok(DominationContraction { rays, dominated_by_tree, partition, passed_on, minor })
}

impl DominationContraction {
    /// Each star meets the tree exactly in its centre.
    pub fn stars_meet_tree_once(&self, tree: &RootedLazyTree) -> bool {
        self.partition
            .branches()
            .iter()
            .all(|b| b.members.iter().filter(|v| tree.contains(**v)).count() == 1 && tree.contains(b.tree_root))
    }
}

/// Lift a tree of the contraction `h` to the base graph: the branch spanning
/// trees plus, per tree edge, the lowest host edge between the two branches.
pub fn lift_rayless(tree_in_h: &RootedLazyTree, h: &Contraction, cap: usize) -> Result<RootedLazyTree> {
    let g = h.base();
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    let link = |a: Vertex, b: Vertex, adj: &mut BTreeMap<Vertex, BTreeSet<Vertex>>| {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    };
    for v in tree_in_h.vertices() {
        adj.entry(v).or_default();
        if let Some(b) = h.partition().branch(v) {
            for m in &b.members {
                adj.entry(*m).or_default();
            }
            for (p, c) in b.tree_edges() {
                link(p, c, &mut adj);
            }
        }
    }
    for (p, c) in tree_in_h.edges() {
        let mp = h.partition().members(p);
        let mc: BTreeSet<Vertex> = h.partition().members(c).into_iter().collect();
        let edge = mp
            .iter()
            .flat_map(|&a| {
                let mc = &mc;
                g.neighbors_below(a, cap.max(a.0 + 1))
                    .into_iter()
                    .filter(move |b| mc.contains(b))
                    .map(move |b| (a, b))
            })
            .min()
            .or_else(|| {
                mp.iter()
                    .flat_map(|&a| mc.iter().map(move |&b| (a, b)))
                    .find(|&(a, b)| g.adjacent(a, b))
            })
            .ok_or_else(|| Error::Invariant(format!("no host edge between branches {} and {}", p.0, c.0)))?;
        link(edge.0, edge.1, &mut adj);
    }
    let root = h.partition().branch(tree_in_h.root()).map_or(tree_in_h.root(), |b| b.tree_root);
    let mut parent = BTreeMap::new();
    let mut seen: BTreeSet<Vertex> = [root].into();
    let mut stack = vec![root];
    let mut edge_count = 0;
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                parent.insert(w, v);
                stack.push(w);
            }
        }
    }
    for nb in adj.values() {
        edge_count += nb.len();
    }
    if seen.len() != adj.len() || edge_count / 2 != adj.len() - 1 {
        return Err(Error::Invariant("lifted subgraph is not a tree".into()));
    }
    let tree = RootedLazyTree::from_parents(root, &parent)?;
    tree.validate(g.as_ref())?;
    Ok(tree)
}
