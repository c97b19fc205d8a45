//! Restricting family decompositions to `U`, the separator hat, the
//! star-decomposition and the dominated subgraph.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::certificate::{Budgets, Certificate, LeafPartPayload, StarDecompositionPayload, VertexRef};
use crate::error::{Error, Result};
use crate::graph::{end_in_closure, EndId, GraphOracle, Oracle, Truncation, Vertex, VertexPredicate};
use crate::minor::InducedSubgraph;
use crate::starcomb::{closure_ends, star_comb, StarComb, CLOSURE_DEPTH};

use super::lazy::{LazyDecomposition, Node};

/// The decomposition induced on the down-closure `T'` of the nodes whose
/// parts meet `U` inside the window.
#[derive(Debug, Clone, Serialize)]
pub struct Restricted {
    pub cap: usize,
    pub kept: BTreeSet<Node>,
    /// Children of kept nodes that are not kept, with their separators.
    pub boundary: Vec<(Node, Vec<Vertex>)>,
    /// Undominated ends in the closure of `U` whose ray tail stays in kept parts.
    pub displayed: Vec<EndId>,
    /// Undominated ends in the closure of `U` that escape the kept parts.
    pub undisplayed: Vec<EndId>,
}

fn kept_nodes(g: &dyn GraphOracle, dec: &LazyDecomposition, u: &dyn Fn(Vertex) -> bool, cap: usize) -> BTreeSet<Node> {
    let meeting = g.vertices_below(cap).into_iter().filter(|&v| u(v)).flat_map(|v| dec.nodes_of(v));
    dec.down_closure(meeting)
}

pub fn restrict_displaying(
    g: &dyn GraphOracle,
    dec: &LazyDecomposition,
    u: &dyn Fn(Vertex) -> bool,
    cap: usize,
    depth: usize,
) -> Restricted {
    let kept = kept_nodes(g, dec, u, cap);
    let snapshot = dec.snapshot(g, cap);
    let boundary: Vec<(Node, Vec<Vertex>)> = snapshot
        .iter()
        .filter(|&(n, p)| !kept.contains(n) && p.is_some_and(|p| kept.contains(&p)))
        .map(|(&n, _)| (n, dec.separator(n)))
        .collect();
    let window = Truncation::first_n(g, cap);
    let registry = g.registry();
    let (displayed, undisplayed) = closure_ends(&window, registry, u, cap, depth)
        .into_iter()
        .filter(|&e| !registry.is_dominated(e))
        .partition(|&e| {
            let ray = registry.ray_prefix(e, cap);
            let tail = &ray[ray.len() / 2..];
            tail.iter().all(|&v| dec.nodes_of(v).iter().any(|n| kept.contains(n)))
        });
    Restricted { cap, kept, boundary, displayed, undisplayed }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatorHat {
    /// Separator vertices added to `U`.
    pub added: Vec<Vertex>,
    /// Ends whose closure verdict differs between `U` and `Û`.
    pub changed: Vec<EndId>,
}

/// `Û`: `U` together with the separators of the restricted decomposition.
pub fn separator_hat(
    g: &dyn GraphOracle,
    dec: &LazyDecomposition,
    u: &dyn Fn(Vertex) -> bool,
    cap: usize,
    depth: usize,
) -> Result<SeparatorHat> {
    let r = restrict_displaying(g, dec, u, cap, depth);
    let window = Truncation::first_n(g, cap);
    let mut seps: Vec<BTreeSet<Vertex>> = Vec::new();
    for &n in r.kept.iter().filter(|&&n| n != 0) {
        let sep: BTreeSet<Vertex> = dec.separator(n).into_iter().filter(|v| window.contains(*v)).collect();
        if sep.is_empty() {
            continue;
        }
        if !window.induced(&sep).is_connected() {
            return Err(Error::Precondition(format!("separator of node {n} is not connected")));
        }
        if seps.iter().any(|s| !s.is_disjoint(&sep)) {
            return Err(Error::Precondition(format!("separator of node {n} meets another separator")));
        }
        seps.push(sep);
    }
    let added: BTreeSet<Vertex> = seps.into_iter().flatten().filter(|&v| !u(v)).collect();
    let hat = |v: Vertex| u(v) || added.contains(&v);
    let registry = g.registry();
    let closure_depth = depth.min(CLOSURE_DEPTH);
    let changed = registry
        .ends_below(cap)
        .into_iter()
        .filter(|&e| end_in_closure(&window, registry, e, u, cap, closure_depth) != end_in_closure(&window, registry, e, &hat, cap, closure_depth))
        .collect();
    Ok(SeparatorHat { added: added.into_iter().collect(), changed })
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafPart {
    pub node: Node,
    pub separator: Vec<Vertex>,
    /// Leaf-part vertices inside the window.
    pub sample: Vec<Vertex>,
}

/// A star-shaped decomposition sampled on the window below `cap`.
#[derive(Debug, Clone, Serialize)]
pub struct StarDecomposition {
    pub cap: usize,
    /// The nodes contracted into the centre.
    pub central_nodes: Vec<Node>,
    pub central: Vec<Vertex>,
    pub leaves: Vec<LeafPart>,
}

impl StarDecomposition {
    /// Every leaf has vertices outside the centre, every separator lies in
    /// the window and every undominated end is tracked into a leaf.
    pub fn exposes_leaves(&self, g: &dyn GraphOracle) -> bool {
        self.leaves.iter().all(|l| {
            l.separator.iter().all(|v| v.0 < self.cap) && l.sample.iter().any(|v| !self.in_central(*v))
        }) && self.end_leaves(g).iter().all(|(_, leaf)| leaf.is_some())
    }

    pub fn in_central(&self, v: Vertex) -> bool {
        self.central.binary_search(&v).is_ok()
    }

    /// Leaf whose part contains the tail of each undominated declared end.
    pub fn end_leaves(&self, g: &dyn GraphOracle) -> Vec<(EndId, Option<Node>)> {
        let registry = g.registry();
        registry
            .ends_below(self.cap)
            .into_iter()
            .filter(|&e| !registry.is_dominated(e))
            .map(|e| {
                let ray = registry.ray_prefix(e, self.cap);
                let tail: Vec<Vertex> = ray[ray.len() * 3 / 4..].iter().copied().filter(|v| v.0 < self.cap).collect();
                let leaf = self
                    .leaves
                    .iter()
                    .find(|l| !tail.is_empty() && tail.iter().all(|v| l.sample.binary_search(v).is_ok() && !self.in_central(*v)))
                    .map(|l| l.node);
                (e, leaf)
            })
            .collect()
    }

    pub fn to_certificate(&self, g: &dyn GraphOracle, family: &str, preset: &str, depth: usize) -> Certificate {
        let refs = |vs: &[Vertex]| vs.iter().map(|&v| VertexRef::new(g, v)).collect::<Vec<_>>();
        let payload = StarDecompositionPayload {
            preset: preset.into(),
            cap: self.cap,
            central: refs(&self.central),
            leaves: self
                .leaves
                .iter()
                .map(|l| LeafPartPayload { node: l.node, separator: refs(&l.separator), sample: refs(&l.sample) })
                .collect(),
        };
        Certificate::star_decomposition(family, Budgets { k: 0, depth, steps: None }, payload)
    }
}

/// Contract `T'` to the centre and each component of `D − T'` to a leaf.
/// Fails with a duality violation when an undominated end lies in the closure
/// of `u`: the comb side applies instead.
pub fn star_decomposition(
    g: &dyn GraphOracle,
    u: &dyn Fn(Vertex) -> bool,
    dec: &LazyDecomposition,
    cap: usize,
    depth: usize,
) -> Result<StarDecomposition> {
    let window = Truncation::first_n(g, cap);
    let registry = g.registry();
    if let Some(e) = closure_ends(&window, registry, u, cap, depth).into_iter().find(|&e| !registry.is_dominated(e)) {
        return Err(Error::Duality(format!("undominated end {} lies in the closure of U", e.0)));
    }
    let kept = kept_nodes(g, dec, u, cap);
    // Leaf parts are sampled on a window large enough to reach past the
    // centre and the separators, so each leaf shows vertices of its own.
    let mut sample_depth = depth;
    loop {
        let sample_cap = g.default_cap(sample_depth).max(cap);
        let sd = sample_star(g, dec, &kept, sample_cap);
        if sd.exposes_leaves(g) || sample_depth >= depth + SAMPLE_SLACK {
            return Ok(sd);
        }
        sample_depth += 1;
    }
}

/// Extra depth the leaf sampling window may grow by.
const SAMPLE_SLACK: usize = 16;

fn sample_star(g: &dyn GraphOracle, dec: &LazyDecomposition, kept: &BTreeSet<Node>, cap: usize) -> StarDecomposition {
    let window = Truncation::first_n(g, cap);
    let snapshot = dec.snapshot(g, cap);
    let leaf_roots: Vec<Node> = snapshot
        .iter()
        .filter(|&(n, p)| !kept.contains(n) && p.is_some_and(|p| kept.contains(&p)))
        .map(|(&n, _)| n)
        .collect();
    let mut central = Vec::new();
    let mut samples: BTreeMap<Node, Vec<Vertex>> = leaf_roots.iter().map(|&c| (c, Vec::new())).collect();
    for v in window.vertices() {
        let nodes = dec.nodes_of(v);
        if nodes.iter().any(|n| kept.contains(n)) {
            central.push(v);
        }
        for &c in &leaf_roots {
            if nodes.iter().any(|&n| dec.is_ancestor(c, n)) {
                samples.get_mut(&c).expect("leaf root").push(v);
            }
        }
    }
    let leaves = samples
        .into_iter()
        .map(|(node, sample)| LeafPart { node, separator: dec.separator(node), sample })
        .collect();
    StarDecomposition { cap, central_nodes: kept.iter().copied().collect(), central, leaves }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominatedEnd {
    pub end: EndId,
    pub dominator: Option<Vertex>,
    /// Size of the fan found inside `H`, capped at the budget.
    pub fan: usize,
    /// The budget, or the number of visible ray vertices when fewer.
    pub needed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominatedSubgraph {
    /// `H` restricted to the window.
    pub vertices: Vec<Vertex>,
    pub connected: bool,
    pub contains_u: bool,
    /// Ends whose ray eventually stays in `H`, with their fans inside `H`.
    pub ends: Vec<DominatedEnd>,
    /// A comb attached to `U` inside `H`, if found, is dominated inside `H`.
    pub comb_in_h_dominated: Option<bool>,
}

impl DominatedSubgraph {
    pub fn ok(&self, k: usize) -> bool {
        self.connected
            && self.contains_u
            && self.ends.iter().all(|e| e.fan >= e.needed.min(k))
            && self.comb_in_h_dominated != Some(false)
    }
}

/// `H = G[central part]` with its audit: every end living in `H` gets a
/// `k`-fan inside `H` from a central vertex.
pub fn dominated_subgraph(
    g: Oracle,
    u: VertexPredicate,
    sd: &StarDecomposition,
    k: usize,
    depth: usize,
) -> DominatedSubgraph {
    let central: BTreeSet<Vertex> = sd.central.iter().copied().collect();
    let cap = sd.cap;
    let keep: VertexPredicate = {
        let central = central.clone();
        Arc::new(move |v: Vertex| central.contains(&v))
    };
    let h = Arc::new(InducedSubgraph::new(g.clone(), keep, "central"));
    let hw = Truncation::first_n(h.as_ref(), cap);
    let contains_u = g.vertices_below(cap).into_iter().filter(|&v| u(v)).all(|v| central.contains(&v));
    let registry = h.registry();
    let ends = registry
        .ends_below(cap)
        .into_iter()
        .map(|end| {
            let ray: BTreeSet<Vertex> = registry.ray_prefix(end, cap).into_iter().collect();
            let needed = k.min(ray.len().saturating_sub(1));
            let mut best = DominatedEnd { end, dominator: None, fan: 0, needed };
            let mut candidates = registry.dominators_below(end, cap);
            candidates.extend(hw.vertices().take(8));
            for d in candidates {
                let targets: BTreeSet<Vertex> = ray.iter().copied().filter(|&r| r != d).collect();
                let size = hw.fan(d, &targets, needed).len();
                if size > best.fan {
                    best = DominatedEnd { end, dominator: Some(d), fan: size, needed };
                }
                if size >= needed {
                    break;
                }
            }
            best
        })
        .collect::<Vec<_>>();
    // Only combs along a declared end say anything: a continuation comb in a
    // finite window need not extend to a ray of `H`.
    let comb_in_h_dominated = match star_comb(h.as_ref(), &|v| u(v), k, depth) {
        Ok(StarComb::Comb(c)) => match c.anchor {
            crate::certificate::SpineAnchor::Registry { end } => Some(ends.iter().any(|e| e.end == end && e.fan >= e.needed)),
            crate::certificate::SpineAnchor::Continuation { .. } => None,
        },
        _ => None,
    };
    DominatedSubgraph {
        vertices: central.iter().copied().collect(),
        connected: hw.is_connected(),
        contains_u,
        ends,
        comb_in_h_dominated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family;

    #[test]
    fn ray_origin_splits_at_one_vertex() {
        let spec = family("ray").unwrap();
        let u = |v: Vertex| v.0 == 0;
        let sd = star_decomposition(spec.oracle.as_ref(), &u, &spec.decomposition, 30, 10).unwrap();
        assert_eq!(sd.central, vec![Vertex(0), Vertex(1)]);
        assert_eq!(sd.leaves.len(), 1);
        assert_eq!(sd.leaves[0].separator, vec![Vertex(1)]);
        assert_eq!(sd.end_leaves(spec.oracle.as_ref()), vec![(EndId(0), Some(1))]);
    }

    #[test]
    fn ray_all_is_a_duality_violation() {
        let spec = family("ray").unwrap();
        let err = star_decomposition(spec.oracle.as_ref(), &|_| true, &spec.decomposition, 30, 10).unwrap_err();
        assert!(matches!(err, Error::Duality(_)));
    }

    #[test]
    fn restriction_of_ray_to_origin_is_root() {
        let spec = family("ray").unwrap();
        let r = restrict_displaying(spec.oracle.as_ref(), &spec.decomposition, &|v| v.0 == 0, 30, 10);
        assert_eq!(r.kept, [0].into());
    }

    #[test]
    fn hat_of_even_ray_vertices() {
        let spec = family("ray").unwrap();
        let hat = separator_hat(spec.oracle.as_ref(), &spec.decomposition, &|v| v.0 % 2 == 0, 30, 10).unwrap();
        assert!(hat.added.iter().all(|v| v.0 % 2 == 1));
        assert!(hat.changed.is_empty());
    }
}
