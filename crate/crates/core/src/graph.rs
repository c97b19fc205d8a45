//! Oracle model for countable graphs and the finite-stage primitives built on it.
//!
//! A graph is an adjacency oracle over a canonical vertex enumeration. Neighbour
//! streams may be infinite, so every algorithm in this crate works on a finite
//! window: the induced subgraph on the vertices whose index lies below a cap.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A vertex, identified by its position in the family's canonical enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub usize);

impl Vertex {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Identifier of a declared end in an [`EndRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EndId(pub usize);

pub type Path = Vec<Vertex>;
pub type Oracle = Arc<dyn GraphOracle>;
pub type VertexPredicate = Arc<dyn Fn(Vertex) -> bool + Send + Sync>;

/// A countable graph given by a vertex enumeration, lazy neighbour streams and
/// decidable adjacency.
///
/// Neighbour streams are ordered by the neighbour's index and may never
/// terminate. Consumers that need a finite answer go through
/// [`GraphOracle::neighbors_below`].
pub trait GraphOracle: Send + Sync {
    fn name(&self) -> String;

    /// Number of vertices, `None` when infinite.
    fn order(&self) -> Option<usize>;

    fn contains(&self, v: Vertex) -> bool {
        match self.order() {
            Some(n) => v.0 < n,
            None => true,
        }
    }

    /// All vertices with index below `cap`, ascending.
    fn vertices_below(&self, cap: usize) -> Vec<Vertex> {
        let end = self.order().map_or(cap, |n| n.min(cap));
        (0..end).map(Vertex).collect()
    }

    fn label(&self, v: Vertex) -> String {
        format!("v{}", v.0)
    }

    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_>;

    fn neighbors_below(&self, v: Vertex, cap: usize) -> Vec<Vertex> {
        self.neighbors(v).take_while(|u| u.0 < cap).collect()
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool;

    /// An index cap large enough to hold the ball of the given radius around the
    /// enumeration origin (with some slack).
    fn default_cap(&self, depth: usize) -> usize;

    fn registry(&self) -> &dyn EndRegistry;
}

/// Declared end metadata. Domination and end identity are not finitely
/// decidable from adjacency, so families declare them.
pub trait EndRegistry: Send + Sync {
    /// Declared ends relevant inside the window of vertices below `cap`.
    fn ends_below(&self, cap: usize) -> Vec<EndId>;

    fn is_dominated(&self, end: EndId) -> bool;

    /// The maximal prefix of the representative ray that stays below `cap`.
    fn ray_prefix(&self, end: EndId, cap: usize) -> Path;

    /// Whether `v` is a declared dominator of `end`.
    fn dominates(&self, end: EndId, v: Vertex) -> bool;

    /// Declared dominators below `cap`, ascending.
    fn dominators_below(&self, end: EndId, cap: usize) -> Vec<Vertex>;

    /// `k` paths from `dominator` to the representative ray, disjoint except at
    /// the dominator. `cap` bounds any search the registry has to do.
    fn fan(&self, end: EndId, dominator: Vertex, k: usize, cap: usize) -> Option<Vec<Path>>;
}

/// Registry of a rayless graph.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoEnds;

impl EndRegistry for NoEnds {
    fn ends_below(&self, _cap: usize) -> Vec<EndId> {
        Vec::new()
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        false
    }
    fn ray_prefix(&self, _end: EndId, _cap: usize) -> Path {
        Vec::new()
    }
    fn dominates(&self, _end: EndId, _v: Vertex) -> bool {
        false
    }
    fn dominators_below(&self, _end: EndId, _cap: usize) -> Vec<Vertex> {
        Vec::new()
    }
    fn fan(&self, _end: EndId, _d: Vertex, _k: usize, _cap: usize) -> Option<Vec<Path>> {
        None
    }
}

/// An explicit finite graph. Used for hand-made fixtures.
#[derive(Debug, Clone, Default)]
pub struct FiniteGraph {
    name: String,
    adj: Vec<Vec<Vertex>>,
}

impl FiniteGraph {
    pub fn new(name: impl Into<String>, n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n, "bad edge {a}-{b}");
            adj[a].insert(Vertex(b));
            adj[b].insert(Vertex(a));
        }
        FiniteGraph {
            name: name.into(),
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteGraph::new(format!("path-{n}"), n, &edges)
    }
}

impl GraphOracle for FiniteGraph {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn order(&self) -> Option<usize> {
        Some(self.adj.len())
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        match self.adj.get(v.0) {
            Some(list) => Box::new(list.iter().copied()),
            None => Box::new(std::iter::empty()),
        }
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(u.0).is_some_and(|l| l.binary_search(&v).is_ok())
    }
    fn default_cap(&self, _depth: usize) -> usize {
        self.adj.len()
    }
    fn registry(&self) -> &dyn EndRegistry {
        &NoEnds
    }
}

/// How a [`Truncation`] was cut out of its base graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TruncationMode {
    FirstN { n: usize },
    Ball { roots: Vec<Vertex>, radius: usize, cap: usize },
}

/// A finite induced subgraph of an oracle.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub mode: TruncationMode,
    adj: BTreeMap<Vertex, Vec<Vertex>>,
}

impl Truncation {
    /// Induced subgraph on the vertices with index below `n`.
    pub fn first_n(g: &dyn GraphOracle, n: usize) -> Self {
        let adj = g
            .vertices_below(n)
            .into_iter()
            .map(|v| (v, g.neighbors_below(v, n)))
            .collect();
        Truncation { mode: TruncationMode::FirstN { n }, adj }
    }

    /// Ball of the given radius around `roots`, computed inside the window below
    /// `cap`, avoiding `excluded`.
    pub fn ball(
        g: &dyn GraphOracle,
        roots: &[Vertex],
        radius: usize,
        cap: usize,
        excluded: &BTreeSet<Vertex>,
    ) -> Self {
        let mut dist: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &r in roots {
            if r.0 < cap && !excluded.contains(&r) && g.contains(r) && !dist.contains_key(&r) {
                dist.insert(r, 0);
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d == radius {
                continue;
            }
            for u in g.neighbors_below(v, cap) {
                if !excluded.contains(&u) && !dist.contains_key(&u) {
                    dist.insert(u, d + 1);
                    queue.push_back(u);
                }
            }
        }
        let adj = dist
            .keys()
            .map(|&v| {
                let nb = g
                    .neighbors_below(v, cap)
                    .into_iter()
                    .filter(|u| dist.contains_key(u))
                    .collect();
                (v, nb)
            })
            .collect();
        Truncation {
            mode: TruncationMode::Ball { roots: roots.to_vec(), radius, cap },
            adj,
        }
    }

    pub fn from_adjacency(mode: TruncationMode, adj: BTreeMap<Vertex, Vec<Vertex>>) -> Self {
        Truncation { mode, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adj.get(&v).map_or(&[], |l| l.as_slice())
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, l)| l.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Truncation {
        let adj = self
            .adj
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, l)| (v, l.iter().copied().filter(|u| keep.contains(u)).collect()))
            .collect();
        Truncation { mode: self.mode.clone(), adj }
    }

    /// Breadth-first distances from `sources`, never entering `blocked`.
    pub fn distances(
        &self,
        sources: &[Vertex],
        blocked: &BTreeSet<Vertex>,
    ) -> BTreeMap<Vertex, usize> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if self.contains(s) && !blocked.contains(&s) && !dist.contains_key(&s) {
                dist.insert(s, 0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for &u in self.neighbors(v) {
                if !blocked.contains(&u) && !dist.contains_key(&u) {
                    dist.insert(u, d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Connected components of the truncation minus `removed`, each sorted,
    /// listed by smallest vertex.
    pub fn components_without(&self, removed: &BTreeSet<Vertex>) -> Vec<Vec<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if removed.contains(&v) || seen.contains(&v) {
                continue;
            }
            let comp: Vec<Vertex> = self.distances(&[v], removed).into_keys().collect();
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.distances(&[v], &BTreeSet::new()).len() == self.len(),
        }
    }

    /// Lexicographically least shortest path from `from` to any vertex in
    /// `targets`, through vertices outside `blocked`.
    pub fn shortest_path(
        &self,
        from: Vertex,
        targets: &BTreeSet<Vertex>,
        blocked: &BTreeSet<Vertex>,
    ) -> Option<Path> {
        if targets.contains(&from) {
            return Some(vec![from]);
        }
        let target_list: Vec<Vertex> = targets.iter().copied().collect();
        let to_target = self.distances(&target_list, blocked);
        let mut d = *to_target.get(&from)?;
        let mut path = vec![from];
        let mut cur = from;
        while d > 0 {
            let next = self
                .neighbors(cur)
                .iter()
                .copied()
                .find(|u| to_target.get(u) == Some(&(d - 1)))?;
            path.push(next);
            cur = next;
            d -= 1;
        }
        Some(path)
    }

    /// A maximum set (capped at `k`) of `center`–`targets` paths that are
    /// disjoint except at `center` and meet `targets` only in their last vertex.
    pub fn fan(&self, center: Vertex, targets: &BTreeSet<Vertex>, k: usize) -> Vec<Path> {
        if !self.contains(center) || k == 0 {
            return Vec::new();
        }
        let verts: Vec<Vertex> = self.vertices().collect();
        let id: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = verts.len();
        // node 2i = in(v_i), 2i+1 = out(v_i), 2n = sink
        let sink = 2 * n;
        let mut net = FlowNet::new(2 * n + 1);
        let src = 2 * id[&center] + 1;
        for (i, &v) in verts.iter().enumerate() {
            let is_target = v != center && targets.contains(&v);
            if v != center {
                if is_target {
                    net.add(2 * i, sink);
                    continue;
                }
                net.add(2 * i, 2 * i + 1);
            }
            for u in self.neighbors(v) {
                if *u != center {
                    net.add(2 * i + 1, 2 * id[u]);
                }
            }
        }
        let flow = net.max_flow(src, sink, k);
        let mut paths = Vec::with_capacity(flow);
        for _ in 0..flow {
            let mut path = vec![center];
            let mut node = src;
            while node != sink {
                let e = net.take_flow_edge(node).expect("flow conservation");
                node = net.edges[e].to;
                if node != sink && node % 2 == 0 {
                    path.push(verts[node / 2]);
                }
            }
            paths.push(path);
        }
        paths.sort();
        paths
    }
}

struct FlowEdge {
    to: usize,
    cap: i32,
    flow: i32,
}

/// Unit-capacity network solved with breadth-first augmenting paths.
struct FlowNet {
    edges: Vec<FlowEdge>,
    out: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet { edges: Vec::new(), out: vec![Vec::new(); n] }
    }

    fn add(&mut self, a: usize, b: usize) {
        self.out[a].push(self.edges.len());
        self.edges.push(FlowEdge { to: b, cap: 1, flow: 0 });
        self.out[b].push(self.edges.len());
        self.edges.push(FlowEdge { to: a, cap: 0, flow: 0 });
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut total = 0;
        while total < limit {
            let mut via = vec![usize::MAX; self.out.len()];
            let mut queue = VecDeque::from([s]);
            via[s] = usize::MAX - 1;
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for &e in &self.out[x] {
                    let edge = &self.edges[e];
                    if edge.cap - edge.flow > 0 && via[edge.to] == usize::MAX {
                        via[edge.to] = e;
                        queue.push_back(edge.to);
                    }
                }
            }
            if via[t] == usize::MAX {
                break;
            }
            let mut x = t;
            while x != s {
                let e = via[x];
                self.edges[e].flow += 1;
                self.edges[e ^ 1].flow -= 1;
                x = self.edges[e ^ 1].to;
            }
            total += 1;
        }
        total
    }

    /// Consumes one unit of positive flow leaving `node` along a forward edge.
    fn take_flow_edge(&mut self, node: usize) -> Option<usize> {
        let e = *self.out[node]
            .iter()
            .find(|&&e| e % 2 == 0 && self.edges[e].flow > 0)?;
        self.edges[e].flow -= 1;
        Some(e)
    }
}

/// Ball of radius `depth` around `seed` in the component of `G − X` containing
/// `seed`. Vertices of `X` never appear.
pub fn component_after_deletion(
    g: &dyn GraphOracle,
    x: &BTreeSet<Vertex>,
    seed: Vertex,
    depth: usize,
) -> Truncation {
    let cap = g.default_cap(depth).max(seed.0 + depth + 1);
    component_after_deletion_in(g, x, seed, depth, cap)
}

pub fn component_after_deletion_in(
    g: &dyn GraphOracle,
    x: &BTreeSet<Vertex>,
    seed: Vertex,
    depth: usize,
    cap: usize,
) -> Truncation {
    assert!(!x.contains(&seed), "seed must lie outside the deleted set");
    Truncation::ball(g, &[seed], depth, cap, x)
}

/// Checks that `path` is a path in `g`: non-empty, injective, consecutive
/// vertices adjacent.
pub fn is_path(g: &dyn GraphOracle, path: &[Vertex]) -> bool {
    if path.is_empty() {
        return false;
    }
    let distinct: BTreeSet<_> = path.iter().collect();
    distinct.len() == path.len()
        && path.iter().all(|&v| g.contains(v))
        && path.windows(2).all(|w| g.adjacent(w[0], w[1]))
}

/// Whether `end` lies in the closure of `u` at window scale: for every tested
/// separator (balls of radius `0..=depth` around the origin and initial
/// segments of doubling length, restricted to the window) the component containing the tail of the representative ray meets
/// `u` outside the separator.
pub fn end_in_closure(
    window: &Truncation,
    registry: &dyn EndRegistry,
    end: EndId,
    u: &dyn Fn(Vertex) -> bool,
    cap: usize,
    depth: usize,
) -> bool {
    let ray = registry.ray_prefix(end, cap);
    let ray: Vec<Vertex> = ray.into_iter().filter(|v| window.contains(*v)).collect();
    let Some(origin) = window.vertices().next() else {
        return false;
    };
    for radius in 0..=depth {
        let sep: BTreeSet<Vertex> = window
            .distances(&[origin], &BTreeSet::new())
            .into_iter()
            .filter(|&(_, d)| d <= radius)
            .map(|(v, _)| v)
            .collect();
        let Some(&tail) = ray.iter().rev().find(|v| !sep.contains(v)) else {
            // The whole visible ray sits inside the separator; nothing more to test.
            break;
        };
        let comp = window.distances(&[tail], &sep);
        if !comp.keys().any(|&v| u(v)) {
            return false;
        }
    }
    // Balls can swallow the visible ray at once (a dominating vertex near the
    // origin), so initial segments of the enumeration are tested as well.
    let mut m = 1;
    while m * 2 <= window.len() {
        let sep: BTreeSet<Vertex> = window.vertices().take(m).collect();
        let Some(&tail) = ray.iter().rev().find(|v| !sep.contains(v)) else { break };
        let comp = window.distances(&[tail], &sep);
        if !comp.keys().any(|&v| u(v)) {
            return false;
        }
        m *= 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> FiniteGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        FiniteGraph::new("cycle", n, &edges)
    }

    #[test]
    fn first_n_is_induced() {
        let g = cycle(6);
        let t = Truncation::first_n(&g, 4);
        assert_eq!(t.len(), 4);
        assert!(t.adjacent(Vertex(0), Vertex(1)));
        assert!(!t.adjacent(Vertex(0), Vertex(5)));
        assert_eq!(t.edge_count(), 3);
    }

    #[test]
    fn deletion_respects_removed_set() {
        let g = FiniteGraph::path(10);
        let x: BTreeSet<_> = [Vertex(2)].into();
        let c = component_after_deletion(&g, &x, Vertex(0), 10);
        assert_eq!(c.vertex_set(), [Vertex(0), Vertex(1)].into());
    }

    #[test]
    fn fan_in_complete_bipartite() {
        // K_{1,5} plus a path through the leaves: max fan from hub to leaves is 5
        let mut edges: Vec<_> = (1..6).map(|i| (0, i)).collect();
        edges.extend((1..5).map(|i| (i, i + 1)));
        let g = FiniteGraph::new("fan5", 6, &edges);
        let t = Truncation::first_n(&g, 6);
        let targets: BTreeSet<_> = (1..6).map(Vertex).collect();
        let fan = t.fan(Vertex(0), &targets, 10);
        assert_eq!(fan.len(), 5);
        for p in &fan {
            assert_eq!(p.len(), 2);
        }
    }

    #[test]
    fn fan_needs_rerouting() {
        // center 0; targets 4,5. 0-1, 0-2, 1-4, 1-3, 2-3, 3-5.
        // Greedy 0-1-3-5 would block; max flow finds 0-1-4 and 0-2-3-5.
        let g = FiniteGraph::new("r", 6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (3, 5)]);
        let t = Truncation::first_n(&g, 6);
        let targets: BTreeSet<_> = [Vertex(4), Vertex(5)].into();
        let fan = t.fan(Vertex(0), &targets, 5);
        assert_eq!(fan.len(), 2);
        let inner: Vec<Vertex> = fan.iter().flat_map(|p| p[1..].iter().copied()).collect();
        let distinct: BTreeSet<_> = inner.iter().collect();
        assert_eq!(distinct.len(), inner.len());
    }

    #[test]
    fn shortest_path_prefers_low_indices() {
        let g = cycle(4);
        let t = Truncation::first_n(&g, 4);
        let p = t
            .shortest_path(Vertex(0), &[Vertex(2)].into(), &BTreeSet::new())
            .unwrap();
        assert_eq!(p, vec![Vertex(0), Vertex(1), Vertex(2)]);
    }
}
