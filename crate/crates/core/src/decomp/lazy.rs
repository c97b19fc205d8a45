//! Family-supplied decompositions and spanning trees, given lazily.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::graph::{GraphOracle, Vertex};
use crate::tree::RootedLazyTree;

/// Node of a decomposition tree. Node `0` is the root.
pub type Node = usize;

type NodeParent = Arc<dyn Fn(Node) -> Option<Node> + Send + Sync>;
type NodeChildren = Arc<dyn Fn(Node) -> Vec<Node> + Send + Sync>;
type NodesOf = Arc<dyn Fn(Vertex) -> Vec<Node> + Send + Sync>;
type NodeSeparator = Arc<dyn Fn(Node) -> Vec<Vertex> + Send + Sync>;

/// A tree-decomposition whose tree and parts are given by rules.
///
/// `nodes_of(v)` lists the (finitely many) nodes whose part contains `v`;
/// `separator(c)` is the adhesion set on the edge from `c` to its parent.
#[derive(Clone)]
pub struct LazyDecomposition {
    pub name: String,
    parent: NodeParent,
    children: NodeChildren,
    nodes_of: NodesOf,
    separator: NodeSeparator,
}

impl fmt::Debug for LazyDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyDecomposition").field("name", &self.name).finish()
    }
}

impl LazyDecomposition {
    pub fn new(
        name: impl Into<String>,
        parent: NodeParent,
        children: NodeChildren,
        nodes_of: NodesOf,
        separator: NodeSeparator,
    ) -> Self {
        LazyDecomposition { name: name.into(), parent, children, nodes_of, separator }
    }

    /// The trivial decomposition with one part, the whole graph.
    pub fn single_part() -> Self {
        LazyDecomposition::new(
            "single-part",
            Arc::new(|_| None),
            Arc::new(|_| Vec::new()),
            Arc::new(|_| vec![0]),
            Arc::new(|_| Vec::new()),
        )
    }

    /// A path `0 – 1 – 2 – …` of parts.
    pub fn path(name: impl Into<String>, nodes_of: NodesOf, separator: NodeSeparator) -> Self {
        LazyDecomposition::new(
            name,
            Arc::new(|n| n.checked_sub(1)),
            Arc::new(|n| vec![n + 1]),
            nodes_of,
            separator,
        )
    }

    /// Decomposition along a rooted tree graph whose vertices are numbered like
    /// the nodes: part of `n` is `n` with its children, adhesion `{c}`.
    pub fn along_tree(name: impl Into<String>, parent: NodeParent, children: NodeChildren) -> Self {
        let p = parent.clone();
        LazyDecomposition::new(
            name,
            parent,
            children,
            Arc::new(move |v| {
                let mut nodes = vec![v.0];
                nodes.extend(p(v.0));
                nodes.sort();
                nodes
            }),
            Arc::new(|c| vec![Vertex(c)]),
        )
    }

    pub fn parent(&self, n: Node) -> Option<Node> {
        (self.parent)(n)
    }

    pub fn children(&self, n: Node) -> Vec<Node> {
        (self.children)(n)
    }

    pub fn nodes_of(&self, v: Vertex) -> Vec<Node> {
        (self.nodes_of)(v)
    }

    pub fn separator(&self, child: Node) -> Vec<Vertex> {
        (self.separator)(child)
    }

    pub fn in_part(&self, n: Node, v: Vertex) -> bool {
        self.nodes_of(v).contains(&n)
    }

    pub fn depth(&self, mut n: Node) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(n) {
            n = p;
            d += 1;
        }
        d
    }

    /// `a` lies on the root path of `b` (inclusive).
    pub fn is_ancestor(&self, a: Node, b: Node) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    /// Part of `n` restricted to the window below `cap`.
    pub fn part_below(&self, g: &dyn GraphOracle, n: Node, cap: usize) -> Vec<Vertex> {
        g.vertices_below(cap).into_iter().filter(|&v| self.in_part(n, v)).collect()
    }

    /// Nodes whose parts meet the window, with parent links.
    pub fn snapshot(&self, g: &dyn GraphOracle, cap: usize) -> BTreeMap<Node, Option<Node>> {
        let mut nodes = BTreeMap::new();
        for v in g.vertices_below(cap) {
            for n in self.nodes_of(v) {
                let mut cur = Some(n);
                while let Some(c) = cur {
                    if nodes.contains_key(&c) {
                        break;
                    }
                    let p = self.parent(c);
                    nodes.insert(c, p);
                    cur = p;
                }
            }
        }
        nodes
    }

    /// Down-closure in the decomposition tree of a set of nodes.
    pub fn down_closure(&self, nodes: impl IntoIterator<Item = Node>) -> BTreeSet<Node> {
        let mut out = BTreeSet::new();
        for n in nodes {
            let mut cur = Some(n);
            while let Some(c) = cur {
                if !out.insert(c) {
                    break;
                }
                cur = self.parent(c);
            }
        }
        out.insert(0);
        out
    }
}

/// A spanning tree of the whole graph given by parent links pointing to lower
/// indices, so that every finite window `first_n` is spanned by a subtree.
#[derive(Clone)]
pub struct LazySpanningTree {
    pub name: String,
    pub root: Vertex,
    parent: Arc<dyn Fn(Vertex) -> Option<Vertex> + Send + Sync>,
}

impl fmt::Debug for LazySpanningTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazySpanningTree").field("name", &self.name).finish()
    }
}

impl LazySpanningTree {
    pub fn new(
        name: impl Into<String>,
        root: Vertex,
        parent: Arc<dyn Fn(Vertex) -> Option<Vertex> + Send + Sync>,
    ) -> Self {
        LazySpanningTree { name: name.into(), root, parent }
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        (self.parent)(v)
    }

    /// The subtree on the first `n` vertices.
    pub fn snapshot(&self, n: usize) -> RootedLazyTree {
        let parent: BTreeMap<Vertex, Vertex> = (0..n)
            .map(Vertex)
            .filter_map(|v| self.parent(v).map(|p| (v, p)))
            .collect();
        RootedLazyTree::from_parents(self.root, &parent).expect("parents point to lower indices")
    }
}
