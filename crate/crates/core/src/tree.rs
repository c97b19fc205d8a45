//! Incrementally grown rooted trees with tree-order queries.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphOracle, Path, Vertex};

/// One growth step: `path` was added, its last vertex already in the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachEvent {
    pub step: usize,
    pub path: Path,
    pub attached_at: Vertex,
    pub attach_height: usize,
}

/// A rooted tree over discovered vertices, grown by attaching paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedLazyTree {
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
    height: BTreeMap<Vertex, usize>,
    children: BTreeMap<Vertex, Vec<Vertex>>,
    log: Vec<AttachEvent>,
}

impl RootedLazyTree {
    pub fn new(root: Vertex) -> Self {
        RootedLazyTree {
            root,
            parent: BTreeMap::new(),
            height: [(root, 0)].into(),
            children: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    /// Build from parent links. Every non-root vertex must reach the root.
    pub fn from_parents(root: Vertex, parent: &BTreeMap<Vertex, Vertex>) -> Result<Self> {
        let mut tree = RootedLazyTree::new(root);
        let mut pending: Vec<Vertex> = parent.keys().copied().collect();
        while !pending.is_empty() {
            let before = pending.len();
            pending.retain(|&v| {
                let p = parent[&v];
                if tree.contains(p) {
                    tree.link(v, p);
                    false
                } else {
                    true
                }
            });
            if pending.len() == before {
                return Err(Error::Invariant(format!(
                    "parent links do not reach the root from {}",
                    pending[0]
                )));
            }
        }
        Ok(tree)
    }

    fn link(&mut self, child: Vertex, parent: Vertex) {
        let h = self.height[&parent] + 1;
        self.parent.insert(child, parent);
        self.height.insert(child, h);
        let kids = self.children.entry(parent).or_default();
        let pos = kids.binary_search(&child).unwrap_or_else(|e| e);
        kids.insert(pos, child);
    }

    /// Attach `path` whose last vertex lies in the tree and whose other vertices
    /// do not. The first vertex ends up highest.
    pub fn attach_path(&mut self, path: &[Vertex]) -> Result<&AttachEvent> {
        let (&anchor, rest) = path
            .split_last()
            .ok_or_else(|| Error::Invariant("empty attachment path".into()))?;
        if !self.contains(anchor) {
            return Err(Error::Invariant(format!("attachment vertex {anchor} not in tree")));
        }
        let fresh: BTreeSet<Vertex> = rest.iter().copied().collect();
        if fresh.len() != rest.len() || rest.iter().any(|&v| self.contains(v)) {
            return Err(Error::Invariant("attachment path meets the tree twice".into()));
        }
        let mut prev = anchor;
        for &v in rest.iter().rev() {
            self.link(v, prev);
            prev = v;
        }
        let event = AttachEvent {
            step: self.log.len() + 1,
            path: path.to_vec(),
            attached_at: anchor,
            attach_height: self.height[&anchor],
        };
        self.log.push(event);
        Ok(self.log.last().expect("just pushed"))
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.height.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.height.len()
    }

    pub fn is_empty(&self) -> bool {
        self.height.is_empty()
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied()
    }

    pub fn height(&self, v: Vertex) -> Option<usize> {
        self.height.get(&v).copied()
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        self.children.get(&v).map_or(&[], |c| c.as_slice())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.height.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.height.keys().copied().collect()
    }

    /// Tree edges as `(parent, child)`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn log(&self) -> &[AttachEvent] {
        &self.log
    }

    /// Maximum height; the radius seen from the root.
    pub fn radius(&self) -> usize {
        self.height.values().copied().max().unwrap_or(0)
    }

    /// Path from `v` down to the root, `v` first.
    pub fn root_path(&self, v: Vertex) -> Path {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path
    }

    /// The down-closure `⌈v⌉`: `v` and all its ancestors.
    pub fn down_closure(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.root_path(v).into_iter().collect()
    }

    /// `a ≤ b` in the tree order.
    pub fn is_ancestor(&self, a: Vertex, b: Vertex) -> bool {
        let (Some(ha), Some(hb)) = (self.height(a), self.height(b)) else {
            return false;
        };
        if ha > hb {
            return false;
        }
        let mut cur = b;
        for _ in 0..(hb - ha) {
            cur = self.parent(cur).expect("heights are consistent");
        }
        cur == a
    }

    pub fn comparable(&self, a: Vertex, b: Vertex) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    /// The up-closure `⌊v⌋`: `v` and all its descendants.
    pub fn up_closure(&self, v: Vertex) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            if out.insert(x) {
                stack.extend(self.children(x).iter().copied());
            }
        }
        out
    }

    /// The unique tree path from `a` to `b`.
    pub fn tree_path(&self, a: Vertex, b: Vertex) -> Path {
        let pa = self.root_path(a);
        let pb = self.root_path(b);
        let sb: BTreeSet<Vertex> = pb.iter().copied().collect();
        let meet_pos = pa.iter().position(|v| sb.contains(v)).expect("common root");
        let meet = pa[meet_pos];
        let mut path: Path = pa[..=meet_pos].to_vec();
        let pos_b = pb.iter().position(|&v| v == meet).expect("meet on b side");
        path.extend(pb[..pos_b].iter().rev());
        path
    }

    /// Vertices with no children.
    pub fn leaves(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.children(v).is_empty()).collect()
    }

    /// Checks the structural invariants and that every tree edge is a host edge.
    pub fn validate(&self, g: &dyn GraphOracle) -> Result<()> {
        if self.parent.contains_key(&self.root) {
            return Err(Error::Invariant("root has a parent".into()));
        }
        for (c, p) in &self.parent {
            if self.height[c] != self.height[p] + 1 {
                return Err(Error::Invariant(format!("height mismatch at {c}")));
            }
            if !g.adjacent(*c, *p) {
                return Err(Error::Invariant(format!("tree edge {p}-{c} missing in host")));
            }
        }
        Ok(())
    }

    /// The subtree spanned by the down-closure of `keep` (all vertices on root
    /// paths of `keep`), with the same root.
    pub fn down_closure_of(&self, keep: impl IntoIterator<Item = Vertex>) -> RootedLazyTree {
        let mut vs = BTreeSet::new();
        for v in keep {
            if self.contains(v) {
                vs.extend(self.root_path(v));
            }
        }
        let parent: BTreeMap<Vertex, Vertex> = vs
            .iter()
            .filter_map(|&v| self.parent(v).map(|p| (v, p)))
            .collect();
        RootedLazyTree::from_parents(self.root, &parent).expect("down-closed subtree")
    }

    /// Per-branch summary: for each child of the root, the maximum height
    /// inside its subtree.
    pub fn branch_heights(&self) -> Vec<(Vertex, usize)> {
        self.children(self.root)
            .iter()
            .map(|&c| {
                let h = self
                    .up_closure(c)
                    .into_iter()
                    .map(|v| self.height[&v])
                    .max()
                    .unwrap_or(1);
                (c, h)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attach_and_order() {
        let mut t = RootedLazyTree::new(Vertex(0));
        t.attach_path(&[Vertex(2), Vertex(1), Vertex(0)]).unwrap();
        t.attach_path(&[Vertex(3), Vertex(1)]).unwrap();
        assert_eq!(t.height(Vertex(2)), Some(2));
        assert!(t.is_ancestor(Vertex(1), Vertex(3)));
        assert!(!t.comparable(Vertex(2), Vertex(3)));
        assert_eq!(t.tree_path(Vertex(2), Vertex(3)), vec![Vertex(2), Vertex(1), Vertex(3)]);
        assert_eq!(t.log()[1].attach_height, 1);
    }

    #[test]
    fn reattaching_fails() {
        let mut t = RootedLazyTree::new(Vertex(0));
        t.attach_path(&[Vertex(1), Vertex(0)]).unwrap();
        assert!(t.attach_path(&[Vertex(1), Vertex(0)]).is_err());
        assert!(t.attach_path(&[Vertex(5), Vertex(4)]).is_err());
    }
}
