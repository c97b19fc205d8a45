//! The catalog oracles. Each type implements both the adjacency oracle and its
//! declared end registry.

use itertools::Itertools;

use crate::graph::{EndId, EndRegistry, GraphOracle, NoEnds, Path, Vertex};

/// One-ended ray `v0 v1 v2 …`.
pub struct Ray;

impl GraphOracle for Ray {
    fn name(&self) -> String {
        "ray".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let i = v.0;
        Box::new(i.checked_sub(1).into_iter().chain([i + 1]).map(Vertex))
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        u.0.abs_diff(v.0) == 1
    }
    fn default_cap(&self, depth: usize) -> usize {
        depth + 17
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for Ray {
    fn ends_below(&self, _cap: usize) -> Vec<EndId> {
        vec![EndId(0)]
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        false
    }
    fn ray_prefix(&self, _end: EndId, cap: usize) -> Path {
        (0..cap).map(Vertex).collect()
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

/// Shared registry shape for one-ended graphs whose single end is undominated
/// and whose representative ray is an index progression.
fn progression(start: usize, step: usize, cap: usize) -> Path {
    (0..)
        .map(|i| start + i * step)
        .take_while(|&x| x < cap)
        .map(Vertex)
        .collect()
}

macro_rules! undominated_one_end {
    ($ty:ty, $start:expr, $step:expr) => {
        impl EndRegistry for $ty {
            fn ends_below(&self, _cap: usize) -> Vec<EndId> {
                vec![EndId(0)]
            }
            fn is_dominated(&self, _end: EndId) -> bool {
                false
            }
            fn ray_prefix(&self, _end: EndId, cap: usize) -> Path {
                progression($start, $step, cap)
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
    };
}

/// One-way ladder: bottom rail `b_i = 2i`, top rail `t_i = 2i+1`, rungs `b_i t_i`.
pub struct Ladder;

impl GraphOracle for Ladder {
    fn name(&self) -> String {
        "ladder".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        let side = if v.0 % 2 == 0 { 'b' } else { 't' };
        format!("{side}{}", v.0 / 2)
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let i = v.0;
        let list = if i % 2 == 0 {
            vec![i.checked_sub(2), Some(i + 1), Some(i + 2)]
        } else {
            vec![i.checked_sub(2), Some(i - 1), Some(i + 2)]
        };
        let mut list: Vec<Vertex> = list.into_iter().flatten().map(Vertex).collect();
        list.sort();
        Box::new(list.into_iter())
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = (u.0.min(v.0), u.0.max(v.0));
        b - a == 2 || (a % 2 == 0 && b == a + 1)
    }
    fn default_cap(&self, depth: usize) -> usize {
        2 * depth + 18
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

undominated_one_end!(Ladder, 0, 2);

/// Comb graph: spine `s_i = 2i`, pendant tooth `t_i = 2i+1`.
pub struct CombGraph;

impl GraphOracle for CombGraph {
    fn name(&self) -> String {
        "comb".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        let side = if v.0 % 2 == 0 { 's' } else { 't' };
        format!("{side}{}", v.0 / 2)
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let i = v.0;
        let list: Vec<Vertex> = if i % 2 == 0 {
            [i.checked_sub(2), Some(i + 1), Some(i + 2)]
                .into_iter()
                .flatten()
                .map(Vertex)
                .collect()
        } else {
            vec![Vertex(i - 1)]
        };
        Box::new(list.into_iter())
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = (u.0.min(v.0), u.0.max(v.0));
        a % 2 == 0 && (b == a + 1 || b == a + 2)
    }
    fn default_cap(&self, depth: usize) -> usize {
        2 * depth + 18
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

undominated_one_end!(CombGraph, 0, 2);

/// The grid ℤ², enumerated breadth-first from the origin: diamond `d` (points
/// with `|x|+|y| = d`) is listed counter-clockwise from `(d, 0)`.
pub struct Grid;

impl Grid {
    pub fn diamond_start(d: usize) -> usize {
        if d == 0 {
            0
        } else {
            1 + 2 * d * (d - 1)
        }
    }

    pub fn coords(v: Vertex) -> (i64, i64) {
        let i = v.0;
        if i == 0 {
            return (0, 0);
        }
        let mut d = ((i as f64 / 2.0).sqrt() as usize).max(1);
        while Grid::diamond_start(d + 1) <= i {
            d += 1;
        }
        while Grid::diamond_start(d) > i {
            d -= 1;
        }
        let j = i - Grid::diamond_start(d);
        let (s, t) = ((j / d) as i64, (j % d) as i64);
        let d = d as i64;
        match s {
            0 => (d - t, t),
            1 => (-t, d - t),
            2 => (-d + t, -t),
            _ => (t, -d + t),
        }
    }

    pub fn index(x: i64, y: i64) -> Vertex {
        let d = (x.abs() + y.abs()) as usize;
        if d == 0 {
            return Vertex(0);
        }
        let di = d as i64;
        let j = if x > 0 && y >= 0 {
            y
        } else if x <= 0 && y > 0 {
            di - x
        } else if x < 0 && y <= 0 {
            2 * di - y
        } else {
            3 * di + x
        };
        Vertex(Grid::diamond_start(d) + j as usize)
    }

    pub fn norm(v: Vertex) -> usize {
        let (x, y) = Grid::coords(v);
        (x.abs() + y.abs()) as usize
    }
}

impl GraphOracle for Grid {
    fn name(&self) -> String {
        "grid".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        let (x, y) = Grid::coords(v);
        format!("({x},{y})")
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let (x, y) = Grid::coords(v);
        let mut list = vec![
            Grid::index(x + 1, y),
            Grid::index(x - 1, y),
            Grid::index(x, y + 1),
            Grid::index(x, y - 1),
        ];
        list.sort();
        Box::new(list.into_iter())
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = (Grid::coords(u), Grid::coords(v));
        (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1
    }
    fn default_cap(&self, depth: usize) -> usize {
        Grid::diamond_start(depth + 2)
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for Grid {
    fn ends_below(&self, _cap: usize) -> Vec<EndId> {
        vec![EndId(0)]
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        false
    }
    /// The positive x-axis.
    fn ray_prefix(&self, _end: EndId, cap: usize) -> Path {
        (0..)
            .map(|x| Grid::index(x, 0))
            .take_while(|v| v.0 < cap)
            .collect()
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

/// A ray `v_i = i+1` plus an apex `0` joined to every ray vertex.
pub struct Fan;

impl GraphOracle for Fan {
    fn name(&self) -> String {
        "fan".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        if v.0 == 0 {
            "apex".into()
        } else {
            format!("v{}", v.0 - 1)
        }
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let i = v.0;
        if i == 0 {
            return Box::new((1..).map(Vertex));
        }
        let mut list = vec![Vertex(0)];
        if i >= 2 {
            list.push(Vertex(i - 1));
        }
        list.push(Vertex(i + 1));
        Box::new(list.into_iter())
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = (u.0.min(v.0), u.0.max(v.0));
        a == 0 || b - a == 1
    }
    fn default_cap(&self, depth: usize) -> usize {
        (2 * depth + 2).max(64)
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for Fan {
    fn ends_below(&self, _cap: usize) -> Vec<EndId> {
        vec![EndId(0)]
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        true
    }
    fn ray_prefix(&self, _end: EndId, cap: usize) -> Path {
        (1..cap).map(Vertex).collect()
    }
    fn dominates(&self, _end: EndId, v: Vertex) -> bool {
        v.0 == 0
    }
    fn dominators_below(&self, _end: EndId, cap: usize) -> Vec<Vertex> {
        if cap > 0 {
            vec![Vertex(0)]
        } else {
            Vec::new()
        }
    }
    fn fan(&self, _end: EndId, d: Vertex, k: usize, _cap: usize) -> Option<Vec<Path>> {
        (d.0 == 0).then(|| (1..=k).map(|i| vec![Vertex(0), Vertex(i)]).collect())
    }
}

/// The countably infinite complete graph.
pub struct Complete;

impl GraphOracle for Complete {
    fn name(&self) -> String {
        "complete".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        Box::new((0..).filter(move |&j| j != v.0).map(Vertex))
    }
    fn neighbors_below(&self, v: Vertex, cap: usize) -> Vec<Vertex> {
        (0..cap).filter(|&j| j != v.0).map(Vertex).collect()
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        u != v
    }
    fn default_cap(&self, depth: usize) -> usize {
        (2 * depth).max(48)
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for Complete {
    fn ends_below(&self, _cap: usize) -> Vec<EndId> {
        vec![EndId(0)]
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        true
    }
    fn ray_prefix(&self, _end: EndId, cap: usize) -> Path {
        (0..cap).map(Vertex).collect()
    }
    fn dominates(&self, _end: EndId, _v: Vertex) -> bool {
        true
    }
    fn dominators_below(&self, _end: EndId, cap: usize) -> Vec<Vertex> {
        (0..cap).map(Vertex).collect()
    }
    fn fan(&self, _end: EndId, d: Vertex, k: usize, _cap: usize) -> Option<Vec<Path>> {
        Some(
            (0..)
                .filter(|&j| j != d.0)
                .take(k)
                .map(|j| vec![d, Vertex(j)])
                .collect(),
        )
    }
}

/// The infinite star `K_{1,ω}`: hub `0`, leaves `1, 2, …`.
pub struct InfiniteStar;

impl GraphOracle for InfiniteStar {
    fn name(&self) -> String {
        "infinite-star".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        if v.0 == 0 {
            "hub".into()
        } else {
            format!("l{}", v.0)
        }
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        if v.0 == 0 {
            Box::new((1..).map(Vertex))
        } else {
            Box::new(std::iter::once(Vertex(0)))
        }
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        u != v && (u.0 == 0 || v.0 == 0)
    }
    fn default_cap(&self, depth: usize) -> usize {
        (2 * depth).max(48)
    }
    fn registry(&self) -> &dyn EndRegistry {
        &NoEnds
    }
}

/// Rooted binary tree in level order: children of `i` are `2i+1` (left) and
/// `2i+2` (right).
pub mod binary {
    pub fn parent(i: usize) -> Option<usize> {
        (i > 0).then(|| (i - 1) / 2)
    }

    pub fn depth(i: usize) -> usize {
        (usize::BITS - 1 - (i + 1).leading_zeros()) as usize
    }

    pub fn is_left(i: usize) -> bool {
        i % 2 == 1
    }

    /// Ancestors of `i` from the root down to `i` itself.
    pub fn root_path(i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Walk up while on a left child; the result is the root or a right child.
    pub fn strip_left(mut i: usize) -> usize {
        while is_left(i) {
            i = (i - 1) / 2;
        }
        i
    }

    pub fn is_ancestor(a: usize, mut b: usize) -> bool {
        while b > a {
            b = (b - 1) / 2;
        }
        a == b
    }

    /// The eventually-left ray through `t`: root path to `t`, then left children
    /// forever. Cut at the first vertex not below `cap`.
    pub fn eventually_left_ray(t: usize, cap: usize) -> Vec<usize> {
        let mut ray: Vec<usize> = root_path(t).into_iter().take_while(|&x| x < cap).collect();
        if ray.last() != Some(&t) {
            return ray;
        }
        let mut cur = t;
        loop {
            cur = 2 * cur + 1;
            if cur >= cap {
                break;
            }
            ray.push(cur);
        }
        ray
    }

    /// Root or right children, in level order: the branch points of the
    /// eventually-left rays.
    pub fn branch_point(e: usize) -> usize {
        2 * e
    }
}

/// The rooted binary tree `T₂`. Its ends are uncountable; the registry declares
/// the eventually-left rays.
pub struct BinaryTree;

impl GraphOracle for BinaryTree {
    fn name(&self) -> String {
        "binary-tree".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        format!("n{}", v.0)
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let i = v.0;
        Box::new(
            binary::parent(i)
                .into_iter()
                .chain([2 * i + 1, 2 * i + 2])
                .map(Vertex),
        )
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        binary::parent(u.0) == Some(v.0) || binary::parent(v.0) == Some(u.0)
    }
    fn default_cap(&self, depth: usize) -> usize {
        (1usize << (depth.min(12) + 1)) - 1
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for BinaryTree {
    fn ends_below(&self, cap: usize) -> Vec<EndId> {
        (0..).take_while(|&e| binary::branch_point(e) < cap).map(EndId).collect()
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        false
    }
    fn ray_prefix(&self, end: EndId, cap: usize) -> Path {
        binary::eventually_left_ray(binary::branch_point(end.0), cap)
            .into_iter()
            .map(Vertex)
            .collect()
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

/// `T₂` with a top joined completely to every eventually-left ray.
///
/// Enumeration interleaves tops with tree nodes: tree node `2m` has index
/// `3m`, its top (when `2m` is the root or a right child) `3m+1`, tree node
/// `2m+1` has index `3m+2`.
pub struct BinaryTreeWithTops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopsVertex {
    Node(usize),
    Top(usize),
}

impl BinaryTreeWithTops {
    pub fn decode(v: Vertex) -> TopsVertex {
        let (m, r) = (v.0 / 3, v.0 % 3);
        match r {
            0 => TopsVertex::Node(2 * m),
            1 => TopsVertex::Top(2 * m),
            _ => TopsVertex::Node(2 * m + 1),
        }
    }

    pub fn node(i: usize) -> Vertex {
        if i % 2 == 0 {
            Vertex(3 * (i / 2))
        } else {
            Vertex(3 * (i / 2) + 2)
        }
    }

    pub fn top(t: usize) -> Vertex {
        debug_assert!(t % 2 == 0);
        Vertex(3 * (t / 2) + 1)
    }

    pub fn is_node(v: Vertex) -> bool {
        matches!(BinaryTreeWithTops::decode(v), TopsVertex::Node(_))
    }

    /// Tree nodes (as tree indices) whose tops lie strictly inside the subtree of `n`,
    /// in level order.
    fn descendant_tops(n: usize) -> impl Iterator<Item = usize> {
        (1..60u32).flat_map(move |k| {
            let width = 1usize << k;
            let first = (n + 1).checked_mul(width).map(|x| x - 1);
            first
                .into_iter()
                .flat_map(move |f| (f..f + width).filter(|j| j % 2 == 0))
        })
    }
}

impl GraphOracle for BinaryTreeWithTops {
    fn name(&self) -> String {
        "binary-tree-with-tops".into()
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        match BinaryTreeWithTops::decode(v) {
            TopsVertex::Node(i) => format!("n{i}"),
            TopsVertex::Top(t) => format!("top(n{t})"),
        }
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        match BinaryTreeWithTops::decode(v) {
            TopsVertex::Node(n) => {
                let mut head: Vec<Vertex> = binary::parent(n)
                    .into_iter()
                    .chain([2 * n + 1, 2 * n + 2])
                    .map(BinaryTreeWithTops::node)
                    .collect();
                head.push(BinaryTreeWithTops::top(binary::strip_left(n)));
                head.sort();
                let tail = BinaryTreeWithTops::descendant_tops(n).map(BinaryTreeWithTops::top);
                Box::new(head.into_iter().merge(tail).dedup())
            }
            TopsVertex::Top(t) => Box::new(
                binary::eventually_left_ray(t, usize::MAX / 4)
                    .into_iter()
                    .map(BinaryTreeWithTops::node),
            ),
        }
    }
    fn neighbors_below(&self, v: Vertex, cap: usize) -> Vec<Vertex> {
        match BinaryTreeWithTops::decode(v) {
            TopsVertex::Top(t) => binary::eventually_left_ray(t, 2 * cap / 3 + 2)
                .into_iter()
                .map(BinaryTreeWithTops::node)
                .take_while(|u| u.0 < cap)
                .collect(),
            TopsVertex::Node(_) => self.neighbors(v).take_while(|u| u.0 < cap).collect(),
        }
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        use TopsVertex::*;
        match (BinaryTreeWithTops::decode(u), BinaryTreeWithTops::decode(v)) {
            (Node(a), Node(b)) => binary::parent(a) == Some(b) || binary::parent(b) == Some(a),
            (Node(n), Top(t)) | (Top(t), Node(n)) => {
                binary::is_ancestor(n, t) || binary::strip_left(n) == t
            }
            (Top(_), Top(_)) => false,
        }
    }
    fn default_cap(&self, depth: usize) -> usize {
        let nodes = (1usize << (depth.min(11) + 1)) - 1;
        BinaryTreeWithTops::node(nodes).0
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for BinaryTreeWithTops {
    fn ends_below(&self, cap: usize) -> Vec<EndId> {
        (0..)
            .take_while(|&e| BinaryTreeWithTops::node(binary::branch_point(e)).0 < cap)
            .map(EndId)
            .collect()
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        true
    }
    fn ray_prefix(&self, end: EndId, cap: usize) -> Path {
        binary::eventually_left_ray(binary::branch_point(end.0), 2 * cap / 3 + 2)
            .into_iter()
            .map(BinaryTreeWithTops::node)
            .take_while(|v| v.0 < cap)
            .collect()
    }
    fn dominates(&self, end: EndId, v: Vertex) -> bool {
        v == BinaryTreeWithTops::top(binary::branch_point(end.0))
    }
    fn dominators_below(&self, end: EndId, cap: usize) -> Vec<Vertex> {
        let top = BinaryTreeWithTops::top(binary::branch_point(end.0));
        if top.0 < cap {
            vec![top]
        } else {
            Vec::new()
        }
    }
    fn fan(&self, end: EndId, d: Vertex, k: usize, _cap: usize) -> Option<Vec<Path>> {
        let t = binary::branch_point(end.0);
        if d != BinaryTreeWithTops::top(t) {
            return None;
        }
        let ray = binary::eventually_left_ray(t, usize::MAX / 4);
        Some(
            ray.into_iter()
                .take(k)
                .map(|r| vec![d, BinaryTreeWithTops::node(r)])
                .collect(),
        )
    }
}

/// The regular tree `T_k` (every vertex of degree `k`), level order from the root.
pub struct RegularTree {
    pub k: usize,
}

impl RegularTree {
    fn branching(&self) -> usize {
        self.k - 1
    }

    /// Index of the first vertex on level `l`.
    fn level_start(&self, l: usize) -> usize {
        if l == 0 {
            return 0;
        }
        let b = self.branching();
        // 1 + k(1 + b + … + b^{l-2})
        let mut total = 1;
        let mut width = self.k;
        for _ in 1..l {
            total += width;
            width *= b;
        }
        total
    }

    fn level_width(&self, l: usize) -> usize {
        if l == 0 {
            1
        } else {
            self.k * self.branching().pow(l as u32 - 1)
        }
    }

    pub fn level(&self, i: usize) -> usize {
        let mut l = 0;
        while self.level_start(l + 1) <= i {
            l += 1;
        }
        l
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return None;
        }
        let l = self.level(i);
        if l == 1 {
            return Some(0);
        }
        let p = i - self.level_start(l);
        Some(self.level_start(l - 1) + p / self.branching())
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        let l = self.level(i);
        let p = i - self.level_start(l);
        let start = self.level_start(l + 1);
        if l == 0 {
            return (start..start + self.k).collect();
        }
        let b = self.branching();
        (start + p * b..start + (p + 1) * b).collect()
    }

    fn is_first_child(&self, i: usize) -> bool {
        match self.parent(i) {
            None => false,
            Some(p) => self.children(p)[0] == i,
        }
    }

    /// Branch points of the eventually-first-child rays: the root and every
    /// vertex that is not a first child, in level order.
    fn branch_points(&self, cap: usize) -> Vec<usize> {
        (0..cap).filter(|&i| !self.is_first_child(i)).collect()
    }

    fn ray(&self, t: usize, cap: usize) -> Path {
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        let mut cur = t;
        loop {
            cur = self.children(cur)[0];
            if cur >= cap {
                break;
            }
            path.push(cur);
        }
        path.into_iter().take_while(|&x| x < cap).map(Vertex).collect()
    }
}

impl GraphOracle for RegularTree {
    fn name(&self) -> String {
        format!("regular-tree-{}", self.k)
    }
    fn order(&self) -> Option<usize> {
        None
    }
    fn label(&self, v: Vertex) -> String {
        format!("n{}", v.0)
    }
    fn neighbors(&self, v: Vertex) -> Box<dyn Iterator<Item = Vertex> + '_> {
        let mut list: Vec<usize> = self.parent(v.0).into_iter().collect();
        list.extend(self.children(v.0));
        Box::new(list.into_iter().map(Vertex))
    }
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.parent(u.0) == Some(v.0) || self.parent(v.0) == Some(u.0)
    }
    fn default_cap(&self, depth: usize) -> usize {
        let l = depth.min(11);
        self.level_start(l) + self.level_width(l)
    }
    fn registry(&self) -> &dyn EndRegistry {
        self
    }
}

impl EndRegistry for RegularTree {
    fn ends_below(&self, cap: usize) -> Vec<EndId> {
        (0..self.branch_points(cap).len()).map(EndId).collect()
    }
    fn is_dominated(&self, _end: EndId) -> bool {
        false
    }
    fn ray_prefix(&self, end: EndId, cap: usize) -> Path {
        // the e-th branch point lies below cap whenever the end is in range
        let mut seen = 0;
        let mut i = 0;
        loop {
            if !self.is_first_child(i) {
                if seen == end.0 {
                    return self.ray(i, cap);
                }
                seen += 1;
            }
            i += 1;
            if i > cap.max(end.0 * 3 + 3) {
                return Vec::new();
            }
        }
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_index_roundtrip() {
        for i in 0..2000 {
            let (x, y) = Grid::coords(Vertex(i));
            assert_eq!(Grid::index(x, y), Vertex(i), "at {i} = ({x},{y})");
        }
    }

    #[test]
    fn grid_neighbors_sorted_and_symmetric() {
        for i in 0..300 {
            let nb: Vec<_> = Grid.neighbors(Vertex(i)).collect();
            assert_eq!(nb.len(), 4);
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for u in nb {
                assert!(Grid.adjacent(u, Vertex(i)));
            }
        }
    }

    #[test]
    fn tops_enumeration_roundtrip() {
        for i in 0..500 {
            let v = Vertex(i);
            match BinaryTreeWithTops::decode(v) {
                TopsVertex::Node(n) => assert_eq!(BinaryTreeWithTops::node(n), v),
                TopsVertex::Top(t) => assert_eq!(BinaryTreeWithTops::top(t), v),
            }
        }
    }

    #[test]
    fn tops_neighbors_match_adjacency() {
        let g = BinaryTreeWithTops;
        let cap = 400;
        for i in 0..cap {
            let v = Vertex(i);
            let nb = g.neighbors_below(v, cap);
            assert!(nb.windows(2).all(|w| w[0] < w[1]), "unsorted at {i}");
            let brute: Vec<Vertex> = (0..cap).map(Vertex).filter(|&u| g.adjacent(u, v)).collect();
            assert_eq!(nb, brute, "neighbourhood of {}", g.label(v));
        }
    }

    #[test]
    fn regular_tree_structure() {
        let t = RegularTree { k: 3 };
        assert_eq!(t.children(0), vec![1, 2, 3]);
        assert_eq!(t.children(1), vec![4, 5]);
        assert_eq!(t.children(3), vec![8, 9]);
        for i in 1..200 {
            let p = t.parent(i).unwrap();
            assert!(t.children(p).contains(&i));
            let deg = t.neighbors(Vertex(i)).count();
            assert_eq!(deg, 3);
        }
    }

    #[test]
    fn ladder_and_comb_adjacency_agree_with_streams() {
        for g in [&Ladder as &dyn GraphOracle, &CombGraph, &Fan, &Ray, &InfiniteStar] {
            for i in 0..60 {
                let nb = g.neighbors_below(Vertex(i), 80);
                let brute: Vec<Vertex> =
                    (0..80).map(Vertex).filter(|&u| g.adjacent(u, Vertex(i))).collect();
                assert_eq!(nb, brute, "{} at {i}", g.name());
            }
        }
    }
}
