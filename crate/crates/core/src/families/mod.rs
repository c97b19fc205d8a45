//! The curated family catalog: oracles, end registries, presets, covers,
//! decompositions, spanning trees and expected answers.

mod graphs;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

pub use graphs::{
    binary, BinaryTree, BinaryTreeWithTops, CombGraph, Complete, Fan, Grid, InfiniteStar, Ladder,
    Ray, RegularTree, TopsVertex,
};

use crate::decomp::lazy::{LazyDecomposition, LazySpanningTree};
use crate::error::{Error, Result};
use crate::graph::{Oracle, Vertex, VertexPredicate};
use crate::normal::cover::{DispersedCover, PieceKind};

/// Which side of the duality a preset lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    /// An undominated comb attached to `U`.
    Comb,
    /// The complementary structure: rayless tree / star-decomposition / dominated subgraph.
    Complement,
}

#[derive(Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub members: VertexPredicate,
    /// The full member list when the preset is finite.
    pub finite: Option<Vec<Vertex>>,
    pub expected: Expected,
}

impl Preset {
    fn infinite(
        name: &'static str,
        description: &'static str,
        expected: Expected,
        members: impl Fn(Vertex) -> bool + Send + Sync + 'static,
    ) -> Self {
        Preset { name, description, members: Arc::new(members), finite: None, expected }
    }

    fn finite(name: &'static str, description: &'static str, list: Vec<usize>) -> Self {
        let list: Vec<Vertex> = list.into_iter().map(Vertex).collect();
        let set = list.clone();
        Preset {
            name,
            description,
            members: Arc::new(move |v| set.binary_search(&v).is_ok()),
            finite: Some(list),
            expected: Expected::Complement,
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (self.members)(v)
    }
}

#[derive(Clone)]
pub struct FamilySpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub ends: &'static str,
    pub oracle: Oracle,
    pub presets: Vec<Preset>,
    covers: BTreeMap<&'static str, DispersedCover>,
    pub decomposition: LazyDecomposition,
    pub spanning_trees: Vec<LazySpanningTree>,
    /// Default search depth for this family.
    pub depth: usize,
    /// Whether the whole vertex set is normally spanned, as metadata.
    pub normally_spanned: bool,
}

impl FamilySpec {
    pub fn preset(&self, name: &str) -> Result<&Preset> {
        self.presets.iter().find(|p| p.name == name).ok_or_else(|| Error::UnknownPreset {
            family: self.name.into(),
            preset: name.into(),
        })
    }

    /// The shipped cover for a preset, or the singleton cover.
    pub fn cover(&self, preset: &str) -> Result<DispersedCover> {
        let p = self.preset(preset)?;
        Ok(self
            .covers
            .get(preset)
            .cloned()
            .unwrap_or_else(|| DispersedCover::singletons(p.members.clone())))
    }

    pub fn has_shipped_cover(&self, preset: &str) -> bool {
        self.covers.contains_key(preset)
    }

    pub fn spanning_tree(&self, name: &str) -> Option<&LazySpanningTree> {
        self.spanning_trees.iter().find(|t| t.name == name)
    }
}

/// Families that exist only as documentation.
#[derive(Debug, Clone, Serialize)]
pub struct DocumentationEntry {
    pub name: &'static str,
    pub summary: &'static str,
}

pub fn documentation_entries() -> Vec<DocumentationEntry> {
    vec![
        DocumentationEntry {
            name: "seymour-thomas",
            summary: "graph of order 2^aleph0 with no rayless spanning tree and no undominated comb; uncountable",
        },
        DocumentationEntry {
            name: "t-aleph1",
            summary: "the aleph1-regular tree; uncountable",
        },
    ]
}

fn span(name: &str, root: usize, parent: impl Fn(usize) -> Option<usize> + Send + Sync + 'static) -> LazySpanningTree {
    LazySpanningTree::new(name, Vertex(root), Arc::new(move |v: Vertex| parent(v.0).map(Vertex)))
}

fn cover(name: &str, source: impl Fn(usize) -> Vec<(PieceKind, Vec<Vertex>)> + Send + Sync + 'static) -> DispersedCover {
    DispersedCover::new(name, Arc::new(source))
}

fn ray() -> FamilySpec {
    use Expected::*;
    FamilySpec {
        name: "ray",
        summary: "one-way infinite path v0 v1 v2 ...",
        ends: "one end, undominated; representative ray v0 v1 v2 ...",
        oracle: Arc::new(Ray),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::infinite("evens", "vertices of even index", Comb, |v| v.0 % 2 == 0),
            Preset::finite("origin", "the first vertex", vec![0]),
        ],
        covers: BTreeMap::new(),
        decomposition: LazyDecomposition::path(
            "tail-path",
            Arc::new(|v: Vertex| if v.0 == 0 { vec![0] } else { vec![v.0 - 1, v.0] }),
            Arc::new(|c| vec![Vertex(c)]),
        ),
        spanning_trees: vec![span("path", 0, |i| i.checked_sub(1))],
        depth: 40,
        normally_spanned: true,
    }
}

fn ladder() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert(
        "all",
        cover("rungs", |cap| {
            (0..cap.div_ceil(2))
                .map(|i| (PieceKind::Finite, vec![Vertex(2 * i), Vertex(2 * i + 1)]))
                .collect()
        }),
    );
    FamilySpec {
        name: "one-way-ladder",
        summary: "bottom rail b_i = 2i, top rail t_i = 2i+1, rungs b_i t_i",
        ends: "one end, undominated; representative ray the bottom rail",
        oracle: Arc::new(Ladder),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::infinite("bottom", "the bottom rail", Comb, |v| v.0 % 2 == 0),
            Preset::finite("rung0", "the first rung", vec![0, 1]),
        ],
        covers,
        decomposition: LazyDecomposition::path(
            "rung-path",
            Arc::new(|v: Vertex| {
                let r = v.0 / 2;
                if r == 0 {
                    vec![0]
                } else {
                    vec![r - 1, r]
                }
            }),
            Arc::new(|c| vec![Vertex(2 * c), Vertex(2 * c + 1)]),
        ),
        spanning_trees: vec![span("bottom-ray-rungs", 0, |i| {
            if i % 2 == 1 {
                Some(i - 1)
            } else {
                i.checked_sub(2)
            }
        })],
        depth: 30,
        normally_spanned: true,
    }
}

fn grid() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert(
        "all",
        cover("diamonds", |cap| {
            (0..)
                .take_while(|&d| Grid::diamond_start(d) < cap)
                .map(|d| {
                    let members = (Grid::diamond_start(d)..Grid::diamond_start(d + 1)).map(Vertex).collect();
                    (PieceKind::LevelLike, members)
                })
                .collect()
        }),
    );
    let block: Vec<usize> = (-2i64..=2)
        .flat_map(|x| (-2i64..=2).map(move |y| Grid::index(x, y).0))
        .sorted_vec();
    FamilySpec {
        name: "grid",
        summary: "the grid Z^2, enumerated by diamonds |x|+|y| = d",
        ends: "one end, undominated; representative ray the positive x-axis",
        oracle: Arc::new(Grid),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::finite("block5", "the 5x5 block around the origin", block),
            Preset::infinite("axis", "the non-negative x-axis", Comb, |v| {
                let (x, y) = Grid::coords(v);
                y == 0 && x >= 0
            }),
        ],
        covers,
        decomposition: LazyDecomposition::path(
            "diamond-rings",
            Arc::new(|v: Vertex| {
                let d = Grid::norm(v);
                // node i holds diamonds 2i ..= 2i+3
                (d.saturating_sub(3).div_ceil(2)..=d / 2).collect()
            }),
            Arc::new(|c| (Grid::diamond_start(2 * c)..Grid::diamond_start(2 * c + 2)).map(Vertex).collect()),
        ),
        spanning_trees: vec![LazySpanningTree::new(
            "toward-origin",
            Vertex(0),
            Arc::new(|v: Vertex| {
                if v.0 == 0 {
                    None
                } else {
                    use crate::graph::GraphOracle;
                    Grid.neighbors(v).next()
                }
            }),
        )],
        depth: 12,
        normally_spanned: true,
    }
}

fn fan() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert(
        "all",
        cover("apex-pairs", |cap| {
            (0..cap.max(1))
                .map(|i| (PieceKind::Finite, vec![Vertex(0), Vertex(i + 1)]))
                .collect()
        }),
    );
    FamilySpec {
        name: "fan",
        summary: "ray v_i = i+1 with an apex 0 joined to every ray vertex",
        ends: "one end, dominated exactly by the apex; representative ray v0 v1 v2 ...",
        oracle: Arc::new(Fan),
        presets: vec![
            Preset::infinite("all", "every vertex", Complement, |_| true),
            Preset::infinite("ray-vertices", "the ray", Complement, |v| v.0 >= 1),
            Preset::finite("apex", "the apex", vec![0]),
        ],
        covers,
        decomposition: LazyDecomposition::single_part(),
        spanning_trees: vec![
            span("ray-tree", 0, |i| i.checked_sub(1)),
            span("apex-star", 0, |i| (i > 0).then_some(0)),
        ],
        depth: 24,
        normally_spanned: true,
    }
}

fn complete() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert("all", DispersedCover::singletons(Arc::new(|_| true)));
    FamilySpec {
        name: "complete",
        summary: "the countably infinite complete graph",
        ends: "one end, dominated by every vertex; representative ray v0 v1 v2 ...",
        oracle: Arc::new(Complete),
        presets: vec![
            Preset::infinite("all", "every vertex", Complement, |_| true),
            Preset::infinite("evens", "vertices of even index", Complement, |v| v.0 % 2 == 0),
            Preset::finite("v0", "the first vertex", vec![0]),
        ],
        covers,
        decomposition: LazyDecomposition::single_part(),
        spanning_trees: vec![span("star-at-v0", 0, |i| (i > 0).then_some(0))],
        depth: 24,
        normally_spanned: true,
    }
}

fn infinite_star() -> FamilySpec {
    use Expected::*;
    FamilySpec {
        name: "infinite-star",
        summary: "hub 0 joined to leaves 1, 2, ...",
        ends: "no ends",
        oracle: Arc::new(InfiniteStar),
        presets: vec![
            Preset::infinite("all", "every vertex", Complement, |_| true),
            Preset::infinite("leaves", "the leaves", Complement, |v| v.0 >= 1),
            Preset::finite("hub", "the hub", vec![0]),
        ],
        covers: BTreeMap::new(),
        decomposition: LazyDecomposition::single_part(),
        spanning_trees: vec![span("star", 0, |i| (i > 0).then_some(0))],
        depth: 24,
        normally_spanned: true,
    }
}

fn binary_levels(name: &str, max_level: Option<usize>, map: fn(usize) -> Vertex) -> DispersedCover {
    let name = name.to_owned();
    cover(&name, move |cap| {
        (0..)
            .take_while(|&l| map((1usize << l) - 1).0 < cap && max_level.map_or(true, |m| l <= m))
            .map(|l| {
                let members = ((1usize << l) - 1..(1usize << (l + 1)) - 1).map(map).collect();
                (PieceKind::LevelLike, members)
            })
            .collect()
    })
}

fn binary_tree() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert("all", binary_levels("levels", None, Vertex));
    covers.insert("level3", binary_levels("levels", Some(3), Vertex));
    FamilySpec {
        name: "binary-tree",
        summary: "rooted binary tree T2 in level order; children of i are 2i+1, 2i+2",
        ends: "uncountably many undominated ends; the registry declares the eventually-left rays",
        oracle: Arc::new(BinaryTree),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::finite("level3", "levels 0 to 3", (0..15).collect()),
            Preset::infinite("leftmost-ray", "the leftmost ray 0, 1, 3, 7, ...", Comb, |v| {
                (v.0 + 1).is_power_of_two()
            }),
        ],
        covers,
        decomposition: LazyDecomposition::along_tree(
            "along-t2",
            Arc::new(binary::parent),
            Arc::new(|n| vec![2 * n + 1, 2 * n + 2]),
        ),
        spanning_trees: vec![span("tree", 0, binary::parent)],
        depth: 8,
        normally_spanned: true,
    }
}

fn binary_tree_with_tops() -> FamilySpec {
    use Expected::*;
    let mut covers = BTreeMap::new();
    covers.insert("t2-vertices", binary_levels("t2-levels", None, BinaryTreeWithTops::node));
    FamilySpec {
        name: "binary-tree-with-tops",
        summary: "T2 plus a top joined completely to each declared ray (countable model: eventually-left rays)",
        ends: "one declared end per eventually-left ray, each dominated exactly by its top",
        oracle: Arc::new(BinaryTreeWithTops),
        presets: vec![
            Preset::infinite("all", "every vertex", Complement, |_| true),
            Preset::infinite("t2-vertices", "the vertices of T2", Complement, BinaryTreeWithTops::is_node),
            Preset::infinite("tops", "the tops", Complement, |v| !BinaryTreeWithTops::is_node(v)),
        ],
        covers,
        decomposition: LazyDecomposition::single_part(),
        spanning_trees: vec![LazySpanningTree::new(
            "t2-plus-tops",
            Vertex(0),
            Arc::new(|v: Vertex| match BinaryTreeWithTops::decode(v) {
                TopsVertex::Node(n) => binary::parent(n).map(BinaryTreeWithTops::node),
                TopsVertex::Top(t) => Some(BinaryTreeWithTops::node(t)),
            }),
        )],
        depth: 6,
        normally_spanned: false,
    }
}

fn regular_tree() -> FamilySpec {
    use Expected::*;
    let t = RegularTree { k: 3 };
    let (tp, tc) = (Arc::new(RegularTree { k: 3 }), Arc::new(RegularTree { k: 3 }));
    let ball: Vec<usize> = (0..10).collect();
    debug_assert_eq!(t.level(9), 2);
    FamilySpec {
        name: "regular-tree-3",
        summary: "the 3-regular tree T3 in level order",
        ends: "uncountably many undominated ends; the registry declares the eventually-first-child rays",
        oracle: Arc::new(t),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::finite("ball2", "the ball of radius 2 around the root", ball),
        ],
        covers: BTreeMap::new(),
        decomposition: LazyDecomposition::along_tree(
            "along-tree",
            Arc::new(move |n| tp.parent(n)),
            Arc::new(move |n| tc.children(n)),
        ),
        spanning_trees: vec![{
            let t = RegularTree { k: 3 };
            span("tree", 0, move |i| t.parent(i))
        }],
        depth: 6,
        normally_spanned: true,
    }
}

fn comb() -> FamilySpec {
    use Expected::*;
    FamilySpec {
        name: "comb",
        summary: "spine s_i = 2i with a pendant tooth t_i = 2i+1 at every spine vertex",
        ends: "one end, undominated; representative ray the spine",
        oracle: Arc::new(CombGraph),
        presets: vec![
            Preset::infinite("all", "every vertex", Comb, |_| true),
            Preset::infinite("teeth", "the pendant teeth", Comb, |v| v.0 % 2 == 1),
            Preset::infinite("spine", "the spine", Comb, |v| v.0 % 2 == 0),
        ],
        covers: BTreeMap::new(),
        decomposition: LazyDecomposition::path(
            "spine-path",
            Arc::new(|v: Vertex| {
                let r = v.0 / 2;
                if v.0 % 2 == 1 || r == 0 {
                    vec![r]
                } else {
                    vec![r - 1, r]
                }
            }),
            Arc::new(|c| vec![Vertex(2 * c)]),
        ),
        spanning_trees: vec![span("spine-teeth", 0, |i| {
            if i % 2 == 1 {
                Some(i - 1)
            } else {
                i.checked_sub(2)
            }
        })],
        depth: 30,
        normally_spanned: true,
    }
}

trait SortedVec {
    fn sorted_vec(self) -> Vec<usize>;
}

impl<I: Iterator<Item = usize>> SortedVec for I {
    fn sorted_vec(self) -> Vec<usize> {
        let mut v: Vec<usize> = self.collect();
        v.sort();
        v
    }
}

/// The full catalog in a fixed order.
pub fn list_families() -> Vec<FamilySpec> {
    vec![
        ray(),
        ladder(),
        grid(),
        fan(),
        complete(),
        infinite_star(),
        binary_tree(),
        binary_tree_with_tops(),
        regular_tree(),
        comb(),
    ]
}

pub fn family(name: &str) -> Result<FamilySpec> {
    if documentation_entries().iter().any(|d| d.name == name) {
        return Err(Error::DocumentationOnly(name.into()));
    }
    list_families()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFamily(name.into()))
}

pub fn family_oracle(name: &str) -> Result<Oracle> {
    family(name).map(|f| f.oracle)
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub finite: bool,
    pub expected: Expected,
    pub cover: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestFamily {
    pub name: &'static str,
    pub summary: &'static str,
    pub ends: &'static str,
    pub default_depth: usize,
    pub normally_spanned: bool,
    pub decomposition: String,
    pub spanning_trees: Vec<String>,
    pub presets: Vec<ManifestPreset>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub families: Vec<ManifestFamily>,
    pub documentation_only: Vec<DocumentationEntry>,
}

/// The `families.json` manifest.
pub fn manifest() -> Manifest {
    let families = list_families()
        .into_iter()
        .map(|f| ManifestFamily {
            name: f.name,
            summary: f.summary,
            ends: f.ends,
            default_depth: f.depth,
            normally_spanned: f.normally_spanned,
            decomposition: f.decomposition.name.clone(),
            spanning_trees: f.spanning_trees.iter().map(|t| t.name.clone()).collect(),
            presets: f
                .presets
                .iter()
                .map(|p| ManifestPreset {
                    name: p.name,
                    description: p.description,
                    finite: p.finite.is_some(),
                    expected: p.expected,
                    cover: f.cover(p.name).map(|c| c.name().to_owned()).unwrap_or_default(),
                })
                .collect(),
        })
        .collect();
    Manifest { families, documentation_only: documentation_entries() }
}
