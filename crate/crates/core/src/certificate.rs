//! Finite witnesses and their JSON form.
//!
//! Certificates are `{kind, family, budgets, payload, audit}` with vertices
//! written as `{index, label}`.

use serde::{Deserialize, Serialize};

use crate::graph::{EndId, GraphOracle, Path, Vertex};
use crate::tree::RootedLazyTree;

/// `k` paths from a common centre, disjoint apart from it, ending in `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCertificate {
    pub center: Vertex,
    pub leaves: Vec<Vertex>,
    /// Each path starts at the centre and ends at its leaf.
    pub paths: Vec<Path>,
    /// Set when the star does not branch (centre of degree below `k`).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SpineAnchor {
    /// The spine is a prefix of the registry's representative ray of this end.
    Registry { end: EndId },
    /// The spine is a branch of the breadth-first tree, extended by the named rule.
    Continuation { rule: String },
}

/// A spine prefix with `k` disjoint tooth paths, each meeting the spine in its
/// first vertex only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombCertificate {
    pub spine: Path,
    pub anchor: SpineAnchor,
    pub teeth: Vec<Vertex>,
    /// Each path starts on the spine and ends at its tooth.
    pub tooth_paths: Vec<Path>,
    /// Tagged when the anchoring end is declared undominated.
    pub undominated: bool,
}

/// `k` paths from a dominator to a ray prefix, disjoint apart from the dominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanCertificate {
    pub dominator: Vertex,
    pub end: EndId,
    pub ray_prefix: Path,
    pub paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRef {
    pub index: usize,
    pub label: String,
}

impl VertexRef {
    pub fn new(g: &dyn GraphOracle, v: Vertex) -> Self {
        VertexRef { index: v.0, label: g.label(v) }
    }

    pub fn vertex(&self) -> Vertex {
        Vertex(self.index)
    }
}

fn refs(g: &dyn GraphOracle, vs: &[Vertex]) -> Vec<VertexRef> {
    vs.iter().map(|&v| VertexRef::new(g, v)).collect()
}

fn paths(g: &dyn GraphOracle, ps: &[Path]) -> Vec<Vec<VertexRef>> {
    ps.iter().map(|p| refs(g, p)).collect()
}

pub fn vertices(rs: &[VertexRef]) -> Vec<Vertex> {
    rs.iter().map(VertexRef::vertex).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub k: usize,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPayload {
    pub preset: String,
    pub center: VertexRef,
    pub leaves: Vec<VertexRef>,
    pub paths: Vec<Vec<VertexRef>>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombPayload {
    pub preset: String,
    pub spine: Vec<VertexRef>,
    pub anchor: SpineAnchor,
    pub teeth: Vec<VertexRef>,
    pub tooth_paths: Vec<Vec<VertexRef>>,
    pub undominated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanPayload {
    pub dominator: VertexRef,
    pub end: EndId,
    pub ray_prefix: Vec<VertexRef>,
    pub paths: Vec<Vec<VertexRef>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: VertexRef,
    pub child: VertexRef,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaylessPayload {
    pub preset: String,
    /// `direct` or `contraction`.
    pub route: String,
    pub root: VertexRef,
    pub edges: Vec<TreeEdge>,
    /// The `U`-prefix the tree must contain.
    pub covered: Vec<VertexRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafPartPayload {
    pub node: usize,
    pub separator: Vec<VertexRef>,
    /// Leaf-part vertices inside the audited window.
    pub sample: Vec<VertexRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDecompositionPayload {
    pub preset: String,
    /// Window cap the parts were sampled at.
    pub cap: usize,
    pub central: Vec<VertexRef>,
    pub leaves: Vec<LeafPartPayload>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum Body {
    Star(StarPayload),
    Comb(CombPayload),
    Fan(FanPayload),
    RaylessTree(RaylessPayload),
    StarDecomposition(StarDecompositionPayload),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Star(_) => "star",
            Body::Comb(_) => "comb",
            Body::Fan(_) => "fan",
            Body::RaylessTree(_) => "rayless-tree",
            Body::StarDecomposition(_) => "star-decomposition",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub checked_by: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub family: String,
    pub budgets: Budgets,
    #[serde(flatten)]
    pub body: Body,
    pub audit: Audit,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> crate::Result<Certificate> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> &'static str {
        self.body.kind()
    }

    pub fn star(g: &dyn GraphOracle, family: &str, preset: &str, budgets: Budgets, s: &StarCertificate) -> Self {
        Certificate {
            family: family.into(),
            budgets,
            body: Body::Star(StarPayload {
                preset: preset.into(),
                center: VertexRef::new(g, s.center),
                leaves: refs(g, &s.leaves),
                paths: paths(g, &s.paths),
                degenerate: s.degenerate,
            }),
            audit: Audit::default(),
        }
    }

    pub fn comb(g: &dyn GraphOracle, family: &str, preset: &str, budgets: Budgets, c: &CombCertificate) -> Self {
        Certificate {
            family: family.into(),
            budgets,
            body: Body::Comb(CombPayload {
                preset: preset.into(),
                spine: refs(g, &c.spine),
                anchor: c.anchor.clone(),
                teeth: refs(g, &c.teeth),
                tooth_paths: paths(g, &c.tooth_paths),
                undominated: c.undominated,
            }),
            audit: Audit::default(),
        }
    }

    pub fn fan(g: &dyn GraphOracle, family: &str, budgets: Budgets, f: &FanCertificate) -> Self {
        Certificate {
            family: family.into(),
            budgets,
            body: Body::Fan(FanPayload {
                dominator: VertexRef::new(g, f.dominator),
                end: f.end,
                ray_prefix: refs(g, &f.ray_prefix),
                paths: paths(g, &f.paths),
            }),
            audit: Audit::default(),
        }
    }

    pub fn rayless(
        g: &dyn GraphOracle,
        family: &str,
        preset: &str,
        route: &str,
        budgets: Budgets,
        tree: &RootedLazyTree,
        covered: &[Vertex],
    ) -> Self {
        let edges = tree
            .edges()
            .map(|(p, c)| TreeEdge {
                parent: VertexRef::new(g, p),
                child: VertexRef::new(g, c),
                height: tree.height(c).unwrap_or(0),
            })
            .collect();
        Certificate {
            family: family.into(),
            budgets,
            body: Body::RaylessTree(RaylessPayload {
                preset: preset.into(),
                route: route.into(),
                root: VertexRef::new(g, tree.root()),
                edges,
                covered: refs(g, covered),
            }),
            audit: Audit::default(),
        }
    }

    pub fn star_decomposition(family: &str, budgets: Budgets, payload: StarDecompositionPayload) -> Self {
        Certificate { family: family.into(), budgets, body: Body::StarDecomposition(payload), audit: Audit::default() }
    }

    pub fn with_audit(mut self, checked_by: &str, notes: Vec<String>) -> Self {
        self.audit = Audit { checked_by: checked_by.into(), notes };
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteGraph;

    #[test]
    fn json_shape_and_roundtrip() {
        let g = FiniteGraph::path(3);
        let star = StarCertificate {
            center: Vertex(1),
            leaves: vec![Vertex(0), Vertex(2)],
            paths: vec![vec![Vertex(1), Vertex(0)], vec![Vertex(1), Vertex(2)]],
            degenerate: true,
        };
        let budgets = Budgets { k: 2, depth: 3, steps: None };
        let cert = Certificate::star(&g, "path", "all", budgets, &star);
        let value: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        for key in ["kind", "family", "budgets", "payload", "audit"] {
            assert!(keys.contains(&key), "missing {key}");
        }
        assert_eq!(value["kind"], "star");
        assert_eq!(value["payload"]["center"]["index"], 1);
        assert_eq!(Certificate::from_json(&cert.to_json()).unwrap(), cert);
    }
}
