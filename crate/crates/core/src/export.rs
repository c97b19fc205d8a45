//! JSON and DOT renderings of windows and certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use crate::certificate::{vertices, Body, Certificate, VertexRef};
use crate::graph::{GraphOracle, Truncation};

#[derive(Debug, Clone, Serialize)]
pub struct WindowExport {
    pub family: String,
    pub cap: usize,
    pub vertices: Vec<VertexRef>,
    /// Edges with the lower index first, in index order.
    pub edges: Vec<(usize, usize)>,
}

pub fn window_export(g: &dyn GraphOracle, cap: usize) -> WindowExport {
    let t = Truncation::first_n(g, cap);
    WindowExport {
        family: g.name(),
        cap,
        vertices: t.vertices().map(|v| VertexRef::new(g, v)).collect(),
        edges: t.edges().map(|(a, b)| (a.0.min(b.0), a.0.max(b.0))).collect(),
    }
}

pub fn window_json(g: &dyn GraphOracle, cap: usize) -> String {
    serde_json::to_string_pretty(&window_export(g, cap)).expect("windows serialize")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node_line(out: &mut String, r: &VertexRef, extra: &str) {
    let _ = writeln!(out, "  v{} [label={}{extra}];", r.index, quote(&r.label));
}

pub fn window_dot(g: &dyn GraphOracle, cap: usize) -> String {
    let w = window_export(g, cap);
    let mut out = format!("graph {} {{\n", quote(&w.family));
    for r in &w.vertices {
        node_line(&mut out, r, "");
    }
    for (a, b) in &w.edges {
        let _ = writeln!(out, "  v{a} -- v{b};");
    }
    out.push_str("}\n");
    out
}

/// Paths as edge chains, each vertex declared once.
fn paths_dot(out: &mut String, paths: &[&[VertexRef]], highlight: &BTreeSet<usize>) {
    let mut seen = BTreeMap::new();
    for p in paths {
        for r in *p {
            seen.entry(r.index).or_insert_with(|| r.clone());
        }
    }
    for (i, r) in &seen {
        let extra = if highlight.contains(i) { ", shape=box" } else { "" };
        node_line(out, r, extra);
    }
    let mut edges = BTreeSet::new();
    for p in paths {
        for w in p.windows(2) {
            edges.insert((w[0].index.min(w[1].index), w[0].index.max(w[1].index)));
        }
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  v{a} -- v{b};");
    }
}

/// DOT for a certificate. Attachments in `U` are boxes; rayless trees carry
/// their heights as rank groups; star-decompositions draw one cluster per part
/// with the separator as its label.
pub fn certificate_dot(cert: &Certificate) -> String {
    let mut out = format!("graph {} {{\n", quote(&format!("{} {}", cert.family, cert.kind())));
    match &cert.body {
        Body::Star(p) => {
            let leaves = p.leaves.iter().map(|r| r.index).collect();
            let paths: Vec<&[VertexRef]> = p.paths.iter().map(Vec::as_slice).collect();
            paths_dot(&mut out, &paths, &leaves);
        }
        Body::Comb(p) => {
            let teeth = p.teeth.iter().map(|r| r.index).collect();
            let mut paths: Vec<&[VertexRef]> = vec![p.spine.as_slice()];
            paths.extend(p.tooth_paths.iter().map(Vec::as_slice));
            paths_dot(&mut out, &paths, &teeth);
        }
        Body::Fan(p) => {
            let mut paths: Vec<&[VertexRef]> = vec![p.ray_prefix.as_slice()];
            paths.extend(p.paths.iter().map(Vec::as_slice));
            paths_dot(&mut out, &paths, &[p.dominator.index].into());
        }
        Body::RaylessTree(p) => {
            let covered: BTreeSet<usize> = vertices(&p.covered).into_iter().map(|v| v.0).collect();
            let mut ranks: BTreeMap<usize, Vec<&VertexRef>> = BTreeMap::new();
            ranks.entry(0).or_default().push(&p.root);
            for e in &p.edges {
                ranks.entry(e.height).or_default().push(&e.child);
            }
            for (h, rs) in &ranks {
                let _ = writeln!(out, "  subgraph rank{h} {{ rank=same;");
                for r in rs {
                    let extra = if covered.contains(&r.index) { ", shape=box" } else { "" };
                    out.push_str("  ");
                    node_line(&mut out, r, extra);
                }
                out.push_str("  }\n");
            }
            for e in &p.edges {
                let _ = writeln!(out, "  v{} -- v{};", e.parent.index, e.child.index);
            }
        }
        Body::StarDecomposition(p) => {
            let central: BTreeSet<usize> = p.central.iter().map(|r| r.index).collect();
            out.push_str("  subgraph cluster_central { label=\"central\";\n");
            for r in &p.central {
                out.push_str("  ");
                node_line(&mut out, r, "");
            }
            out.push_str("  }\n");
            for l in &p.leaves {
                let sep: Vec<String> = l.separator.iter().map(|r| r.label.clone()).collect();
                let _ = writeln!(out, "  subgraph cluster_leaf{} {{ label={};", l.node, quote(&format!("node {} sep {{{}}}", l.node, sep.join(", "))));
                for r in l.sample.iter().filter(|r| !central.contains(&r.index)) {
                    out.push_str("  ");
                    node_line(&mut out, r, "");
                }
                out.push_str("  }\n");
                if let Some(s) = l.separator.first() {
                    if let Some(r) = l.sample.iter().find(|r| !central.contains(&r.index)) {
                        let _ = writeln!(out, "  v{} -- v{} [style=dashed];", s.index, r.index);
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family;
    use crate::ops::{extract, Operation, RunConfig};

    #[test]
    fn window_of_a_ray() {
        let spec = family("ray").unwrap();
        let w = window_export(spec.oracle.as_ref(), 4);
        assert_eq!(w.edges, vec![(0, 1), (1, 2), (2, 3)]);
        assert!(window_dot(spec.oracle.as_ref(), 4).contains("v2 -- v3;"));
    }

    #[test]
    fn rayless_tree_dot_has_ranks() {
        let e = extract(&RunConfig::new("complete", "all", Operation::Theorem1, 3)).unwrap();
        let dot = certificate_dot(&e.certificate);
        assert!(dot.contains("subgraph rank0 { rank=same;"));
        assert!(dot.contains("subgraph rank1 { rank=same;"));
        assert!(!dot.contains("rank2"));
    }

    #[test]
    fn star_decomposition_dot_labels_separators() {
        let e = extract(&RunConfig::new("ray", "origin", Operation::StarDecomposition, 3)).unwrap();
        let dot = certificate_dot(&e.certificate);
        assert!(dot.contains("cluster_central"));
        assert!(dot.contains("sep {"));
    }
}
