//! Independent certificate verifier.
//!
//! Re-derives every claim from the family oracle, its registry and the preset
//! predicate. Nothing here calls into the search code.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::certificate::{
    vertices, Body, Certificate, CombPayload, FanPayload, RaylessPayload, SpineAnchor,
    StarDecompositionPayload, StarPayload, VertexRef,
};
use crate::error::Result;
use crate::families::{family, FamilySpec};
use crate::graph::{is_path, GraphOracle, Truncation, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationClass {
    UnknownPreset,
    LabelMismatch,
    WrongCount,
    NotAPath,
    EndpointMismatch,
    NotInU,
    PathsNotDisjoint,
    ToothPathMeetsSpine,
    AnchorMismatch,
    UndominatedTagWrong,
    NotDominator,
    FanPathOffRay,
    TreeEdgeMissing,
    NotATree,
    UncoveredVertex,
    DecompositionUnsound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub class: ViolationClass,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub kind: String,
    pub family: String,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn classes(&self) -> BTreeSet<ViolationClass> {
        self.violations.iter().map(|v| v.class).collect()
    }
}

struct Checker<'a> {
    g: &'a dyn GraphOracle,
    out: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn flag(&mut self, class: ViolationClass, detail: impl Into<String>) {
        self.out.push(Violation { class, detail: detail.into() });
    }

    fn labels(&mut self, refs: &[VertexRef]) {
        for r in refs {
            let expected = self.g.label(r.vertex());
            if !self.g.contains(r.vertex()) || r.label != expected {
                self.flag(
                    ViolationClass::LabelMismatch,
                    format!("vertex {} labelled `{}`, oracle says `{expected}`", r.index, r.label),
                );
            }
        }
    }

    fn path(&mut self, what: &str, p: &[Vertex]) -> bool {
        let ok = is_path(self.g, p);
        if !ok {
            self.flag(ViolationClass::NotAPath, format!("{what} {p:?} is not a path"));
        }
        ok
    }

    /// Paths pairwise disjoint apart from the shared first vertex when `shared`.
    fn disjoint(&mut self, what: &str, paths: &[Vec<Vertex>], shared: Option<Vertex>) {
        let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
        for (i, p) in paths.iter().enumerate() {
            for &v in p {
                if Some(v) == shared {
                    continue;
                }
                if let Some(j) = owner.insert(v, i) {
                    if j != i {
                        self.flag(
                            ViolationClass::PathsNotDisjoint,
                            format!("{what} {j} and {i} share vertex {}", v.0),
                        );
                        return;
                    }
                }
            }
        }
    }
}

/// Verify a certificate against its family. Unknown or documentation-only
/// families are errors; everything else is reported as violations.
pub fn verify(cert: &Certificate) -> Result<VerifyReport> {
    let spec = family(&cert.family)?;
    Ok(verify_with(cert, &spec))
}

pub fn verify_with(cert: &Certificate, spec: &FamilySpec) -> VerifyReport {
    let mut c = Checker { g: spec.oracle.as_ref(), out: Vec::new() };
    match &cert.body {
        Body::Star(p) => star(&mut c, spec, cert.budgets.k, p),
        Body::Comb(p) => comb(&mut c, spec, cert.budgets.k, p),
        Body::Fan(p) => fan(&mut c, cert.budgets.k, p),
        Body::RaylessTree(p) => rayless(&mut c, spec, p),
        Body::StarDecomposition(p) => star_decomposition(&mut c, spec, p),
    }
    VerifyReport { kind: cert.kind().into(), family: cert.family.clone(), violations: c.out }
}

fn preset_members<'s>(c: &mut Checker, spec: &'s FamilySpec, name: &str) -> Option<&'s crate::families::Preset> {
    match spec.preset(name) {
        Ok(p) => Some(p),
        Err(_) => {
            c.flag(ViolationClass::UnknownPreset, format!("preset `{name}`"));
            None
        }
    }
}

fn star(c: &mut Checker, spec: &FamilySpec, k: usize, p: &StarPayload) {
    c.labels(std::slice::from_ref(&p.center));
    c.labels(&p.leaves);
    p.paths.iter().for_each(|q| c.labels(q));
    let preset = preset_members(c, spec, &p.preset);
    let center = p.center.vertex();
    let leaves = vertices(&p.leaves);
    let paths: Vec<Vec<Vertex>> = p.paths.iter().map(|q| vertices(q)).collect();
    let count_ok = if p.degenerate { leaves.len() <= k && !leaves.is_empty() } else { leaves.len() == k };
    if !count_ok || paths.len() != leaves.len() {
        c.flag(ViolationClass::WrongCount, format!("{} leaves, {} paths, k = {k}", leaves.len(), paths.len()));
    }
    for (i, q) in paths.iter().enumerate() {
        if !c.path("star path", q) {
            continue;
        }
        if q.first() != Some(&center) || q.last() != leaves.get(i) {
            c.flag(ViolationClass::EndpointMismatch, format!("star path {i} does not run centre to leaf"));
        }
    }
    if let Some(preset) = preset {
        for &l in &leaves {
            if !preset.contains(l) {
                c.flag(ViolationClass::NotInU, format!("leaf {} not in `{}`", l.0, preset.name));
            }
        }
    }
    if leaves.contains(&center) {
        c.flag(ViolationClass::PathsNotDisjoint, "centre repeated as a leaf");
    }
    c.disjoint("star paths", &paths, Some(center));
}

fn comb(c: &mut Checker, spec: &FamilySpec, k: usize, p: &CombPayload) {
    c.labels(&p.spine);
    c.labels(&p.teeth);
    p.tooth_paths.iter().for_each(|q| c.labels(q));
    let preset = preset_members(c, spec, &p.preset);
    let spine = vertices(&p.spine);
    let teeth = vertices(&p.teeth);
    let paths: Vec<Vec<Vertex>> = p.tooth_paths.iter().map(|q| vertices(q)).collect();
    c.path("spine", &spine);
    match &p.anchor {
        SpineAnchor::Registry { end } => {
            let registry = c.g.registry();
            let cap = spine.iter().map(|v| v.0 + 1).max().unwrap_or(0);
            let declared = registry.ray_prefix(*end, cap);
            if declared.len() < spine.len() || declared[..spine.len()] != spine[..] {
                c.flag(ViolationClass::AnchorMismatch, format!("spine is not a prefix of declared end {}", end.0));
            } else if p.undominated == registry.is_dominated(*end) {
                c.flag(
                    ViolationClass::UndominatedTagWrong,
                    format!("end {} is declared {}", end.0, if p.undominated { "dominated" } else { "undominated" }),
                );
            }
        }
        SpineAnchor::Continuation { rule } => {
            if rule.trim().is_empty() {
                c.flag(ViolationClass::AnchorMismatch, "empty continuation rule");
            }
            if p.undominated {
                c.flag(ViolationClass::UndominatedTagWrong, "only registry-anchored spines can be tagged undominated");
            }
        }
    }
    if teeth.len() != k || paths.len() != k {
        c.flag(ViolationClass::WrongCount, format!("{} teeth, {} paths, k = {k}", teeth.len(), paths.len()));
    }
    let on_spine: BTreeSet<Vertex> = spine.iter().copied().collect();
    for (i, q) in paths.iter().enumerate() {
        if !c.path("tooth path", q) {
            continue;
        }
        if q.last() != teeth.get(i) {
            c.flag(ViolationClass::EndpointMismatch, format!("tooth path {i} does not end at its tooth"));
        }
        if !on_spine.contains(&q[0]) || q[1..].iter().any(|v| on_spine.contains(v)) {
            c.flag(ViolationClass::ToothPathMeetsSpine, format!("tooth path {i} meets the spine other than in its first vertex"));
        }
    }
    if let Some(preset) = preset {
        for &t in &teeth {
            if !preset.contains(t) {
                c.flag(ViolationClass::NotInU, format!("tooth {} not in `{}`", t.0, preset.name));
            }
        }
    }
    c.disjoint("tooth paths", &paths, None);
}

fn fan(c: &mut Checker, k: usize, p: &FanPayload) {
    c.labels(std::slice::from_ref(&p.dominator));
    c.labels(&p.ray_prefix);
    p.paths.iter().for_each(|q| c.labels(q));
    let d = p.dominator.vertex();
    let ray = vertices(&p.ray_prefix);
    let registry = c.g.registry();
    if !registry.dominates(p.end, d) {
        c.flag(ViolationClass::NotDominator, format!("vertex {} is not a declared dominator of end {}", d.0, p.end.0));
    }
    let cap = ray.iter().map(|v| v.0 + 1).max().unwrap_or(0);
    let declared = registry.ray_prefix(p.end, cap);
    if declared.len() < ray.len() || declared[..ray.len()] != ray[..] {
        c.flag(ViolationClass::AnchorMismatch, "ray prefix is not the declared representative ray");
    }
    let paths: Vec<Vec<Vertex>> = p.paths.iter().map(|q| vertices(q)).collect();
    if paths.len() != k {
        c.flag(ViolationClass::WrongCount, format!("{} fan paths, k = {k}", paths.len()));
    }
    let on_ray: BTreeSet<Vertex> = ray.iter().copied().collect();
    for (i, q) in paths.iter().enumerate() {
        if !c.path("fan path", q) {
            continue;
        }
        if q[0] != d {
            c.flag(ViolationClass::EndpointMismatch, format!("fan path {i} does not start at the dominator"));
        }
        let last = *q.last().expect("non-empty");
        if q.len() < 2 || !on_ray.contains(&last) || q[1..q.len() - 1].iter().any(|v| on_ray.contains(v)) {
            c.flag(ViolationClass::FanPathOffRay, format!("fan path {i} does not end on the ray"));
        }
    }
    c.disjoint("fan paths", &paths, Some(d));
}

fn rayless(c: &mut Checker, spec: &FamilySpec, p: &RaylessPayload) {
    c.labels(std::slice::from_ref(&p.root));
    c.labels(&p.covered);
    for e in &p.edges {
        c.labels(&[e.parent.clone(), e.child.clone()]);
    }
    let preset = preset_members(c, spec, &p.preset);
    let root = p.root.vertex();
    let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for e in &p.edges {
        let (a, b) = (e.parent.vertex(), e.child.vertex());
        if !c.g.adjacent(a, b) {
            c.flag(ViolationClass::TreeEdgeMissing, format!("{}-{} is not an edge", a.0, b.0));
        }
        if b == root || parent.insert(b, a).is_some() {
            c.flag(ViolationClass::NotATree, format!("vertex {} has two parents", b.0));
        }
    }
    let mut height: BTreeMap<Vertex, usize> = [(root, 0)].into();
    for &v in parent.keys() {
        let mut chain = vec![v];
        let mut cur = v;
        let mut ok = true;
        while cur != root {
            match parent.get(&cur) {
                Some(&q) if !chain.contains(&q) => {
                    chain.push(q);
                    cur = q;
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            c.flag(ViolationClass::NotATree, format!("vertex {} does not reach the root", v.0));
            return;
        }
        height.insert(v, chain.len() - 1);
    }
    for e in &p.edges {
        if height.get(&e.child.vertex()) != Some(&e.height) {
            c.flag(ViolationClass::NotATree, format!("recorded height of {} is wrong", e.child.index));
        }
    }
    for v in vertices(&p.covered) {
        if !height.contains_key(&v) {
            c.flag(ViolationClass::UncoveredVertex, format!("vertex {} of the U-prefix is not in the tree", v.0));
        }
        if let Some(preset) = preset {
            if !preset.contains(v) {
                c.flag(ViolationClass::NotInU, format!("covered vertex {} not in `{}`", v.0, preset.name));
            }
        }
    }
}

fn star_decomposition(c: &mut Checker, spec: &FamilySpec, p: &StarDecompositionPayload) {
    c.labels(&p.central);
    for l in &p.leaves {
        c.labels(&l.separator);
        c.labels(&l.sample);
    }
    let preset = preset_members(c, spec, &p.preset);
    let window = Truncation::first_n(c.g, p.cap);
    let central: BTreeSet<Vertex> = vertices(&p.central).into_iter().collect();
    let leaves: Vec<BTreeSet<Vertex>> = p.leaves.iter().map(|l| vertices(&l.sample).into_iter().collect()).collect();
    // (T1) every window vertex lies in some part
    for v in window.vertices() {
        if !central.contains(&v) && !leaves.iter().any(|l| l.contains(&v)) {
            c.flag(ViolationClass::DecompositionUnsound, format!("vertex {} lies in no part", v.0));
            return;
        }
    }
    // (T2) every window edge lies in some part
    for (a, b) in window.edges() {
        let inside = |s: &BTreeSet<Vertex>| s.contains(&a) && s.contains(&b);
        if !inside(&central) && !leaves.iter().any(inside) {
            c.flag(ViolationClass::DecompositionUnsound, format!("edge {}-{} lies in no part", a.0, b.0));
            return;
        }
    }
    // (T3) on a star: leaf parts meet only inside the centre, and meet it in their separator
    for (i, l) in p.leaves.iter().enumerate() {
        let sep: BTreeSet<Vertex> = vertices(&l.separator).into_iter().collect();
        let meet: BTreeSet<Vertex> = leaves[i].intersection(&central).copied().collect();
        let sep_in_window: BTreeSet<Vertex> = sep.iter().copied().filter(|v| window.contains(*v)).collect();
        if meet != sep_in_window {
            c.flag(ViolationClass::DecompositionUnsound, format!("leaf {i} meets the centre outside its separator"));
        }
        for (j, other) in leaves.iter().enumerate().skip(i + 1) {
            if leaves[i].intersection(other).any(|v| !central.contains(v)) {
                c.flag(ViolationClass::DecompositionUnsound, format!("leaves {i} and {j} share a vertex outside the centre"));
            }
        }
        if !sep.is_empty() && !separator_connected(c.g, &sep) {
            c.flag(ViolationClass::DecompositionUnsound, format!("separator of leaf {i} is not connected"));
        }
    }
    if let Some(preset) = preset {
        for v in window.vertices().filter(|&v| preset.contains(v)) {
            if !central.contains(&v) {
                c.flag(ViolationClass::UncoveredVertex, format!("U-vertex {} is outside the central part", v.0));
                return;
            }
        }
    }
}

/// Connectivity of `G[sep]` decided by the oracle, independent of any window.
fn separator_connected(g: &dyn GraphOracle, sep: &BTreeSet<Vertex>) -> bool {
    let Some(&first) = sep.iter().next() else { return true };
    let mut seen: BTreeSet<Vertex> = [first].into();
    let mut stack = vec![first];
    while let Some(v) = stack.pop() {
        for &w in sep {
            if !seen.contains(&w) && g.adjacent(v, w) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen.len() == sep.len()
}
