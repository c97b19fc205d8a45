//! The duality driver: an undominated comb attached to `U`, or a rayless tree
//! containing a prefix of `U`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::certificate::{CombCertificate, SpineAnchor};
use crate::error::{Error, Result};
use crate::graph::{Oracle, Truncation, Vertex};
use crate::normal::{build_normal_tree, check_normal, DispersedCover};
use crate::starcomb::{closure_ends, comb_along};
use crate::tree::RootedLazyTree;

use super::contraction::{build_domination_contraction, lift_rayless, DominationContraction};
use super::{build_rayless_tree, check_dominators_in_u, BranchAudit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Every closure end has a dominator in `U`: build directly in `G`.
    Direct,
    /// Contract dominating stars onto a normal tree, build in the minor, lift.
    Contraction,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Contraction => "contraction",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Theorem1 {
    Comb(CombCertificate),
    Rayless {
        route: Route,
        tree: RootedLazyTree,
        covered: Vec<Vertex>,
        audit: Vec<BranchAudit>,
        /// Why the direct route was refused, when the contraction route ran.
        direct_refusal: Option<String>,
        contraction: Option<DominationContraction>,
    },
}

impl Theorem1 {
    pub fn is_comb(&self) -> bool {
        matches!(self, Theorem1::Comb(_))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Theorem1Config {
    pub k: usize,
    pub depth: usize,
    /// How many `U`-vertices the rayless tree must contain.
    pub steps: usize,
    pub lookahead: usize,
}

impl Theorem1Config {
    pub fn new(k: usize, depth: usize, steps: usize) -> Self {
        Theorem1Config { k, depth, steps, lookahead: 16 }
    }
}

/// How many times the comb window may double past the closure window.
const COMB_WIDENINGS: u32 = 3;

pub fn theorem1_driver(
    g: Oracle,
    u: Arc<dyn Fn(Vertex) -> bool + Send + Sync>,
    cover: &DispersedCover,
    cfg: Theorem1Config,
) -> Result<Theorem1> {
    let cap = g.default_cap(cfg.depth);
    let window = Truncation::first_n(g.as_ref(), cap);
    let registry = g.registry();
    let u_ref = |v: Vertex| u(v);
    let ends = closure_ends(&window, registry, &u_ref, cap, cfg.depth);
    if let Some(&end) = ends.iter().find(|&&e| !registry.is_dominated(e)) {
        // The closure test fixes the end; teeth may need a longer prefix.
        let mut wide = cap;
        let mut comb = loop {
            let w = if wide == cap { window.clone() } else { Truncation::first_n(g.as_ref(), wide) };
            let ray = registry.ray_prefix(end, wide);
            if let Some(c) = comb_along(&w, &ray, &u_ref, cfg.k) {
                break c;
            }
            if wide >= cap << COMB_WIDENINGS {
                return Err(Error::exhausted(
                    "comb-extraction",
                    format!("fewer than {} teeth along end {} in {wide} vertices", cfg.k, end.0),
                ));
            }
            wide *= 2;
        };
        comb.anchor = SpineAnchor::Registry { end };
        comb.undominated = true;
        return Ok(Theorem1::Comb(comb));
    }
    match check_dominators_in_u(g.as_ref(), &window, &u_ref, cap, cfg.depth) {
        Ok(()) => {
            let build = build_rayless_tree(g.as_ref(), &u_ref, cover, cfg.steps, cfg.lookahead, cap, cfg.depth)?;
            Ok(Theorem1::Rayless {
                route: Route::Direct,
                tree: build.tree,
                covered: build.covered,
                audit: build.audit,
                direct_refusal: None,
                contraction: None,
            })
        }
        Err(Error::Precondition(reason)) => contraction_route(g, u, cover, cfg, cap, reason),
        Err(e) => Err(e),
    }
}

fn contraction_route(
    g: Oracle,
    u: Arc<dyn Fn(Vertex) -> bool + Send + Sync>,
    cover: &DispersedCover,
    cfg: Theorem1Config,
    cap: usize,
    reason: String,
) -> Result<Theorem1> {
    let window = Truncation::first_n(g.as_ref(), cap);
    let in_window: Vec<Vertex> = cover
        .well_order(cap)
        .iter()
        .filter(|&v| window.contains(v) && u(v))
        .collect();
    let normal = build_normal_tree(g.as_ref(), cover, in_window.len(), cap)
        .map_err(|e| stage(e, "normal-tree"))?;
    if let crate::normal::NormalCheck::Counterexample { path } = check_normal(&normal, &window) {
        return Err(Error::Invariant(format!("constructed tree is not normal: {path:?}")));
    }
    let dc = build_domination_contraction(g.clone(), &normal, cap, cfg.depth).map_err(|e| stage(e, "domination-contraction"))?;
    if !dc.stars_meet_tree_once(&normal) || !dc.passed_on.proper {
        return Err(Error::Invariant("normal tree not properly passed on to the minor".into()));
    }
    let h = dc.minor.clone();
    let image_u: BTreeSet<Vertex> = in_window.iter().map(|&v| h.branch_of(v)).collect();
    let h_cover = cover.mapped("contracted", {
        let h = h.clone();
        Arc::new(move |v| h.branch_of(v))
    });
    let in_image = |v: Vertex| image_u.contains(&v);
    let build = build_rayless_tree(h.as_ref(), &in_image, &h_cover, image_u.len(), 0, cap, cfg.depth)
        .map_err(|e| stage(e, "rayless-in-minor"))?;
    let lifted = lift_rayless(&build.tree, &h, cap).map_err(|e| stage(e, "lift"))?;
    let covered: Vec<Vertex> = in_window.iter().copied().take(cfg.steps).collect();
    if let Some(v) = covered.iter().find(|v| !lifted.contains(**v)) {
        return Err(Error::Invariant(format!("lifted tree misses U-vertex {}", v.0)));
    }
    let audit = lifted_audit(&lifted);
    Ok(Theorem1::Rayless {
        route: Route::Contraction,
        tree: lifted,
        covered,
        audit,
        direct_refusal: Some(reason),
        contraction: Some(dc),
    })
}

fn stage(e: Error, name: &str) -> Error {
    match e {
        Error::BudgetExhausted { detail, .. } => Error::exhausted(name, detail),
        other => other,
    }
}

/// Branch summary of a lifted tree. The tree is a finite snapshot built from
/// the whole window, so every branch is reported stopped.
fn lifted_audit(tree: &RootedLazyTree) -> Vec<BranchAudit> {
    tree.branch_heights()
        .into_iter()
        .map(|(branch, max_height)| BranchAudit {
            branch,
            size: tree.up_closure(branch).len(),
            max_height,
            stopped: true,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family;

    fn run(fam: &str, preset: &str, depth: usize, steps: usize) -> Result<Theorem1> {
        let spec = family(fam).unwrap();
        let p = spec.preset(preset).unwrap().clone();
        let cover = spec.cover(preset).unwrap();
        theorem1_driver(spec.oracle.clone(), p.members, &cover, Theorem1Config::new(4, depth, steps))
    }

    #[test]
    fn ray_gives_comb() {
        assert!(run("ray", "all", 20, 10).unwrap().is_comb());
    }

    #[test]
    fn complete_direct_radius_one() {
        match run("complete", "all", 12, 20).unwrap() {
            Theorem1::Rayless { route, tree, .. } => {
                assert_eq!(route, Route::Direct);
                assert_eq!(tree.radius(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tops_take_contraction_route() {
        let out = run("binary-tree-with-tops", "t2-vertices", 6, usize::MAX).unwrap();
        let Theorem1::Rayless { route, tree, covered, .. } = out else { panic!("comb") };
        assert_eq!(route, Route::Contraction);
        assert!(covered.iter().all(|v| tree.contains(*v)));
    }

    #[test]
    fn fan_ray_vertices() {
        let out = run("fan", "ray-vertices", 10, 30).unwrap();
        let Theorem1::Rayless { tree, covered, .. } = out else { panic!("comb") };
        assert!(covered.iter().all(|v| tree.contains(*v)));
    }
}
