//! Named operations over catalog families, producing certificates.

use serde::Serialize;

use crate::certificate::{Budgets, Certificate};
use crate::decomp::star::{dominated_subgraph, star_decomposition};
use crate::error::{Error, Result};
use crate::families::{family, FamilySpec};
use crate::graph::Truncation;
use crate::rayless::driver::{theorem1_driver, Theorem1, Theorem1Config};
use crate::starcomb::{closure_ends, find_fan, star_comb, StarComb};
use crate::verify::{verify_with, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    StarComb,
    Theorem1,
    StarDecomposition,
    Fan,
}

impl Operation {
    pub const ALL: [Operation; 4] = [Operation::StarComb, Operation::Theorem1, Operation::StarDecomposition, Operation::Fan];

    pub fn as_str(self) -> &'static str {
        match self {
            Operation::StarComb => "star-comb",
            Operation::Theorem1 => "theorem1",
            Operation::StarDecomposition => "star-decomposition",
            Operation::Fan => "fan",
        }
    }

    pub fn parse(s: &str) -> Option<Operation> {
        Operation::ALL.into_iter().find(|o| o.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub family: String,
    pub preset: String,
    pub operation: Operation,
    pub k: usize,
    /// `None` takes the family default.
    pub depth: Option<usize>,
    /// Rayless build length for `theorem1`.
    pub steps: usize,
}

impl RunConfig {
    pub fn new(family: &str, preset: &str, operation: Operation, k: usize) -> Self {
        RunConfig { family: family.into(), preset: preset.into(), operation, k, depth: None, steps: 32 }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub certificate: Certificate,
    pub report: VerifyReport,
}

/// Run one operation and check its certificate with the verifier.
pub fn extract(cfg: &RunConfig) -> Result<Extraction> {
    let spec = family(&cfg.family)?;
    extract_with(&spec, cfg)
}

pub fn extract_with(spec: &FamilySpec, cfg: &RunConfig) -> Result<Extraction> {
    if cfg.k == 0 || cfg.steps == 0 || cfg.depth == Some(0) {
        return Err(Error::Precondition("budgets must be positive".into()));
    }
    let preset = spec.preset(&cfg.preset)?;
    let g = spec.oracle.as_ref();
    let depth = cfg.depth.unwrap_or(spec.depth);
    let budgets = Budgets { k: cfg.k, depth, steps: None };
    let u = preset.members.clone();
    let certificate = match cfg.operation {
        Operation::StarComb => match star_comb(g, &|v| u(v), cfg.k, depth)? {
            StarComb::Star(s) => Certificate::star(g, spec.name, preset.name, budgets, &s),
            StarComb::Comb(c) => Certificate::comb(g, spec.name, preset.name, budgets, &c),
        },
        Operation::Theorem1 => {
            let cover = spec.cover(preset.name)?;
            let out = theorem1_driver(spec.oracle.clone(), u, &cover, Theorem1Config::new(cfg.k, depth, cfg.steps))?;
            match out {
                Theorem1::Comb(c) => Certificate::comb(g, spec.name, preset.name, budgets, &c),
                Theorem1::Rayless { route, tree, covered, audit, .. } => {
                    let budgets = Budgets { steps: Some(cfg.steps), ..budgets };
                    let stopped = audit.iter().filter(|b| b.stopped).count();
                    Certificate::rayless(g, spec.name, preset.name, route.as_str(), budgets, &tree, &covered)
                        .with_audit("rayless-build", vec![format!("{} branches, {stopped} stopped", audit.len())])
                }
            }
        }
        Operation::StarDecomposition => {
            let cap = g.default_cap(depth);
            let sd = star_decomposition(g, &|v| u(v), &spec.decomposition, cap, depth)?;
            let h = dominated_subgraph(spec.oracle.clone(), u.clone(), &sd, cfg.k, depth);
            if !h.ok(cfg.k) {
                return Err(Error::Invariant(format!("dominated subgraph audit failed: {h:?}")));
            }
            let mut cert = sd.to_certificate(g, spec.name, preset.name, depth);
            cert.budgets.k = cfg.k;
            cert.with_audit("dominated-subgraph", vec![format!("{} ends live in the central part", h.ends.len())])
        }
        Operation::Fan => {
            let cap = g.default_cap(depth);
            let window = Truncation::first_n(g, cap);
            let registry = g.registry();
            let ends = closure_ends(&window, registry, &|v| u(v), cap, depth);
            let found = ends.into_iter().filter(|&e| registry.is_dominated(e)).find_map(|e| {
                registry.dominators_below(e, cap).into_iter().find_map(|d| find_fan(g, e, d, cfg.k, cap))
            });
            let fan = found.ok_or_else(|| Error::exhausted("fan", format!("no dominated end in the closure with a {}-fan below {cap}", cfg.k)))?;
            Certificate::fan(g, spec.name, budgets, &fan)
        }
    };
    let report = verify_with(&certificate, spec);
    Ok(Extraction { certificate, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_star_leaves_give_a_star() {
        let out = extract(&RunConfig::new("infinite-star", "leaves", Operation::StarComb, 5)).unwrap();
        assert_eq!(out.certificate.kind(), "star");
        assert!(out.report.ok(), "{:?}", out.report);
    }

    #[test]
    fn zero_budget_is_a_precondition() {
        let err = extract(&RunConfig::new("ray", "all", Operation::StarComb, 0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn documentation_family_is_refused() {
        let err = extract(&RunConfig::new("seymour-thomas", "all", Operation::Theorem1, 3)).unwrap_err();
        assert!(matches!(err, Error::DocumentationOnly(_)));
    }
}
