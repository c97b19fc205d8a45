//! Property suites over the catalog, one row per case.

use serde::Serialize;

use crate::decomp::cuts::{fundamental_cut, theorem39_consistency};
use crate::decomp::reflect::build_reflecting_tree;
use crate::decomp::star::star_decomposition;
use crate::decomp::transfer::{standard_partitions, transfer_report};
use crate::error::{Error, Result};
use crate::families::{list_families, Expected, FamilySpec};
use crate::graph::Vertex;
use crate::ops::{extract_with, Operation, RunConfig};
use crate::verify::verify_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Duality,
    Contraction,
    Decomposition,
    Cuts,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] =
        [SuiteName::Duality, SuiteName::Contraction, SuiteName::Decomposition, SuiteName::Cuts, SuiteName::All];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Duality => "duality",
            SuiteName::Contraction => "contraction",
            SuiteName::Decomposition => "decomposition",
            SuiteName::Cuts => "cuts",
            SuiteName::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<SuiteName> {
        SuiteName::ALL.into_iter().find(|n| n.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub suite: &'static str,
    pub family: String,
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    /// Fixed-width table, one line per row.
    pub fn table(&self) -> String {
        let w_family = self.rows.iter().map(|r| r.family.len()).max().unwrap_or(0).max(6);
        let w_case = self.rows.iter().map(|r| r.case.len()).max().unwrap_or(0).max(4);
        let mut out = format!("{:<13} {:<w_family$} {:<w_case$} {:<4} detail\n", "suite", "family", "case", "ok");
        for r in &self.rows {
            let ok = if r.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<13} {:<w_family$} {:<w_case$} {ok:<4} {}\n", r.suite, r.family, r.case, r.detail));
        }
        out.push_str(&format!("{} rows, {} failed\n", self.rows.len(), self.failures()));
        out
    }
}

/// Budgets shared by the suites.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteBudgets {
    pub k: usize,
    /// Overrides every family's default depth when set.
    pub depth: Option<usize>,
}

impl Default for SuiteBudgets {
    fn default() -> Self {
        SuiteBudgets { k: 8, depth: None }
    }
}

/// Run a suite, optionally restricted to families whose name contains `filter`.
pub fn run_suite(name: SuiteName, filter: Option<&str>, budgets: SuiteBudgets) -> Result<SuiteReport> {
    let families: Vec<FamilySpec> =
        list_families().into_iter().filter(|f| filter.is_none_or(|s| f.name.contains(s))).collect();
    if families.is_empty() {
        return Err(Error::Precondition(format!("no family matches `{}`", filter.unwrap_or(""))));
    }
    let mut rows = Vec::new();
    let run_one = |n: SuiteName, rows: &mut Vec<SuiteRow>| -> Result<()> {
        match n {
            SuiteName::Duality => rows.extend(families.iter().flat_map(|f| duality(f, budgets))),
            SuiteName::Contraction => rows.extend(contraction(&families)?),
            SuiteName::Decomposition => rows.extend(families.iter().flat_map(decomposition)),
            SuiteName::Cuts => rows.extend(families.iter().flat_map(cuts)),
            SuiteName::All => unreachable!(),
        }
        Ok(())
    };
    match name {
        SuiteName::All => {
            for n in [SuiteName::Duality, SuiteName::Contraction, SuiteName::Decomposition, SuiteName::Cuts] {
                run_one(n, &mut rows)?;
            }
        }
        n => run_one(n, &mut rows)?,
    }
    Ok(SuiteReport { rows })
}

/// Outcome of running both sides of the duality on one preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualityOutcome {
    Comb,
    Complement,
    DoubleHit,
    Miss,
}

impl DualityOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            DualityOutcome::Comb => "comb",
            DualityOutcome::Complement => "complement",
            DualityOutcome::DoubleHit => "double-hit",
            DualityOutcome::Miss => "miss",
        }
    }
}

/// The comb side holds when the driver returns a verified undominated comb;
/// the complement side when the driver returns a verified rayless tree and the
/// star-decomposition with its dominated central part verifies.
pub fn duality_outcome(spec: &FamilySpec, preset: &str, budgets: SuiteBudgets) -> (DualityOutcome, String) {
    let cfg = |op| {
        let c = RunConfig::new(spec.name, preset, op, budgets.k);
        match budgets.depth {
            Some(d) => c.with_depth(d),
            None => c,
        }
    };
    let driver = extract_with(spec, &cfg(Operation::Theorem1));
    let decomposition = extract_with(spec, &cfg(Operation::StarDecomposition));
    let comb = matches!(&driver, Ok(e) if e.certificate.kind() == "comb" && e.report.ok());
    let rayless = matches!(&driver, Ok(e) if e.certificate.kind() == "rayless-tree" && e.report.ok());
    let star = matches!(&decomposition, Ok(e) if e.report.ok());
    let note = |r: &Result<crate::ops::Extraction>| match r {
        Ok(e) if e.report.ok() => e.certificate.kind().to_owned(),
        Ok(e) => format!("{} rejected", e.certificate.kind()),
        Err(Error::Duality(_)) => "refused".to_owned(),
        Err(e) => format!("error: {e}"),
    };
    let outcome = if comb && (rayless || star) {
        DualityOutcome::DoubleHit
    } else if comb {
        DualityOutcome::Comb
    } else if rayless && star {
        DualityOutcome::Complement
    } else {
        DualityOutcome::Miss
    };
    (outcome, format!("driver {}, decomposition {}", note(&driver), note(&decomposition)))
}

fn duality(spec: &FamilySpec, budgets: SuiteBudgets) -> Vec<SuiteRow> {
    spec.presets
        .iter()
        .map(|p| {
            let (outcome, detail) = duality_outcome(spec, p.name, budgets);
            let expected = match p.expected {
                Expected::Comb => DualityOutcome::Comb,
                Expected::Complement => DualityOutcome::Complement,
            };
            SuiteRow {
                suite: "duality",
                family: spec.name.into(),
                case: p.name.into(),
                pass: outcome == expected,
                detail: format!("{}: {detail}", outcome.as_str()),
            }
        })
        .collect()
}

/// Transfer checks for the standard partitions, plus the contraction route of
/// the binary tree with tops.
fn contraction(families: &[FamilySpec]) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for sp in standard_partitions()? {
        let Some(spec) = families.iter().find(|f| f.name == sp.family) else { continue };
        for p in &spec.presets {
            let row = match transfer_report(&sp, p.name, 16, 12, 8) {
                Ok(r) => SuiteRow {
                    suite: "contraction",
                    family: spec.name.into(),
                    case: format!("{}/{}", sp.name, p.name),
                    pass: r.ok(),
                    detail: if r.ok() {
                        format!("{} ends, {} pieces agree", r.ends.len(), r.pieces.len())
                    } else {
                        r.discrepancies.join("; ")
                    },
                },
                Err(e) => SuiteRow {
                    suite: "contraction",
                    family: spec.name.into(),
                    case: format!("{}/{}", sp.name, p.name),
                    pass: false,
                    detail: e.to_string(),
                },
            };
            rows.push(row);
        }
    }
    if let Some(spec) = families.iter().find(|f| f.name == "binary-tree-with-tops") {
        let cfg = RunConfig::new(spec.name, "t2-vertices", Operation::Theorem1, 4).with_depth(6).with_steps(usize::MAX);
        let (pass, detail) = match extract_with(spec, &cfg) {
            Ok(e) => {
                let route = match &e.certificate.body {
                    crate::certificate::Body::RaylessTree(p) => p.route.clone(),
                    _ => e.certificate.kind().to_owned(),
                };
                (route == "contraction" && e.report.ok(), format!("route {route}, verified {}", e.report.ok()))
            }
            Err(e) => (false, e.to_string()),
        };
        rows.push(SuiteRow { suite: "contraction", family: spec.name.into(), case: "t2-vertices/route".into(), pass, detail });
    }
    Ok(rows)
}

/// Depths the star-decompositions are checked at.
pub const DECOMPOSITION_DEPTHS: [usize; 3] = [5, 10, 15];

/// Star-decompositions at three depths for every complement preset, and a
/// reflecting tree per preset at the family depth.
fn decomposition(spec: &FamilySpec) -> Vec<SuiteRow> {
    let g = spec.oracle.as_ref();
    let mut rows = Vec::new();
    for p in spec.presets.iter().filter(|p| p.expected == Expected::Complement) {
        let u = p.members.clone();
        let mut failures = Vec::new();
        for depth in DECOMPOSITION_DEPTHS {
            let cap = g.default_cap(depth);
            match star_decomposition(g, &|v| u(v), &spec.decomposition, cap, depth) {
                Ok(sd) => {
                    let report = verify_with(&sd.to_certificate(g, spec.name, p.name, depth), spec);
                    let central = g.vertices_below(cap).into_iter().filter(|&v| u(v)).all(|v| sd.in_central(v));
                    let tracked = sd.end_leaves(g).iter().all(|(_, leaf)| leaf.is_some());
                    if !report.ok() || !central || !tracked {
                        failures.push(format!("d{depth}: verified {} central {central} tracked {tracked}", report.ok()));
                    }
                }
                Err(e) => failures.push(format!("d{depth}: {e}")),
            }
        }
        rows.push(SuiteRow {
            suite: "decomposition",
            family: spec.name.into(),
            case: format!("{}/star", p.name),
            pass: failures.is_empty(),
            detail: if failures.is_empty() { "depths 5, 10, 15 sound".into() } else { failures.join("; ") },
        });
    }
    for p in &spec.presets {
        let Ok(cover) = spec.cover(p.name) else { continue };
        let (pass, detail) =
            match build_reflecting_tree(spec.oracle.clone(), p.members.clone(), &cover, &spec.decomposition, 4, spec.depth) {
                Ok(t) => (
                    t.report.ok(),
                    format!("{:?} route, {} vertices, {} undominated ends", t.route, t.tree.len(), t.report.undominated.len()),
                ),
                Err(e) => (false, e.to_string()),
            };
        rows.push(SuiteRow { suite: "decomposition", family: spec.name.into(), case: format!("{}/reflect", p.name), pass, detail });
    }
    rows
}

/// Budgets a dominated-ray cut is checked against.
pub const CUT_BUDGETS: [usize; 4] = [10, 100, 1_000, 10_000];

fn cuts(spec: &FamilySpec) -> Vec<SuiteRow> {
    let g = spec.oracle.as_ref();
    let mut rows = Vec::new();
    for t in &spec.spanning_trees {
        let r = theorem39_consistency(g, t, 12, 1_000, 8, 1 << 11);
        let verdict = if r.all_finite { "all finite" } else { "infinite cuts" };
        rows.push(SuiteRow {
            suite: "cuts",
            family: spec.name.into(),
            case: t.name.clone(),
            pass: r.consistent,
            detail: format!("{verdict}, {} attributed, {} tree ends", r.attributions.len(), r.tree_ends),
        });
    }
    if let Some(t) = spec.spanning_tree("ray-tree") {
        let edge = (Vertex(1), Vertex(2));
        let exceeded = CUT_BUDGETS
            .iter()
            .filter(|&&b| t.parent(edge.1) == Some(edge.0) && !fundamental_cut(g, t, edge, b, 4 * b).is_finite())
            .count();
        rows.push(SuiteRow {
            suite: "cuts",
            family: spec.name.into(),
            case: format!("{}/budgets", t.name),
            pass: exceeded == CUT_BUDGETS.len(),
            detail: format!("exceeds {exceeded} of {} budgets up to 10^4", CUT_BUDGETS.len()),
        });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in SuiteName::ALL {
            assert_eq!(SuiteName::parse(n.as_str()), Some(n));
        }
        assert_eq!(SuiteName::parse("everything"), None);
    }

    #[test]
    fn empty_filter_is_a_precondition() {
        let err = run_suite(SuiteName::Duality, Some("no-such-family"), SuiteBudgets::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn ray_duality_rows() {
        let r = run_suite(SuiteName::Duality, Some("ray"), SuiteBudgets::default()).unwrap();
        let cases: Vec<(&str, &str)> = r.rows.iter().map(|r| (r.family.as_str(), r.case.as_str())).collect();
        assert!(cases.contains(&("ray", "origin")));
        assert!(r.passed(), "{}", r.table());
        assert!(r.table().ends_with(&format!("{} rows, 0 failed\n", r.rows.len())));
    }
}
