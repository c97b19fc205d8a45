//! One line per acceptance criterion. Every tolerance is pinned below.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use combforge::certificate::{Budgets, Certificate};
use combforge::decomp::cuts::{fundamental_cut, theorem39_consistency, CutVerdict, ViolatedSide};
use combforge::decomp::star::star_decomposition;
use combforge::decomp::transfer::{standard_partitions, transfer_report};
use combforge::families::{family, list_families, Expected};
use combforge::graph::{EndId, Truncation, Vertex};
use combforge::ops::{extract_with, Operation, RunConfig};
use combforge::rayless::{build_rayless_tree, check_dominators_in_u, theorem1_driver, Route, Theorem1, Theorem1Config};
use combforge::suite::{duality_outcome, DualityOutcome, SuiteBudgets};
use combforge::verify::{verify, verify_with};

/// AC1: budget ceiling and wall-clock limit.
const AC1_K: usize = 8;
const AC1_MAX_DEPTH: usize = 40;
const AC1_TIME: Duration = Duration::from_secs(300);
const AC1_FAMILIES: usize = 10;
/// AC2: build length and radius bounds.
const AC2_STEPS: usize = 200;
const AC2_CAP: usize = 256;
const AC2_COMPLETE_RADIUS: usize = 1;
const AC2_FAN_RADIUS: usize = 2;
/// AC3: depth of the T2 levels that must be covered.
const AC3_DEPTH: usize = 6;
/// AC4: ladder cut size, windows, and budgets for the fan.
const AC4_LADDER_CUT: usize = 3;
const AC4_WINDOWS: [usize; 2] = [30, 60];
const AC4_BUDGETS: [usize; 4] = [10, 100, 1_000, 10_000];
/// AC5: budgets of the transfer checks.
const AC5_K: usize = 16;
const AC5_DEPTH: usize = 12;
const AC5_PIECES: usize = 8;
/// AC6: minimum forged corpus size.
const AC6_MIN_FORGED: usize = 12;
/// AC7: checked depths.
const AC7_DEPTHS: [usize; 3] = [5, 10, 15];

type Outcome = (bool, String);

fn ac1_duality() -> Outcome {
    let start = Instant::now();
    let budgets = SuiteBudgets { k: AC1_K, depth: None };
    let families = list_families();
    let (mut runs, mut doubles, mut misses, mut wrong) = (0, 0, 0, Vec::new());
    for spec in &families {
        assert!(spec.depth <= AC1_MAX_DEPTH);
        for p in &spec.presets {
            runs += 1;
            let (outcome, detail) = duality_outcome(spec, p.name, budgets);
            match outcome {
                DualityOutcome::DoubleHit => doubles += 1,
                DualityOutcome::Miss => misses += 1,
                _ => {}
            }
            let expected = match p.expected {
                Expected::Comb => DualityOutcome::Comb,
                Expected::Complement => DualityOutcome::Complement,
            };
            if outcome != expected {
                wrong.push(format!("{}/{}: {detail}", spec.name, p.name));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = families.len() == AC1_FAMILIES && doubles == 0 && misses == 0 && wrong.is_empty() && elapsed < AC1_TIME;
    (pass, format!("{runs} runs over {} families, {doubles} double-hits, {misses} misses, {} off expectation {wrong:?}, {:.1}s", families.len(), wrong.len(), elapsed.as_secs_f64()))
}

/// Step-by-step simulation of the attachment rule on an explicit adjacency:
/// each pending vertex joins by a shortest path through non-tree vertices to
/// the tree vertex of least height, ties to the lower index.
fn simulate(adj: &dyn Fn(usize, usize) -> bool, order: &[usize], cap: usize, steps: usize) -> Vec<(usize, usize, usize)> {
    let mut height: BTreeMap<usize, usize> = [(order[0], 0)].into();
    let mut log = Vec::new();
    for &u in order.iter().take(steps).skip(1) {
        if height.contains_key(&u) {
            continue;
        }
        // Breadth-first search from u through vertices outside the tree.
        let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
        let mut dist: BTreeMap<usize, usize> = [(u, 0)].into();
        let mut frontier = vec![u];
        let mut best: Option<(usize, usize, usize)> = None;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for y in 0..cap {
                    if y == x || !adj(x, y) {
                        continue;
                    }
                    if let Some(&h) = height.get(&y) {
                        let key = (h, y, x);
                        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                            best = Some(key);
                        }
                    } else if !dist.contains_key(&y) {
                        dist.insert(y, dist[&x] + 1);
                        pred.insert(y, x);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let (h, anchor, last) = best.expect("connected window");
        let mut path = vec![last];
        while let Some(&p) = pred.get(path.last().unwrap()) {
            path.push(p);
        }
        // path runs last .. u; heights grow away from the anchor
        for (i, &v) in path.iter().enumerate() {
            height.insert(v, h + 1 + i);
        }
        log.push((u, anchor, h));
    }
    log
}

fn ac2_oracle() -> Outcome {
    let complete = |a: usize, b: usize| a != b;
    let fan = |a: usize, b: usize| a != b && (a == 0 || b == 0 || a.abs_diff(b) == 1);
    let cases: [(&str, &dyn Fn(usize, usize) -> bool, usize); 2] =
        [("complete", &complete, AC2_COMPLETE_RADIUS), ("fan", &fan, AC2_FAN_RADIUS)];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, adj, radius) in cases {
        let spec = family(name).unwrap();
        let p = spec.preset("all").unwrap();
        let cover = spec.cover("all").unwrap();
        let build = build_rayless_tree(spec.oracle.as_ref(), &|v| (p.members)(v), &cover, AC2_STEPS, 0, AC2_CAP, AC2_CAP).unwrap();
        let engine: Vec<(usize, usize, usize)> =
            build.tree.log().iter().map(|e| (e.path[0].0, e.attached_at.0, e.attach_height)).collect();
        let order: Vec<usize> = (0..AC2_CAP).collect();
        let oracle = simulate(adj, &order, AC2_CAP, AC2_STEPS);
        let identical = serde_json::to_vec(&engine).unwrap() == serde_json::to_vec(&oracle).unwrap();
        let r = build.tree.radius();
        pass &= identical && r <= radius && engine.len() == AC2_STEPS - 1;
        notes.push(format!("{name} radius {r} (bound {radius}), {} attachments, identical {identical}", engine.len()));
    }
    (pass, notes.join("; "))
}

fn t2_node(i: usize) -> Vertex {
    Vertex(if i % 2 == 0 { 3 * (i / 2) } else { 3 * (i / 2) + 2 })
}

fn ac3_contraction() -> Outcome {
    let spec = family("binary-tree-with-tops").unwrap();
    let p = spec.preset("t2-vertices").unwrap();
    let cover = spec.cover("t2-vertices").unwrap();
    let g = spec.oracle.as_ref();
    let cap = g.default_cap(AC3_DEPTH);
    let window = Truncation::first_n(g, cap);
    let direct_fails = check_dominators_in_u(g, &window, &|v| (p.members)(v), cap, AC3_DEPTH).is_err();
    let out = theorem1_driver(spec.oracle.clone(), p.members.clone(), &cover, Theorem1Config::new(4, AC3_DEPTH, usize::MAX)).unwrap();
    let Theorem1::Rayless { route, tree, covered, audit, direct_refusal, .. } = out else {
        return (false, "driver returned a comb".into());
    };
    let levels: Vec<Vertex> = (0..(1 << (AC3_DEPTH + 1)) - 1).map(t2_node).collect();
    let missing = levels.iter().filter(|v| !tree.contains(**v)).count();
    let cert = Certificate::rayless(g, spec.name, "t2-vertices", route.as_str(), Budgets { k: 4, depth: AC3_DEPTH, steps: None }, &tree, &covered);
    let violations = verify_with(&cert, &spec).violations.len();
    // A stopped branch must be a finite subtree strictly inside the window.
    let unfinished = audit.iter().filter(|b| b.stopped && (b.size == 0 || b.size >= cap)).count();
    let pass = route == Route::Contraction
        && direct_fails
        && direct_refusal.is_some()
        && missing == 0
        && violations == 0
        && unfinished == 0
        && !audit.is_empty();
    (
        pass,
        format!(
            "route {}, direct preconditions fail {direct_fails}, {} depth-{AC3_DEPTH} T2 vertices, {missing} missing, {} branches ({} stopped), {violations} violations",
            route.as_str(),
            levels.len(),
            audit.len(),
            audit.iter().filter(|b| b.stopped).count()
        ),
    )
}

/// Edges of the ladder's fundamental cut at rung `i` inside the first `n`
/// vertices, by brute force over all vertex pairs.
fn ladder_cut(i: usize, n: usize) -> usize {
    let adj = |a: usize, b: usize| {
        let (lo, hi) = (a.min(b), a.max(b));
        (hi - lo == 1 && lo % 2 == 0) || hi - lo == 2
    };
    let side = |v: usize| v == 2 * i + 1;
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            if adj(a, b) && side(a) != side(b) {
                count += 1;
            }
        }
    }
    count
}

fn ac4_cuts() -> Outcome {
    let ladder = family("one-way-ladder").unwrap();
    let tree = ladder.spanning_tree("bottom-ray-rungs").unwrap();
    let mut ladder_ok = true;
    for i in 1..=5 {
        let (b, t) = (Vertex(2 * i), Vertex(2 * i + 1));
        let engine = fundamental_cut(ladder.oracle.as_ref(), tree, (b, t), 100, AC4_WINDOWS[1]);
        let brute: Vec<usize> = AC4_WINDOWS.iter().map(|&n| ladder_cut(i, n)).collect();
        ladder_ok &= engine.verdict == CutVerdict::Finite { count: AC4_LADDER_CUT } && brute.iter().all(|&c| c == AC4_LADDER_CUT);
    }
    let r = theorem39_consistency(ladder.oracle.as_ref(), tree, 12, 1_000, 8, 1 << 11);
    ladder_ok &= r.all_finite;

    let fan = family("fan").unwrap();
    let ray_tree = fan.spanning_tree("ray-tree").unwrap();
    let edge = (Vertex(1), Vertex(2));
    let exceeded = AC4_BUDGETS
        .iter()
        .filter(|&&b| matches!(fundamental_cut(fan.oracle.as_ref(), ray_tree, edge, b, 4 * b).verdict, CutVerdict::ExceedsBudget { .. }))
        .count();
    let r = theorem39_consistency(fan.oracle.as_ref(), ray_tree, 12, 1_000, 8, 1 << 11);
    let attributed = !r.attributions.is_empty()
        && r.attributions.iter().all(|a| a.vertex == Vertex(0) && a.side == ViolatedSide::DominatedTreeRay { end: EndId(0) } && a.confirmed);
    let apex = fan.spanning_tree("apex-star").unwrap();
    let apex_finite = theorem39_consistency(fan.oracle.as_ref(), apex, 12, 1_000, 8, 1 << 11).all_finite;
    (
        ladder_ok && exceeded == AC4_BUDGETS.len() && attributed && apex_finite,
        format!(
            "ladder rungs cut {AC4_LADDER_CUT} at windows {AC4_WINDOWS:?}: {ladder_ok}; fan ray-tree exceeds {exceeded}/{} budgets up to 10^4, apex attribution {attributed}; fan apex-star all finite {apex_finite}",
            AC4_BUDGETS.len()
        ),
    )
}

fn ac5_transfer() -> Outcome {
    let mut runs = 0;
    let mut discrepancies = Vec::new();
    for sp in standard_partitions().unwrap() {
        let spec = family(sp.family).unwrap();
        for p in &spec.presets {
            runs += 1;
            match transfer_report(&sp, p.name, AC5_K, AC5_DEPTH, AC5_PIECES) {
                Ok(r) => discrepancies.extend(r.discrepancies.iter().map(|d| format!("{}/{}: {d}", sp.name, p.name))),
                Err(e) => discrepancies.push(format!("{}/{}: {e}", sp.name, p.name)),
            }
        }
    }
    (discrepancies.is_empty() && runs > 0, format!("{runs} partition/preset runs at k {AC5_K}, depth {AC5_DEPTH}, {} discrepancies {discrepancies:?}", discrepancies.len()))
}

fn fixtures() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn ac6_round_trip() -> Outcome {
    let (mut extracted, mut reverified) = (0, 0);
    for spec in list_families() {
        for p in &spec.presets {
            for op in Operation::ALL {
                let Ok(e) = extract_with(&spec, &RunConfig::new(spec.name, p.name, op, 4)) else { continue };
                extracted += 1;
                let back = Certificate::from_json(&e.certificate.to_json()).unwrap();
                if back == e.certificate && e.report.ok() && verify(&back).unwrap().ok() {
                    reverified += 1;
                }
            }
        }
    }
    let dir = fixtures().join("forged");
    let expected: BTreeMap<String, String> =
        serde_json::from_str(&std::fs::read_to_string(dir.join("expected.json")).unwrap()).unwrap();
    let mut rejected = 0;
    let mut wrong = Vec::new();
    for (name, class) in &expected {
        let cert = Certificate::from_json(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
        let got: BTreeSet<String> = verify(&cert)
            .unwrap()
            .classes()
            .iter()
            .map(|c| serde_json::to_value(c).unwrap().as_str().unwrap().to_owned())
            .collect();
        if got == BTreeSet::from([class.clone()]) {
            rejected += 1;
        } else {
            wrong.push(format!("{name}: {got:?}"));
        }
    }
    let pass = extracted > 0 && reverified == extracted && expected.len() >= AC6_MIN_FORGED && rejected == expected.len();
    (pass, format!("{reverified}/{extracted} extracted certificates re-verify; {rejected}/{} forged fixtures rejected with their class {wrong:?}", expected.len()))
}

fn ac7_decomposition() -> Outcome {
    let (mut checked, mut sound) = (0, 0);
    let mut failures = Vec::new();
    for spec in list_families() {
        let g = spec.oracle.as_ref();
        for p in spec.presets.iter().filter(|p| p.expected == Expected::Complement) {
            for depth in AC7_DEPTHS {
                checked += 1;
                let cap = g.default_cap(depth);
                let u = |v: Vertex| (p.members)(v);
                let sd = match star_decomposition(g, &u, &spec.decomposition, cap, depth) {
                    Ok(sd) => sd,
                    Err(e) => {
                        failures.push(format!("{}/{} d{depth}: {e}", spec.name, p.name));
                        continue;
                    }
                };
                let verified = verify_with(&sd.to_certificate(g, spec.name, p.name, depth), &spec).ok();
                let central = g.vertices_below(cap).into_iter().filter(|&v| u(v)).all(|v| sd.in_central(v));
                let tracked = sd.end_leaves(g).iter().all(|(_, leaf)| leaf.is_some());
                if verified && central && tracked {
                    sound += 1;
                } else {
                    failures.push(format!("{}/{} d{depth}: verified {verified} central {central} tracked {tracked}", spec.name, p.name));
                }
            }
        }
    }
    (checked > 0 && sound == checked, format!("{sound}/{checked} star-decompositions sound at depths {AC7_DEPTHS:?} {failures:?}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("AC1 duality exclusivity", ac1_duality),
        ("AC2 rayless growth matches simulation", ac2_oracle),
        ("AC3 contraction route on the binary tree with tops", ac3_contraction),
        ("AC4 fundamental cuts", ac4_cuts),
        ("AC5 transfer across contractions", ac5_transfer),
        ("AC6 certificate round-trip and forged rejection", ac6_round_trip),
        ("AC7 star-decomposition soundness", ac7_decomposition),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let (pass, detail) = run();
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
