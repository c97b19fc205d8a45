//! Transfer of directions, closure, domination and dispersedness along a
//! contraction with finite branch sets.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::families::{family, Grid};
use crate::graph::{end_in_closure, EndId, GraphOracle, Oracle, Truncation, Vertex, VertexPredicate};
use crate::minor::{contract, BranchPartition, Contraction};
use crate::normal::{piece_evidence, Dispersal, DispersedCover};
use crate::starcomb::{star_comb, StarComb, CLOSURE_DEPTH};

/// Vertices tried as dominators besides the declared ones.
const FAN_SAMPLES: usize = 8;
/// Budget of the whole-set star-comb comparison; short ray prefixes at depth
/// 12 cannot carry more teeth.
const SHAPE_K: usize = 4;

#[derive(Debug, Clone)]
pub struct StandardPartition {
    pub name: &'static str,
    pub family: &'static str,
    pub partition: BranchPartition,
}

/// identity on the ladder, `{apex, v0}` in the fan, a 2×2 block in the grid.
pub fn standard_partitions() -> Result<Vec<StandardPartition>> {
    let fan = family("fan")?;
    let grid = family("grid")?;
    let block: Vec<Vertex> = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(x, y)| Grid::index(x, y)).collect();
    let cap = block.iter().map(|v| v.0 + 1).max().unwrap_or(0);
    Ok(vec![
        StandardPartition { name: "identity", family: "one-way-ladder", partition: BranchPartition::identity() },
        StandardPartition {
            name: "fan-merge",
            family: "fan",
            partition: BranchPartition::merging(fan.oracle.as_ref(), &[vec![Vertex(0), Vertex(1)]], 2)?,
        },
        StandardPartition {
            name: "grid-block-merge",
            family: "grid",
            partition: BranchPartition::merging(grid.oracle.as_ref(), &[block], cap)?,
        },
    ])
}

/// `[U]`: branches meeting `u`.
pub fn image_predicate(h: &Arc<Contraction>, u: VertexPredicate) -> VertexPredicate {
    let h = h.clone();
    Arc::new(move |v| h.partition().members(v).into_iter().any(|m| u(m)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionSample {
    pub end: EndId,
    /// Radius of the tested separator ball in `H`.
    pub radius: usize,
    /// `[f(∪X)]` equals `[f]([X])`.
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionReport {
    pub samples: Vec<DirectionSample>,
    /// Pairs of ends told apart in `G` but not in `H` at any tested separator.
    pub merged_pairs: Vec<(EndId, EndId)>,
}

impl DirectionReport {
    pub fn ok(&self) -> bool {
        self.merged_pairs.is_empty() && self.samples.iter().all(|s| s.consistent)
    }
}

fn ball(window: &Truncation, radius: usize) -> BTreeSet<Vertex> {
    let Some(origin) = window.vertices().next() else { return BTreeSet::new() };
    window
        .distances(&[origin], &BTreeSet::new())
        .into_iter()
        .filter(|&(_, d)| d <= radius)
        .map(|(v, _)| v)
        .collect()
}

/// Component of `window − sep` holding the last ray vertex outside `sep`.
fn tail_component(window: &Truncation, ray: &[Vertex], sep: &BTreeSet<Vertex>) -> Option<BTreeSet<Vertex>> {
    let tail = ray.iter().rev().find(|v| window.contains(**v) && !sep.contains(v))?;
    Some(window.distances(&[*tail], sep).into_keys().collect())
}

/// For separators `X` = balls around the first vertex of `H`, compare the
/// component of `H − X` towards each end with the image of the component of
/// `G − ∪X` towards it.
pub fn direction_transfer_check(h: &Contraction, depth: usize) -> DirectionReport {
    let g = h.base().as_ref();
    let cap = g.default_cap(depth);
    let gw = Truncation::first_n(g, cap);
    let hw = Truncation::first_n(h, cap);
    let ends = g.registry().ends_below(cap);
    let mut samples = Vec::new();
    let mut seen_apart: BTreeSet<(EndId, EndId)> = BTreeSet::new();
    let mut apart_in_h: BTreeSet<(EndId, EndId)> = BTreeSet::new();
    for radius in 0..=depth.min(CLOSURE_DEPTH) {
        let x = ball(&hw, radius);
        let union: BTreeSet<Vertex> = x.iter().flat_map(|&b| h.partition().members(b)).collect();
        let mut comps = Vec::new();
        for &end in &ends {
            let g_ray = g.registry().ray_prefix(end, cap);
            let h_ray = h.registry().ray_prefix(end, cap);
            let cg = tail_component(&gw, &g_ray, &union);
            let ch = tail_component(&hw, &h_ray, &x);
            let consistent = match (&cg, &ch) {
                (Some(cg), Some(ch)) => {
                    let image: BTreeSet<Vertex> = cg.iter().map(|&v| h.branch_of(v)).collect();
                    // The window of G can cut a branch the window of H keeps whole.
                    image.is_subset(ch) && ch.iter().all(|b| image.contains(b) || b.0 + 1 >= cap)
                }
                (None, None) => true,
                _ => false,
            };
            samples.push(DirectionSample { end, radius, consistent });
            comps.push((end, cg, ch));
        }
        for (i, a) in comps.iter().enumerate() {
            for b in &comps[i + 1..] {
                if a.1 != b.1 {
                    seen_apart.insert((a.0, b.0));
                }
                if a.2 != b.2 {
                    apart_in_h.insert((a.0, b.0));
                }
            }
        }
    }
    DirectionReport { samples, merged_pairs: seen_apart.difference(&apart_in_h).copied().collect() }
}

/// Largest fan found from any sampled vertex to the ray of `end`, capped at
/// `k`, with the vertex achieving it.
fn best_fan(g: &dyn GraphOracle, window: &Truncation, end: EndId, samples: &[Vertex], k: usize, cap: usize) -> (usize, Option<Vertex>) {
    let ray: BTreeSet<Vertex> = g.registry().ray_prefix(end, cap).into_iter().filter(|v| window.contains(*v)).collect();
    let mut best = (0, None);
    for &s in samples {
        if !window.contains(s) {
            continue;
        }
        let targets: BTreeSet<Vertex> = ray.iter().copied().filter(|&r| r != s).collect();
        let size = window.fan(s, &targets, k).len();
        if size > best.0 {
            best = (size, Some(s));
        }
        if size >= k {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndTransfer {
    pub end: EndId,
    pub in_closure_g: bool,
    pub in_closure_h: bool,
    pub dominated_g: bool,
    pub dominated_h: bool,
    /// Largest fans found, capped at the budget.
    pub fan_g: usize,
    pub fan_h: usize,
}

impl EndTransfer {
    pub fn agrees(&self) -> bool {
        self.in_closure_g == self.in_closure_h && self.dominated_g == self.dominated_h
    }
}

/// Closure membership and domination of each end, decided independently in
/// `G` and in `H` by component and fan searches.
pub fn closure_domination_transfer_check(
    h: &Contraction,
    u: &VertexPredicate,
    hu: &VertexPredicate,
    k: usize,
    depth: usize,
) -> Vec<EndTransfer> {
    let g = h.base().as_ref();
    let cap = g.default_cap(depth);
    let gw = Truncation::first_n(g, cap);
    let hw = Truncation::first_n(h, cap);
    let closure_depth = depth.min(CLOSURE_DEPTH);
    g.registry()
        .ends_below(cap)
        .into_iter()
        .map(|end| {
            let mut g_samples: Vec<Vertex> = gw.vertices().take(FAN_SAMPLES).collect();
            g_samples.extend(g.registry().dominators_below(end, cap));
            g_samples.sort();
            g_samples.dedup();
            // The proof's X := ∪ X_z: candidates in H are the branches of the
            // G-candidates, so a fan in one graph is looked for in the other.
            let mut h_samples: Vec<Vertex> = g_samples.iter().map(|&v| h.branch_of(v)).collect();
            h_samples.sort();
            h_samples.dedup();
            let (fan_g, _) = best_fan(g, &gw, end, &g_samples, k, cap);
            let (fan_h, _) = best_fan(h, &hw, end, &h_samples, k, cap);
            EndTransfer {
                end,
                in_closure_g: end_in_closure(&gw, g.registry(), end, &|v| u(v), cap, closure_depth),
                in_closure_h: end_in_closure(&hw, h, end, &|v| hu(v), cap, closure_depth),
                dominated_g: fan_g >= k,
                dominated_h: fan_h >= k,
                fan_g,
                fan_h,
            }
        })
        .collect()
}

/// The cover of `[U]` in `H`: each piece mapped branch-wise.
pub fn normally_spanned_transfer_check(cover: &DispersedCover, h: &Arc<Contraction>) -> DispersedCover {
    if h.partition().is_identity() {
        return cover.clone();
    }
    let h = h.clone();
    cover.mapped(format!("{}/contracted", cover.name()), Arc::new(move |v| h.branch_of(v)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DispersalTransfer {
    pub piece: usize,
    pub before: Dispersal,
    pub after: Dispersal,
}

/// Outcome shape of the star-comb search on the whole set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Star,
    Comb,
    Exhausted,
}

fn shape(g: &dyn GraphOracle, u: &VertexPredicate, k: usize, depth: usize) -> Shape {
    match star_comb(g, &|v| u(v), k, depth) {
        Ok(StarComb::Star(_)) => Shape::Star,
        Ok(StarComb::Comb(_)) => Shape::Comb,
        Err(_) => Shape::Exhausted,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub partition: String,
    pub family: String,
    pub preset: String,
    pub directions: DirectionReport,
    pub ends: Vec<EndTransfer>,
    pub pieces: Vec<DispersalTransfer>,
    /// Star-comb outcome on `U` and on `[U]` at budget `min(k, 4)`.
    pub shape_g: Shape,
    pub shape_h: Shape,
    pub discrepancies: Vec<String>,
}

impl TransferReport {
    pub fn ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Runs all three transfer checks for one partition and preset.
pub fn transfer_report(sp: &StandardPartition, preset: &str, k: usize, depth: usize, pieces: usize) -> Result<TransferReport> {
    let spec = family(sp.family)?;
    let g: Oracle = spec.oracle.clone();
    let h = Arc::new(contract(g.clone(), sp.partition.clone(), true)?);
    let u = spec.preset(preset)?.members.clone();
    let hu = image_predicate(&h, u.clone());
    let directions = direction_transfer_check(&h, depth);
    let ends = closure_domination_transfer_check(&h, &u, &hu, k, depth);
    let cover = spec.cover(preset)?;
    let h_cover = normally_spanned_transfer_check(&cover, &h);
    let cap = g.default_cap(depth);
    let before = cover.pieces(cap);
    let after = h_cover.pieces(cap);
    let piece_rows: Vec<DispersalTransfer> = before
        .iter()
        .zip(&after)
        .take(pieces)
        .map(|(b, a)| DispersalTransfer {
            piece: b.index,
            before: piece_evidence(g.as_ref(), &b.members, k, depth),
            after: piece_evidence(h.as_ref(), &a.members, k, depth),
        })
        .collect();
    let shape_g = shape(g.as_ref(), &u, k.min(SHAPE_K), depth);
    let shape_h = shape(h.as_ref(), &hu, k.min(SHAPE_K), depth);
    let mut discrepancies = Vec::new();
    if !directions.ok() {
        discrepancies.push("direction map inconsistent".to_string());
    }
    for e in ends.iter().filter(|e| !e.agrees()) {
        discrepancies.push(format!("end {}: {:?}", e.end.0, e));
    }
    for p in piece_rows.iter().filter(|p| p.before != p.after) {
        discrepancies.push(format!("piece {}: {:?} became {:?}", p.piece, p.before, p.after));
    }
    if shape_g != shape_h {
        discrepancies.push(format!("star-comb outcome {shape_g:?} became {shape_h:?}"));
    }
    Ok(TransferReport {
        partition: sp.name.into(),
        family: sp.family.into(),
        preset: preset.into(),
        directions,
        ends,
        pieces: piece_rows,
        shape_g,
        shape_h,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_direction_map_is_trivial() {
        let parts = standard_partitions().unwrap();
        let h = contract(family("ray").unwrap().oracle, parts[0].partition.clone(), true).unwrap();
        assert!(direction_transfer_check(&h, 8).ok());
    }

    #[test]
    fn fan_merge_keeps_domination() {
        let parts = standard_partitions().unwrap();
        let r = transfer_report(&parts[1], "all", 16, 12, 6).unwrap();
        assert!(r.ok(), "{:?}", r.discrepancies);
        assert!(r.ends.iter().all(|e| e.dominated_g && e.dominated_h));
    }
}
