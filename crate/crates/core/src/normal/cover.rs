//! Dispersed covers and the well-order they induce on `U`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{Vertex, VertexPredicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PieceKind {
    Finite,
    LevelLike,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverPiece {
    pub index: usize,
    pub kind: PieceKind,
    /// Members in the piece's own enumeration order.
    pub members: Vec<Vertex>,
}

/// Produces every raw piece whose least member lies below `cap`, in piece order.
/// Pieces are finite lists; repeats across pieces are allowed here.
pub type PieceSource = Arc<dyn Fn(usize) -> Vec<(PieceKind, Vec<Vertex>)> + Send + Sync>;

/// `U` presented as an indexed union `U₀ ∪ U₁ ∪ …` of dispersed pieces.
#[derive(Clone)]
pub struct DispersedCover {
    name: String,
    source: PieceSource,
}

impl fmt::Debug for DispersedCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DispersedCover").field("name", &self.name).finish()
    }
}

impl DispersedCover {
    pub fn new(name: impl Into<String>, source: PieceSource) -> Self {
        DispersedCover { name: name.into(), source }
    }

    /// Every vertex of `u` is its own piece, in index order.
    pub fn singletons(u: VertexPredicate) -> Self {
        DispersedCover::new(
            "singletons",
            Arc::new(move |cap| {
                (0..cap)
                    .map(Vertex)
                    .filter(|&v| u(v))
                    .map(|v| (PieceKind::Finite, vec![v]))
                    .collect()
            }),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Pieces meeting the window below `cap`, made pairwise disjoint by dropping
    /// repeats from later pieces. Members at or above `cap` are kept so that a
    /// piece is never cut in half; empty pieces are dropped.
    pub fn pieces(&self, cap: usize) -> Vec<CoverPiece> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (index, (kind, members)) in (self.source)(cap).into_iter().enumerate() {
            let members: Vec<Vertex> = members.into_iter().filter(|v| seen.insert(*v)).collect();
            if !members.is_empty() {
                out.push(CoverPiece { index, kind, members });
            }
        }
        out
    }

    /// The cover with every vertex replaced by `f(v)`, disjointified again.
    pub fn mapped(&self, name: impl Into<String>, f: Arc<dyn Fn(Vertex) -> Vertex + Send + Sync>) -> Self {
        let source = self.source.clone();
        DispersedCover::new(
            name,
            Arc::new(move |cap| {
                source(cap)
                    .into_iter()
                    .map(|(kind, members)| {
                        let mut mapped: Vec<Vertex> = Vec::new();
                        for v in members {
                            let w = f(v);
                            if !mapped.contains(&w) {
                                mapped.push(w);
                            }
                        }
                        (kind, mapped)
                    })
                    .collect()
            }),
        )
    }

    pub fn well_order(&self, cap: usize) -> WellOrderedU {
        WellOrderedU::new(self.pieces(cap))
    }
}

/// `u ⪯ u'` iff `u` lies in an earlier piece, or in the same piece and earlier
/// in that piece's enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellOrderedU {
    pub pieces: Vec<CoverPiece>,
}

impl WellOrderedU {
    pub fn new(pieces: Vec<CoverPiece>) -> Self {
        WellOrderedU { pieces }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.pieces.iter().flat_map(|p| p.members.iter().copied())
    }

    pub fn prefix(&self, n: usize) -> Vec<Vertex> {
        self.iter().take(n).collect()
    }

    /// Position of the piece containing `v`.
    pub fn piece_of(&self, v: Vertex) -> Option<usize> {
        self.pieces.iter().position(|p| p.members.contains(&v))
    }

    pub fn precedes(&self, a: Vertex, b: Vertex) -> bool {
        let pos = |x: Vertex| self.iter().position(|y| y == x);
        match (pos(a), pos(b)) {
            (Some(i), Some(j)) => i < j,
            _ => false,
        }
    }

    /// The initial segment strictly below `v`, together with the number of
    /// pieces it touches.
    pub fn initial_segment(&self, v: Vertex) -> (Vec<Vertex>, usize) {
        let seg: Vec<Vertex> = self.iter().take_while(|&x| x != v).collect();
        let touched = seg
            .last()
            .and_then(|&x| self.piece_of(x))
            .map_or(0, |i| i + 1);
        (seg, touched)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeats_are_removed_from_later_pieces() {
        let cover = DispersedCover::new(
            "overlap",
            Arc::new(|_| {
                vec![
                    (PieceKind::Finite, vec![Vertex(0), Vertex(1)]),
                    (PieceKind::Finite, vec![Vertex(0), Vertex(2)]),
                    (PieceKind::Finite, vec![Vertex(1)]),
                ]
            }),
        );
        let pieces = cover.pieces(10);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[1].members, vec![Vertex(2)]);
        let order = cover.well_order(10);
        assert!(order.precedes(Vertex(1), Vertex(2)));
        assert_eq!(order.initial_segment(Vertex(2)), (vec![Vertex(0), Vertex(1)], 1));
    }
}
