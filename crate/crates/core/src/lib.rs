//! Executable duality theorems for undominated combs on lazily represented
//! countable graphs.

pub mod decomp;
pub mod error;
pub mod export;
pub mod certificate;
pub mod families;
pub mod graph;
pub mod minor;
pub mod normal;
pub mod ops;
pub mod rayless;
pub mod starcomb;
pub mod suite;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{EndId, GraphOracle, Oracle, Path, Vertex};
