//! Exact analysis of maximum and perfect matchings in two self-similar
//! scale-free graph families with identical degree sequences, and in the
//! extended Sierpiński graphs.

pub mod analytic;
pub mod error;
pub mod format;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod pfaffian;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use generators::{Generator, OrientedGraph};
pub use graph::{EdgeId, Family, FamilyTag, Graph, HubRole, VertexMeta};
pub use matching::{maximum_matching, Matching};
