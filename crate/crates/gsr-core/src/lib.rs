//! Measurement design and sparse recovery over graphs where a set of nodes
//! can be measured together only if it induces a connected subgraph.
//!
//! The crate provides:
//! - graph representation, generators and structural queries ([`graph`]),
//! - explicit 0-1 measurement-matrix constructions for lines, rings,
//!   chord-augmented rings, grids and trees ([`construct`]),
//! - partition-based measurement design and validation ([`partition`]),
//! - a leaf-stripping construction algorithm for arbitrary connected
//!   graphs ([`reduce`]),
//! - exact feasibility/identifiability oracles ([`verify`]),
//! - group-wise l1 recovery with hub-sum subtraction and hub-error
//!   correction ([`recover`]).
//!
//! Nodes are 0-indexed everywhere. All randomized operations take explicit
//! 64-bit seeds and are reproducible across runs.

pub mod construct;
pub mod error;
pub mod graph;
pub mod partition;
pub mod plan;
pub mod recover;
pub mod reduce;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Graph, NodeSet};
pub use plan::{DenseMatrix, Group, MeasurementPlan, Method, RowMeta};
