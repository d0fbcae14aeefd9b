//! Compression-dimension computation.
//!
//! The minimal compression dimension of an observable set is decided on
//! its block decomposition: blocks that can be rebuilt from the others
//! by a completely positive unital interpolation are redundant, and the
//! dimension is the largest block that survives the greedy elimination
//! pass. [`interp`] performs the per-block feasibility test and
//! produces the map or the non-redundancy certificate; [`report`] runs
//! the elimination and assembles the final answer.

pub mod interp;
pub mod report;

pub use interp::{
    apply_choi, interpolation_feasibility, verify_interpolation, InterpolationOutcome,
};
pub use report::{compression_dimension, BlockOutcome, DimensionAnalysis, DimensionReport};
