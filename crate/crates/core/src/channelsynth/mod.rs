//! Channel synthesis and verification.
//!
//! [`scheme`] assembles explicit compression/decompression channel
//! pairs from a block structure (and, for the minimal dimension, from
//! the interpolation maps of eliminated blocks); [`twoproj`] puts a
//! pair of projections into its canonical two-projection normal form.

pub mod scheme;
pub mod twoproj;

pub use scheme::{
    build_max_block_scheme, build_optimal_scheme, verify_scheme, CompressionScheme,
    SchemeDiagnostics,
};
pub use twoproj::{two_projection_form, TwoProjectionForm};
