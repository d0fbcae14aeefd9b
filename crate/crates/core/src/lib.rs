//! Minimal-dimension compression of quantum observable sets.
//!
//! Given a finite set of Hermitian observables on a `D`-dimensional
//! system, this crate computes the smallest dimension `d` such that a
//! quantum channel into a `d`-dimensional system with a classical side
//! register can be paired with a recovery channel reproducing every
//! expectation value exactly, and synthesizes explicit
//! compression/decompression channel pairs achieving it.
//!
//! The toolkit is organized bottom-up:
//!
//! - [`mat`]: dense complex matrices, Hermitian operators, CPTP
//!   channels in Kraus and Choi form, transfer matrices, and seeded
//!   random generators;
//! - [`algebra`]: the *-algebra generated by an observable set, its
//!   block (Wedderburn) structure, and multiplicity reduction;
//! - [`sdp`]: a dense interior-point solver for the semidefinite
//!   feasibility problems underlying redundancy tests;
//! - [`dimension`]: the compression-dimension computation and its
//!   certificates;
//! - [`channelsynth`]: construction and verification of explicit
//!   compression schemes, plus the canonical form of two projections;
//! - [`curvebound`]: algebro-geometric lower bounds from the
//!   irreducibility of associated plane curves;
//! - [`fixtures`]: reproducible example families used across tests.

pub mod algebra;
pub mod channelsynth;
pub mod curvebound;
pub mod dimension;
pub mod error;
pub mod fixtures;
pub mod mat;
pub mod sdp;
pub mod tol;

pub use error::{Error, Result};
pub use mat::{ComplexMatrix, HermitianOperator, ObservableSet, QuantumChannel};
