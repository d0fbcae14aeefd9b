//! Dense semidefinite programming layer.
//!
//! [`solver`] implements a small interior-point method for programs
//! with a positive-semidefinite matrix variable and a handful of free
//! scalars; the dimension-analysis code reduces each interpolation
//! feasibility question to this form.

pub mod solver;

pub use solver::{solve_sdp, SdpProblem, SdpSolution};
