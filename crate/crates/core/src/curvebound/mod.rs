//! Algebro-geometric lower bounds from determinantal curves.
//!
//! A pair of Hermitian observables `E₁`, `E₂` of side `D` defines the
//! plane curve `p(x, z) = det(x·𝟙 − E₁ − z·E₂)`, monic of degree `D` in
//! `x` and hyperbolic: every real slice has only real roots. The degrees
//! of the real irreducible factors of `p` are invariants of the pair,
//! and the smallest of them is a lower bound on the compression
//! dimension of any observable set whose real span contains the pair.
//!
//! The pipeline has three stages: [`extract_curve`] recovers the
//! coefficient table of `p` by determinant interpolation, monodromy
//! tracking in [`factor_by_monodromy`] partitions the sheets of the
//! squarefree part into irreducible factors without ever computing the
//! factors themselves, and [`geometric_lower_bound`] searches slices of
//! an observable set for the strongest certificate.

pub mod bound;
pub mod curve;
pub mod monodromy;
pub mod poly;

pub use bound::{
    detexpansion_residual, gen_irreducible_example, geometric_lower_bound, GeometricBound,
    PairStrategy,
};
pub use curve::{extract_curve, DeterminantalCurve};
pub use monodromy::{factor_by_monodromy, FactorizationResult, PathDiagnostics, TrackSettings};
