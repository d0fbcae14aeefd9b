//! Named numerical tolerances.
//!
//! Every threshold used by the crate is a named constant collected here,
//! so the provenance of a "magic number" in a residual check is always
//! one jump away. Operations that accept a caller-supplied tolerance use
//! these values as defaults.
//!
//! Unless stated otherwise, matrix residuals are measured in the
//! operator norm and are *absolute* for operators normalized to O(1)
//! scale; thresholds applied to eigenvalue clustering and rank decisions
//! are *relative* to the scale of the matrix involved.

/// Hermiticity residual `||H - H^dagger||` accepted at construction.
pub const EPS_HERM: f64 = 1e-9;

/// Trace-preservation residual `||sum_i K_i^dagger K_i - I||` for channels.
pub const EPS_TP: f64 = 1e-9;

/// Positive-semidefiniteness slack: eigenvalues above `-EPS_PSD` count
/// as nonnegative.
pub const EPS_PSD: f64 = 1e-9;

/// Generic numerical agreement between two matrices produced by
/// different computational routes (e.g. Kraus action vs. Choi action).
pub const EPS_NUM: f64 = 1e-8;

/// Relative eigenvalue clustering radius: eigenvalues within
/// `EPS_CLUSTER * scale` of each other belong to one cluster.
pub const EPS_CLUSTER: f64 = 1e-7;

/// Residual accepted for "this operator is block diagonal in the
/// computed basis" checks, including agreement of repeated sub-blocks.
pub const EPS_BLOCK: f64 = 1e-8;

/// Relative threshold for rank and linear-independence decisions
/// (singular values below `EPS_RANK * s_max` count as zero).
pub const EPS_RANK: f64 = 1e-9;

/// Feasibility threshold for the interpolation SDP: an instance is
/// feasible when a certificate exists whose smallest eigenvalue is
/// above `-EPS_SDP` after constraint polishing.
pub const EPS_SDP: f64 = 1e-6;

/// Width of the marginal band around the SDP decision boundary: an
/// objective inside the band triggers one automatic re-solve at
/// ten-times-tighter solver tolerances before classification.
pub const EPS_MARGIN: f64 = 1e-4;

/// Residual accepted when replaying an interpolation certificate
/// against its defining constraints.
pub const EPS_INTERP: f64 = 1e-7;

/// Statistics-preservation residual `|tr(rho E) - tr(D(C(rho)) E)|`
/// accepted by scheme verification.
pub const EPS_STAT: f64 = 1e-8;

/// Residual accepted when validating that a matrix is an orthogonal
/// projection (`||P^2 - P||`).
pub const EPS_PROJ: f64 = 1e-8;

/// Band around 0 and 1 inside which a principal angle parameter is
/// considered degenerate and its vectors are assigned to corner
/// subspaces rather than to a generic two-dimensional pair.
pub const EPS_ANGLE: f64 = 1e-7;

/// Tolerance for root identification: matching tracked roots, deciding
/// realness of a root, and comparing root multisets.
pub const EPS_ROOT: f64 = 1e-8;

/// Relative threshold used when clustering eigenvalues of a Hermitian
/// pencil sample to detect repeated curve factors (the numerical
/// replacement for an exact squarefree decomposition).
pub const EPS_GCD: f64 = 1e-8;

/// Relative threshold on the invariant-subspace diagnostic: the
/// compound-commutator Gram matrix counts as singular when its smallest
/// eigenvalue is below `EPS_INV` times its largest.
pub const EPS_INV: f64 = 1e-8;

/// Default number of retries for randomized algorithms that can draw an
/// unlucky (non-generic) sample.
pub const MAX_GENERIC_RETRIES: usize = 8;
