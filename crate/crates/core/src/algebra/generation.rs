//! Does a family of Hermitian operators generate the full matrix
//! algebra?
//!
//! Two independent diagnostics are run and cross-checked:
//!
//! * the structural one — [`block_diagonalize`] yields a single block of
//!   dimension `D` with multiplicity 1;
//! * for pairs `(A, B)`, a compound-matrix determinant test: a common
//!   invariant subspace of dimension `k` forces every commutator
//!   `[C_k(A)^i, C_k(B)^j]` of powers of the k-th compound matrices to
//!   share a kernel vector (the wedge of the subspace), so the Gram
//!   matrix `S_k = Σ_{i,j} [·]† [·]` becomes singular. By Burnside's
//!   theorem a proper subalgebra leaves some subspace of dimension
//!   `k ∈ {1, …, D−1}` invariant, hence "no `S_k` singular" certifies
//!   full generation. The implication is one-directional: `S_k` can be
//!   singular without any invariant subspace when an operator crushes a
//!   `k`-plane to lower dimension and so annihilates its wedge.
//!
//! Singularity is judged scale-free: operators are normalized to unit
//! operator norm first, and `S_k` counts as singular when its smallest
//! eigenvalue is below [`EPS_INV`] relative to its largest.

use super::block::block_diagonalize;
use crate::error::{Error, Result};
use crate::mat::cmatrix::ComplexMatrix;
use crate::mat::herm::{HermitianOperator, ObservableSet};
use crate::mat::linalg::eigh;
use crate::tol::{EPS_INV, MAX_GENERIC_RETRIES};

/// Outcome of the generation test.
#[derive(Debug, Clone)]
pub struct GenerationReport {
    /// Whether the family generates the full matrix algebra.
    pub full: bool,
    /// Block structure `(D_i, m_i)` found for the generated algebra.
    pub blocks: Vec<(usize, usize)>,
    /// For pairs: per `k ∈ [D−1]`, the relative smallest eigenvalue
    /// `λ_min / λ_max` of the compound commutator Gram matrix `S_k`
    /// (index `k − 1`). `None` for families of three or more.
    pub compound_ratios: Option<Vec<f64>>,
    /// The `k` whose Gram matrix is singular. A common invariant
    /// subspace of dimension `k` forces `k` into this list, but not
    /// conversely: a singular `S_k` can also come from rank collapse
    /// (e.g. a singular operator crushing a `k`-plane onto a line kills
    /// the wedge without leaving any subspace invariant). Empty for
    /// non-pairs.
    pub vanishing: Vec<usize>,
    /// Consistency of the two diagnostics (vacuously true for
    /// non-pairs). An empty `vanishing` list certifies full generation
    /// outright, so the only contradiction possible is "nothing
    /// vanishes, yet the block structure is not full"; `agree` is false
    /// exactly then. A vanishing order on a full algebra is a false
    /// alarm of the necessary condition, not a contradiction.
    pub agree: bool,
}

/// Lexicographically ordered k-element subsets of `{0, …, d−1}`.
fn k_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k == 0 || k > d {
        return if k == 0 { vec![vec![]] } else { out };
    }
    loop {
        out.push(cur.clone());
        // Advance to the next subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + d - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// k-th compound matrix: entry `(α, β)` is the minor `det(m[α | β])`
/// over lexicographically ordered k-subsets of rows and columns.
pub fn compound_matrix(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "compound matrix: square input required");
    assert!(k >= 1 && k <= d, "compound matrix: k out of range");
    let subsets = k_subsets(d, k);
    let n = subsets.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, alpha) in subsets.iter().enumerate() {
        for (c, beta) in subsets.iter().enumerate() {
            let mut minor = ComplexMatrix::zeros(k, k);
            for (i, &a) in alpha.iter().enumerate() {
                for (j, &b) in beta.iter().enumerate() {
                    minor[(i, j)] = m[(a, b)];
                }
            }
            out[(r, c)] = minor.lu().determinant();
        }
    }
    out
}

/// Gram matrix of all commutators `[A^i, B^j]`, `i, j ∈ [max_pow]`.
fn commutator_gram(a: &ComplexMatrix, b: &ComplexMatrix, max_pow: usize) -> ComplexMatrix {
    let n = a.nrows();
    let mut s = ComplexMatrix::zeros(n, n);
    let mut a_pow = a.clone();
    for _ in 1..=max_pow {
        let mut b_pow = b.clone();
        for _ in 1..=max_pow {
            let comm = &a_pow * &b_pow - &b_pow * &a_pow;
            s += comm.adjoint() * &comm;
            b_pow = &b_pow * b;
        }
        a_pow = &a_pow * a;
    }
    s
}

/// Relative smallest eigenvalue of a PSD Gram matrix, clamped to zero
/// from below; 0.0 when the matrix itself is numerically zero.
fn relative_min_eig(s: &ComplexMatrix) -> f64 {
    let (vals, _) = eigh(s);
    let max = vals.last().copied().unwrap_or(0.0);
    if max <= f64::EPSILON {
        return 0.0;
    }
    (vals[0] / max).max(0.0)
}

/// Tests whether `ops` generate the full matrix algebra, cross-checking
/// the block structure against the compound-matrix singularity test for
/// pairs. Randomized steps draw from `seed`.
pub fn algebra_generation_test(ops: &[HermitianOperator], seed: u64) -> Result<GenerationReport> {
    if ops.len() < 2 {
        return Err(Error::InvalidObservables(
            "generation test requires at least two operators".into(),
        ));
    }
    let d = ops[0].dim();
    let obs = ObservableSet::new(ops.to_vec())?;
    let bs = block_diagonalize(&obs, seed, MAX_GENERIC_RETRIES)?;
    let full = bs.blocks() == [(d, 1)];

    let (compound_ratios, vanishing) = if ops.len() == 2 {
        let normalize = |h: &HermitianOperator| -> ComplexMatrix {
            let n = h.opnorm();
            if n > 0.0 {
                h.mat().unscale(n)
            } else {
                h.mat().clone()
            }
        };
        let a = normalize(&ops[0]);
        let b = normalize(&ops[1]);
        let mut ratios = Vec::with_capacity(d.saturating_sub(1));
        let mut vanish = Vec::new();
        for k in 1..d {
            let ca = compound_matrix(&a, k);
            let cb = compound_matrix(&b, k);
            let gram = commutator_gram(&ca, &cb, d - 1);
            let ratio = relative_min_eig(&gram);
            if ratio <= EPS_INV {
                vanish.push(k);
            }
            ratios.push(ratio);
        }
        (Some(ratios), vanish)
    } else {
        (None, Vec::new())
    };

    let agree = if ops.len() == 2 {
        full || !vanishing.is_empty()
    } else {
        true
    };

    Ok(GenerationReport {
        full,
        blocks: bs.blocks().to_vec(),
        compound_ratios,
        vanishing,
        agree,
    })
}

/// Convenience predicate: does one matrix's compound commute structure
/// certify a k-dimensional common invariant subspace with `other`?
/// Returns the relative smallest eigenvalue used for the decision.
pub fn invariant_subspace_ratio(a: &ComplexMatrix, b: &ComplexMatrix, k: usize) -> f64 {
    let d = a.nrows();
    let ca = compound_matrix(a, k);
    let cb = compound_matrix(b, k);
    relative_min_eig(&commutator_gram(&ca, &cb, d - 1))
}
