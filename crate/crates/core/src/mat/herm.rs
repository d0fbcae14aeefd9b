//! Hermitian operators and finite observable sets.

use super::cmatrix::{
    fro_norm, herm_part, herm_residual, hs_inner, identity, opnorm, re, ComplexMatrix,
};
use super::linalg::eigh;
use crate::error::{Error, Result};
use crate::tol::{EPS_HERM, EPS_PROJ, EPS_RANK};

/// A validated Hermitian operator.
///
/// Construction checks `||H - H^dagger|| <= tol` and then stores the
/// exactly symmetrized matrix `(H + H^dagger) / 2`, so downstream code
/// can rely on exact Hermiticity bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within [`EPS_HERM`] and wraps the operator.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tol(mat, EPS_HERM)
    }

    /// Validates Hermiticity within `tol` and wraps the operator.
    pub fn with_tol(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::dims(
                format!("{0}x{0}", mat.nrows()),
                format!("{}x{}", mat.nrows(), mat.ncols()),
                "hermitian operator must be square",
            ));
        }
        let residual = herm_residual(&mat);
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(Self {
            mat: herm_part(&mat),
        })
    }

    /// The identity operator on a `dim`-dimensional space.
    pub fn identity(dim: usize) -> Self {
        Self {
            mat: identity(dim),
        }
    }

    /// Hermitian operator from a real diagonal.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        Self { mat: m }
    }

    /// Side of the matrix.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Borrow the underlying matrix.
    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Consume into the underlying matrix.
    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.mat).0
    }

    /// Operator norm.
    pub fn opnorm(&self) -> f64 {
        opnorm(&self.mat)
    }

    /// Checks the projection property `P^2 = P` within `tol`.
    pub fn validate_projection(&self, tol: f64) -> Result<()> {
        let residual = fro_norm(&(&self.mat * &self.mat - &self.mat));
        if residual > tol {
            return Err(Error::NotProjection {
                residual,
                tol: if tol > 0.0 { tol } else { EPS_PROJ },
            });
        }
        Ok(())
    }
}

/// A finite set of Hermitian observables on a common space, held in
/// canonical form: the identity first, followed by a linearly
/// independent selection (over the reals) of the given operators, in
/// their original order. The real span of the canonical list equals
/// `span(input + identity)`, so any statement linear in the observables
/// can be checked on the canonical list alone.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    dim: usize,
    ops: Vec<HermitianOperator>,
    identity_added: bool,
}

impl ObservableSet {
    /// Builds the canonical set from arbitrary Hermitian operators.
    ///
    /// Operators linearly dependent (over the reals) on earlier ones
    /// are dropped; the identity is prepended when not already in the
    /// real span. Fails when the input is empty or dimensions disagree.
    pub fn new(ops: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidObservables("empty operator list".into()));
        };
        let dim = first.dim();
        for op in &ops {
            if op.dim() != dim {
                return Err(Error::dims(
                    format!("{dim}x{dim}"),
                    format!("{0}x{0}", op.dim()),
                    "all observables must share one dimension",
                ));
            }
        }

        // Greedy independence filter over the real vector space of
        // Hermitian matrices, identity first. An orthonormalized shadow
        // basis decides membership; the kept list stores the original
        // (non-orthogonalized) operators.
        let mut shadow: Vec<ComplexMatrix> = Vec::new();
        let keep = |m: &ComplexMatrix, shadow: &mut Vec<ComplexMatrix>| -> bool {
            let orig = fro_norm(m);
            if orig == 0.0 {
                return false;
            }
            let mut v = m.clone();
            for _ in 0..2 {
                for u in shadow.iter() {
                    // Real span: coefficients are real parts of the HS
                    // inner product (all matrices here are Hermitian,
                    // so the inner products are already real).
                    let c = hs_inner(u, &v).re;
                    v -= u.scale(c);
                }
            }
            let n = fro_norm(&v);
            if n > EPS_RANK * orig {
                shadow.push(v.unscale(n));
                true
            } else {
                false
            }
        };

        let id = identity(dim);
        keep(&id, &mut shadow);
        let mut canonical = vec![HermitianOperator::identity(dim)];
        let mut identity_added = true;
        for op in &ops {
            if keep(op.mat(), &mut shadow) {
                canonical.push(op.clone());
            }
        }
        // Detect whether the identity was already in the span of the
        // inputs: redo the filter without seeding the identity and
        // compare ranks.
        let mut shadow2: Vec<ComplexMatrix> = Vec::new();
        let mut rank2 = 0usize;
        for op in &ops {
            if keep(op.mat(), &mut shadow2) {
                rank2 += 1;
            }
        }
        if rank2 == canonical.len() {
            identity_added = false;
        }

        Ok(Self {
            dim,
            ops: canonical,
            identity_added,
        })
    }

    /// Ambient dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical operator list; index 0 is the identity.
    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    /// Number of canonical operators (counting the identity).
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    /// Never true: canonical sets always hold at least the identity.
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Whether the identity had to be prepended because it was not in
    /// the real span of the inputs.
    pub fn identity_added(&self) -> bool {
        self.identity_added
    }
}
