//! Multiplicity reduction: from a block structure to one copy of each
//! irreducible sub-block.
//!
//! Once the algebra of an observable set is in the form
//! `⊕_i 1_{m_i} ⊗ E^i`, only one copy per family carries information:
//! this module slices the conjugated observables, verifies that the
//! `m_i` copies really agree, and keeps the averaged sub-blocks. The
//! reduced set lives on a space of dimension `Σ_i D_i` and generates a
//! multiplicity-free algebra with the same block dimensions.

use super::block::BlockStructure;
use crate::error::{Error, Result};
use crate::mat::cmatrix::{herm_part, identity, kron, unvec_mat, ComplexMatrix};
use crate::mat::herm::ObservableSet;
use crate::mat::linalg::{kernel_basis, polar_factor};
use crate::tol::{EPS_BLOCK, EPS_RANK};

/// An observable set sliced into one representative sub-block per
/// family of its block structure.
#[derive(Debug, Clone)]
pub struct ReducedObservableSet {
    structure: BlockStructure,
    /// `reduced_ops[i][l]` is the `D_l x D_l` sub-block of canonical
    /// operator `i` in family `l`.
    reduced_ops: Vec<Vec<ComplexMatrix>>,
}

impl ReducedObservableSet {
    /// The block structure the reduction was taken against.
    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    /// Σ_i D_i — dimension of the multiplicity-free model space.
    pub fn reduced_dim(&self) -> usize {
        self.structure.reduced_dim()
    }

    /// Number of canonical operators (identity included).
    pub fn num_ops(&self) -> usize {
        self.reduced_ops.len()
    }

    /// The block dimensions `D_l` in canonical family order.
    pub fn block_dims(&self) -> Vec<usize> {
        self.structure.blocks().iter().map(|&(d, _)| d).collect()
    }

    /// Sub-blocks of canonical operator `i`, one per family.
    pub fn blocks_of(&self, op_idx: usize) -> &[ComplexMatrix] {
        &self.reduced_ops[op_idx]
    }

    /// `⊕_l E_i^l` on the reduced space.
    pub fn direct_sum_op(&self, op_idx: usize) -> ComplexMatrix {
        let rd = self.reduced_dim();
        let mut out = ComplexMatrix::zeros(rd, rd);
        let mut off = 0usize;
        for b in &self.reduced_ops[op_idx] {
            out.view_mut((off, off), (b.nrows(), b.nrows())).copy_from(b);
            off += b.nrows();
        }
        out
    }

    /// Rebuilds the ambient operator `U† (⊕_l 1_{m_l} ⊗ E_i^l) U`.
    pub fn reassemble(&self, op_idx: usize) -> ComplexMatrix {
        let d = self.structure.ambient_dim();
        let mut model = ComplexMatrix::zeros(d, d);
        let mut off = 0usize;
        for (l, &(dl, ml)) in self.structure.blocks().iter().enumerate() {
            let rep = kron(&identity(ml), &self.reduced_ops[op_idx][l]);
            model.view_mut((off, off), (dl * ml, dl * ml)).copy_from(&rep);
            off += dl * ml;
        }
        self.structure.unitary().adjoint() * model * self.structure.unitary()
    }
}

/// Slices each canonical observable along `structure`, verifying that
/// the repeated copies within each family agree within [`EPS_BLOCK`].
pub fn reduce_multiplicities(
    obs: &ObservableSet,
    structure: &BlockStructure,
) -> Result<ReducedObservableSet> {
    if obs.dim() != structure.ambient_dim() {
        return Err(Error::dims(
            format!("{}", structure.ambient_dim()),
            format!("{}", obs.dim()),
            "observables vs block structure",
        ));
    }
    let mut reduced_ops = Vec::with_capacity(obs.len());
    for op in obs.ops() {
        let t = structure.conjugated(op.mat());
        let residual = structure.pattern_residual(op.mat());
        if residual > EPS_BLOCK {
            return Err(Error::VerificationFailed {
                context: "repeated sub-blocks disagree or off-block mass present".into(),
                residual,
                tol: EPS_BLOCK,
            });
        }
        let mut per_family = Vec::with_capacity(structure.num_blocks());
        let mut off = 0usize;
        for &(dl, ml) in structure.blocks() {
            let mut avg = ComplexMatrix::zeros(dl, dl);
            for a in 0..ml {
                avg += t.view((off + a * dl, off + a * dl), (dl, dl)).clone_owned();
            }
            per_family.push(herm_part(&avg.unscale(ml as f64)));
            off += dl * ml;
        }
        reduced_ops.push(per_family);
    }
    Ok(ReducedObservableSet {
        structure: structure.clone(),
        reduced_ops,
    })
}

/// Unitary intertwiner between two families of operators on the same
/// space, if one exists: returns `W` with `W a_i W† = b_i` for all `i`.
///
/// The joint intertwiner space is computed as the kernel of the stacked
/// Sylvester operators `W a_i - b_i W = 0`; when the families generate
/// irreducible algebras the space is at most one-dimensional and the
/// unitary representative is recovered as a polar factor. Useful as a
/// test oracle for "equal up to a change of basis".
pub fn unitary_intertwiner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let Some(first) = a.first() else {
        return Err(Error::InvalidObservables("empty intertwiner family".into()));
    };
    let d = first.nrows();
    if a.len() != b.len() || a.iter().chain(b.iter()).any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::dims(
            format!("{d}x{d} matched lists"),
            "mismatched intertwiner families",
            "unitary intertwiner",
        ));
    }
    // vec(W a_i) = (a_i^T ⊗ 1) vec(W), vec(b_i W) = (1 ⊗ b_i) vec(W).
    let mut stacked = ComplexMatrix::zeros(d * d * a.len(), d * d);
    for (i, (ai, bi)) in a.iter().zip(b.iter()).enumerate() {
        let block = kron(&ai.transpose(), &identity(d)) - kron(&identity(d), bi);
        stacked.view_mut((i * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let ker = kernel_basis(&stacked, EPS_RANK);
    if ker.ncols() == 0 {
        return Err(Error::Inconsistent(
            "no intertwiner: families are not unitarily equivalent".into(),
        ));
    }
    // Any kernel vector works when the space is one-dimensional; for
    // safety take the first and unitarize.
    let w = unvec_mat(&ker.column(0).clone_owned(), d, d);
    let u = polar_factor(&w)?;
    // Certify before returning.
    let worst = a
        .iter()
        .zip(b.iter())
        .map(|(ai, bi)| (&u * ai * u.adjoint() - bi).norm())
        .fold(0.0f64, f64::max);
    let scale = a.iter().map(|m| m.norm()).fold(1.0f64, f64::max);
    if worst > 1e-7 * scale {
        return Err(Error::VerificationFailed {
            context: "intertwiner certification".into(),
            residual: worst,
            tol: 1e-7 * scale,
        });
    }
    Ok(u)
}
