//! Deterministic example instances shared by tests, benchmarks, and the
//! command-line tools.
//!
//! Three kinds of fixtures live here:
//!
//! * printed matrices with known exact behavior (the cubic
//!   determinantal pair, the all-ones/antisymmetric irreducible pair);
//! * planted-redundancy instances over algebras like `C^3 ⊕ M_2`, built
//!   around a measure-and-prepare interpolation map so the expected
//!   compression dimension, block pattern, and classical register size
//!   are known by construction;
//! * seeded random generators (projection pairs, block-structured sets)
//!   for property testing.

use crate::error::Result;
use crate::mat::cmatrix::{
    direct_sum, embed_block, herm_part, identity, re, trace, ComplexMatrix, IM,
};
use crate::mat::herm::{HermitianOperator, ObservableSet};
use crate::mat::random::{random_hermitian, random_projection, random_unitary, SeedSplitter};

/// The cubic determinantal pair: `A = diag(−1, −1/2, 1)` together with
/// the tridiagonal `B` with off-diagonal entries −1/2 and −√3/2. The
/// pair generates all of `M_3` although `det[x1 + yA + zB]` splits over
/// the reals into factors of degree 1 and 2.
pub fn degree3_pair() -> (HermitianOperator, HermitianOperator) {
    let a = HermitianOperator::from_real_diag(&[-1.0, -0.5, 1.0]);
    let s3 = 3.0f64.sqrt();
    let mut bm = ComplexMatrix::zeros(3, 3);
    bm[(0, 1)] = re(-0.5);
    bm[(1, 0)] = re(-0.5);
    bm[(1, 2)] = re(-s3 / 2.0);
    bm[(2, 1)] = re(-s3 / 2.0);
    let b = HermitianOperator::new(bm).expect("printed matrix is Hermitian");
    (a, b)
}

/// The irreducible pair in dimension `d`: `A` has entries 1/2 off the
/// diagonal (zero on it); `B` has `i/2` above the diagonal and `−i/2`
/// below. `det[x1 + A + zB]` is irreducible for every `d ≥ 1`, so the
/// geometric lower bound equals `d` and the pair is incompressible.
pub fn irreducible_pair(d: usize) -> (HermitianOperator, HermitianOperator) {
    let mut am = ComplexMatrix::zeros(d, d);
    let mut bm = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            if k < l {
                am[(k, l)] = re(0.5);
                bm[(k, l)] = IM * 0.5;
            } else if k > l {
                am[(k, l)] = re(0.5);
                bm[(k, l)] = -IM * 0.5;
            }
        }
    }
    (
        HermitianOperator::new(am).expect("symmetric by construction"),
        HermitianOperator::new(bm).expect("Hermitian by construction"),
    )
}

/// Two independent random projections of the given ranks on a common
/// `dim`-dimensional space.
pub fn two_projections(
    dim: usize,
    rank_p: usize,
    rank_q: usize,
    seed: u64,
) -> Result<(HermitianOperator, HermitianOperator)> {
    let seeds = SeedSplitter::new(seed);
    let p = random_projection(dim, rank_p, &mut seeds.stream("two-projections-p"));
    let q = random_projection(dim, rank_q, &mut seeds.stream("two-projections-q"));
    Ok((HermitianOperator::new(p)?, HermitianOperator::new(q)?))
}

/// A measure-and-prepare map `Z ↦ (1/c) Σ_i tr(A_i Z) B_i`.
///
/// With effects `A_i ≥ 0` and outputs `B_i ≥ 0` the map is completely
/// positive; the fixtures below choose `Σ_i B_i = 1` and `tr A_i = c`
/// so that it is also unital on the relevant inputs.
#[derive(Debug, Clone)]
pub struct MeasurePrepareMap {
    effects: Vec<ComplexMatrix>,
    outputs: Vec<ComplexMatrix>,
    inv_scale: f64,
}

impl MeasurePrepareMap {
    /// Builds the map from matched effect/output lists and the trace
    /// constant `c = tr A_i`.
    pub fn new(effects: Vec<ComplexMatrix>, outputs: Vec<ComplexMatrix>, c: f64) -> Self {
        assert_eq!(effects.len(), outputs.len());
        assert!(!effects.is_empty());
        Self {
            effects,
            outputs,
            inv_scale: 1.0 / c,
        }
    }

    /// Input dimension.
    pub fn dim_in(&self) -> usize {
        self.effects[0].nrows()
    }

    /// Output dimension.
    pub fn dim_out(&self) -> usize {
        self.outputs[0].nrows()
    }

    /// Applies the map to `z`.
    pub fn apply(&self, z: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out(), self.dim_out());
        for (a, b) in self.effects.iter().zip(&self.outputs) {
            out += b * (trace(&(a * z)) * re(self.inv_scale));
        }
        herm_part(&out)
    }
}

/// A constructed observable set whose compression behavior is known in
/// advance.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    /// The observables, already canonicalized.
    pub observables: ObservableSet,
    /// `(offset, dim)` of each direct-sum block in the coordinates the
    /// instance was written in (the operators are exactly block
    /// diagonal there).
    pub original_blocks: Vec<(usize, usize)>,
    /// Index into `original_blocks` of the block whose values can be
    /// interpolated from the remaining blocks, when one exists.
    pub redundant_block: Option<usize>,
    /// Expected `(D_i, m_i)` pattern, sorted by descending dimension.
    pub expected_blocks: Vec<(usize, usize)>,
    /// Expected compression dimension.
    pub expected_dimension: usize,
    /// Expected classical register size (number of surviving blocks).
    pub expected_classical_states: usize,
    /// Closed-form interpolation map rebuilding the redundant block
    /// from the direct sum of the kept blocks (in original order);
    /// `None` when no block is redundant.
    pub oracle: Option<MeasurePrepareMap>,
}

impl PlantedInstance {
    /// Slices an ambient operator (in original coordinates) into its
    /// per-block values.
    pub fn original_block_values(&self, op: &ComplexMatrix) -> Vec<ComplexMatrix> {
        self.original_blocks
            .iter()
            .map(|&(off, d)| op.view((off, off), (d, d)).into_owned())
            .collect()
    }

    /// Direct sum of the kept (non-redundant) block values of `op`, in
    /// original block order — the oracle's input for this operator.
    pub fn kept_direct_sum(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let vals = self.original_block_values(op);
        let kept: Vec<ComplexMatrix> = vals
            .into_iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != self.redundant_block)
            .map(|(_, v)| v)
            .collect();
        direct_sum(&kept)
    }
}

/// Fixed generic effect pair in `M_2` shared by the planted instances:
/// `X = 1/4 + 0.10 σx + 0.05 σz` and `Y = 1/4 + 0.08 σy − 0.06 σz`.
/// Both lie strictly between 0 and 1/2, they do not commute (so
/// `{X, Y, 1}` generates `M_2`), and `1 − X − Y > 0`.
fn planted_qubit_pair() -> (ComplexMatrix, ComplexMatrix) {
    let x = ComplexMatrix::from_row_slice(2, 2, &[re(0.30), re(0.10), re(0.10), re(0.20)]);
    let y = ComplexMatrix::from_row_slice(2, 2, &[re(0.19), -IM * 0.08, IM * 0.08, re(0.31)]);
    (x, y)
}

/// Planted instance over `C^3 ⊕ M_2` whose matrix block is redundant:
/// the observables are `E_i = e_ii ⊕ B_i` with `B_1, B_2` the fixed
/// qubit effect pair and `B_3 = 1 − B_1 − B_2`.
///
/// The `M_2` values equal the image of the scalar data under the unital
/// completely positive map `Z ↦ Σ_i ⟨i|Z|i⟩ B_i`, so that block can be
/// dropped; no scalar block can (each one's target is 1 at an operator
/// whose kept values vanish). The compression dimension is therefore 1
/// with 3 classical states.
pub fn planted_scalar_reconstruction() -> PlantedInstance {
    let (bx, by) = planted_qubit_pair();
    let b3 = identity(2) - &bx - &by;
    let outputs = vec![bx, by, b3];
    let mut ops = Vec::new();
    for (i, b) in outputs.iter().enumerate() {
        let mut m = ComplexMatrix::zeros(5, 5);
        m[(i, i)] = re(1.0);
        m.view_mut((3, 3), (2, 2)).copy_from(b);
        ops.push(HermitianOperator::new(m).expect("block diagonal Hermitian"));
    }
    let effects = (0..3)
        .map(|i| embed_block(&identity(1), 3, 3, i, i))
        .collect();
    PlantedInstance {
        observables: ObservableSet::new(ops).expect("valid planted set"),
        original_blocks: vec![(0, 1), (1, 1), (2, 1), (3, 2)],
        redundant_block: Some(3),
        expected_blocks: vec![(2, 1), (1, 1), (1, 1), (1, 1)],
        expected_dimension: 1,
        expected_classical_states: 3,
        oracle: Some(MeasurePrepareMap::new(effects, outputs, 1.0)),
    }
}

/// Trine effects `A_i = (2/3)|a_i⟩⟨a_i|` with unit vectors at angles
/// 2π/3, 4π/3, and 0; they sum to the identity on `M_2`.
fn trine_effects() -> Vec<ComplexMatrix> {
    let s3 = 3.0f64.sqrt();
    [(-0.5, s3 / 2.0), (-0.5, -s3 / 2.0), (1.0, 0.0)]
        .iter()
        .map(|&(c, s)| {
            ComplexMatrix::from_row_slice(2, 2, &[re(c * c), re(c * s), re(c * s), re(s * s)])
                .scale(2.0 / 3.0)
        })
        .collect()
}

/// Planted instance over `M_2 ⊕ C^3` whose matrix block is *not*
/// redundant even though the scalar remainder looks plentiful: the
/// observables are `E_i = A_i ⊕ C_i` with `A_i` the trine effects and
/// `C_i = (3 B_i + 1)/6` for fixed positive diagonal `B_i` summing to
/// the identity (so `C_i` is the image of `A_i` under the
/// measure-and-prepare map `Z ↦ (3/2) Σ_j tr(A_j Z) B_j`).
///
/// All scalar values are strictly positive while each `A_i` is rank
/// one, so a completely positive interpolation of the `M_2` block from
/// the scalars would force every component map onto a single ray and
/// break unitality. The block survives: the compression dimension is 2
/// with all four blocks kept.
pub fn planted_qubit_block() -> PlantedInstance {
    let trine = trine_effects();
    let b_diag: [[f64; 3]; 3] = [
        [0.15, 0.30, 0.45],
        [0.35, 0.10, 0.20],
        [0.50, 0.60, 0.35], // 1 − B_1 − B_2
    ];
    let mut ops = Vec::new();
    for (a, b) in trine.iter().zip(&b_diag) {
        let mut m = ComplexMatrix::zeros(5, 5);
        m.view_mut((0, 0), (2, 2)).copy_from(a);
        for l in 0..3 {
            m[(2 + l, 2 + l)] = re((3.0 * b[l] + 1.0) / 6.0);
        }
        ops.push(HermitianOperator::new(m).expect("block diagonal Hermitian"));
    }
    PlantedInstance {
        observables: ObservableSet::new(ops).expect("valid planted set"),
        original_blocks: vec![(0, 2), (2, 1), (3, 1), (4, 1)],
        redundant_block: None,
        expected_blocks: vec![(2, 1), (1, 1), (1, 1), (1, 1)],
        expected_dimension: 2,
        expected_classical_states: 4,
        oracle: None,
    }
}

/// Negative control over `M_2 ⊕ C^2`: the remainder next to the largest
/// block is too small to host an interpolation. The observables are the
/// fixed qubit pair extended by distinct scalars; already as a linear
/// system, interpolating three independent qubit targets from
/// two-dimensional scalar data is inconsistent.
pub fn planted_scalar_remainder() -> PlantedInstance {
    let (x, y) = planted_qubit_pair();
    let mut e1 = ComplexMatrix::zeros(4, 4);
    e1.view_mut((0, 0), (2, 2)).copy_from(&x);
    e1[(2, 2)] = re(0.20);
    e1[(3, 3)] = re(0.70);
    let mut e2 = ComplexMatrix::zeros(4, 4);
    e2.view_mut((0, 0), (2, 2)).copy_from(&y);
    e2[(2, 2)] = re(0.60);
    e2[(3, 3)] = re(0.25);
    let ops = vec![
        HermitianOperator::new(e1).expect("block diagonal Hermitian"),
        HermitianOperator::new(e2).expect("block diagonal Hermitian"),
    ];
    PlantedInstance {
        observables: ObservableSet::new(ops).expect("valid planted set"),
        original_blocks: vec![(0, 2), (2, 1), (3, 1)],
        redundant_block: None,
        expected_blocks: vec![(2, 1), (1, 1), (1, 1)],
        expected_dimension: 2,
        expected_classical_states: 3,
        oracle: None,
    }
}

/// A random observable set with a planted block structure.
#[derive(Debug, Clone)]
pub struct RandomBlockInstance {
    /// Two generic operators respecting the pattern, conjugated by a
    /// hidden unitary.
    pub observables: ObservableSet,
    /// The planted `(D_i, m_i)` pattern, sorted by descending dimension.
    pub planted_blocks: Vec<(usize, usize)>,
    /// The hidden unitary: the operators are `U† (⊕_i 1_{m_i} ⊗ G_i) U`
    /// up to the ordering of copies within each family.
    pub unitary: ComplexMatrix,
}

/// Draws a random block pattern with ambient dimension at most
/// `max_dim` (block dimensions ≤ 3, multiplicities ≤ 2), then two
/// generic observables respecting it.
///
/// Generic per-block Hermitian data makes each family irreducible and
/// pairwise inequivalent with probability one, so the planted pattern
/// is the true block structure of the generated algebra.
pub fn random_block_structured(seed: u64, max_dim: usize) -> RandomBlockInstance {
    use rand::Rng;
    assert!(max_dim >= 2, "need room for at least one block");
    let seeds = SeedSplitter::new(seed);
    let mut rng = seeds.stream("planted-block-pattern");

    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut used = 0usize;
    while used < max_dim {
        let room = max_dim - used;
        if room == 1 {
            blocks.push((1, 1));
            break;
        }
        if !blocks.is_empty() && rng.gen_bool(0.35) {
            break;
        }
        let d = rng.gen_range(1..=room.min(3));
        let m = rng.gen_range(1..=(room / d).min(2));
        blocks.push((d, m));
        used += d * m;
    }
    blocks.sort_by_key(|&(d, _)| std::cmp::Reverse(d));
    let dim: usize = blocks.iter().map(|(d, m)| d * m).sum();

    let u = random_unitary(dim, &mut rng);
    let mut ops = Vec::new();
    for _ in 0..2 {
        let mut m = ComplexMatrix::zeros(dim, dim);
        let mut off = 0usize;
        for &(d, mult) in &blocks {
            let g = random_hermitian(d, &mut rng);
            for a in 0..mult {
                m.view_mut((off + a * d, off + a * d), (d, d)).copy_from(&g);
            }
            off += d * mult;
        }
        ops.push(HermitianOperator::new(u.adjoint() * m * &u).expect("conjugated Hermitian"));
    }
    RandomBlockInstance {
        observables: ObservableSet::new(ops).expect("valid random set"),
        planted_blocks: blocks,
        unitary: u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::block::block_diagonalize;
    use crate::mat::cmatrix::{fro_norm, zeros};
    use crate::mat::linalg::min_eig;
    use crate::tol::MAX_GENERIC_RETRIES;

    /// Diagonal complex matrix with the given real entries.
    fn real_diag(vals: &[f64]) -> ComplexMatrix {
        let mut m = zeros(vals.len(), vals.len());
        for (i, &v) in vals.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    #[test]
    fn degree3_pair_matches_its_determinant() {
        let (a, b) = degree3_pair();
        // det[x1 + yA + zB] = (x − y/2)(x² − y² − z²) at sample points.
        for &(x, y, z) in &[(1.0, 0.3, 0.7), (0.5, -1.0, 0.2), (2.0, 1.0, -1.5)] {
            let m = identity(3).scale(x) + a.mat().scale(y) + b.mat().scale(z);
            let det = m.lu().determinant();
            let want = (x - 0.5 * y) * (x * x - y * y - z * z);
            assert!((det - re(want)).norm() < 1e-10, "at ({x}, {y}, {z})");
        }
    }

    #[test]
    fn irreducible_pair_entries() {
        for d in 1..=6 {
            let (a, b) = irreducible_pair(d);
            assert_eq!(a.dim(), d);
            assert_eq!(b.dim(), d);
            if d >= 2 {
                assert_eq!(a.mat()[(0, 1)], re(0.5));
                assert_eq!(a.mat()[(1, 0)], re(0.5));
                assert_eq!(b.mat()[(0, 1)], IM * 0.5);
                assert_eq!(b.mat()[(1, 0)], -IM * 0.5);
                assert_eq!(a.mat()[(0, 0)], re(0.0));
            }
        }
    }

    #[test]
    fn scalar_reconstruction_oracle_hits_the_matrix_block() {
        let inst = planted_scalar_reconstruction();
        assert_eq!(inst.observables.dim(), 5);
        // The inputs sum to the identity, so it was already in span.
        assert!(!inst.observables.identity_added());
        assert_eq!(inst.observables.len(), 3);
        // The matrix-block values are strictly positive effects.
        for op in inst.observables.ops() {
            let vals = inst.original_block_values(op.mat());
            assert!(min_eig(&vals[3]) > 0.05);
        }
        // The oracle reproduces the matrix block on every canonical op.
        let oracle = inst.oracle.as_ref().unwrap();
        for op in inst.observables.ops() {
            let kept = inst.kept_direct_sum(op.mat());
            let target = op.mat().view((3, 3), (2, 2)).into_owned();
            assert!(fro_norm(&(oracle.apply(&kept) - target)) < 1e-12);
        }
        let bs = block_diagonalize(&inst.observables, 3, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), inst.expected_blocks.as_slice());
    }

    #[test]
    fn qubit_block_instance_is_a_measure_prepare_image() {
        let inst = planted_qubit_block();
        assert!(!inst.observables.identity_added());
        assert_eq!(inst.observables.len(), 3);
        // The scalar blocks are the measure-and-prepare image of the
        // trine effects: C_i = (3/2) Σ_j tr(A_j A_i) B_j.
        let trine = trine_effects();
        let outputs: Vec<ComplexMatrix> = [
            [0.15, 0.30, 0.45],
            [0.35, 0.10, 0.20],
            [0.50, 0.60, 0.35],
        ]
        .iter()
        .map(|b| real_diag(b))
        .collect();
        let phi = MeasurePrepareMap::new(trine.clone(), outputs, 2.0 / 3.0);
        for (i, op) in inst.observables.ops().iter().enumerate().skip(1) {
            let vals = inst.original_block_values(op.mat());
            let img = phi.apply(&vals[0]);
            let scalars = real_diag(&[vals[1][(0, 0)].re, vals[2][(0, 0)].re, vals[3][(0, 0)].re]);
            assert!(
                fro_norm(&(img - scalars)) < 1e-12,
                "operator {i} scalar block is not the map image"
            );
        }
        // Effects sum to the identity on the qubit factor.
        let sum = trine_effects()
            .into_iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, a| acc + a);
        assert!(fro_norm(&(sum - identity(2))) < 1e-14);
        let bs = block_diagonalize(&inst.observables, 3, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), inst.expected_blocks.as_slice());
    }

    #[test]
    fn scalar_remainder_instance_has_the_expected_blocks() {
        let inst = planted_scalar_remainder();
        // Identity is not in the span of the two planted operators.
        assert!(inst.observables.identity_added());
        assert_eq!(inst.observables.len(), 3);
        let bs = block_diagonalize(&inst.observables, 3, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), inst.expected_blocks.as_slice());
    }

    #[test]
    fn two_projections_have_requested_ranks() {
        let (p, q) = two_projections(6, 3, 3, 17).unwrap();
        p.validate_projection(1e-9).unwrap();
        q.validate_projection(1e-9).unwrap();
        assert!((trace(p.mat()).re - 3.0).abs() < 1e-9);
        assert!((trace(q.mat()).re - 3.0).abs() < 1e-9);
    }

    #[test]
    fn random_block_instances_recover_their_plant() {
        for seed in 0..6u64 {
            let inst = random_block_structured(seed, 6);
            let bs = block_diagonalize(&inst.observables, 101, MAX_GENERIC_RETRIES).unwrap();
            let mut got = bs.blocks().to_vec();
            got.sort_unstable();
            let mut want = inst.planted_blocks.clone();
            want.sort_unstable();
            assert_eq!(got, want, "seed {seed}");
        }
    }
}
