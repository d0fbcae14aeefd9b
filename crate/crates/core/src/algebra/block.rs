//! Numerical block diagonalization of the algebra generated by an
//! observable set.
//!
//! The C*-algebra generated by a finite Hermitian family decomposes as
//! `U* (⊕_i M_{D_i} ⊗ 1_{m_i}) U` for a unitary `U`. This module finds
//! that decomposition numerically:
//!
//! 1. form a generic element `E(r)` of the algebra from a seeded random
//!    integer combination of a closure basis;
//! 2. cluster its eigenvalues — each cluster is one eigenvalue of one
//!    irreducible block, with multiplicity equal to that block's `m_i`;
//! 3. connect clusters that are coupled by some algebra element; the
//!    connected components are the block families;
//! 4. align the multiplicity frames of the clusters in each family with
//!    unitary polar factors of transporter blocks of a second generic
//!    element, so the repeated sub-blocks come out entry-wise identical;
//! 5. verify the claimed structure against the full closure basis and
//!    retry with fresh randomness on any failure.
//!
//! Layout convention: in the conjugated picture the family `i` occupies
//! `m_i` consecutive diagonal sub-blocks of side `D_i`, all identical
//! (`1_{m_i} ⊗ E^i`). Families are sorted by descending `D_i`, ties
//! broken by ascending first occurrence in the spectrum of `E(r)`.

use rand::Rng;

use super::closure::{star_closure_basis, AlgebraBasis};
use crate::error::{Error, Result};
use crate::mat::cmatrix::{identity, opnorm, ComplexMatrix};
use crate::mat::herm::ObservableSet;
use crate::mat::linalg::{cluster_sorted, eigh, from_columns, polar_factor};
use crate::mat::random::SeedSplitter;
use crate::tol::{EPS_BLOCK, EPS_CLUSTER, EPS_NUM};

/// Unitary plus `(D_i, m_i)` block pattern of a matrix *-algebra.
#[derive(Debug, Clone)]
pub struct BlockStructure {
    ambient_dim: usize,
    unitary: ComplexMatrix,
    blocks: Vec<(usize, usize)>,
}

impl BlockStructure {
    /// Builds a structure after validating the unitary and the
    /// dimension count.
    pub fn new(
        ambient_dim: usize,
        unitary: ComplexMatrix,
        blocks: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let total: usize = blocks.iter().map(|(d, m)| d * m).sum();
        if total != ambient_dim || unitary.nrows() != ambient_dim || unitary.ncols() != ambient_dim
        {
            return Err(Error::dims(
                format!("{ambient_dim}"),
                format!("sum {total}, unitary {}x{}", unitary.nrows(), unitary.ncols()),
                "block structure dimensions",
            ));
        }
        let uni_res = opnorm(&(unitary.adjoint() * &unitary - identity(ambient_dim)));
        if uni_res > EPS_NUM {
            return Err(Error::VerificationFailed {
                context: "block structure unitary".into(),
                residual: uni_res,
                tol: EPS_NUM,
            });
        }
        Ok(Self {
            ambient_dim,
            unitary,
            blocks,
        })
    }

    /// Ambient dimension D.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The unitary U such that U E U† is block diagonal.
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// The `(D_i, m_i)` pairs in canonical order.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Number of block families s.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Offset of family `i` in the conjugated picture.
    pub fn block_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|(d, m)| d * m).sum()
    }

    /// Σ_i D_i, the dimension after multiplicity reduction.
    pub fn reduced_dim(&self) -> usize {
        self.blocks.iter().map(|(d, _)| d).sum()
    }

    /// Conjugates `m` into the block-diagonal picture, U m U†.
    pub fn conjugated(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &self.unitary * m * self.unitary.adjoint()
    }

    /// Residual of `m` against the block pattern: the Frobenius
    /// distance of U m U† from its projection onto matrices that are
    /// block diagonal with identical repeated sub-blocks.
    pub fn pattern_residual(&self, m: &ComplexMatrix) -> f64 {
        let t = self.conjugated(m);
        let mut model = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        let mut off = 0usize;
        for &(d, mult) in &self.blocks {
            let mut avg = ComplexMatrix::zeros(d, d);
            for a in 0..mult {
                avg += t.view((off + a * d, off + a * d), (d, d)).clone_owned();
            }
            avg = avg.unscale(mult as f64);
            for a in 0..mult {
                model
                    .view_mut((off + a * d, off + a * d), (d, d))
                    .copy_from(&avg);
            }
            off += d * mult;
        }
        (t - model).norm()
    }
}

/// Per-family bookkeeping during structure discovery.
struct Family {
    clusters: Vec<usize>,
    block_dim: usize,
    mult: usize,
}

/// Union-find with path compression.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let root = self.find(self.0[i]);
            self.0[i] = root;
        }
        self.0[i]
    }
    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.0[ri.max(rj)] = ri.min(rj);
        }
    }
}

/// Discovers the block structure of the algebra generated by `obs`.
pub fn block_diagonalize(
    obs: &ObservableSet,
    seed: u64,
    max_retries: usize,
) -> Result<BlockStructure> {
    let d = obs.dim();
    let closure = star_closure_basis(obs)?;
    let seeds = SeedSplitter::new(seed);
    let mut last_failure = String::from("no attempt made");

    for attempt in 0..max_retries.max(1) {
        let mut rng = seeds.stream_indexed("block-generic", attempt as u64);
        match attempt_structure(&closure, d, &mut rng) {
            Ok(bs) => return Ok(bs),
            Err(e) => last_failure = e.to_string(),
        }
    }
    Err(Error::NonGenericSample {
        retries: max_retries,
        detail: last_failure,
    })
}

fn attempt_structure(
    closure: &AlgebraBasis,
    d: usize,
    rng: &mut impl Rng,
) -> Result<BlockStructure> {
    let k = closure.len();
    // Generic element: integer coefficients from {1, ..., 16 k D},
    // normalized. Genericity is verified downstream, not assumed.
    let hi = 16 * k * d;
    let mut coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(1..=hi) as f64).collect();
    let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    let mut e_r = ComplexMatrix::zeros(d, d);
    for (c, g) in coeffs.iter().zip(closure.elems()) {
        e_r += g.scale(*c);
    }

    let (evals, v) = eigh(&e_r);
    let scale = evals.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let clusters = cluster_sorted(&evals, EPS_CLUSTER * scale);

    // Couple clusters through the algebra: clusters i and j belong to
    // the same irreducible family iff some algebra element has a
    // nonzero (i, j) block in the eigenbasis of E(r).
    let conj: Vec<ComplexMatrix> = closure.elems().iter().map(|g| v.adjoint() * g * &v).collect();
    let nc = clusters.len();
    let mut uf = UnionFind::new(nc);
    for t in &conj {
        for i in 0..nc {
            for j in (i + 1)..nc {
                let (si, ei) = clusters[i];
                let (sj, ej) = clusters[j];
                let b = t.view((si, sj), (ei - si, ej - sj));
                if b.norm() > 1e-8 {
                    uf.union(i, j);
                }
            }
        }
    }

    let mut families: Vec<Family> = Vec::new();
    for i in 0..nc {
        let root = uf.find(i);
        if root == i {
            families.push(Family {
                clusters: vec![i],
                block_dim: 0,
                mult: clusters[i].1 - clusters[i].0,
            });
        } else {
            // Roots are minimal indices, so the root's family already
            // exists and its first cluster is the root itself.
            let fam = families
                .iter_mut()
                .find(|f| f.clusters[0] == root)
                .expect("root family exists");
            fam.clusters.push(i);
        }
    }
    for fam in &mut families {
        fam.block_dim = fam.clusters.len();
        let sizes: Vec<usize> = fam
            .clusters
            .iter()
            .map(|&c| clusters[c].1 - clusters[c].0)
            .collect();
        fam.mult = sizes[0];
        if sizes.iter().any(|&s| s != fam.mult) {
            return Err(Error::ClusteringAmbiguous {
                gap: EPS_CLUSTER * scale,
                tol: EPS_CLUSTER,
            });
        }
    }

    // Canonical family order: descending block dimension, then
    // ascending first occurrence in the spectrum.
    families.sort_by_key(|f| (std::cmp::Reverse(f.block_dim), f.clusters[0]));

    // Second generic element for the transporters that align the
    // multiplicity frames of the clusters within each family.
    let mut align_err = String::new();
    'align: for _ in 0..4 {
        let mut s_mat = ComplexMatrix::zeros(d, d);
        for g in closure.elems() {
            s_mat += g.scale(rng.gen_range(-1.0..1.0));
        }
        let ms = v.adjoint() * &s_mat * &v;

        let mut columns: Vec<crate::mat::cmatrix::ComplexVector> = Vec::with_capacity(d);
        for fam in &families {
            let mult = fam.mult;
            // Aligned frames per cluster: cluster 0 keeps the raw
            // eigenvector frame, later clusters are rotated by the
            // unitary polar factor of the transporter block.
            let mut frames: Vec<ComplexMatrix> = Vec::with_capacity(fam.block_dim);
            for (pos, &c) in fam.clusters.iter().enumerate() {
                let (cs, _) = clusters[c];
                let w = if pos == 0 || mult == 1 {
                    identity(mult)
                } else {
                    let (c0s, _) = clusters[fam.clusters[0]];
                    let b = ms.view((cs, c0s), (mult, mult)).clone_owned();
                    match polar_factor(&b) {
                        Ok(w) => w,
                        Err(_) => {
                            align_err =
                                "singular transporter block; redrawing alignment element".into();
                            continue 'align;
                        }
                    }
                };
                frames.push(v.columns(cs, mult) * &w);
            }
            for a in 0..mult {
                for frame in &frames {
                    columns.push(frame.column(a).clone_owned());
                }
            }
        }
        let v_new = from_columns(d, &columns);
        let blocks: Vec<(usize, usize)> =
            families.iter().map(|f| (f.block_dim, f.mult)).collect();
        let bs = BlockStructure::new(d, v_new.adjoint(), blocks)?;

        // Verify the structure against the whole closure basis.
        let worst = closure
            .elems()
            .iter()
            .map(|g| bs.pattern_residual(g))
            .fold(0.0f64, f64::max);
        if worst <= EPS_BLOCK {
            return Ok(bs);
        }
        align_err = format!(
            "structure residual {worst:.3e} exceeds {EPS_BLOCK:.1e} on the closure basis"
        );
    }
    Err(Error::VerificationFailed {
        context: format!("block structure verification: {align_err}"),
        residual: f64::NAN,
        tol: EPS_BLOCK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::cmatrix::{direct_sum, kron, re as cre, C64};
    use crate::mat::herm::HermitianOperator;
    use crate::mat::random::{random_hermitian, random_unitary};
    use crate::tol::MAX_GENERIC_RETRIES;

    fn set_of(mats: Vec<ComplexMatrix>) -> ObservableSet {
        ObservableSet::new(
            mats.into_iter()
                .map(|m| HermitianOperator::new(m).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn diag(entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| cre(x)),
        ))
    }

    #[test]
    fn identity_alone_gives_scalar_with_full_multiplicity() {
        let bs = block_diagonalize(&set_of(vec![identity(3)]), 7, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), &[(1, 3)]);
    }

    #[test]
    fn one_projection_gives_two_scalar_blocks() {
        let bs = block_diagonalize(
            &set_of(vec![identity(2), diag(&[1.0, 0.0])]),
            7,
            MAX_GENERIC_RETRIES,
        )
        .unwrap();
        assert_eq!(bs.blocks(), &[(1, 1), (1, 1)]);
    }

    #[test]
    fn commutative_three_level_gives_three_scalar_blocks() {
        let bs = block_diagonalize(
            &set_of(vec![identity(3), diag(&[1.0, 2.0, 3.0])]),
            7,
            MAX_GENERIC_RETRIES,
        )
        .unwrap();
        assert_eq!(bs.blocks(), &[(1, 1), (1, 1), (1, 1)]);
    }

    #[test]
    fn generic_pair_gives_single_full_block() {
        let seeds = SeedSplitter::new(21);
        let mut rng = seeds.stream("block-generic-pair");
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let bs = block_diagonalize(&set_of(vec![a, b]), 7, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), &[(4, 1)]);
    }

    #[test]
    fn tensor_family_gives_multiplicity_two() {
        let seeds = SeedSplitter::new(22);
        let mut rng = seeds.stream("block-tensor");
        let u = random_unitary(4, &mut rng);
        let ops: Vec<ComplexMatrix> = (0..2)
            .map(|_| {
                let x = kron(&random_hermitian(2, &mut rng), &identity(2));
                u.adjoint() * x * &u
            })
            .collect();
        let obs = set_of(ops.clone());
        let bs = block_diagonalize(&obs, 7, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), &[(2, 2)]);
        // The defining operators obey the pattern.
        for op in obs.ops() {
            assert!(bs.pattern_residual(op.mat()) < EPS_BLOCK);
        }
    }

    #[test]
    fn direct_sum_pair_sorts_blocks_descending() {
        let seeds = SeedSplitter::new(23);
        let mut rng = seeds.stream("block-sum");
        let u = random_unitary(5, &mut rng);
        let ops: Vec<ComplexMatrix> = (0..2)
            .map(|_| {
                let x = direct_sum(&[random_hermitian(2, &mut rng), random_hermitian(3, &mut rng)]);
                u.adjoint() * x * &u
            })
            .collect();
        let bs = block_diagonalize(&set_of(ops), 7, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(bs.blocks(), &[(3, 1), (2, 1)]);
    }

    #[test]
    fn structure_multiset_is_seed_independent() {
        let seeds = SeedSplitter::new(24);
        let mut rng = seeds.stream("block-seeds");
        let u = random_unitary(6, &mut rng);
        let ops: Vec<ComplexMatrix> = (0..2)
            .map(|_| {
                let blk = direct_sum(&[
                    kron(&random_hermitian(2, &mut rng), &identity(2)),
                    random_hermitian(2, &mut rng),
                ]);
                u.adjoint() * blk * &u
            })
            .collect();
        let obs = set_of(ops);
        let mut results = Vec::new();
        for seed in [1u64, 99, 12345] {
            let bs = block_diagonalize(&obs, seed, MAX_GENERIC_RETRIES).unwrap();
            let mut b = bs.blocks().to_vec();
            b.sort_unstable();
            results.push(b);
        }
        assert_eq!(results[0], vec![(2, 1), (2, 2)]);
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn unitary_determinism_for_fixed_seed() {
        let seeds = SeedSplitter::new(25);
        let mut rng = seeds.stream("block-det");
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let obs = set_of(vec![a, b]);
        let bs1 = block_diagonalize(&obs, 42, MAX_GENERIC_RETRIES).unwrap();
        let bs2 = block_diagonalize(&obs, 42, MAX_GENERIC_RETRIES).unwrap();
        assert_eq!(
            (bs1.unitary() - bs2.unitary())
                .iter()
                .map(|x: &C64| x.norm())
                .fold(0.0f64, f64::max),
            0.0
        );
    }
}
