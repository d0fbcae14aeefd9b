//! Explicit compression and decompression channels.
//!
//! Both constructions start from the block structure `U E U† =
//! ⊕_i 1_{m_i} ⊗ E^i`. The compression runs in three stages
//! (Schrödinger picture):
//!
//! 1. *copy sum* `σ: M_D → M_R`: conjugate by `U` and add up the `m_i`
//!    copies of each family into a single `D_i` block (`R = Σ_i D_i`);
//!    this is trace preserving because the copies tile the space, and
//!    it preserves every canonical expectation because the copies of a
//!    canonical operator agree.
//! 2. *fold* `M_R → M_N`: keep the surviving blocks and reroute each
//!    eliminated block `z` through the dual of its interpolation map
//!    `Φ_z: M_N → M_{D_z}`; unitality of `Φ_z` makes this stage trace
//!    preserving. (Skipped when nothing was eliminated, where `N = R`.)
//! 3. *pad* `M_N → M_d ⊗ ℂⁿ`: write the `j`-th surviving block into
//!    register slot `j`, embedded in the top-left corner of a `d`-sided
//!    block.
//!
//! The decompression is the dual of the unital completely positive map
//! `A ↦ ⊕_j R_j((1/m_j) Σ_a V_{ja}† A V_{ja})` over the surviving
//! families, where `V_{ja}` is the ambient isometry onto copy `a` of
//! family `j` and `R_j` pads a `D_j` block to side `d` by placing its
//! normalized trace on the complement. Chaining the two duals sends
//! each canonical operator to itself exactly: the pad and its adjoint
//! cancel, the fold rebuilds the eliminated values by interpolation,
//! and the copy sum redistributes the family values to all copies.

use crate::algebra::block::BlockStructure;
use crate::dimension::report::{BlockOutcome, DimensionAnalysis};
use crate::error::{Error, Result};
use crate::mat::channel::{compose, is_cptp, CptpDiagnostics, QuantumChannel};
use crate::mat::cmatrix::{opnorm, trace, window_isometry, ComplexMatrix};
use crate::mat::herm::ObservableSet;
use crate::mat::random::{random_density, SeedSplitter};
use crate::tol::{EPS_PSD, EPS_TP};

/// A matched compression/decompression pair for one observable set.
#[derive(Debug, Clone)]
pub struct CompressionScheme {
    /// The compression `M_D → M_d ⊗ ℂⁿ`.
    pub compress: QuantumChannel,
    /// The decompression `M_{d·n} → M_D`.
    pub decompress: QuantumChannel,
    /// Quantum side `d` of the compressed space.
    pub dimension: usize,
    /// Classical register size `n`.
    pub classical_states: usize,
    /// Family indices represented in the register, in slot order.
    pub kept: Vec<usize>,
}

/// Ambient isometries `V_{ia}` onto copy `a` of family `i`.
fn copy_isometries(structure: &BlockStructure) -> Vec<Vec<ComplexMatrix>> {
    let ambient = structure.ambient_dim();
    let u_dag = structure.unitary().adjoint();
    structure
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &(di, mi))| {
            let off = structure.block_offset(i);
            (0..mi)
                .map(|a| &u_dag * window_isometry(ambient, off + a * di, di))
                .collect()
        })
        .collect()
}

/// Copy-sum stage `σ: M_D → M_R`.
fn copy_sum_channel(structure: &BlockStructure, v: &[Vec<ComplexMatrix>]) -> Result<QuantumChannel> {
    let ambient = structure.ambient_dim();
    let r_total = structure.reduced_dim();
    let mut kraus = Vec::new();
    let mut red_off = 0;
    for (i, fam) in v.iter().enumerate() {
        let di = structure.blocks()[i].0;
        let slot = window_isometry(r_total, red_off, di);
        for via in fam {
            kraus.push(&slot * via.adjoint());
        }
        red_off += di;
    }
    QuantumChannel::cptp(ambient, r_total, 1, kraus)
}

/// Pad stage: block `slot` of the input (side `dims[slot]`, offset
/// `offs[slot]`) goes to register slot `slot` of the output.
fn pad_channel(
    dim_in: usize,
    offs: &[usize],
    dims: &[usize],
    d: usize,
) -> Result<QuantumChannel> {
    let n = dims.len();
    let mut kraus = Vec::with_capacity(n);
    for slot in 0..n {
        let k = window_isometry(d * n, slot * d, d)
            * window_isometry(d, 0, dims[slot])
            * window_isometry(dim_in, offs[slot], dims[slot]).adjoint();
        kraus.push(k);
    }
    QuantumChannel::cptp(dim_in, d, n, kraus)
}

/// Decompression for the surviving families: dual of the unital
/// copy-averaged embedding described in the module docs.
fn decompression(
    structure: &BlockStructure,
    v: &[Vec<ComplexMatrix>],
    kept: &[usize],
    d: usize,
) -> Result<QuantumChannel> {
    let ambient = structure.ambient_dim();
    let n = kept.len();
    let dtot = d * n;
    let mut dual_kraus: Vec<ComplexMatrix> = Vec::new();
    for (slot, &j) in kept.iter().enumerate() {
        let (dj, mj) = structure.blocks()[j];
        let embed = window_isometry(dtot, slot * d, d) * window_isometry(d, 0, dj);
        let copy_scale = 1.0 / (mj as f64).sqrt();
        for a in 0..mj {
            dual_kraus.push((&embed * v[j][a].adjoint()).scale(copy_scale));
        }
        // Complement of the block inside its slot: fed by the
        // normalized trace so the embedding stays unital.
        if dj < d {
            let tr_scale = 1.0 / ((mj * dj) as f64).sqrt();
            for p in dj..d {
                let target = window_isometry(dtot, slot * d + p, 1);
                for a in 0..mj {
                    for b in 0..dj {
                        let bra = v[j][a].column(b).adjoint();
                        dual_kraus.push((&target * bra).scale(tr_scale));
                    }
                }
            }
        }
    }
    let kraus: Vec<ComplexMatrix> = dual_kraus.iter().map(|k| k.adjoint()).collect();
    QuantumChannel::cptp(dtot, ambient, 1, kraus)
}

/// Builds the scheme that keeps every family, compressing to the
/// largest block dimension. Needs no redundancy information.
pub fn build_max_block_scheme(structure: &BlockStructure) -> Result<CompressionScheme> {
    let blocks = structure.blocks();
    let s = blocks.len();
    let d = blocks.iter().map(|&(di, _)| di).max().ok_or_else(|| {
        Error::InvalidObservables("block structure has no blocks".into())
    })?;
    let dims: Vec<usize> = blocks.iter().map(|&(di, _)| di).collect();
    let mut offs = Vec::with_capacity(s);
    let mut acc = 0;
    for &di in &dims {
        offs.push(acc);
        acc += di;
    }
    let v = copy_isometries(structure);
    let sigma = copy_sum_channel(structure, &v)?;
    let pad = pad_channel(structure.reduced_dim(), &offs, &dims, d)?;
    let compress = compose(&pad, &sigma)?;
    let kept: Vec<usize> = (0..s).collect();
    let decompress = decompression(structure, &v, &kept, d)?;
    Ok(CompressionScheme {
        compress,
        decompress,
        dimension: d,
        classical_states: s,
        kept,
    })
}

/// Builds the scheme realizing the minimal dimension found by the
/// elimination scan, folding eliminated blocks through the duals of
/// their interpolation maps.
pub fn build_optimal_scheme(analysis: &DimensionAnalysis) -> Result<CompressionScheme> {
    let structure = analysis.reduced.structure();
    let report = &analysis.report;
    let kept = report.kept.clone();
    let d = report.dimension;
    let n = kept.len();
    let dims_all: Vec<usize> = structure.blocks().iter().map(|&(di, _)| di).collect();
    let r_total = structure.reduced_dim();
    let n_total: usize = kept.iter().map(|&j| dims_all[j]).sum();
    let mut red_offs = Vec::with_capacity(dims_all.len());
    let mut acc = 0;
    for &di in &dims_all {
        red_offs.push(acc);
        acc += di;
    }

    let v = copy_isometries(structure);
    let sigma = copy_sum_channel(structure, &v)?;

    let folded = if report.redundant.is_empty() {
        sigma
    } else {
        let mut kraus = Vec::new();
        let mut n_off = 0;
        for &j in &kept {
            let t = window_isometry(n_total, n_off, dims_all[j])
                * window_isometry(r_total, red_offs[j], dims_all[j]).adjoint();
            kraus.push(t);
            n_off += dims_all[j];
        }
        for &z in &report.redundant {
            let BlockOutcome::Redundant(out) = &report.outcomes[z] else {
                return Err(Error::Inconsistent(format!(
                    "block {z} is listed redundant but carries no interpolation"
                )));
            };
            let choi = out.choi.as_ref().ok_or_else(|| {
                Error::Inconsistent(format!("block {z} has no interpolation map"))
            })?;
            let phi = QuantumChannel::from_choi(
                n_total,
                dims_all[z],
                1,
                choi.unscale(n_total as f64),
            )?;
            if phi.kraus().is_empty() {
                return Err(Error::VerificationFailed {
                    context: format!("interpolation map for block {z} is not completely positive"),
                    residual: f64::NAN,
                    tol: EPS_PSD,
                });
            }
            let select = window_isometry(r_total, red_offs[z], dims_all[z]).adjoint();
            for l in phi.kraus() {
                kraus.push(l.adjoint() * &select);
            }
        }
        let fold = QuantumChannel::cptp(r_total, n_total, 1, kraus)?;
        compose(&fold, &sigma)?
    };

    let kept_dims: Vec<usize> = kept.iter().map(|&j| dims_all[j]).collect();
    let mut kept_offs = Vec::with_capacity(n);
    let mut acc = 0;
    for &dj in &kept_dims {
        kept_offs.push(acc);
        acc += dj;
    }
    let pad = pad_channel(n_total, &kept_offs, &kept_dims, d)?;
    let compress = compose(&pad, &folded)?;
    let decompress = decompression(structure, &v, &kept, d)?;
    Ok(CompressionScheme {
        compress,
        decompress,
        dimension: d,
        classical_states: n,
        kept,
    })
}

/// Residual diagnostics from a scheme verification run.
#[derive(Debug, Clone, Copy)]
pub struct SchemeDiagnostics {
    /// Complete-positivity / trace-preservation data of the compression.
    pub compress: CptpDiagnostics,
    /// Same for the decompression.
    pub decompress: CptpDiagnostics,
    /// Worst relative operator-norm defect of the round trip on the
    /// canonical operators (Heisenberg picture).
    pub op_residual: f64,
    /// Worst absolute expectation defect over the sampled states.
    pub state_residual: f64,
}

impl SchemeDiagnostics {
    /// Largest of the two round-trip residuals.
    pub fn worst(&self) -> f64 {
        self.op_residual.max(self.state_residual)
    }
}

/// Verifies that a scheme preserves all canonical expectations: both
/// channels must be CPTP, and the round trip must fix each canonical
/// operator (checked exactly in the Heisenberg picture and sampled on
/// `num_states` random density matrices).
pub fn verify_scheme(
    scheme: &CompressionScheme,
    obs: &ObservableSet,
    num_states: usize,
    seed: u64,
) -> Result<SchemeDiagnostics> {
    let (c_ok, c_diag) = is_cptp(&scheme.compress, EPS_PSD, EPS_TP);
    if !c_ok {
        return Err(Error::VerificationFailed {
            context: format!(
                "compression is not CPTP (min eig {:.3e}, tp residual {:.3e})",
                c_diag.choi_min_eig, c_diag.tp_residual
            ),
            residual: c_diag.tp_residual.max(-c_diag.choi_min_eig),
            tol: EPS_TP,
        });
    }
    let (d_ok, d_diag) = is_cptp(&scheme.decompress, EPS_PSD, EPS_TP);
    if !d_ok {
        return Err(Error::VerificationFailed {
            context: format!(
                "decompression is not CPTP (min eig {:.3e}, tp residual {:.3e})",
                d_diag.choi_min_eig, d_diag.tp_residual
            ),
            residual: d_diag.tp_residual.max(-d_diag.choi_min_eig),
            tol: EPS_TP,
        });
    }
    let round_trip = compose(&scheme.decompress, &scheme.compress)?;
    let heisenberg = round_trip.dual()?;
    let mut op_residual: f64 = 0.0;
    for op in obs.ops() {
        let e = op.mat();
        let defect = opnorm(&(heisenberg.apply(e) - e)) / (1.0 + opnorm(e));
        op_residual = op_residual.max(defect);
    }
    let seeds = SeedSplitter::new(seed);
    let mut rng = seeds.stream("scheme-verify");
    let mut state_residual: f64 = 0.0;
    for _ in 0..num_states {
        let rho = random_density(scheme.compress.dim_in(), &mut rng);
        let image = round_trip.apply(&rho);
        for op in obs.ops() {
            let e = op.mat();
            let defect = (trace(&(&image * e)) - trace(&(&rho * e))).norm();
            state_residual = state_residual.max(defect);
        }
    }
    Ok(SchemeDiagnostics {
        compress: c_diag,
        decompress: d_diag,
        op_residual,
        state_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::block::block_diagonalize;
    use crate::dimension::report::compression_dimension;
    use crate::fixtures::{
        planted_qubit_block, planted_scalar_reconstruction, random_block_structured,
    };
    use crate::tol::MAX_GENERIC_RETRIES;

    #[test]
    fn max_block_scheme_round_trips_planted_qubit_block() {
        let inst = planted_qubit_block();
        let bs = block_diagonalize(&inst.observables, 3, MAX_GENERIC_RETRIES).unwrap();
        let scheme = build_max_block_scheme(&bs).unwrap();
        assert_eq!(scheme.dimension, 2);
        assert_eq!(scheme.classical_states, 4);
        assert_eq!(scheme.compress.dim_in(), 5);
        assert_eq!(scheme.compress.dim_out(), 2);
        assert_eq!(scheme.compress.classical_register(), 4);
        assert_eq!(scheme.decompress.dim_in(), 8);
        let diag = verify_scheme(&scheme, &inst.observables, 25, 7).unwrap();
        assert!(diag.worst() < 1e-10, "round trip residual {:?}", diag);
    }

    #[test]
    fn optimal_scheme_folds_the_redundant_block() {
        let inst = planted_scalar_reconstruction();
        let analysis = compression_dimension(&inst.observables, 13).unwrap();
        let scheme = build_optimal_scheme(&analysis).unwrap();
        assert_eq!(scheme.dimension, 1);
        assert_eq!(scheme.classical_states, 3);
        assert_eq!(scheme.kept, vec![1, 2, 3]);
        let diag = verify_scheme(&scheme, &inst.observables, 25, 19).unwrap();
        assert!(diag.worst() < 1e-9, "round trip residual {:?}", diag);
    }

    #[test]
    fn optimal_scheme_without_elimination_matches_max_block() {
        let inst = planted_qubit_block();
        let analysis = compression_dimension(&inst.observables, 29).unwrap();
        let scheme = build_optimal_scheme(&analysis).unwrap();
        assert_eq!(scheme.dimension, 2);
        assert_eq!(scheme.classical_states, 4);
        let diag = verify_scheme(&scheme, &inst.observables, 25, 31).unwrap();
        assert!(diag.worst() < 1e-10, "round trip residual {:?}", diag);
    }

    #[test]
    fn max_block_scheme_round_trips_random_plants() {
        for seed in 0..5u64 {
            let inst = random_block_structured(seed, 6);
            let bs = block_diagonalize(&inst.observables, seed ^ 0xbeef, MAX_GENERIC_RETRIES)
                .unwrap();
            let scheme = build_max_block_scheme(&bs).unwrap();
            let diag = verify_scheme(&scheme, &inst.observables, 10, seed).unwrap();
            assert!(
                diag.worst() < 1e-9,
                "seed {seed}: round trip residual {:?}",
                diag
            );
        }
    }
}
