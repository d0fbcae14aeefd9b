//! Greedy block elimination and the compression-dimension report.
//!
//! With the blocks of the reduced observable set sorted by decreasing
//! dimension, the minimal compression dimension is found by a single
//! descending scan: test the leading block for redundancy against all
//! blocks not yet eliminated; eliminate it while the interpolation is
//! feasible; stop at the first block that resists. That block's
//! dimension is the answer — every larger block has been rebuilt from
//! the suffix, and no scheme can do better than the largest surviving
//! block, as its non-redundancy certificate shows.
//!
//! Eliminated blocks are re-interpolated against the *final* kept set
//! before reporting. Feasibility survives the shrinkage by composition:
//! if block `a` is rebuilt from a set containing block `b`, and `b` is
//! later rebuilt from the survivors, chaining the two maps rebuilds `a`
//! from the survivors directly. The re-solve turns that argument into
//! explicit maps, all sharing one input space — the form the channel
//! synthesis consumes.

use crate::algebra::block::block_diagonalize;
use crate::algebra::reduce::{reduce_multiplicities, ReducedObservableSet};
use crate::error::{Error, Result};
use crate::mat::herm::ObservableSet;
use crate::tol::{EPS_SDP, MAX_GENERIC_RETRIES};

use super::interp::{
    interpolation_feasibility, kept_indices, verify_interpolation, InterpolationOutcome,
};

/// Per-block result of the elimination scan.
#[derive(Debug, Clone)]
pub enum BlockOutcome {
    /// Eliminated: interpolation from the final kept set, with its map.
    Redundant(InterpolationOutcome),
    /// The block that stopped the scan, with its certificate.
    Blocking(InterpolationOutcome),
    /// Kept without a test (behind the blocking block, or alone).
    Kept,
}

/// Summary of the elimination scan over one block structure.
#[derive(Debug, Clone)]
pub struct DimensionReport {
    /// Dimensions of the reduced blocks, in family order (decreasing).
    pub block_dims: Vec<usize>,
    /// Minimal compression dimension: the largest surviving block.
    pub dimension: usize,
    /// Size of the classical register: the number of surviving blocks.
    pub classical_states: usize,
    /// Indices of the surviving blocks.
    pub kept: Vec<usize>,
    /// Indices of the eliminated blocks.
    pub redundant: Vec<usize>,
    /// Outcome for every block, indexed like `block_dims`.
    pub outcomes: Vec<BlockOutcome>,
}

/// Block decomposition together with the elimination report.
#[derive(Debug, Clone)]
pub struct DimensionAnalysis {
    /// The reduced observable set the scan ran on (owns the block
    /// structure and the per-family operator values).
    pub reduced: ReducedObservableSet,
    /// The elimination results.
    pub report: DimensionReport,
}

/// Computes the minimal compression dimension of an observable set.
pub fn compression_dimension(obs: &ObservableSet, seed: u64) -> Result<DimensionAnalysis> {
    let structure = block_diagonalize(obs, seed, MAX_GENERIC_RETRIES)?;
    let reduced = reduce_multiplicities(obs, &structure)?;
    let report = eliminate_blocks(&reduced)?;
    Ok(DimensionAnalysis { reduced, report })
}

/// Runs the descending elimination scan on an existing reduction.
pub fn eliminate_blocks(reduced: &ReducedObservableSet) -> Result<DimensionReport> {
    let dims = reduced.block_dims();
    let s = dims.len();
    let mut outcomes: Vec<BlockOutcome> = (0..s).map(|_| BlockOutcome::Kept).collect();
    let mut zeroed: Vec<usize> = Vec::new();
    let stop;
    let mut j = 0;
    loop {
        if kept_indices(s, j, &zeroed).is_empty() {
            // Nothing left to interpolate from: the block stays.
            stop = j;
            break;
        }
        let out = interpolation_feasibility(reduced, j, &zeroed)?;
        if out.marginal {
            return Err(Error::MarginalOutcome {
                objective: out.shift,
                band: EPS_SDP,
            });
        }
        if out.feasible {
            // Eliminated; its map is recomputed against the final kept
            // set once the scan has settled.
            zeroed.push(j);
            j += 1;
        } else {
            verify_interpolation(reduced, j, &zeroed, &out)?;
            outcomes[j] = BlockOutcome::Blocking(out);
            stop = j;
            break;
        }
    }

    // Re-interpolate eliminated blocks from the survivors alone. This
    // must stay feasible (composition through the other eliminated
    // blocks); failure indicates a numerically marginal elimination.
    for &z in &zeroed {
        let excl: Vec<usize> = zeroed.iter().copied().filter(|&x| x != z).collect();
        let out = interpolation_feasibility(reduced, z, &excl)?;
        if !out.feasible {
            return Err(Error::VerificationFailed {
                context: format!("block {z} lost redundancy against the final kept set"),
                residual: out.shift,
                tol: EPS_SDP,
            });
        }
        verify_interpolation(reduced, z, &excl, &out)?;
        outcomes[z] = BlockOutcome::Redundant(out);
    }

    let kept: Vec<usize> = (stop..s).collect();
    Ok(DimensionReport {
        dimension: dims[stop],
        classical_states: kept.len(),
        kept,
        redundant: zeroed,
        outcomes,
        block_dims: dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        planted_qubit_block, planted_scalar_reconstruction, planted_scalar_remainder,
        random_block_structured,
    };
    use crate::mat::herm::HermitianOperator;
    use crate::mat::random::{random_hermitian, SeedSplitter};

    #[test]
    fn planted_reconstruction_compresses_to_scalars() {
        let inst = planted_scalar_reconstruction();
        let analysis = compression_dimension(&inst.observables, 11).unwrap();
        let report = &analysis.report;
        assert_eq!(report.block_dims, vec![2, 1, 1, 1]);
        assert_eq!(report.dimension, inst.expected_dimension);
        assert_eq!(report.classical_states, inst.expected_classical_states);
        assert_eq!(report.kept, vec![1, 2, 3]);
        assert_eq!(report.redundant, vec![0]);
        assert!(matches!(report.outcomes[0], BlockOutcome::Redundant(_)));
        assert!(matches!(report.outcomes[1], BlockOutcome::Blocking(_)));
        assert!(matches!(report.outcomes[2], BlockOutcome::Kept));
    }

    #[test]
    fn planted_qubit_block_is_incompressible_below_two() {
        let inst = planted_qubit_block();
        let analysis = compression_dimension(&inst.observables, 23).unwrap();
        let report = &analysis.report;
        assert_eq!(report.dimension, 2);
        assert_eq!(report.classical_states, 4);
        assert!(report.redundant.is_empty());
        assert!(matches!(report.outcomes[0], BlockOutcome::Blocking(_)));
    }

    #[test]
    fn planted_remainder_keeps_its_qubit_block() {
        let inst = planted_scalar_remainder();
        let analysis = compression_dimension(&inst.observables, 31).unwrap();
        assert_eq!(analysis.report.dimension, 2);
        assert_eq!(analysis.report.classical_states, 3);
        assert!(analysis.report.redundant.is_empty());
    }

    #[test]
    fn generic_pair_spans_the_full_algebra() {
        let seeds = SeedSplitter::new(17);
        let mut rng = seeds.stream("generic-pair-dimension");
        let ops = vec![
            HermitianOperator::new(random_hermitian(3, &mut rng)).unwrap(),
            HermitianOperator::new(random_hermitian(3, &mut rng)).unwrap(),
        ];
        let obs = ObservableSet::new(ops).unwrap();
        let analysis = compression_dimension(&obs, 17).unwrap();
        assert_eq!(analysis.report.block_dims, vec![3]);
        assert_eq!(analysis.report.dimension, 3);
        assert_eq!(analysis.report.classical_states, 1);
        assert!(matches!(analysis.report.outcomes[0], BlockOutcome::Kept));
    }

    #[test]
    fn random_plants_obey_the_sandwich_bounds() {
        for seed in 0..8u64 {
            let inst = random_block_structured(seed, 6);
            let analysis = compression_dimension(&inst.observables, seed ^ 0x5a5a).unwrap();
            let report = &analysis.report;
            let dmin = *report.block_dims.iter().min().unwrap();
            let dmax = *report.block_dims.iter().max().unwrap();
            assert!(report.dimension >= dmin && report.dimension <= dmax);
            assert!(report.block_dims.contains(&report.dimension));
            assert!(report.classical_states <= report.block_dims.len());
            assert_eq!(
                report.kept.len() + report.redundant.len(),
                report.block_dims.len()
            );
            // Determinism of the full pipeline for a fixed seed.
            let again = compression_dimension(&inst.observables, seed ^ 0x5a5a).unwrap();
            assert_eq!(again.report.dimension, report.dimension);
            assert_eq!(again.report.kept, report.kept);
        }
    }
}
