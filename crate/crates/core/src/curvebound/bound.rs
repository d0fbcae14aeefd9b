//! Geometric lower bounds on the compression dimension.
//!
//! Any pair `E₁`, `E₂` in the real span of an observable set yields the
//! determinantal curve `det(x·𝟙 − E₁ − z·E₂)`, and the smallest degree
//! among its real irreducible factors bounds the compression dimension
//! from below: a compression into side `d` would exhibit a real factor
//! of degree at most `d`. Different pairs certify different bounds, so
//! the search either takes a caller-chosen pair or draws seeded random
//! combinations and keeps the strongest certificate found.
//!
//! [`gen_irreducible_example`] produces the classical pair whose curve
//! is irreducible of full degree at every side; the first-order
//! determinant expansion behind that irreducibility proof is exposed by
//! [`detexpansion_residual`] as a numerical self-test.

use super::curve::extract_curve;
use super::monodromy::{factor_by_monodromy, FactorizationResult, TrackSettings};
use crate::error::{Error, Result};
use crate::fixtures::irreducible_pair;
use crate::mat::cmatrix::{ComplexMatrix, C64, IM};
use crate::mat::herm::{HermitianOperator, ObservableSet};
use crate::mat::random::{std_normal, SeedSplitter};

/// How the slicing pair is chosen from the real span.
#[derive(Debug, Clone)]
pub enum PairStrategy {
    /// Evaluate one caller-chosen pair.
    Given(HermitianOperator, HermitianOperator),
    /// Draw this many seeded random combinations of the canonical
    /// operators and keep the strongest bound.
    Random { draws: usize },
}

/// A geometric lower-bound certificate.
#[derive(Debug, Clone)]
pub struct GeometricBound {
    /// The bound: smallest real irreducible factor degree found.
    pub bound: usize,
    /// Full factorization evidence for the certifying pair.
    pub factorization: FactorizationResult,
    /// The pair that produced the bound.
    pub pair: (HermitianOperator, HermitianOperator),
}

/// Curve-factorization lower bound on the compression dimension.
pub fn geometric_lower_bound(
    obs: &ObservableSet,
    strategy: PairStrategy,
    seed: u64,
) -> Result<GeometricBound> {
    if obs.len() < 2 {
        return Err(Error::InvalidObservables(
            "the geometric bound needs a real span of at least two observables".into(),
        ));
    }
    match strategy {
        PairStrategy::Given(e1, e2) => {
            if e1.dim() != obs.dim() || e2.dim() != obs.dim() {
                return Err(Error::dims(
                    format!("{0}x{0}", obs.dim()),
                    format!("{0}x{0}, {1}x{1}", e1.dim(), e2.dim()),
                    "slicing pair must match the observable dimension",
                ));
            }
            evaluate_pair(e1, e2)
        }
        PairStrategy::Random { draws } => {
            if draws == 0 {
                return Err(Error::InvalidObservables(
                    "the random pair strategy needs at least one draw".into(),
                ));
            }
            let split = SeedSplitter::new(seed);
            let mut rng = split.stream("geometric-pair");
            let mut best: Option<GeometricBound> = None;
            let mut last_err = None;
            for _ in 0..draws {
                let e1 = random_combination(obs, &mut rng);
                let e2 = random_combination(obs, &mut rng);
                match evaluate_pair(e1, e2) {
                    Ok(cert) => {
                        if best.as_ref().is_none_or(|b| cert.bound > b.bound) {
                            best = Some(cert);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            best.ok_or_else(|| last_err.expect("at least one draw ran"))
        }
    }
}

/// Extracts and factors the curve of one pair.
fn evaluate_pair(e1: HermitianOperator, e2: HermitianOperator) -> Result<GeometricBound> {
    let curve = extract_curve(&e1, &e2)?;
    let factorization = factor_by_monodromy(&curve, &TrackSettings::default())?;
    Ok(GeometricBound {
        bound: factorization.min_real_degree,
        factorization,
        pair: (e1, e2),
    })
}

/// Gaussian combination of the canonical operators.
fn random_combination(obs: &ObservableSet, rng: &mut impl rand::Rng) -> HermitianOperator {
    let dim = obs.dim();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for op in obs.ops() {
        sum += op.mat().scale(std_normal(rng));
    }
    HermitianOperator::new(sum).expect("real combinations of Hermitian operators are Hermitian")
}

/// The standard irreducible pair at side `d`.
///
/// `A` has every off-diagonal entry `½`; `B` has `i/2` above and `−i/2`
/// below the diagonal. Their determinantal curve is irreducible of full
/// degree `d`, so the geometric bound is tight on this family.
pub fn gen_irreducible_example(d: usize) -> (HermitianOperator, HermitianOperator) {
    irreducible_pair(d)
}

/// Defect of the first-order determinant expansion at the shifted pair.
///
/// Writing `Ã(x)` for the lower-triangular matrix with `x` on the
/// diagonal and ones strictly below (the irreducible pair after the
/// shift `z ↦ z − i`), the identity
///
/// ```text
/// det(Ã(x) + εB) = x^d − (εi/2)·(d·x^{d−1} + (x−1)^d − x^d) + O(ε²)
/// ```
///
/// underlies the irreducibility of the example curve. The returned
/// value is the absolute defect of the first-order truncation, which
/// must shrink quadratically in `ε`.
pub fn detexpansion_residual(d: usize, x: f64, eps: f64) -> f64 {
    let (_, b) = irreducible_pair(d);
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(x, 0.0);
        for j in 0..i {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    m += b.mat().scale(eps);
    let det = m.lu().determinant();
    let slope = d as f64 * x.powi(d as i32 - 1) + (x - 1.0).powi(d as i32) - x.powi(d as i32);
    let first_order = C64::new(x.powi(d as i32), 0.0) - IM.scale(0.5 * eps * slope);
    (det - first_order).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::degree3_pair;
    use crate::mat::random::random_hermitian;

    fn diag(values: &[f64]) -> HermitianOperator {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        HermitianOperator::new(ComplexMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(v),
        ))
        .unwrap()
    }

    #[test]
    fn commuting_family_is_bounded_by_one() {
        let obs = ObservableSet::new(vec![
            diag(&[0.0, 1.0, 2.0]),
            diag(&[1.0, -1.0, 0.5]),
        ])
        .unwrap();
        let cert = geometric_lower_bound(&obs, PairStrategy::Random { draws: 3 }, 5).unwrap();
        assert_eq!(cert.bound, 1);
        assert!(cert.factorization.real_factor_degrees.iter().all(|&g| g == 1));
    }

    #[test]
    fn generic_pair_certifies_full_dimension() {
        let split = SeedSplitter::new(301);
        let mut rng = split.stream("bound-generic");
        let e1 = HermitianOperator::new(random_hermitian(4, &mut rng)).unwrap();
        let e2 = HermitianOperator::new(random_hermitian(4, &mut rng)).unwrap();
        let obs = ObservableSet::new(vec![e1.clone(), e2.clone()]).unwrap();
        let cert =
            geometric_lower_bound(&obs, PairStrategy::Given(e1, e2), 0).unwrap();
        assert_eq!(cert.bound, 4);
        assert_eq!(cert.factorization.complex_orbit_sizes, vec![4]);
    }

    #[test]
    fn irreducible_example_reaches_its_side() {
        let (a, b) = gen_irreducible_example(3);
        let obs = ObservableSet::new(vec![a.clone(), b.clone()]).unwrap();
        let cert = geometric_lower_bound(&obs, PairStrategy::Given(a, b), 0).unwrap();
        assert_eq!(cert.bound, 3);
    }

    #[test]
    fn random_strategy_recovers_the_split_certificate() {
        let (a, b) = degree3_pair();
        let obs = ObservableSet::new(vec![a, b]).unwrap();
        let cert = geometric_lower_bound(&obs, PairStrategy::Random { draws: 2 }, 17).unwrap();
        // Every slice of this span splits as 1 + 2.
        assert_eq!(cert.bound, 1);
        assert_eq!(cert.factorization.real_factor_degrees, vec![1, 2]);
    }

    #[test]
    fn single_observable_span_is_rejected() {
        let obs = ObservableSet::new(vec![HermitianOperator::identity(3)]).unwrap();
        let err = geometric_lower_bound(&obs, PairStrategy::Random { draws: 1 }, 0);
        assert!(matches!(err, Err(Error::InvalidObservables(_))));
    }

    #[test]
    fn expansion_residual_is_first_order_accurate() {
        for d in 2..=6 {
            let fine = detexpansion_residual(d, 0.3, 1e-5);
            let coarse = detexpansion_residual(d, 0.3, 1e-4);
            assert!(fine <= 1e-6, "side {d}: residual {fine}");
            let ratio = coarse / fine;
            assert!(
                (20.0..500.0).contains(&ratio),
                "side {d}: quadratic shrinkage ratio {ratio}"
            );
        }
    }

    #[test]
    fn origin_value_alternates_sign_with_the_side() {
        // det(Ã(0) + εB) = (−1)^{d+1}·εi/2 + O(ε²).
        let eps = 1e-5;
        for d in 2..=5 {
            let (_, b) = irreducible_pair(d);
            let mut m = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..i {
                    m[(i, j)] = C64::new(1.0, 0.0);
                }
            }
            m += b.mat().scale(eps);
            let det = m.lu().determinant();
            let sign = if d % 2 == 0 { -1.0 } else { 1.0 };
            let leading = IM.scale(sign * 0.5 * eps);
            assert!(
                (det - leading).norm() <= 100.0 * eps * eps,
                "side {d}: {det} vs {leading}"
            );
        }
    }
}
