//! Star-closure of an observable set.
//!
//! The C*-algebra generated by a set of Hermitian operators is, as a
//! real vector space of Hermitian elements, the closure of the span of
//! the generators (plus identity) under the two Hermitian products
//! `(AB + BA)/2` and `i(AB - BA)/2`. This module computes an
//! orthonormal (Hilbert-Schmidt) Hermitian basis of that closure by
//! breadth-first saturation: new product directions are added until the
//! span stabilizes under a rank test.

use crate::error::{Error, Result};
use crate::mat::cmatrix::{herm_part, hs_inner, ComplexMatrix, IM};
use crate::mat::herm::ObservableSet;
use crate::tol::EPS_RANK;

/// Orthonormal Hermitian basis of the algebra generated by a set of
/// observables (always containing the normalized identity).
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    dim: usize,
    elems: Vec<ComplexMatrix>,
}

impl AlgebraBasis {
    /// Ambient matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements (the real dimension of the Hermitian
    /// part of the algebra; the algebra's complex dimension).
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// True iff empty (never for a valid construction).
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// The orthonormal Hermitian basis elements.
    pub fn elems(&self) -> &[ComplexMatrix] {
        &self.elems
    }

    /// Frobenius distance from `x` to the real span of the basis.
    pub fn distance_to_span(&self, x: &ComplexMatrix) -> f64 {
        let mut r = x.clone();
        for g in &self.elems {
            let c = hs_inner(g, &r).re;
            r -= g.scale(c);
        }
        r.norm()
    }
}

/// Projects `cand` against the orthonormal list twice (for numerical
/// orthogonality) and returns the residual with its norm.
fn residual_against(onb: &[ComplexMatrix], cand: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let mut r = cand.clone();
    for _ in 0..2 {
        for g in onb {
            // Real coefficients suffice: the HS inner product of two
            // Hermitian matrices is real.
            let c = hs_inner(g, &r).re;
            r -= g.scale(c);
        }
    }
    let n = r.norm();
    (r, n)
}

/// Computes an orthonormal Hermitian basis of the *-algebra generated
/// by the observable set (with identity).
pub fn star_closure_basis(obs: &ObservableSet) -> Result<AlgebraBasis> {
    let d = obs.dim();
    let cap = d * d;
    let mut onb: Vec<ComplexMatrix> = Vec::new();

    let push_if_new = |onb: &mut Vec<ComplexMatrix>, cand: &ComplexMatrix| -> bool {
        let scale = cand.norm();
        if scale <= EPS_RANK {
            return false;
        }
        let (r, n) = residual_against(onb, cand);
        if n > EPS_RANK * scale.max(1.0) {
            // Re-symmetrize: projections of Hermitian matrices onto
            // Hermitian spans stay Hermitian up to rounding.
            onb.push(herm_part(&r.unscale(n)));
            true
        } else {
            false
        }
    };

    // Seed with the canonicalized observables (identity first).
    for op in obs.ops() {
        push_if_new(&mut onb, op.mat());
    }

    // Breadth-first product saturation. Each round multiplies every
    // current element with the elements added in the previous round.
    let mut fresh_start = 0usize;
    loop {
        let fresh_end = onb.len();
        if fresh_start == fresh_end {
            break;
        }
        let mut added = false;
        for a_idx in 0..fresh_end {
            let b_lo = fresh_start.max(a_idx);
            for b_idx in b_lo..fresh_end {
                let ab = &onb[a_idx] * &onb[b_idx];
                let ba = &onb[b_idx] * &onb[a_idx];
                let sym = (&ab + &ba).unscale(2.0);
                let skew = (&ab - &ba).scale(0.5) * IM;
                if push_if_new(&mut onb, &sym) {
                    added = true;
                }
                if push_if_new(&mut onb, &skew) {
                    added = true;
                }
                if onb.len() > cap {
                    return Err(Error::Inconsistent(format!(
                        "algebra closure exceeded ambient dimension {cap}: span growth did not stabilize"
                    )));
                }
            }
        }
        fresh_start = fresh_end;
        if !added {
            break;
        }
    }

    Ok(AlgebraBasis { dim: d, elems: onb })
}
