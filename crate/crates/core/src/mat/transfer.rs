//! Transfer (superoperator) matrices and ergodic projections.
//!
//! The transfer matrix of a map `T: M_in -> M_out` is the
//! `out^2 x in^2` matrix `T_hat` with `vec(T(X)) = T_hat vec(X)` in the
//! column-stacking convention; for a Kraus family this is
//! `sum_i conj(K_i) (x) K_i`.
//!
//! For a unital positive map on one space, every eigenvalue lies in the
//! closed unit disk and the Jordan blocks of eigenvalues on the unit
//! circle are trivial. The Cesaro mean `lim_N (1/N) sum_{k<=N} T^k`
//! therefore exists and equals the spectral projection onto the
//! eigenvalue-1 eigenspace. That projection is computed here directly
//! from the right and left kernels of `T_hat - I`: with columns of `R`
//! spanning `ker(T_hat - I)` and columns of `L` spanning
//! `ker(T_hat^dagger - I)`, the projection is
//! `P = R (L^dagger R)^{-1} L^dagger`, which is idempotent, fixes
//! exactly the fixed points of `T_hat`, and absorbs `T_hat` on either
//! side.

use super::channel::QuantumChannel;
use super::cmatrix::{kron, unvec_mat, vec_mat, ComplexMatrix, ComplexVector};
use super::linalg::kernel_basis;
use crate::error::{Error, Result};
use crate::tol::EPS_CLUSTER;

/// Matrix representation of a linear map on matrix space.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    dim_in: usize,
    dim_out: usize,
    mat: ComplexMatrix,
}

impl TransferMatrix {
    /// Wraps an `out^2 x in^2` matrix.
    pub fn new(dim_in: usize, dim_out: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::dims(
                format!("{}x{}", dim_out * dim_out, dim_in * dim_in),
                format!("{}x{}", mat.nrows(), mat.ncols()),
                "transfer matrix shape",
            ));
        }
        Ok(Self {
            dim_in,
            dim_out,
            mat,
        })
    }

    /// Transfer matrix of a channel's Kraus family,
    /// `sum_i conj(K_i) (x) K_i`.
    pub fn from_channel(ch: &QuantumChannel) -> Result<Self> {
        if ch.kraus().is_empty() {
            return Err(Error::Inconsistent(
                "transfer matrix of a Choi-only map is not represented".into(),
            ));
        }
        let din = ch.dim_in();
        let dout = ch.dim_out_total();
        let mut m = ComplexMatrix::zeros(dout * dout, din * din);
        for k in ch.kraus() {
            m += kron(&k.map(|x| x.conj()), k);
        }
        Ok(Self {
            dim_in: din,
            dim_out: dout,
            mat: m,
        })
    }

    /// Input-side matrix dimension.
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    /// Output-side matrix dimension.
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// The underlying superoperator matrix.
    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Applies the represented map to a matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            x.shape(),
            (self.dim_in, self.dim_in),
            "transfer apply: input shape"
        );
        let v: ComplexVector = &self.mat * vec_mat(x);
        unvec_mat(&v, self.dim_out, self.dim_out)
    }

    /// Composition `self . other`.
    pub fn compose(&self, other: &TransferMatrix) -> Result<TransferMatrix> {
        if other.dim_out != self.dim_in {
            return Err(Error::dims(
                format!("{}", self.dim_in),
                format!("{}", other.dim_out),
                "transfer composition: inner dimensions",
            ));
        }
        TransferMatrix::new(other.dim_in, self.dim_out, &self.mat * &other.mat)
    }

    /// Estimate of the spectral radius from repeated squaring:
    /// `(||T^m||_F / sqrt(rows))^(1/m)` for `m = 2^10`, with the
    /// Frobenius dimension factor divided out so that power-bounded
    /// maps score close to their true radius. The iterate is kept at
    /// unit norm and the scale is accumulated in log space to dodge
    /// overflow for strongly expanding maps.
    pub fn spectral_radius_estimate(&self) -> f64 {
        assert_eq!(self.dim_in, self.dim_out, "spectral radius: square maps only");
        let rows = self.mat.nrows() as f64;
        let mut p = self.mat.clone();
        let mut log_scale = p.norm().max(1e-300).ln();
        p = p.unscale(p.norm().max(1e-300));
        let mut exponent = 1.0f64;
        for _ in 0..10 {
            p = &p * &p;
            exponent *= 2.0;
            let n = p.norm().max(1e-300);
            log_scale = 2.0 * log_scale + n.ln();
            p = p.unscale(n);
        }
        ((log_scale - 0.5 * rows.ln()) / exponent).exp()
    }
}

/// Spectral projection onto the eigenvalue-1 eigenspace of a square
/// transfer matrix (the limit of Cesaro averages of its powers).
///
/// Preconditions: the represented map should be unital and positive, so
/// that its spectral radius is 1 and peripheral Jordan blocks are
/// trivial; a spectral radius materially exceeding 1 is rejected, and a
/// non-trivial Jordan block at eigenvalue 1 surfaces as a singular
/// pairing matrix.
pub fn cesaro_mean(tm: &TransferMatrix) -> Result<TransferMatrix> {
    if tm.dim_in != tm.dim_out {
        return Err(Error::dims(
            format!("{0}x{0}", tm.dim_in),
            format!("{}x{}", tm.dim_out, tm.dim_in),
            "Cesaro mean: square maps only",
        ));
    }
    let radius = tm.spectral_radius_estimate();
    if radius > 1.0 + 1e-2 {
        return Err(Error::SpectralPrecondition(format!(
            "spectral radius estimate {radius:.6} materially exceeds 1"
        )));
    }
    let n = tm.mat.nrows();
    let id = ComplexMatrix::identity(n, n);
    let a = &tm.mat - &id;
    // Right and left fixed spaces. Eigenvalues within the clustering
    // radius of 1 are treated as exactly 1 through the singular-value
    // threshold on T - I.
    let r = kernel_basis(&a, EPS_CLUSTER);
    let l = kernel_basis(&a.adjoint(), EPS_CLUSTER);
    if r.ncols() != l.ncols() {
        return Err(Error::Inconsistent(format!(
            "fixed-space dimensions disagree: right {} vs left {}",
            r.ncols(),
            l.ncols()
        )));
    }
    if r.ncols() == 0 {
        return Err(Error::SpectralPrecondition(
            "no fixed points: eigenvalue 1 absent (map is not unital)".into(),
        ));
    }
    let pairing = l.adjoint() * &r;
    let lu = pairing.clone().lu();
    let det_mag = lu.determinant().norm();
    if det_mag < 1e-12 {
        return Err(Error::SpectralPrecondition(format!(
            "degenerate left/right pairing (|det| = {det_mag:.3e}): non-trivial Jordan structure at eigenvalue 1"
        )));
    }
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Inconsistent("pairing inversion failed".into()))?;
    let proj = &r * inv * l.adjoint();
    TransferMatrix::new(tm.dim_in, tm.dim_out, proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::cmatrix::{identity, re, IM};
    use crate::mat::random::{random_hermitian, random_kraus_family, SeedSplitter};

    fn unitary_conjugation(u: &ComplexMatrix) -> TransferMatrix {
        let d = u.nrows();
        let ch = QuantumChannel::cptp(d, d, 1, vec![u.clone()]).unwrap();
        TransferMatrix::from_channel(&ch).unwrap()
    }

    #[test]
    fn transfer_action_matches_channel_action() {
        let seeds = SeedSplitter::new(3);
        let mut rng = seeds.stream("transfer");
        let kraus = random_kraus_family(3, 2, 2, &mut rng);
        let ch = QuantumChannel::cptp(3, 2, 1, kraus).unwrap();
        let tm = TransferMatrix::from_channel(&ch).unwrap();
        let x = random_hermitian(3, &mut rng);
        assert!((tm.apply(&x) - ch.apply(&x)).norm() < 1e-12);
    }

    #[test]
    fn cesaro_of_identity_is_identity() {
        let tm = unitary_conjugation(&identity(2));
        let c = cesaro_mean(&tm).unwrap();
        assert!((c.mat() - tm.mat()).norm() < 1e-10);
    }

    #[test]
    fn cesaro_of_finite_order_unitary_matches_power_average() {
        // U of order 3: conjugation permutes phases; the Cesaro mean is
        // exactly the average of the first three powers.
        let w = re((2.0 * std::f64::consts::PI / 3.0).cos())
            + IM * (2.0 * std::f64::consts::PI / 3.0).sin();
        let mut u = ComplexMatrix::zeros(3, 3);
        u[(0, 0)] = re(1.0);
        u[(1, 1)] = w;
        u[(2, 2)] = w * w;
        let tm = unitary_conjugation(&u);
        let c = cesaro_mean(&tm).unwrap();
        let t1 = tm.mat();
        let t2 = t1 * t1;
        let t3 = &t2 * t1;
        let avg = (t1 + &t2 + &t3).unscale(3.0);
        assert!((c.mat() - avg).norm() < 1e-9);
    }

    #[test]
    fn cesaro_is_idempotent_and_absorbing() {
        let seeds = SeedSplitter::new(17);
        let mut rng = seeds.stream("cesaro");
        // Unital map: dual of a random CPTP map.
        let kraus = random_kraus_family(3, 3, 2, &mut rng);
        let ch = QuantumChannel::cptp(3, 3, 1, kraus).unwrap();
        let dual = ch.dual().unwrap();
        let tm = TransferMatrix::from_channel(&dual).unwrap();
        let c = cesaro_mean(&tm).unwrap();
        let p = c.mat();
        assert!((p * p - p).norm() < 1e-8, "not idempotent");
        assert!((tm.mat() * p - p).norm() < 1e-8, "not absorbing on the left");
        assert!((p * tm.mat() - p).norm() < 1e-8, "not absorbing on the right");
    }

    #[test]
    fn cesaro_of_depolarizing_projects_onto_identity_span() {
        // The dual of the completely depolarizing channel is
        // E -> tr(E) I / D; its transfer matrix is already the rank-one
        // projection onto span{I}, and the Cesaro mean reproduces it.
        let d = 2;
        let mut kraus = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = re(1.0 / (d as f64).sqrt());
                kraus.push(k);
            }
        }
        let ch = QuantumChannel::cptp(d, d, 1, kraus).unwrap();
        let dual = ch.dual().unwrap();
        let tm = TransferMatrix::from_channel(&dual).unwrap();
        let c = cesaro_mean(&tm).unwrap();
        assert!((c.mat() - tm.mat()).norm() < 1e-9);
        // Rank one.
        assert_eq!(crate::mat::linalg::rank(c.mat(), 1e-9), 1);
    }

    #[test]
    fn cesaro_rejects_expanding_map() {
        let tm = TransferMatrix::new(2, 2, identity(4).scale(1.5)).unwrap();
        assert!(matches!(
            cesaro_mean(&tm),
            Err(Error::SpectralPrecondition(_))
        ));
    }
}
