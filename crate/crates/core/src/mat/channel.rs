//! Quantum channels in Kraus and Choi form.
//!
//! A channel here is a completely positive map `M_D -> M_d (x) C^n`
//! given by Kraus operators `K_i` of shape `(d*n) x D`, acting as
//! `rho -> sum_i K_i rho K_i^dagger`. The classical register `C^n` is
//! folded into the output space as `n` consecutive diagonal blocks of
//! side `d` (coarse index = register), so a channel with a classical
//! register is an ordinary channel whose outputs happen to be block
//! diagonal in that layout.
//!
//! Trace preservation is `sum_i K_i^dagger K_i = I`; the dual
//! (Heisenberg-picture) map applies the adjoint Kraus family and is
//! unital instead. The Choi matrix follows the maximally-entangled-
//! state normalization `tau = (T (x) id)(|Omega><Omega|)` with
//! `|Omega> = D^{-1/2} sum_j |j>|j>`, so `tau` has unit trace for
//! trace-preserving `T`, and `T` is completely positive iff `tau` is
//! positive semidefinite.

use super::cmatrix::{
    flatten_rowmajor, identity, opnorm, partial_trace, re, unflatten_rowmajor, ComplexMatrix,
};
use super::linalg::eigh;
use crate::error::{Error, Result};
use crate::tol::{EPS_PSD, EPS_RANK, EPS_TP};

/// A completely positive map with optional classical output register.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    classical_register: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

impl QuantumChannel {
    /// Builds a channel from Kraus operators and validates trace
    /// preservation within [`EPS_TP`].
    pub fn cptp(
        dim_in: usize,
        dim_out: usize,
        classical_register: usize,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let ch = Self::cp_from_kraus(dim_in, dim_out, classical_register, kraus)?;
        let residual = ch.tp_residual();
        if residual > EPS_TP {
            return Err(Error::NotTracePreserving {
                residual,
                tol: EPS_TP,
            });
        }
        Ok(ch)
    }

    /// Builds a completely positive (not necessarily trace-preserving)
    /// map from Kraus operators.
    pub fn cp_from_kraus(
        dim_in: usize,
        dim_out: usize,
        classical_register: usize,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidObservables(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        let out_total = dim_out * classical_register;
        for k in &kraus {
            if k.shape() != (out_total, dim_in) {
                return Err(Error::dims(
                    format!("{out_total}x{dim_in}"),
                    format!("{}x{}", k.nrows(), k.ncols()),
                    "Kraus operator shape",
                ));
            }
        }
        let choi = choi_from_kraus(dim_in, &kraus);
        Ok(Self {
            dim_in,
            dim_out,
            classical_register,
            kraus,
            choi,
        })
    }

    /// Builds a map directly from a Choi matrix (side
    /// `dim_out * classical_register * dim_in`). When the Choi matrix
    /// is positive semidefinite within [`EPS_PSD`], a Kraus family is
    /// recovered from its spectral decomposition; otherwise the map is
    /// kept in Choi-only form (it is then not completely positive, and
    /// [`QuantumChannel::kraus`] is empty).
    pub fn from_choi(
        dim_in: usize,
        dim_out: usize,
        classical_register: usize,
        choi: ComplexMatrix,
    ) -> Result<Self> {
        let out_total = dim_out * classical_register;
        let side = out_total * dim_in;
        if choi.shape() != (side, side) {
            return Err(Error::dims(
                format!("{side}x{side}"),
                format!("{}x{}", choi.nrows(), choi.ncols()),
                "Choi matrix shape",
            ));
        }
        let (vals, vecs) = eigh(&choi);
        let scale = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
        let mut kraus = Vec::new();
        if vals.first().copied().unwrap_or(0.0) >= -EPS_PSD * scale {
            for (idx, &lam) in vals.iter().enumerate() {
                if lam > EPS_RANK * scale {
                    let w = vecs.column(idx).into_owned();
                    let k = unflatten_rowmajor(&w, out_total, dim_in)
                        .scale((lam * dim_in as f64).sqrt());
                    kraus.push(k);
                }
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            classical_register,
            kraus,
            choi,
        })
    }

    /// Input dimension `D`.
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    /// Quantum output dimension `d`.
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Classical register size `n` (1 for plain channels).
    pub fn classical_register(&self) -> usize {
        self.classical_register
    }

    /// Total output dimension `d * n`.
    pub fn dim_out_total(&self) -> usize {
        self.dim_out * self.classical_register
    }

    /// Kraus operators (empty when the map was built from a non-PSD
    /// Choi matrix and therefore is not completely positive).
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// The Choi matrix `(T (x) id)(|Omega><Omega|)`.
    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Applies the map to a matrix on the input space.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            x.shape(),
            (self.dim_in, self.dim_in),
            "apply: input shape mismatch"
        );
        if self.kraus.is_empty() {
            return self.apply_via_choi(x);
        }
        let out = self.dim_out_total();
        let mut acc = ComplexMatrix::zeros(out, out);
        for k in &self.kraus {
            acc += k * x * k.adjoint();
        }
        acc
    }

    /// Applies the map through its Choi matrix:
    /// `T(X) = D tr_2[tau (I (x) X^T)]`. Agrees with Kraus application
    /// for completely positive maps; used directly for Choi-only maps.
    pub fn apply_via_choi(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let out_total = self.dim_out_total();
        let d = self.dim_in;
        let mut res = ComplexMatrix::zeros(out_total, out_total);
        // (tau (I (x) X^T)) restricted and partially traced, written as
        // explicit index sums to avoid building the Kronecker factor.
        for a in 0..out_total {
            for b in 0..out_total {
                let mut s = re(0.0);
                for j in 0..d {
                    for k in 0..d {
                        // tau[(a, j), (b, k)] * (X^T)[k, j] = tau[..] * X[j, k]
                        s += self.choi[(a * d + j, b * d + k)] * x[(j, k)];
                    }
                }
                res[(a, b)] = s * re(d as f64);
            }
        }
        res
    }

    /// The dual (Heisenberg-picture) map, given by the adjoint Kraus
    /// family: for a trace-preserving channel the dual is unital. The
    /// classical register of the output moves to the input side, so the
    /// dual of `M_D -> M_d (x) C^n` is represented as a map
    /// `M_{d n} -> M_D` with trivial register.
    pub fn dual(&self) -> Result<QuantumChannel> {
        if self.kraus.is_empty() {
            return Err(Error::Inconsistent(
                "dual of a Choi-only (non-CP) map is not represented".into(),
            ));
        }
        let kraus: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.adjoint()).collect();
        QuantumChannel::cp_from_kraus(self.dim_out_total(), self.dim_in, 1, kraus)
    }

    /// Residual of the trace-preservation condition in operator norm,
    /// `||sum_i K_i^dagger K_i - I||`, computed from the Choi matrix
    /// when no Kraus family is available
    /// (`||D tr_out(tau) - I||` in that case).
    pub fn tp_residual(&self) -> f64 {
        if self.kraus.is_empty() {
            let t = partial_trace(&self.choi, self.dim_out_total(), self.dim_in, 0);
            return opnorm(&(t.scale(self.dim_in as f64) - identity(self.dim_in)));
        }
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        opnorm(&(s - identity(self.dim_in)))
    }

    /// Residual of unitality in operator norm, `||T(I) - I||`.
    pub fn unital_residual(&self) -> f64 {
        let t = self.apply(&identity(self.dim_in));
        opnorm(&(t - identity(self.dim_out_total())))
    }
}

/// Choi matrix of the Kraus family: with the row-major flattening
/// `w(K)[(a, j)] = K[a, j]`, the Choi matrix is
/// `(1/D) sum_i w(K_i) w(K_i)^dagger`.
pub fn choi_from_kraus(dim_in: usize, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let out_total = kraus[0].nrows();
    let side = out_total * dim_in;
    let mut tau = ComplexMatrix::zeros(side, side);
    for k in kraus {
        let w = flatten_rowmajor(k);
        tau += &w * w.adjoint();
    }
    tau.unscale(dim_in as f64)
}

/// Diagnostics from a complete-positivity / trace-preservation check.
#[derive(Debug, Clone, Copy)]
pub struct CptpDiagnostics {
    /// Smallest eigenvalue of the Choi matrix (negative values witness
    /// failure of complete positivity).
    pub choi_min_eig: f64,
    /// Trace-preservation residual.
    pub tp_residual: f64,
}

/// Checks whether a map is a channel: completely positive (Choi matrix
/// PSD within `psd_tol`) and trace preserving (residual within
/// `tp_tol`). Returns the verdict together with both diagnostics.
pub fn is_cptp(ch: &QuantumChannel, psd_tol: f64, tp_tol: f64) -> (bool, CptpDiagnostics) {
    let choi_min_eig = eigh(ch.choi()).0.first().copied().unwrap_or(0.0);
    let tp_residual = ch.tp_residual();
    let ok = choi_min_eig >= -psd_tol && tp_residual <= tp_tol;
    (
        ok,
        CptpDiagnostics {
            choi_min_eig,
            tp_residual,
        },
    )
}

/// Composition `second . first` of two CP maps in Kraus form (all pairs
/// of Kraus products). The classical register of the result is taken
/// from `second`.
pub fn compose(second: &QuantumChannel, first: &QuantumChannel) -> Result<QuantumChannel> {
    if first.dim_out_total() != second.dim_in() {
        return Err(Error::dims(
            format!("{}", first.dim_out_total()),
            format!("{}", second.dim_in()),
            "channel composition: inner dimensions",
        ));
    }
    if first.kraus.is_empty() || second.kraus.is_empty() {
        return Err(Error::Inconsistent(
            "composition requires Kraus form on both maps".into(),
        ));
    }
    let mut kraus = Vec::with_capacity(first.kraus.len() * second.kraus.len());
    for a in &second.kraus {
        for b in &first.kraus {
            kraus.push(a * b);
        }
    }
    QuantumChannel::cp_from_kraus(
        first.dim_in(),
        second.dim_out(),
        second.classical_register(),
        kraus,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::cmatrix::{hs_inner, trace, zeros, ONE};
    use crate::mat::random::{random_density, random_hermitian, random_kraus_family, SeedSplitter};

    fn identity_channel(d: usize) -> QuantumChannel {
        QuantumChannel::cptp(d, d, 1, vec![identity(d)]).unwrap()
    }

    fn depolarizing(d: usize) -> QuantumChannel {
        // rho -> tr(rho) I / d via matrix-unit Kraus family e_ij / sqrt(d).
        let mut kraus = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut k = zeros(d, d);
                k[(i, j)] = ONE;
                kraus.push(k.unscale((d as f64).sqrt()));
            }
        }
        QuantumChannel::cptp(d, d, 1, kraus).unwrap()
    }

    #[test]
    fn identity_channel_choi_is_pure_maximally_entangled() {
        let ch = identity_channel(3);
        let tau = ch.choi();
        // Rank one, unit trace.
        assert!((trace(tau).re - 1.0).abs() < 1e-12);
        let (vals, _) = eigh(tau);
        assert!(vals[..8].iter().all(|&v| v.abs() < 1e-12));
        assert!((vals[8] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_choi_is_product_of_maximally_mixed() {
        let d = 3;
        let ch = depolarizing(d);
        let expect = identity(d * d).unscale((d * d) as f64);
        assert!((ch.choi() - expect).norm() < 1e-12);
    }

    #[test]
    fn sandwich_map_on_all_ones_matrix() {
        // The conjugation A -> P A P by the projection P = diag(1, 0)
        // keeps exactly the (0,0) entry of the all-ones matrix.
        let mut p = zeros(2, 2);
        p[(0, 0)] = ONE;
        let theta = QuantumChannel::cp_from_kraus(2, 2, 1, vec![p]).unwrap();
        let ones = ComplexMatrix::from_element(2, 2, ONE);
        let out = theta.apply(&ones);
        assert!((out[(0, 0)] - ONE).norm() < 1e-14);
        assert!(out[(0, 1)].norm() < 1e-14);
        assert!(out[(1, 0)].norm() < 1e-14);
        assert!(out[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn tp_residual_of_doubled_identity() {
        // Single Kraus operator 2 I on M_2: sum K^dagger K = 4 I, and
        // ||4 I - I|| = 3 in operator norm.
        let ch = QuantumChannel::cp_from_kraus(2, 2, 1, vec![identity(2).scale(2.0)]).unwrap();
        let (ok, diag) = is_cptp(&ch, EPS_PSD, EPS_TP);
        assert!(!ok);
        assert!((diag.tp_residual - 3.0).abs() < 1e-12);
        assert!(diag.choi_min_eig > -1e-12);
    }

    #[test]
    fn transpose_map_choi_eigenvalue() {
        // The transpose map on M_D has Choi matrix SWAP / D with
        // minimal eigenvalue -1/D: completely positive it is not.
        let d = 3;
        let side = d * d;
        let mut tau = zeros(side, side);
        // T(E_jk) = E_kj; tau[(a,j),(b,k)] = (1/D) T(E_jk)[a,b] ... build
        // directly: tau = (1/D) sum_jk E_kj (x) E_jk.
        for j in 0..d {
            for k in 0..d {
                // E_kj (x) E_jk contributes at ((k, j), (j, k)).
                tau[(k * d + j, j * d + k)] += re(1.0 / d as f64);
            }
        }
        let ch = QuantumChannel::from_choi(d, d, 1, tau).unwrap();
        let (ok, diag) = is_cptp(&ch, EPS_PSD, EPS_TP);
        assert!(!ok);
        assert!((diag.choi_min_eig + 1.0 / d as f64).abs() < 1e-12);
        // It is trace preserving.
        assert!(diag.tp_residual < 1e-12);
        // And it acts as the transpose.
        let x = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                re(1.0),
                re(2.0),
                re(3.0),
                re(4.0),
                re(5.0),
                re(6.0),
                re(7.0),
                re(8.0),
                re(9.0),
            ],
        );
        assert!((ch.apply(&x) - x.transpose()).norm() < 1e-12);
    }

    #[test]
    fn dual_satisfies_adjoint_identity_on_random_pairs() {
        let seeds = SeedSplitter::new(20260818);
        let mut rng = seeds.stream("dual-adjoint");
        for trial in 0..50 {
            let (din, dout) = ((trial % 3) + 2, ((trial / 3) % 3) + 2);
            let kraus = random_kraus_family(din, dout, 2, &mut rng);
            let ch = QuantumChannel::cptp(din, dout, 1, kraus).unwrap();
            let dual = ch.dual().unwrap();
            let rho = random_density(din, &mut rng);
            let e = random_hermitian(dout, &mut rng);
            let lhs = hs_inner(&ch.apply(&rho), &e);
            let rhs = hs_inner(&rho, &dual.apply(&e));
            assert!(
                (lhs - rhs).norm() < 1e-10,
                "adjoint identity violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn dual_of_dual_restores_action() {
        let seeds = SeedSplitter::new(99);
        let mut rng = seeds.stream("dual-dual");
        let kraus = random_kraus_family(3, 4, 3, &mut rng);
        let ch = QuantumChannel::cptp(3, 4, 1, kraus).unwrap();
        let dd = ch.dual().unwrap().dual().unwrap();
        let x = random_hermitian(3, &mut rng);
        assert!((ch.apply(&x) - dd.apply(&x)).norm() < 1e-12);
    }

    #[test]
    fn choi_application_matches_kraus_application() {
        let seeds = SeedSplitter::new(5);
        let mut rng = seeds.stream("choi-apply");
        let kraus = random_kraus_family(3, 2, 2, &mut rng);
        let ch = QuantumChannel::cptp(3, 2, 1, kraus).unwrap();
        let x = random_hermitian(3, &mut rng);
        let via_kraus = ch.apply(&x);
        let via_choi = ch.apply_via_choi(&x);
        assert!((via_kraus - via_choi).norm() < 1e-10);
    }

    #[test]
    fn choi_roundtrip_through_spectral_kraus() {
        let seeds = SeedSplitter::new(6);
        let mut rng = seeds.stream("choi-roundtrip");
        let kraus = random_kraus_family(2, 3, 2, &mut rng);
        let ch = QuantumChannel::cptp(2, 3, 1, kraus).unwrap();
        let rebuilt = QuantumChannel::from_choi(2, 3, 1, ch.choi().clone()).unwrap();
        assert!(!rebuilt.kraus().is_empty());
        let x = random_hermitian(2, &mut rng);
        assert!((ch.apply(&x) - rebuilt.apply(&x)).norm() < 1e-10);
    }

    #[test]
    fn random_channel_choi_is_psd_and_unit_trace() {
        let seeds = SeedSplitter::new(11);
        let mut rng = seeds.stream("psd");
        let kraus = random_kraus_family(4, 3, 2, &mut rng);
        let ch = QuantumChannel::cptp(4, 3, 1, kraus).unwrap();
        let (vals, _) = eigh(ch.choi());
        assert!(vals[0] > -1e-10);
        assert!((trace(ch.choi()).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let seeds = SeedSplitter::new(13);
        let mut rng = seeds.stream("compose");
        let k1 = random_kraus_family(3, 2, 2, &mut rng);
        let k2 = random_kraus_family(2, 4, 2, &mut rng);
        let first = QuantumChannel::cptp(3, 2, 1, k1).unwrap();
        let second = QuantumChannel::cptp(2, 4, 1, k2).unwrap();
        let comp = compose(&second, &first).unwrap();
        let x = random_hermitian(3, &mut rng);
        assert!((comp.apply(&x) - second.apply(&first.apply(&x))).norm() < 1e-10);
        assert!(comp.tp_residual() < 1e-9);
    }
}
