//! Shared numerical linear algebra helpers.
//!
//! The Hermitian eigendecomposition is the single trusted spectral
//! primitive: every spectral decision in the crate is routed through
//! [`eigh`] (plus SVD for rank and kernel questions) so that tolerance
//! behavior is uniform.

use nalgebra::DVector;

use super::cmatrix::{re, ComplexMatrix, ComplexVector, C64};
use crate::error::{Error, Result};

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns,
/// so `m = V diag(lambda) V^dagger`. The input is symmetrized before
/// decomposition; callers are expected to have validated Hermiticity at
/// whatever tolerance their contract requires.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert_eq!(m.nrows(), m.ncols(), "eigh: matrix must be square");
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    eigh(m).0[0]
}

/// Groups sorted values into clusters: a new cluster starts whenever the
/// gap to the previous value exceeds `radius`. Returns half-open index
/// ranges into the sorted input.
pub fn cluster_sorted(values: &[f64], radius: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > radius {
            out.push((start, i));
            start = i;
        }
    }
    if !values.is_empty() {
        out.push((start, values.len()));
    }
    out
}

/// Orthonormal basis of the kernel of `m`, using singular values below
/// `rel_tol * s_max` as the zero threshold. Columns of the returned
/// matrix span the (right) null space; the matrix has zero columns when
/// the kernel is trivial.
pub fn kernel_basis(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd: v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let thresh = if smax > 0.0 { rel_tol * smax } else { rel_tol };
    let mut cols: Vec<ComplexVector> = Vec::new();
    // Rows of v_t beyond the numerical rank span the kernel; nalgebra
    // returns min(nrows, ncols) singular values, so coordinates past
    // that count are kernel directions automatically.
    let k = svd.singular_values.len();
    for i in 0..n {
        let is_null = i >= k || svd.singular_values[i] <= thresh;
        if is_null && i < vt.nrows() {
            cols.push(vt.row(i).adjoint());
        }
    }
    from_columns(n, &cols)
}

/// Numerical rank of `m` at relative threshold `rel_tol`.
pub fn rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Builds a matrix from column vectors (empty input gives a `rows x 0`
/// matrix).
pub fn from_columns(rows: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        assert_eq!(c.len(), rows, "from_columns: length mismatch");
        m.set_column(j, c);
    }
    m
}

/// Unitary polar factor of a (numerically full-rank) matrix, via SVD:
/// for `m = U S V^dagger` returns `U V^dagger`, the closest isometry in
/// Frobenius norm.
pub fn polar_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd: u requested");
    let vt = svd.v_t.as_ref().expect("svd: v_t requested");
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if !(smin > 1e-13 * smax.max(1e-300)) {
        return Err(Error::Inconsistent(format!(
            "polar factor of a rank-deficient matrix (s_min {smin:.3e}, s_max {smax:.3e})"
        )));
    }
    Ok(u * vt)
}

/// Orthonormalizes the columns of `m` by modified Gram-Schmidt, dropping
/// columns whose residual after projection falls below `rel_tol` times
/// their original norm. Returns the kept orthonormal columns.
pub fn gram_schmidt(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let mut kept: Vec<ComplexVector> = Vec::new();
    for j in 0..m.ncols() {
        let mut v: ComplexVector = m.column(j).into_owned();
        let orig = v.norm();
        if orig == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for u in &kept {
                let c: C64 = u.dotc(&v);
                v -= u * c;
            }
        }
        if v.norm() > rel_tol * orig {
            let n = v.norm();
            kept.push(v.unscale(n));
        }
    }
    from_columns(m.nrows(), &kept)
}

/// Least-squares solve `A x = b` through the SVD pseudoinverse with
/// relative cutoff `rel_tol`; also returns the residual `||A x - b||`.
pub fn lstsq(a: &ComplexMatrix, b: &ComplexVector, rel_tol: f64) -> (ComplexVector, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, rel_tol)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let res = (a * &x - b).norm();
    (x, res)
}

/// Clips a Hermitian matrix to the PSD cone by zeroing negative
/// eigenvalues. Returns the clipped matrix and the most negative
/// eigenvalue encountered (0 when already PSD).
pub fn psd_clip(m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let (vals, vecs) = eigh(m);
    let min = vals.first().copied().unwrap_or(0.0).min(0.0);
    let clipped = DVector::from_iterator(vals.len(), vals.iter().map(|&v| re(v.max(0.0))));
    let out = &vecs * ComplexMatrix::from_diagonal(&clipped) * vecs.adjoint();
    ((&out + out.adjoint()).scale(0.5), min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::cmatrix::{identity, IM};

    #[test]
    fn eigh_sorts_ascending_and_reconstructs() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[re(2.0), IM * 0.5, -IM * 0.5, re(-1.0)],
        );
        let (vals, vecs) = eigh(&m);
        assert!(vals[0] < vals[1]);
        let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&v| re(v))));
        let recon = &vecs * d * vecs.adjoint();
        assert!((recon - m).norm() < 1e-12);
    }

    #[test]
    fn cluster_sorted_splits_on_gaps() {
        let v = [0.0, 1e-9, 1.0, 1.0 + 1e-9, 1.0 + 2e-9, 3.0];
        let c = cluster_sorted(&v, 1e-6);
        assert_eq!(c, vec![(0, 2), (2, 5), (5, 6)]);
    }

    #[test]
    fn kernel_of_projection_complement() {
        // P = diag(1, 0, 0): kernel of P is 2-dimensional.
        let mut p = ComplexMatrix::zeros(3, 3);
        p[(0, 0)] = re(1.0);
        let k = kernel_basis(&p, 1e-10);
        assert_eq!(k.ncols(), 2);
        assert!((p * &k).norm() < 1e-12);
        // Columns orthonormal.
        assert!((k.adjoint() * &k - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn polar_factor_of_scaled_unitary() {
        let u = ComplexMatrix::from_row_slice(
            2,
            2,
            &[re(0.6), re(0.8), re(-0.8), re(0.6)],
        );
        let m = u.scale(3.0);
        let q = polar_factor(&m).unwrap();
        assert!((q - u).norm() < 1e-12);
    }

    #[test]
    fn psd_clip_zeroes_negative_part() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-2.0)]);
        let (c, min) = psd_clip(&m);
        assert!((min + 2.0).abs() < 1e-12);
        assert!(min_eig(&c) > -1e-12);
        assert!((c[(0, 0)] - re(1.0)).norm() < 1e-12);
        assert!(c[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = ComplexMatrix::from_row_slice(
            2,
            3,
            &[re(1.0), re(2.0), re(1.0), re(0.0), re(0.0), re(1.0)],
        );
        let q = gram_schmidt(&m, 1e-9);
        assert_eq!(q.ncols(), 2);
        assert!((q.adjoint() * &q - identity(2)).norm() < 1e-12);
    }
}
