//! Dense complex matrices and the handful of tensor-algebra operations
//! the rest of the crate is built on.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * `kron(a, b)` places the first factor on the coarse index:
//!   entry `((i_a, i_b), (j_a, j_b))` of the product lives at row
//!   `i_a * rows_b + i_b`, column `j_a * cols_b + j_b`.
//! * `vec_mat` vectorizes by column stacking, so
//!   `vec(A X B) = kron(B^T, A) vec(X)`.
//! * A bipartite space of shape `(d1, d2)` indexes its basis as
//!   `i1 * d2 + i2`, matching `kron`.

use nalgebra::{Complex, DMatrix, DVector};

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Dense complex matrix with dynamic shape.
pub type ComplexMatrix = DMatrix<C64>;

/// Dense complex vector with dynamic length.
pub type ComplexVector = DVector<C64>;

/// The complex unit `i`.
pub const IM: C64 = Complex::new(0.0, 1.0);

/// Real `1` as a complex scalar.
pub const ONE: C64 = Complex::new(1.0, 0.0);

/// Complex zero.
pub const ZERO: C64 = Complex::new(0.0, 0.0);

/// Embeds a real scalar.
#[inline]
pub fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Identity matrix of side `d`.
pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Zero matrix of shape `rows x cols`.
pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Kronecker product with the first factor on the coarse index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: `vec(A)[j * rows + i] = A[i, j]`.
pub fn vec_mat(a: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = a.shape();
    let mut v = ComplexVector::zeros(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            v[j * rows + i] = a[(i, j)];
        }
    }
    v
}

/// Inverse of [`vec_mat`] for a `rows x cols` target shape.
pub fn unvec_mat(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(v.len(), rows * cols, "unvec_mat: length mismatch");
    let mut a = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            a[(i, j)] = v[j * rows + i];
        }
    }
    a
}

/// Row-major flattening `|a>,|j> -> K[a,j]` used to move between a map's
/// Kraus operators and vectors in the output (x) input tensor space.
pub fn flatten_rowmajor(k: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = k.shape();
    let mut v = ComplexVector::zeros(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            v[i * cols + j] = k[(i, j)];
        }
    }
    v
}

/// Inverse of [`flatten_rowmajor`].
pub fn unflatten_rowmajor(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(v.len(), rows * cols, "unflatten_rowmajor: length mismatch");
    let mut a = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            a[(i, j)] = v[i * cols + j];
        }
    }
    a
}

/// Partial trace over one tensor factor of a matrix on a bipartite
/// space of shape `(d1, d2)`. `factor = 0` traces out the first
/// (coarse) factor leaving a `d2 x d2` matrix; `factor = 1` traces out
/// the second leaving `d1 x d1`.
pub fn partial_trace(m: &ComplexMatrix, d1: usize, d2: usize, factor: usize) -> ComplexMatrix {
    assert_eq!(m.nrows(), d1 * d2, "partial_trace: shape mismatch");
    assert_eq!(m.ncols(), d1 * d2, "partial_trace: shape mismatch");
    match factor {
        0 => {
            let mut out = ComplexMatrix::zeros(d2, d2);
            for i2 in 0..d2 {
                for j2 in 0..d2 {
                    let mut s = ZERO;
                    for a in 0..d1 {
                        s += m[(a * d2 + i2, a * d2 + j2)];
                    }
                    out[(i2, j2)] = s;
                }
            }
            out
        }
        1 => {
            let mut out = ComplexMatrix::zeros(d1, d1);
            for i1 in 0..d1 {
                for j1 in 0..d1 {
                    let mut s = ZERO;
                    for b in 0..d2 {
                        s += m[(i1 * d2 + b, j1 * d2 + b)];
                    }
                    out[(i1, j1)] = s;
                }
            }
            out
        }
        _ => panic!("partial_trace: factor must be 0 or 1"),
    }
}

/// Trace of a square matrix.
pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().sum()
}

/// Hilbert-Schmidt inner product `tr(A^dagger B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    debug_assert_eq!(a.shape(), b.shape());
    let mut s = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        s += x.conj() * y;
    }
    s
}

/// Frobenius norm.
pub fn fro_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm, computed from the largest singular value.
pub fn opnorm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values()[0]
}

/// Hermiticity residual `||M - M^dagger||_F`.
pub fn herm_residual(m: &ComplexMatrix) -> f64 {
    fro_norm(&(m - m.adjoint()))
}

/// Hermitian part `(M + M^dagger) / 2`.
pub fn herm_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Skew part mapped to a Hermitian matrix: `i (M - M^dagger) / 2`.
/// For `M = A B` with `A, B` Hermitian this is the Hermitian matrix
/// `i (A B - B A) / 2` used when closing sets under commutators.
pub fn skew_herm_part(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m - m.adjoint();
    d.map(|x| IM * x * 0.5)
}

/// Embeds a block `b` into a `dim x dim` zero matrix with the block's
/// top-left corner at `(row, col)`.
pub fn embed_block(
    b: &ComplexMatrix,
    dim_rows: usize,
    dim_cols: usize,
    row: usize,
    col: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_rows, dim_cols);
    out.view_mut((row, col), b.shape()).copy_from(b);
    out
}

/// Extracts the square sub-block of side `len` whose top-left corner is
/// `(row, col)`.
pub fn extract_block(m: &ComplexMatrix, row: usize, col: usize, len: usize) -> ComplexMatrix {
    m.view((row, col), (len, len)).into_owned()
}

/// Direct sum of square blocks along the diagonal.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.nrows(), b.ncols(), "direct_sum: blocks must be square");
        out.view_mut((off, off), b.shape()).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Isometry `C^len -> C^dim` selecting the coordinate window starting
/// at `offset` (columns are standard basis vectors).
pub fn window_isometry(dim: usize, offset: usize, len: usize) -> ComplexMatrix {
    assert!(offset + len <= dim, "window_isometry: window out of range");
    let mut v = ComplexMatrix::zeros(dim, len);
    for j in 0..len {
        v[(offset + j, j)] = ONE;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(re_: f64, im_: f64) -> C64 {
        Complex::new(re_, im_)
    }

    #[test]
    fn kron_places_first_factor_on_coarse_index() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let b = identity(2);
        let k = kron(&a, &b);
        // A (x) I has entry A[0,1] at rows 0..2, cols 2..4 diagonal.
        assert_eq!(k[(0, 2)], re(2.0));
        assert_eq!(k[(1, 3)], re(2.0));
        assert_eq!(k[(0, 3)], ZERO);
        // I (x) A is block diagonal with copies of A.
        let k2 = kron(&b, &a);
        assert_eq!(k2[(0, 1)], re(2.0));
        assert_eq!(k2[(2, 3)], re(2.0));
        assert_eq!(k2[(0, 3)], ZERO);
    }

    #[test]
    fn vec_mat_is_column_stacking() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let v = vec_mat(&a);
        assert_eq!(v[0], re(1.0)); // column 0: (1, 3)
        assert_eq!(v[1], re(3.0));
        assert_eq!(v[2], re(2.0)); // column 1: (2, 4)
        assert_eq!(v[3], re(4.0));
        let back = unvec_mat(&v, 2, 2);
        assert_eq!(back, a);
    }

    #[test]
    fn vec_of_sandwich_matches_kron_identity() {
        // vec(A X B) = kron(B^T, A) vec(X) for the column-stacking
        // convention; checked on a random-ish fixed instance.
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[small(0.3, 0.1), small(-1.0, 0.5), small(2.0, 0.0), small(0.0, -0.7)],
        );
        let b = ComplexMatrix::from_row_slice(
            2,
            2,
            &[small(1.0, -0.2), small(0.4, 0.0), small(0.0, 1.1), small(-0.3, 0.3)],
        );
        let x = ComplexMatrix::from_row_slice(
            2,
            2,
            &[small(0.9, 0.9), small(0.2, -0.4), small(-0.6, 0.1), small(1.5, 0.0)],
        );
        let lhs = vec_mat(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec_mat(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state_factors() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let b = ComplexMatrix::from_row_slice(2, 2, &[re(5.0), re(6.0), re(7.0), re(8.0)]);
        let k = kron(&a, &b);
        let t0 = partial_trace(&k, 2, 2, 0); // trace out a -> tr(a) * b
        let t1 = partial_trace(&k, 2, 2, 1); // trace out b -> tr(b) * a
        assert!((t0 - b.scale(5.0)).norm() < 1e-12);
        assert!((t1 - a.scale(13.0)).norm() < 1e-12);
    }

    #[test]
    fn embed_and_extract_roundtrip() {
        let b = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let m = embed_block(&b, 5, 5, 2, 2);
        assert_eq!(extract_block(&m, 2, 2, 2), b);
        assert_eq!(m[(0, 0)], ZERO);
    }

    #[test]
    fn direct_sum_layout() {
        let a = identity(1).scale(2.0);
        let b = identity(2).scale(3.0);
        let s = direct_sum(&[a, b]);
        assert_eq!(s.nrows(), 3);
        assert_eq!(s[(0, 0)], re(2.0));
        assert_eq!(s[(1, 1)], re(3.0));
        assert_eq!(s[(2, 2)], re(3.0));
        assert_eq!(s[(0, 1)], ZERO);
    }

    #[test]
    fn skew_part_of_hermitian_product_is_hermitian() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[re(1.0), IM, -IM, re(2.0)]);
        let b = ComplexMatrix::from_row_slice(2, 2, &[re(0.5), re(1.0), re(1.0), re(-0.5)]);
        let s = skew_herm_part(&(&a * &b));
        assert!(herm_residual(&s) < 1e-14);
    }
}
