//! Dense polynomial utilities used by the determinantal-curve analysis.
//!
//! Univariate polynomials are coefficient vectors with entry `k` holding
//! the coefficient of `x^k`; bivariate polynomials are tables `c[a][b]`
//! holding the coefficient of `x^a z^b`. All bivariate tables here have
//! real entries (determinants of Hermitian pencils are real on the real
//! plane), while evaluation points may be complex.
//!
//! Root finding goes through eigenvalue problems: monomial coefficient
//! vectors use the companion matrix, Chebyshev coefficient vectors use
//! the colleague matrix. Interpolation on Chebyshev points of the first
//! kind recovers Chebyshev coefficients through the discrete cosine
//! transform, which stays well conditioned at degrees where a monomial
//! Vandermonde solve would not.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mat::cmatrix::C64;

/// Evaluates `Σ coeffs[k] x^k` by Horner's rule.
pub fn horner(coeffs: &[C64], x: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Evaluates a real-coefficient polynomial at a real point.
pub fn horner_real(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Coefficient vector of the derivative.
pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    if coeffs.len() <= 1 {
        return vec![C64::new(0.0, 0.0)];
    }
    (1..coeffs.len())
        .map(|k| coeffs[k] * C64::new(k as f64, 0.0))
        .collect()
}

/// Univariate slice `u[a] = Σ_b c[a][b] z^b` of a bivariate table.
pub fn univariate_at(table: &[Vec<f64>], z: C64) -> Vec<C64> {
    table
        .iter()
        .map(|row| {
            let mut acc = C64::new(0.0, 0.0);
            for &c in row.iter().rev() {
                acc = acc * z + C64::new(c, 0.0);
            }
            acc
        })
        .collect()
}

/// Real coefficients of the slice `x ↦ p(x, z)` at real `z`.
pub fn univariate_real(table: &[Vec<f64>], z: f64) -> Vec<f64> {
    table.iter().map(|row| horner_real(row, z)).collect()
}

/// Evaluates a bivariate table at a (possibly complex) point.
pub fn eval_table(table: &[Vec<f64>], x: C64, z: C64) -> C64 {
    horner(&univariate_at(table, z), x)
}

/// Table of `∂/∂x`: row `a` of the result is `(a+1)` times row `a+1`.
pub fn table_derivative_x(table: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if table.len() <= 1 {
        return vec![vec![0.0]];
    }
    (1..table.len())
        .map(|a| table[a].iter().map(|&c| c * a as f64).collect())
        .collect()
}

/// Table of `∂/∂z`: column `b` of the result is `(b+1)` times column `b+1`.
pub fn table_derivative_z(table: &[Vec<f64>]) -> Vec<Vec<f64>> {
    table
        .iter()
        .map(|row| {
            if row.len() <= 1 {
                return vec![0.0];
            }
            (1..row.len()).map(|b| row[b] * b as f64).collect()
        })
        .collect()
}

/// Chebyshev points of the first kind, `cos(π(j+½)/n)` for `j = 0..n`.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Chebyshev-T coefficients interpolating `values` given at
/// `chebyshev_points(values.len())`, exact for degree `< values.len()`.
pub fn chebyshev_fit(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let mut s = 0.0;
            for (j, &v) in values.iter().enumerate() {
                s += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            s * if k == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect()
}

/// Drops trailing Chebyshev coefficients below `rel_tol` times the peak.
pub fn chebyshev_trim(coeffs: &mut Vec<f64>, rel_tol: f64) {
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let cut = rel_tol * peak.max(1e-300);
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= cut) {
        coeffs.pop();
    }
}

/// Roots of `Σ a_k T_k(t)` as eigenvalues of the colleague matrix.
pub fn colleague_roots(cheb: &[f64]) -> Vec<C64> {
    let n = cheb.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = cheb[n];
    if n == 1 {
        return vec![C64::new(-cheb[0] / lead, 0.0)];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    m[(0, 1)] = 1.0;
    for i in 1..n - 1 {
        m[(i, i - 1)] = 0.5;
        m[(i, i + 1)] = 0.5;
    }
    for j in 0..n {
        m[(n - 1, j)] = -cheb[j] / (2.0 * lead);
    }
    m[(n - 1, n - 2)] += 0.5;
    m.complex_eigenvalues().iter().copied().collect()
}

/// Roots of a real-coefficient polynomial via its companion matrix.
pub fn companion_roots(coeffs: &[f64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    let peak = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() <= 1e-14 * peak) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Roots of a complex-coefficient polynomial via its companion matrix.
pub fn companion_roots_c64(coeffs: &[C64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    let peak = c.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    while c.len() > 1 && c.last().is_some_and(|v| v.norm() <= 1e-14 * peak) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    match m.eigenvalues() {
        Some(eigs) => eigs.iter().copied().collect(),
        None => Vec::new(),
    }
}

/// Monic real polynomial with the given real roots.
pub fn monic_from_real_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        // Multiply by (x − r): shift up and subtract r times the old value.
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= r * c;
        }
        coeffs = next;
    }
    coeffs
}

/// Solves the monomial Vandermonde system for interpolation coefficients.
pub fn vandermonde_solve(nodes: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if values.len() != n {
        return Err(Error::dims(
            format!("{n}"),
            format!("{}", values.len()),
            "interpolation nodes and values",
        ));
    }
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (i, &t) in nodes.iter().enumerate() {
        let mut p = 1.0;
        for a in 0..n {
            v[(i, a)] = p;
            p *= t;
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(values);
    v.lu()
        .solve(&rhs)
        .map(|c| c.as_slice().to_vec())
        .ok_or_else(|| Error::SolverFailure {
            iterations: 0,
            detail: "singular Vandermonde system".into(),
        })
}

/// True degree after discarding trailing coefficients below `tol·max`.
fn trimmed(p: &[f64], tol: f64) -> &[f64] {
    let peak = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let cut = tol * peak.max(1e-300);
    let mut end = p.len();
    while end > 1 && p[end - 1].abs() <= cut {
        end -= 1;
    }
    &p[..end]
}

/// Sylvester matrix of two real polynomials (true degrees inferred).
pub fn sylvester_matrix(p: &[f64], q: &[f64]) -> DMatrix<f64> {
    let p = trimmed(p, 1e-14);
    let q = trimmed(q, 1e-14);
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let n = dp + dq;
    let mut s = DMatrix::<f64>::zeros(n.max(1), n.max(1));
    for i in 0..dq {
        for (k, &c) in p.iter().enumerate() {
            s[(i, i + dp - k)] = c;
        }
    }
    for i in 0..dp {
        for (k, &c) in q.iter().enumerate() {
            s[(dq + i, i + dq - k)] = c;
        }
    }
    s
}

/// Resultant of two complex polynomials as the Sylvester determinant.
///
/// The true degrees are fixed by the caller: entries above them must
/// already be absent, as with slices of monic coefficient tables.
pub fn resultant_c64(p: &[C64], q: &[C64]) -> C64 {
    let dp = p.len().saturating_sub(1);
    let dq = q.len().saturating_sub(1);
    if dp == 0 {
        return p.first().copied().unwrap_or(C64::new(0.0, 0.0)).powu(dq as u32);
    }
    if dq == 0 {
        return q.first().copied().unwrap_or(C64::new(0.0, 0.0)).powu(dp as u32);
    }
    let n = dp + dq;
    let mut s = DMatrix::<C64>::zeros(n, n);
    for i in 0..dq {
        for (k, &c) in p.iter().enumerate() {
            s[(i, i + dp - k)] = c;
        }
    }
    for i in 0..dp {
        for (k, &c) in q.iter().enumerate() {
            s[(dq + i, i + dq - k)] = c;
        }
    }
    s.lu().determinant()
}

/// Resultant of two real polynomials as the Sylvester determinant.
pub fn resultant(p: &[f64], q: &[f64]) -> f64 {
    let pt = trimmed(p, 1e-14);
    let qt = trimmed(q, 1e-14);
    let dp = pt.len() - 1;
    let dq = qt.len() - 1;
    if dp == 0 {
        return pt[0].powi(dq as i32);
    }
    if dq == 0 {
        return qt[0].powi(dp as i32);
    }
    sylvester_matrix(pt, qt).lu().determinant()
}

/// Degree of the numeric gcd, `deg p + deg q − rank(Sylvester)`.
///
/// Rank is decided by the singular-value drop below `tol` times the
/// largest singular value, the subresultant criterion in matrix form.
pub fn gcd_degree(p: &[f64], q: &[f64], tol: f64) -> usize {
    let pt = trimmed(p, 1e-14);
    let qt = trimmed(q, 1e-14);
    let dp = pt.len() - 1;
    let dq = qt.len() - 1;
    if dp == 0 || dq == 0 {
        return 0;
    }
    let s = sylvester_matrix(pt, qt);
    let svals = s.svd(false, false).singular_values;
    let top = svals.iter().fold(0.0f64, |m, &v| m.max(v));
    if top == 0.0 {
        return dp.min(dq);
    }
    let rank = svals.iter().filter(|&&v| v > tol * top).count();
    dp + dq - rank
}
