//! Determinantal curves of observable pairs, recovered by interpolation.
//!
//! For Hermitian `E₁`, `E₂` of side `D` the curve is the vanishing set of
//!
//! ```text
//! p(x, z) = det(x·𝟙 − E₁ − z·E₂),
//! ```
//!
//! a bivariate polynomial of total degree at most `D`, monic of degree
//! exactly `D` in `x`, with real coefficients. Hyperbolicity is built in:
//! for real `z` the slice roots are the eigenvalues of `E₁ + z·E₂`.
//!
//! Coefficients are recovered by evaluating the determinant on a
//! `(D+1)×(D+1)` Chebyshev grid and solving the two one-dimensional
//! interpolation problems, which is exact for polynomials up to floating
//! point error. The result is validated against direct determinant
//! evaluation off the grid; a conditioning failure rescales the grid and
//! retries once before reporting an error.

use super::poly;
use crate::error::{Error, Result};
use crate::mat::cmatrix::{identity, opnorm, ComplexMatrix, C64};
use crate::mat::herm::HermitianOperator;
use crate::mat::linalg::eigh;
use crate::tol::EPS_NUM;

/// Coefficient table of `det(x·𝟙 − E₁ − z·E₂)` with its source pair.
#[derive(Debug, Clone)]
pub struct DeterminantalCurve {
    degree: usize,
    coefficients: Vec<Vec<f64>>,
    source_pair: (ComplexMatrix, ComplexMatrix),
}

impl DeterminantalCurve {
    /// Total degree `D`, the side of the source pair.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Full coefficient table; entry `[a][b]` multiplies `x^a z^b`.
    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Single coefficient of `x^a z^b` (zero outside the table).
    pub fn coefficient(&self, a: usize, b: usize) -> f64 {
        self.coefficients
            .get(a)
            .and_then(|row| row.get(b))
            .copied()
            .unwrap_or(0.0)
    }

    /// Evaluates the polynomial at a (possibly complex) point.
    pub fn eval(&self, x: C64, z: C64) -> C64 {
        poly::eval_table(&self.coefficients, x, z)
    }

    /// Complex coefficients of the slice `x ↦ p(x, z)`.
    pub fn univariate_at(&self, z: C64) -> Vec<C64> {
        poly::univariate_at(&self.coefficients, z)
    }

    /// The pair `(E₁, E₂)` the curve was extracted from.
    pub fn source_pair(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.source_pair.0, &self.source_pair.1)
    }

    /// Roots of the real slice at `z`: eigenvalues of `E₁ + z·E₂`, ascending.
    pub fn real_slice_roots(&self, z: f64) -> Vec<f64> {
        let pencil = &self.source_pair.0 + self.source_pair.1.scale(z);
        eigh(&pencil).0
    }
}

/// Recovers the determinantal curve of a pair by grid interpolation.
pub fn extract_curve(
    e1: &HermitianOperator,
    e2: &HermitianOperator,
) -> Result<DeterminantalCurve> {
    let d = e1.dim();
    if e2.dim() != d {
        return Err(Error::dims(
            format!("{d}x{d}"),
            format!("{0}x{0}", e2.dim()),
            "curve extraction needs a pair of equal side",
        ));
    }
    let scale_x = 1.0 + opnorm(e1.mat()) + opnorm(e2.mat());
    match extract_attempt(e1.mat(), e2.mat(), d, scale_x, 1.0) {
        Ok(coefficients) => Ok(DeterminantalCurve {
            degree: d,
            coefficients,
            source_pair: (e1.mat().clone(), e2.mat().clone()),
        }),
        // One retry on a rescaled grid before giving up.
        Err(_) => {
            let coefficients = extract_attempt(e1.mat(), e2.mat(), d, 0.5 * scale_x, 0.5)?;
            Ok(DeterminantalCurve {
                degree: d,
                coefficients,
                source_pair: (e1.mat().clone(), e2.mat().clone()),
            })
        }
    }
}

/// One interpolation pass on a Chebyshev grid of the given scales.
fn extract_attempt(
    e1: &ComplexMatrix,
    e2: &ComplexMatrix,
    d: usize,
    scale_x: f64,
    scale_z: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = d + 1;
    let nodes = poly::chebyshev_points(n);
    let det_at = |x: C64, z: C64| -> C64 {
        let m = identity(d) * x - e1 - e2 * z;
        m.lu().determinant()
    };

    // Determinant samples; real grid points give real determinants.
    let mut grid = vec![vec![0.0f64; n]; n];
    for (i, &ti) in nodes.iter().enumerate() {
        for (j, &tj) in nodes.iter().enumerate() {
            let val = det_at(C64::new(scale_x * ti, 0.0), C64::new(scale_z * tj, 0.0));
            if val.im.abs() > EPS_NUM * (1.0 + val.re.abs()) {
                return Err(Error::SolverFailure {
                    iterations: 0,
                    detail: format!("non-real determinant {val} on a real grid point"),
                });
            }
            grid[i][j] = val.re;
        }
    }

    // Interpolate in x per column, then in z per x-degree, both in the
    // scaled variables t = x/scale_x, s = z/scale_z.
    let mut by_xdeg = vec![vec![0.0f64; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| grid[i][j]).collect();
        let coeffs = poly::vandermonde_solve(&nodes, &col)?;
        for a in 0..n {
            by_xdeg[a][j] = coeffs[a];
        }
    }
    let mut table = vec![vec![0.0f64; n]; n];
    for a in 0..n {
        let coeffs = poly::vandermonde_solve(&nodes, &by_xdeg[a])?;
        // Undo the variable scaling: c[a][b] = ĉ[a][b] / (scale_x^a scale_z^b).
        for b in 0..n {
            table[a][b] = coeffs[b] / (scale_x.powi(a as i32) * scale_z.powi(b as i32));
        }
    }

    // Structural zeros above the total degree, then monic normalization.
    for a in 0..n {
        for b in 0..n {
            if a + b > d {
                table[a][b] = 0.0;
            }
        }
    }
    let lead = table[d][0];
    if (lead - 1.0).abs() > 1e-6 {
        return Err(Error::SolverFailure {
            iterations: 0,
            detail: format!("interpolated leading coefficient {lead} is not monic"),
        });
    }
    for row in table.iter_mut() {
        for c in row.iter_mut() {
            *c /= lead;
        }
    }

    // Off-grid validation against direct determinant evaluation.
    for m in 0..8 {
        let t = m as f64;
        let x = C64::new(
            scale_x * 0.43 * (1.9 * t + 0.7).cos(),
            scale_x * 0.37 * (1.3 * t + 0.4).sin(),
        );
        let z = C64::new(
            scale_z * 0.50 * (2.3 * t + 1.1).cos(),
            scale_z * 0.45 * (1.7 * t + 0.9).sin(),
        );
        let direct = det_at(x, z);
        let approx = poly::eval_table(&table, x, z);
        let mut magnitude = 1.0 + direct.norm();
        for (a, row) in table.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                magnitude += c.abs() * x.norm().powi(a as i32) * z.norm().powi(b as i32);
            }
        }
        if (approx - direct).norm() > EPS_NUM * magnitude {
            return Err(Error::SolverFailure {
                iterations: 0,
                detail: format!(
                    "interpolated curve misses the determinant by {:.3e} off grid",
                    (approx - direct).norm()
                ),
            });
        }
    }
    Ok(table)
}

/// Splits sorted values into exactly `k` clusters at the widest gaps.
///
/// Returns cluster means and sizes, or `None` when the separation
/// between clusters does not clearly dominate the spread within them.
pub(crate) fn cluster_into(sorted: &[f64], k: usize) -> Option<(Vec<f64>, Vec<usize>)> {
    let n = sorted.len();
    if k == 0 || k > n {
        return None;
    }
    let spread = sorted[n - 1] - sorted[0];
    let mut gap_order: Vec<usize> = (0..n.saturating_sub(1)).collect();
    gap_order.sort_by(|&a, &b| (sorted[b + 1] - sorted[b]).total_cmp(&(sorted[a + 1] - sorted[a])));
    let mut cuts: Vec<usize> = gap_order.iter().take(k - 1).map(|&g| g + 1).collect();
    cuts.sort_unstable();
    cuts.push(n);

    let mut means = Vec::with_capacity(k);
    let mut sizes = Vec::with_capacity(k);
    let mut within: f64 = 0.0;
    let mut start = 0;
    for &end in &cuts {
        let chunk = &sorted[start..end];
        within = within.max(chunk[chunk.len() - 1] - chunk[0]);
        means.push(chunk.iter().sum::<f64>() / chunk.len() as f64);
        sizes.push(chunk.len());
        start = end;
    }
    let between = if k == 1 {
        f64::INFINITY
    } else {
        gap_order
            .iter()
            .take(k - 1)
            .map(|&g| sorted[g + 1] - sorted[g])
            .fold(f64::INFINITY, f64::min)
    };
    // Clusters must be separated by far more than their internal spread.
    let floor = 1e-13 * (1.0 + spread.abs());
    if between <= 100.0 * within.max(floor) {
        return None;
    }
    Some((means, sizes))
}

/// Squarefree part of a curve as a coefficient table plus its degree.
///
/// The number of distinct sheets `k` is found self-consistently: it is
/// the finest clustering of the slice eigenvalues that validates with
/// one multiplicity profile on `k + 1` nodes. A count that is too fine
/// would have to split an exact multiplet and fails the cluster
/// separation test; one too coarse would merge roots separated on the
/// scale of the spectrum and fails the same test. When sheets do
/// collapse, the distinct roots are re-interpolated into a reduced
/// monic table.
pub(crate) fn squarefree_table(curve: &DeterminantalCurve) -> Result<(Vec<Vec<f64>>, usize)> {
    let d = curve.degree();
    let candidates = poly::chebyshev_points(2 * (d + 1) + 2);
    let slices: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&z| curve.real_slice_roots(z))
        .collect();

    for k in (1..=d).rev() {
        let mut good_nodes: Vec<f64> = Vec::new();
        let mut root_rows: Vec<Vec<f64>> = Vec::new();
        let mut reference_sizes: Option<Vec<usize>> = None;
        for (&z, eigs) in candidates.iter().zip(&slices) {
            let Some((means, sizes)) = cluster_into(eigs, k) else {
                continue;
            };
            let mut sorted_sizes = sizes.clone();
            sorted_sizes.sort_unstable();
            match &reference_sizes {
                None => reference_sizes = Some(sorted_sizes),
                Some(want) if *want != sorted_sizes => continue,
                Some(_) => {}
            }
            good_nodes.push(z);
            root_rows.push(means);
            if good_nodes.len() == k + 1 {
                break;
            }
        }
        if good_nodes.len() < k + 1 {
            continue;
        }
        if k == d {
            return Ok((curve.coefficients().to_vec(), d));
        }

        let monic_rows: Vec<Vec<f64>> = root_rows
            .iter()
            .map(|roots| poly::monic_from_real_roots(roots))
            .collect();
        let mut table = vec![vec![0.0f64; k + 1]; k + 1];
        for a in 0..=k {
            let values: Vec<f64> = monic_rows.iter().map(|row| row[a]).collect();
            let coeffs = poly::vandermonde_solve(&good_nodes, &values)?;
            for b in 0..=k {
                table[a][b] = if a + b > k { 0.0 } else { coeffs[b] };
            }
        }
        return Ok((table, k));
    }
    Err(Error::Inconsistent(format!(
        "no distinct-root count clusters the slices of the degree-{d} curve consistently"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{degree3_pair, irreducible_pair};
    use crate::mat::random::{random_hermitian, SeedSplitter};
    use super::super::poly::companion_roots;

    fn herm(m: ComplexMatrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn pinned_degree_three_curve_is_recovered() {
        // det(x𝟙 − A − zB) = (x + ½)(x² − 1 − z²) for the degree-3 pair.
        let (a, b) = degree3_pair();
        let curve = extract_curve(&a, &b).unwrap();
        assert_eq!(curve.degree(), 3);
        let want = [
            (3, 0, 1.0),
            (2, 0, 0.5),
            (1, 0, -1.0),
            (1, 2, -1.0),
            (0, 0, -0.5),
            (0, 2, -0.5),
        ];
        let mut expected = vec![vec![0.0f64; 4]; 4];
        for &(i, j, v) in &want {
            expected[i][j] = v;
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (curve.coefficient(i, j) - expected[i][j]).abs() < 1e-9,
                    "coefficient of x^{i} z^{j}: {} vs {}",
                    curve.coefficient(i, j),
                    expected[i][j]
                );
            }
        }
    }

    #[test]
    fn evaluation_matches_determinants_off_grid() {
        let split = SeedSplitter::new(23);
        let mut rng = split.stream("curve-sample");
        let e1 = herm(random_hermitian(5, &mut rng));
        let e2 = herm(random_hermitian(5, &mut rng));
        let curve = extract_curve(&e1, &e2).unwrap();
        for m in 0..6 {
            let t = m as f64;
            let x = C64::new(1.3 * (2.1 * t).cos(), 0.8 * (1.7 * t + 0.3).sin());
            let z = C64::new(0.9 * (1.1 * t + 0.8).cos(), 0.7 * (2.9 * t).sin());
            let direct = (identity(5) * x - e1.mat() - e2.mat() * z)
                .lu()
                .determinant();
            let rel = (curve.eval(x, z) - direct).norm() / (1.0 + direct.norm());
            assert!(rel < 1e-8, "relative determinant defect {rel}");
        }
    }

    #[test]
    fn vanishing_second_operator_gives_the_characteristic_polynomial() {
        let e1 = herm(ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        )));
        let e2 = herm(ComplexMatrix::zeros(3, 3));
        let curve = extract_curve(&e1, &e2).unwrap();
        // x(x − 1)(x − 2) = x³ − 3x² + 2x, no z dependence.
        for (a, b, v) in [(3, 0, 1.0), (2, 0, -3.0), (1, 0, 2.0), (0, 0, 0.0)] {
            assert!((curve.coefficient(a, b) - v).abs() < 1e-10);
        }
        for a in 0..4 {
            for b in 1..4 {
                assert!(curve.coefficient(a, b).abs() < 1e-10, "z^{b} leak at x^{a}");
            }
        }
    }

    #[test]
    fn constant_coefficient_matches_direct_determinant() {
        // p(0, 0) = det(−A) for the irreducible pair.
        let (a, b) = irreducible_pair(3);
        let curve = extract_curve(&a, &b).unwrap();
        let oracle = a.mat().scale(-1.0).lu().determinant();
        assert!(oracle.im.abs() < 1e-12);
        assert!((curve.coefficient(0, 0) - oracle.re).abs() < 1e-10);
    }

    #[test]
    fn real_slices_are_hyperbolic() {
        let split = SeedSplitter::new(57);
        let mut rng = split.stream("hyperbolic");
        let e1 = herm(random_hermitian(4, &mut rng));
        let e2 = herm(random_hermitian(4, &mut rng));
        let curve = extract_curve(&e1, &e2).unwrap();
        for m in 0..20 {
            let z = -2.0 + 4.0 * (m as f64 + 0.5) / 20.0;
            let coeffs = poly::univariate_real(curve.coefficients(), z);
            let roots = companion_roots(&coeffs);
            assert_eq!(roots.len(), 4);
            let mut from_poly: Vec<f64> = roots
                .iter()
                .map(|r| {
                    assert!(r.im.abs() < 1e-6, "non-real root {r} at z = {z}");
                    r.re
                })
                .collect();
            from_poly.sort_by(f64::total_cmp);
            let eigs = curve.real_slice_roots(z);
            for (p, e) in from_poly.iter().zip(&eigs) {
                assert!((p - e).abs() < 1e-6 * (1.0 + e.abs()));
            }
        }
    }

    #[test]
    fn squarefree_part_collapses_repeated_blocks() {
        // Two identical 2×2 blocks: degree 4 collapses to a squarefree 2.
        let split = SeedSplitter::new(91);
        let mut rng = split.stream("repeat");
        let g = random_hermitian(2, &mut rng);
        let h = random_hermitian(2, &mut rng);
        let stack = |m: &ComplexMatrix| {
            let mut out = ComplexMatrix::zeros(4, 4);
            out.view_mut((0, 0), (2, 2)).copy_from(m);
            out.view_mut((2, 2), (2, 2)).copy_from(m);
            out
        };
        let curve = extract_curve(&herm(stack(&g)), &herm(stack(&h))).unwrap();
        let (table, k) = squarefree_table(&curve).unwrap();
        assert_eq!(k, 2);
        // The reduced slice at a probe has the two distinct eigenvalues.
        let z = 0.37;
        let coeffs = poly::univariate_real(&table, z);
        let mut roots: Vec<f64> = companion_roots(&coeffs).iter().map(|r| r.re).collect();
        roots.sort_by(f64::total_cmp);
        let eigs = eigh(&(&g + h.scale(z))).0;
        for (r, e) in roots.iter().zip(&eigs) {
            assert!((r - e).abs() < 1e-8, "{r} vs {e}");
        }
    }

    #[test]
    fn cluster_separation_guard_rejects_blur() {
        assert!(cluster_into(&[0.0, 0.5, 1.0], 2).is_none());
        let (means, sizes) = cluster_into(&[0.0, 1e-9, 1.0, 1.0 + 1e-9], 2).unwrap();
        assert_eq!(sizes, vec![2, 2]);
        assert!((means[0] - 5e-10).abs() < 1e-12 && (means[1] - 1.0 - 5e-10).abs() < 1e-12);
    }
}
