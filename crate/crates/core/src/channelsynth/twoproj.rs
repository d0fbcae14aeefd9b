//! Canonical form of a pair of Hermitian projections.
//!
//! Any two projections `P, Q` decompose the space into four *corners* —
//! the intersections `ran P ∩ ran Q`, `ran P ∩ ker Q`, `ker P ∩ ran Q`,
//! `ker P ∩ ker Q`, where both act as scalars — plus a *generic* part
//! that splits into two-dimensional blocks on which
//!
//! ```text
//!   P ≅ [[1, 0], [0, 0]],    Q ≅ [[1−μ, √(μ(1−μ))], [√(μ(1−μ)), μ]]
//! ```
//!
//! with an angle parameter `μ ∈ (0, 1)` per block. The blocks are found
//! from the spectrum of the compression `P Q P`: an eigenvector `e`
//! with eigenvalue `λ ∈ (0, 1)` pairs with `f = (1−P) Q e / ‖·‖` in
//! `ker P`, and `μ = ⟨f|Q|f⟩ = 1 − λ`. Distinct eigenvectors give
//! orthogonal partners, so the pairs assemble with the corner bases
//! into one unitary change of basis.
//!
//! The observable algebra of `{P, Q}` is read off the form: each corner
//! type contributes a scalar family and each distinct angle a full
//! `M_2` family, so a pair of projections always compresses to
//! dimension at most two.

use crate::error::{Error, Result};
use crate::mat::cmatrix::{fro_norm, opnorm, re, ComplexMatrix, ComplexVector};
use crate::mat::herm::HermitianOperator;
use crate::mat::linalg::eigh;
use crate::tol::{EPS_ANGLE, EPS_NUM, EPS_PROJ};

/// Canonical two-projection normal form.
#[derive(Debug, Clone)]
pub struct TwoProjectionForm {
    /// Unitary `V` with `V P V†` and `V Q V†` in template form.
    pub unitary: ComplexMatrix,
    /// Corner dimensions, ordered `[ran∩ran, ran∩ker, ker∩ran,
    /// ker∩ker]` (of `P` resp. `Q`).
    pub corner_dims: [usize; 4],
    /// Angle parameters `μ_j ∈ (0, 1)` of the generic blocks,
    /// ascending.
    pub angles: Vec<f64>,
    /// Worst Frobenius distance of the conjugated pair from the
    /// templates.
    pub residual: f64,
}

impl TwoProjectionForm {
    /// Side of the underlying space.
    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// Template for `V P V†`.
    pub fn p_template(&self) -> ComplexMatrix {
        self.template(&[1.0, 1.0, 0.0, 0.0], |_| {
            ComplexMatrix::from_diagonal_element(2, 2, re(1.0)) - scaled_unit(1, 1, 1.0)
        })
    }

    /// Template for `V Q V†`.
    pub fn q_template(&self) -> ComplexMatrix {
        self.template(&[1.0, 0.0, 1.0, 0.0], |mu| {
            let c = (mu * (1.0 - mu)).sqrt();
            let mut b = ComplexMatrix::zeros(2, 2);
            b[(0, 0)] = re(1.0 - mu);
            b[(0, 1)] = re(c);
            b[(1, 0)] = re(c);
            b[(1, 1)] = re(mu);
            b
        })
    }

    fn template(
        &self,
        corner_values: &[f64; 4],
        block: impl Fn(f64) -> ComplexMatrix,
    ) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(self.dim(), self.dim());
        let mut off = 0;
        for (c, &val) in corner_values.iter().enumerate() {
            for _ in 0..self.corner_dims[c] {
                t[(off, off)] = re(val);
                off += 1;
            }
        }
        for &mu in &self.angles {
            let b = block(mu);
            for r in 0..2 {
                for c in 0..2 {
                    t[(off + r, off + c)] = b[(r, c)];
                }
            }
            off += 2;
        }
        t
    }
}

/// `2×2` matrix with a single entry, used for the `P` template block.
fn scaled_unit(r: usize, c: usize, v: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(r, c)] = re(v);
    m
}

/// Validates that a Hermitian operator is a projection.
fn check_projection(p: &HermitianOperator, name: &str) -> Result<()> {
    let m = p.mat();
    let defect = opnorm(&(m * m - m));
    if defect > EPS_PROJ {
        return Err(Error::InvalidObservables(format!(
            "{name} is not a projection (idempotency defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Splits the spectrum of a compressed projection into the lower
/// corner, the generic middle, and the upper corner.
fn classify(
    basis: &ComplexMatrix,
    q: &ComplexMatrix,
) -> (Vec<ComplexVector>, Vec<(f64, ComplexVector)>, Vec<ComplexVector>) {
    let mut zero = Vec::new();
    let mut mid = Vec::new();
    let mut one = Vec::new();
    if basis.ncols() == 0 {
        return (zero, mid, one);
    }
    let compressed = basis.adjoint() * q * basis;
    let (vals, vecs) = eigh(&compressed);
    for (k, &lam) in vals.iter().enumerate() {
        let v = basis * vecs.column(k);
        if lam <= EPS_ANGLE {
            zero.push(v);
        } else if lam >= 1.0 - EPS_ANGLE {
            one.push(v);
        } else {
            mid.push((lam, v));
        }
    }
    (zero, mid, one)
}

/// Puts a pair of projections into the canonical two-projection form.
pub fn two_projection_form(
    p: &HermitianOperator,
    q: &HermitianOperator,
) -> Result<TwoProjectionForm> {
    if p.dim() != q.dim() {
        return Err(Error::dims(
            format!("{}", p.dim()),
            format!("{}", q.dim()),
            "two-projection form",
        ));
    }
    check_projection(p, "first operator")?;
    check_projection(q, "second operator")?;
    let dim = p.dim();
    let pm = p.mat();
    let qm = q.mat();

    // Split the space along P.
    let (pvals, pvecs) = eigh(pm);
    let mut ran_cols = Vec::new();
    let mut ker_cols = Vec::new();
    for (k, &lam) in pvals.iter().enumerate() {
        if lam > 0.5 {
            ran_cols.push(pvecs.column(k).into_owned());
        } else {
            ker_cols.push(pvecs.column(k).into_owned());
        }
    }
    let ran = columns_to_matrix(dim, &ran_cols);
    let ker = columns_to_matrix(dim, &ker_cols);

    // Corners and generic eigenvectors on each side of P.
    let (corner_10, generic, corner_11) = classify(&ran, qm);
    let (corner_00, ker_mid, corner_01) = classify(&ker, qm);
    if ker_mid.len() != generic.len() {
        return Err(Error::Inconsistent(format!(
            "generic two-projection blocks do not pair up ({} vs {})",
            generic.len(),
            ker_mid.len()
        )));
    }

    // Pair each generic eigenvector with its partner in ker P.
    let mut pairs: Vec<(f64, ComplexVector, ComplexVector)> = Vec::with_capacity(generic.len());
    for (_lam, e) in generic {
        let f_raw = qm * &e - pm * (qm * &e);
        let norm = f_raw.norm();
        if norm < EPS_ANGLE {
            return Err(Error::ClusteringAmbiguous {
                gap: norm,
                tol: EPS_ANGLE,
            });
        }
        let f = f_raw.unscale(norm);
        let mu = (f.adjoint() * qm * &f)[(0, 0)].re;
        pairs.push((mu, e, f));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Assemble the change of basis: corners first, then the pairs.
    let corner_dims = [
        corner_11.len(),
        corner_10.len(),
        corner_01.len(),
        corner_00.len(),
    ];
    let angles: Vec<f64> = pairs.iter().map(|(mu, _, _)| *mu).collect();
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(dim);
    cols.extend(corner_11);
    cols.extend(corner_10);
    cols.extend(corner_01);
    cols.extend(corner_00);
    for (_, e, f) in &pairs {
        cols.push(e.clone());
        cols.push(f.clone());
    }
    let basis = columns_to_matrix(dim, &cols);
    let unitary = basis.adjoint();

    let mut form = TwoProjectionForm {
        unitary,
        corner_dims,
        angles,
        residual: 0.0,
    };
    let p_defect = fro_norm(&(&form.unitary * pm * form.unitary.adjoint() - form.p_template()));
    let q_defect = fro_norm(&(&form.unitary * qm * form.unitary.adjoint() - form.q_template()));
    form.residual = p_defect.max(q_defect);
    if form.residual > EPS_NUM {
        return Err(Error::VerificationFailed {
            context: "two-projection form deviates from its templates".into(),
            residual: form.residual,
            tol: EPS_NUM,
        });
    }
    Ok(form)
}

/// Stacks column vectors into a `dim × k` matrix.
fn columns_to_matrix(dim: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_projections;

    #[test]
    fn random_projections_reach_template_form() {
        let (p, q) = two_projections(6, 3, 2, 41).unwrap();
        let form = two_projection_form(&p, &q).unwrap();
        assert!(form.residual < 1e-10, "residual {}", form.residual);
        let [n11, n10, n01, n00] = form.corner_dims;
        let g = form.angles.len();
        assert_eq!(n11 + n10 + g, 3, "rank of P must be exhausted");
        assert_eq!(n01 + n00 + g, 3, "corank of P must be exhausted");
        for w in form.angles.windows(2) {
            assert!(w[0] <= w[1], "angles must ascend");
        }
        for &mu in &form.angles {
            assert!(mu > 0.0 && mu < 1.0);
        }
        // The unitary really conjugates the pair onto the templates.
        let back = form.unitary.adjoint() * form.p_template() * &form.unitary;
        assert!(fro_norm(&(back - p.mat())) < 1e-10);
    }

    #[test]
    fn commuting_projections_are_all_corners() {
        let p = HermitianOperator::from_real_diag(&[1.0, 1.0, 0.0, 0.0]);
        let q = HermitianOperator::from_real_diag(&[1.0, 0.0, 1.0, 0.0]);
        let form = two_projection_form(&p, &q).unwrap();
        assert_eq!(form.corner_dims, [1, 1, 1, 1]);
        assert!(form.angles.is_empty());
        assert!(form.residual < 1e-14);
    }

    #[test]
    fn single_known_angle_is_recovered() {
        let theta: f64 = 0.3;
        let (c, s) = (theta.cos(), theta.sin());
        let mut qm = ComplexMatrix::zeros(2, 2);
        qm[(0, 0)] = re(c * c);
        qm[(0, 1)] = re(c * s);
        qm[(1, 0)] = re(c * s);
        qm[(1, 1)] = re(s * s);
        let p = HermitianOperator::from_real_diag(&[1.0, 0.0]);
        let q = HermitianOperator::new(qm).unwrap();
        let form = two_projection_form(&p, &q).unwrap();
        assert_eq!(form.corner_dims, [0, 0, 0, 0]);
        assert_eq!(form.angles.len(), 1);
        assert!((form.angles[0] - s * s).abs() < 1e-12);
    }

    #[test]
    fn degenerate_projections_are_rejected() {
        let p = HermitianOperator::from_real_diag(&[0.5, 0.0]);
        let q = HermitianOperator::from_real_diag(&[1.0, 0.0]);
        assert!(two_projection_form(&p, &q).is_err());
    }

    #[test]
    fn zero_projection_is_pure_kernel() {
        let p = HermitianOperator::new(ComplexMatrix::zeros(3, 3)).unwrap();
        let q = HermitianOperator::from_real_diag(&[1.0, 1.0, 0.0]);
        let form = two_projection_form(&p, &q).unwrap();
        assert_eq!(form.corner_dims, [0, 0, 2, 1]);
        assert!(form.angles.is_empty());
    }
}
