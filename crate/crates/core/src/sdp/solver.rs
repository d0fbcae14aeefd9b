//! Dense primal-dual interior-point solver for small semidefinite
//! programs with free scalar variables.
//!
//! The canonical problem is
//!
//! ```text
//!   minimize    q · u
//!   subject to  ⟨A_r, Z⟩ + (G u)_r = b_r   (r = 1..p)
//!               Z ⪰ 0,  u free,
//! ```
//!
//! over a symmetric matrix variable `Z` and a small vector `u` of free
//! scalars. The matrix variable carries no objective term: in the
//! intended use the objective is a single slack variable whose optimal
//! sign decides feasibility of a positivity-constrained linear system.
//! The dual is `maximize b · y` subject to `S = −Σ_r y_r A_r ⪰ 0` and
//! `Gᵀ y = q`; the returned multipliers satisfy these identities to
//! working precision and serve as infeasibility certificates when the
//! optimum is positive.
//!
//! The algorithm is an infeasible-start path-follower with
//! Nesterov–Todd scaling and Mehrotra-style adaptive centering. Each
//! iteration factors the Schur complement `[⟨A_r, W A_s W⟩]` bordered
//! by the free-variable columns. Constraint rows are orthonormalized
//! through a singular value decomposition first, which drops redundant
//! rows (checking that their right-hand sides agree) and keeps the
//! Schur system well conditioned. Problems here are tiny — matrix side
//! below ~60, a few dozen rows — so dense eigendecompositions
//! throughout are the right trade.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol::{EPS_NUM, EPS_RANK};

/// A semidefinite program in the solver's canonical form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Side length of the symmetric matrix variable.
    pub n: usize,
    /// Constraint matrices `A_r`, each symmetric `n × n`.
    pub constraints: Vec<DMatrix<f64>>,
    /// Free-variable coefficients, one row per constraint (`p × f`).
    pub free_coeffs: DMatrix<f64>,
    /// Right-hand side `b` (length `p`).
    pub rhs: DVector<f64>,
    /// Objective on the free variables (length `f`).
    pub objective: DVector<f64>,
}

/// A converged primal-dual pair.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Optimal matrix variable (positive semidefinite up to rounding).
    pub z: DMatrix<f64>,
    /// Optimal free variables.
    pub u: DVector<f64>,
    /// Dual multipliers, indexed by the *original* constraint rows.
    pub y: DVector<f64>,
    /// Dual slack `−Σ_r y_r A_r` (positive semidefinite up to rounding).
    pub s: DMatrix<f64>,
    /// Optimal objective value `q · u`.
    pub objective: f64,
    /// Relative primal equality residual at the returned point.
    pub primal_residual: f64,
    /// Relative dual residual at the returned point.
    pub dual_residual: f64,
    /// Relative duality gap at the returned point.
    pub gap: f64,
    /// Interior-point iterations used.
    pub iterations: usize,
}

/// Packed length of the upper triangle of an `n × n` symmetric matrix.
fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Isometric packing of a symmetric matrix: off-diagonal entries are
/// scaled by √2 so that `svec(A) · svec(B) = ⟨A, B⟩`.
fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(svec_len(n));
    let mut idx = 0;
    for c in 0..n {
        for r in 0..=c {
            v[idx] = if r == c {
                m[(r, c)]
            } else {
                std::f64::consts::SQRT_2 * m[(r, c)]
            };
            idx += 1;
        }
    }
    v
}

/// Inverse of [`svec`].
fn smat(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for c in 0..n {
        for r in 0..=c {
            if r == c {
                m[(r, c)] = v[idx];
            } else {
                let x = v[idx] / std::f64::consts::SQRT_2;
                m[(r, c)] = x;
                m[(c, r)] = x;
            }
            idx += 1;
        }
    }
    m
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()).scale(0.5)
}

fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Applies `f` to the eigenvalues of a symmetric matrix. Fails when an
/// eigenvalue violates `domain`.
fn eig_map(
    m: &DMatrix<f64>,
    domain: impl Fn(f64) -> bool,
    f: impl Fn(f64) -> f64,
) -> Result<DMatrix<f64>> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    for &l in eig.eigenvalues.iter() {
        if !domain(l) {
            return Err(Error::SolverFailure {
                iterations: 0,
                detail: format!("eigenvalue {l:.3e} outside the domain of a matrix function"),
            });
        }
    }
    let mut d = eig.eigenvalues.clone();
    d.apply(|x| *x = f(*x));
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose())
}

fn min_eig_sym(m: &DMatrix<f64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().fold(f64::INFINITY, |a, &x| a.min(x))
}

/// Nesterov–Todd scaling point: the unique `W ≻ 0` with `W S W = Z`.
fn nt_scaling(z: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let zh = eig_map(z, |l| l > 0.0, f64::sqrt)?;
    let t = sym(&(&zh * s * &zh));
    let tis = eig_map(&t, |l| l > 0.0, |l| l.powf(-0.5))?;
    Ok(sym(&(&zh * tis * &zh)))
}

/// Largest step `α ≤ 1` keeping `m + α δ` inside the cone, with a 0.99
/// fraction-to-boundary margin.
fn max_step(m: &DMatrix<f64>, delta: &DMatrix<f64>) -> Result<f64> {
    let mih = eig_map(m, |l| l > 0.0, |l| l.powf(-0.5))?;
    let lam = min_eig_sym(&sym(&(&mih * delta * &mih)));
    if lam >= -1e-14 {
        Ok(1.0)
    } else {
        Ok((-0.99 / lam).min(1.0))
    }
}

/// Row-orthonormalized copy of a problem plus the data to map dual
/// multipliers back to the original rows.
struct ReducedProblem {
    constraints: Vec<DMatrix<f64>>,
    free_coeffs: DMatrix<f64>,
    rhs: DVector<f64>,
    /// `y_original = back_map · y_reduced`.
    back_map: DMatrix<f64>,
}

/// Orthonormalizes the constraint rows `(svec A_r | G_r)`, dropping
/// dependent rows. Fails with [`Error::Inconsistent`] when the linear
/// system (ignoring positivity) has no solution at all.
fn reduce_rows(prob: &SdpProblem) -> Result<ReducedProblem> {
    let p = prob.constraints.len();
    let f = prob.free_coeffs.ncols();
    let l = svec_len(prob.n);
    let mut rows = DMatrix::zeros(p, l + f);
    for (r, a) in prob.constraints.iter().enumerate() {
        rows.view_mut((r, 0), (1, l)).copy_from(&svec(a).transpose());
        rows.view_mut((r, l), (1, f))
            .copy_from(&prob.free_coeffs.row(r));
    }

    let svd = rows.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &x| a.max(x));
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&x| x > EPS_RANK * sigma_max.max(1e-300))
        .count();
    if rank == 0 {
        return Err(Error::SolverFailure {
            iterations: 0,
            detail: "constraint system is empty after rank reduction".into(),
        });
    }

    // Consistency of the full linear system (least-squares residual).
    let x = svd
        .solve(&prob.rhs, EPS_RANK * sigma_max)
        .map_err(|e| Error::SolverFailure {
            iterations: 0,
            detail: format!("least-squares consistency check failed: {e}"),
        })?;
    let resid = (&rows * &x - &prob.rhs).norm();
    if resid > EPS_NUM * (1.0 + prob.rhs.norm()) {
        return Err(Error::Inconsistent(format!(
            "constraint rows are contradictory (residual {resid:.3e})"
        )));
    }

    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let mut constraints = Vec::with_capacity(rank);
    let mut free_coeffs = DMatrix::zeros(rank, f);
    let mut rhs = DVector::zeros(rank);
    let mut back_map = DMatrix::zeros(p, rank);
    for k in 0..rank {
        let row = v_t.row(k).transpose();
        constraints.push(smat(&row.rows(0, l).into_owned(), prob.n));
        free_coeffs
            .view_mut((k, 0), (1, f))
            .copy_from(&row.rows(l, f).transpose());
        let sk = svd.singular_values[k];
        rhs[k] = u.column(k).dot(&prob.rhs) / sk;
        back_map
            .view_mut((0, k), (p, 1))
            .copy_from(&(u.column(k) / sk));
    }
    Ok(ReducedProblem {
        constraints,
        free_coeffs,
        rhs,
        back_map,
    })
}

/// Solves the program to the requested relative tolerance.
///
/// Convergence requires primal and dual equality residuals, the duality
/// gap, and the complementarity product to all fall below `tol` in
/// relative terms. Fails with [`Error::SolverFailure`] when the
/// iteration limit is exhausted and with [`Error::Inconsistent`] when
/// the constraint rows contradict each other outright.
pub fn solve_sdp(prob: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    let n = prob.n;
    for (r, a) in prob.constraints.iter().enumerate() {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::dims(
                format!("{n}x{n}"),
                format!("{}x{}", a.nrows(), a.ncols()),
                "SDP constraint matrix shape",
            ));
        }
        if (a - a.transpose()).norm() > EPS_NUM * (1.0 + a.norm()) {
            return Err(Error::SolverFailure {
                iterations: 0,
                detail: format!("constraint matrix {r} is not symmetric"),
            });
        }
    }
    let p_orig = prob.constraints.len();
    if prob.rhs.len() != p_orig || prob.free_coeffs.nrows() != p_orig {
        return Err(Error::dims(
            format!("{p_orig} rows"),
            format!("{} rhs / {} coeff rows", prob.rhs.len(), prob.free_coeffs.nrows()),
            "SDP row counts",
        ));
    }

    let red = reduce_rows(prob)?;
    let a_mats = &red.constraints;
    let g = &red.free_coeffs;
    let b = &red.rhs;
    let q = &prob.objective;
    let p = a_mats.len();
    let f = g.ncols();

    let max_iters = 100usize;
    let scale = 1.0 + inf_norm(b);
    let mut z = DMatrix::identity(n, n).scale(scale);
    let mut s = DMatrix::identity(n, n);
    let mut u = DVector::zeros(f);
    let mut y = DVector::zeros(p);

    let apply_rows = |m: &DMatrix<f64>| -> DVector<f64> {
        DVector::from_iterator(p, a_mats.iter().map(|a| frob_dot(a, m)))
    };
    let combine = |w: &DVector<f64>| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(n, n);
        for (a, &c) in a_mats.iter().zip(w.iter()) {
            out += a.scale(c);
        }
        out
    };

    for iter in 0..max_iters {
        let r_p = b - apply_rows(&z) - g * &u;
        let r_d = -(&s + combine(&y));
        let r_g = q - g.transpose() * &y;
        let p_obj = q.dot(&u);
        let d_obj = b.dot(&y);
        let mu = frob_dot(&z, &s) / n as f64;

        let rel_p = inf_norm(&r_p) / (1.0 + inf_norm(b));
        let rel_d = r_d.norm() / (1.0 + s.norm());
        let rel_g = inf_norm(&r_g) / (1.0 + inf_norm(q));
        let rel_gap = (p_obj - d_obj).abs() / (1.0 + p_obj.abs() + d_obj.abs());
        let rel_c = frob_dot(&z, &s) / (1.0 + p_obj.abs() + d_obj.abs());
        if rel_p <= tol && rel_d <= tol && rel_g <= tol && rel_gap <= tol && rel_c <= tol {
            let y_orig = &red.back_map * &y;
            return Ok(SdpSolution {
                z,
                u,
                y: y_orig,
                s,
                objective: p_obj,
                primal_residual: rel_p,
                dual_residual: rel_d,
                gap: rel_gap,
                iterations: iter,
            });
        }

        let w = nt_scaling(&z, &s)?;
        let waw: Vec<DMatrix<f64>> = a_mats.iter().map(|a| sym(&(&w * a * &w))).collect();
        let mut kkt = DMatrix::zeros(p + f, p + f);
        for r in 0..p {
            for c in 0..=r {
                let v = frob_dot(&a_mats[r], &waw[c]);
                kkt[(r, c)] = v;
                kkt[(c, r)] = v;
            }
        }
        kkt.view_mut((0, p), (p, f)).copy_from(g);
        kkt.view_mut((p, 0), (f, p)).copy_from(&g.transpose());
        let lu = kkt.lu();

        let wrdw = sym(&(&w * &r_d * &w));
        let s_inv = eig_map(&s, |l| l > 0.0, |l| 1.0 / l)?;

        let solve_dir = |rc: &DMatrix<f64>| -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>, DVector<f64>)> {
            let term = rc - &wrdw;
            let mut rhs = DVector::zeros(p + f);
            let top = &r_p - apply_rows(&term);
            rhs.rows_mut(0, p).copy_from(&top);
            rhs.rows_mut(p, f).copy_from(&r_g);
            let sol = lu.solve(&rhs).ok_or_else(|| Error::SolverFailure {
                iterations: iter,
                detail: "singular KKT system".into(),
            })?;
            let dy = sol.rows(0, p).into_owned();
            let du = sol.rows(p, f).into_owned();
            let ds = &r_d - combine(&dy);
            let dz = sym(&(rc - sym(&(&w * &ds * &w))));
            Ok((dz, ds, dy, du))
        };

        // Predictor (affine scaling) step.
        let rc_aff = -&z;
        let (dz_a, ds_a, _, _) = solve_dir(&rc_aff)?;
        let ap = max_step(&z, &dz_a)?;
        let ad = max_step(&s, &ds_a)?;
        let mu_aff = frob_dot(&(&z + dz_a.scale(ap)), &(&s + ds_a.scale(ad))).max(0.0) / n as f64;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).powi(3).clamp(1e-10, 1.0)
        } else {
            0.0
        };

        // Combined centering step.
        let rc = s_inv.scale(sigma * mu) - &z;
        let (dz, ds, dy, du) = solve_dir(&rc)?;
        let mut ap = max_step(&z, &dz)?;
        let mut ad = max_step(&s, &ds)?;
        // Guard against rounding pushing an iterate out of the cone.
        for _ in 0..30 {
            if nalgebra::Cholesky::new(sym(&(&z + dz.scale(ap)))).is_some() {
                break;
            }
            ap *= 0.8;
        }
        for _ in 0..30 {
            if nalgebra::Cholesky::new(sym(&(&s + ds.scale(ad)))).is_some() {
                break;
            }
            ad *= 0.8;
        }
        z = sym(&(&z + dz.scale(ap)));
        u += du.scale(ap);
        s = sym(&(&s + ds.scale(ad)));
        y += dy.scale(ad);
    }

    Err(Error::SolverFailure {
        iterations: max_iters,
        detail: format!("interior-point iteration did not reach tolerance {tol:.1e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::random::{std_normal, SeedSplitter};

    /// Phase-1 style problem pinning the shifted variable `X = Z − t·1`
    /// to the given symmetric matrix: the optimum is `t* = −λ_min(X)`.
    fn pinned_problem(x: &DMatrix<f64>) -> SdpProblem {
        let n = x.nrows();
        let mut constraints = Vec::new();
        let mut rhs = Vec::new();
        let mut free = Vec::new();
        for p in 0..n {
            for q in p..n {
                let mut a = DMatrix::zeros(n, n);
                if p == q {
                    a[(p, p)] = 1.0;
                    rhs.push(x[(p, p)]);
                    free.push(-1.0);
                } else {
                    a[(p, q)] = 1.0;
                    a[(q, p)] = 1.0;
                    rhs.push(2.0 * x[(p, q)]);
                    free.push(0.0);
                }
                constraints.push(a);
            }
        }
        let p_rows = constraints.len();
        SdpProblem {
            n,
            constraints,
            free_coeffs: DMatrix::from_column_slice(p_rows, 1, &free),
            rhs: DVector::from_vec(rhs),
            objective: DVector::from_element(1, 1.0),
        }
    }

    #[test]
    fn scalar_slack_reaches_known_optimum() {
        // Z − t = −3, Z ≥ 0, min t has optimum t = 3 at Z = 0.
        let prob = SdpProblem {
            n: 1,
            constraints: vec![DMatrix::from_element(1, 1, 1.0)],
            free_coeffs: DMatrix::from_element(1, 1, -1.0),
            rhs: DVector::from_element(1, -3.0),
            objective: DVector::from_element(1, 1.0),
        };
        let sol = solve_sdp(&prob, 1e-9).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-7);
        assert!(sol.z[(0, 0)].abs() < 1e-6);
        assert!((sol.y[0] + 1.0).abs() < 1e-6);
        assert!(sol.iterations < 60);
    }

    #[test]
    fn pinned_matrix_slack_matches_eigenvalue() {
        // X = [[1, 1], [1, 2]] has eigenvalues (3 ± √5)/2, so the
        // minimal shift making X + t·1 ⪰ 0 is t* = −(3 − √5)/2.
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let prob = pinned_problem(&x);
        let sol = solve_sdp(&prob, 1e-9).unwrap();
        let expected = -(3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((sol.objective - expected).abs() < 1e-7);
        // Optimal Z is exactly X + t*·1 (singular, with min eigenvalue 0).
        let want = &x + DMatrix::identity(2, 2).scale(expected);
        assert!((&sol.z - want).norm() < 1e-6);
        assert!(min_eig_sym(&sol.z) > -1e-8);
    }

    #[test]
    fn dual_certificate_identities_hold() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let prob = pinned_problem(&x);
        let sol = solve_sdp(&prob, 1e-9).unwrap();
        // S = −Σ y_r A_r up to rounding, and S ⪰ 0.
        let mut comb = DMatrix::zeros(2, 2);
        for (a, &c) in prob.constraints.iter().zip(sol.y.iter()) {
            comb += a.scale(c);
        }
        assert!((&sol.s + comb).norm() < 1e-7);
        assert!(min_eig_sym(&sol.s) > -1e-9);
        // Free-variable dual feasibility Gᵀy = q and zero gap.
        let gy = prob.free_coeffs.transpose() * &sol.y;
        assert!((gy[0] - 1.0).abs() < 1e-7);
        assert!((prob.rhs.dot(&sol.y) - sol.objective).abs() < 1e-6);
    }

    #[test]
    fn random_pinned_problems_match_eigenvalue_oracle() {
        let seeds = SeedSplitter::new(90210);
        for trial in 0..8 {
            let mut rng = seeds.stream_indexed("sdp-pinned", trial);
            let dim = 2 + (trial as usize % 3);
            let mut x = DMatrix::zeros(dim, dim);
            for p in 0..dim {
                for q in p..dim {
                    let v = std_normal(&mut rng);
                    x[(p, q)] = v;
                    x[(q, p)] = v;
                }
            }
            let sol = solve_sdp(&pinned_problem(&x), 1e-9).unwrap();
            let lam_min = nalgebra::SymmetricEigen::new(x.clone())
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, &l| a.min(l));
            assert!(
                (sol.objective + lam_min).abs() < 1e-6,
                "trial {trial}: got {}, want {}",
                sol.objective,
                -lam_min
            );
        }
    }

    #[test]
    fn duplicated_rows_are_reduced_consistently() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let mut prob = pinned_problem(&x);
        // Duplicate the first row verbatim: same solution, and the dual
        // multipliers (now split across the twin rows) still certify.
        prob.constraints.push(prob.constraints[0].clone());
        let g0 = prob.free_coeffs[(0, 0)];
        let p_new = prob.constraints.len();
        let mut free = DMatrix::zeros(p_new, 1);
        free.view_mut((0, 0), (p_new - 1, 1))
            .copy_from(&prob.free_coeffs);
        free[(p_new - 1, 0)] = g0;
        prob.free_coeffs = free;
        prob.rhs = prob.rhs.clone().insert_row(p_new - 1, prob.rhs[0]);

        let sol = solve_sdp(&prob, 1e-9).unwrap();
        let expected = -(3.0 - 5.0f64.sqrt()) / 2.0;
        assert!((sol.objective - expected).abs() < 1e-7);
        assert_eq!(sol.y.len(), p_new);
        let mut comb = DMatrix::zeros(2, 2);
        for (a, &c) in prob.constraints.iter().zip(sol.y.iter()) {
            comb += a.scale(c);
        }
        assert!((&sol.s + comb).norm() < 1e-7);
        let gy = prob.free_coeffs.transpose() * &sol.y;
        assert!((gy[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn contradictory_rows_are_rejected() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let mut prob = pinned_problem(&x);
        // Same row, different right-hand side: no solution at all.
        prob.constraints.push(prob.constraints[0].clone());
        let g0 = prob.free_coeffs[(0, 0)];
        let p_new = prob.constraints.len();
        let mut free = DMatrix::zeros(p_new, 1);
        free.view_mut((0, 0), (p_new - 1, 1))
            .copy_from(&prob.free_coeffs);
        free[(p_new - 1, 0)] = g0;
        prob.free_coeffs = free;
        prob.rhs = prob.rhs.clone().insert_row(p_new - 1, prob.rhs[0] + 1.0);

        match solve_sdp(&prob, 1e-9) {
            Err(Error::Inconsistent(_)) => {}
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn svec_round_trip_preserves_inner_products() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.5, 1.0, -1.0, 0.0, 0.5, 0.0, 3.0]);
        let b = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 2.0, 0.0, 4.0, -1.0, 2.0, -1.0, 0.0]);
        assert!((svec(&a).dot(&svec(&b)) - frob_dot(&a, &b)).abs() < 1e-14);
        assert!((smat(&svec(&a), 3) - &a).norm() < 1e-14);
    }
}
