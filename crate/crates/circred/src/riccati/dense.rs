//! Dense reference Riccati solver.
//!
//! The stabilizing solution is extracted from the stable invariant subspace
//! of the Hamiltonian `[[A, BB^T], [-C^T C, -A^T]]`: the matrix sign
//! function (scaled Newton iteration) yields the subspace projector without
//! any eigenvalue reordering, a basis `[U1; U2]` is read off, and
//! `X = U2 U1^{-1}` is polished by one or two Newton corrections solved as
//! Lyapunov equations. GAREs with singular `E` are deflated onto the proper
//! subspace through the spectral projectors, solved as dense AREs, and
//! re-embedded.

use nalgebra::DMatrix;

use super::{ArePrbtData, GarePrbtData};
use crate::linalg::{kernel_basis, range_basis, symmetrize, Mat};
use crate::{Error, Result};

const SIGN_MAX_ITER: usize = 120;

/// Matrix sign function by determinant-scaled Newton iteration.
///
/// Fails when the argument has eigenvalues on (or numerically near) the
/// imaginary axis.
pub fn matrix_sign(h: &Mat) -> Result<Mat> {
    let n = h.nrows();
    let mut z = h.clone();
    let mut last_delta = f64::INFINITY;
    for _ in 0..SIGN_MAX_ITER {
        let lu = z.clone().lu();
        // |det|^(1/n) via the log of the U diagonal, safe against overflow.
        let mut logdet = 0.0f64;
        for i in 0..n {
            let u = lu.u()[(i, i)].abs();
            if u == 0.0 || !u.is_finite() {
                return Err(Error::Numerical(
                    "sign iteration hit a singular iterate (eigenvalue on the imaginary axis?)"
                        .into(),
                ));
            }
            logdet += u.ln();
        }
        let zinv = lu
            .try_inverse()
            .ok_or_else(|| Error::Numerical("sign iteration: singular iterate".into()))?;
        let c = (-logdet / n as f64).exp().clamp(1e-6, 1e6);
        let znew = (&z * c + zinv / c) * 0.5;
        let delta = (&znew - &z).norm();
        let scale = znew.norm().max(f64::MIN_POSITIVE);
        z = znew;
        if delta <= 1e-14 * scale {
            return Ok(z);
        }
        if delta <= 1e-8 * scale && delta >= 0.5 * last_delta {
            // Stagnated at roundoff level; good enough.
            return Ok(z);
        }
        last_delta = delta;
    }
    Err(Error::Numerical(
        "matrix sign iteration did not converge".into(),
    ))
}

/// Solve `M^T X + X M + Q = 0` for Hurwitz `M` through the sign function of
/// the block matrix `[[M^T, Q], [0, -M]]`.
pub fn lyapunov_stable(m: &Mat, q: &Mat) -> Result<Mat> {
    let n = m.nrows();
    let mut h = Mat::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(&m.transpose());
    h.view_mut((0, n), (n, n)).copy_from(q);
    h.view_mut((n, n), (n, n)).copy_from(&(-m));
    let s = matrix_sign(&h)?;
    let mut x = s.view((0, n), (n, n)).into_owned() * 0.5;
    symmetrize(&mut x);
    Ok(x)
}

/// Core positive-real ARE solve: `A^T X + X A + X B B^T X + C^T C = 0`.
fn solve_care_core(a: &Mat, b: &Mat, c: &Mat) -> Result<Mat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if c.norm() == 0.0 {
        return Ok(Mat::zeros(n, n));
    }

    let mut h = Mat::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(b * b.transpose()));
    h.view_mut((n, 0), (n, n)).copy_from(&(-(c.transpose() * c)));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let s = matrix_sign(&h)?;
    let p = (Mat::identity(2 * n, 2 * n) - s) * 0.5;
    // Basis of range(P): the singular values of a projector split cleanly
    // at 1 vs 0; pick the dominant n directions and insist the count is n.
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let rank = svd.singular_values.iter().filter(|&&sv| sv > 0.5).count();
    if rank != n {
        return Err(Error::Numerical(format!(
            "stable invariant subspace has dimension {rank}, expected {n}"
        )));
    }
    let u1 = u.view((0, 0), (n, n)).into_owned();
    let u2 = u.view((n, 0), (n, n)).into_owned();
    let xt = u1
        .transpose()
        .lu()
        .solve(&u2.transpose())
        .ok_or_else(|| Error::Numerical("invariant subspace basis singular".into()))?;
    let mut x = xt.transpose();
    symmetrize(&mut x);

    // Newton polish: A~ = A + BB^T X stays Hurwitz for the stabilizing branch.
    let qnorm = (c.transpose() * c).norm().max(f64::MIN_POSITIVE);
    for _ in 0..3 {
        let resid = a.transpose() * &x
            + &x * a
            + &x * b * b.transpose() * &x
            + c.transpose() * c;
        if resid.norm() <= 1e-12 * qnorm {
            break;
        }
        let closed = a + b * b.transpose() * &x;
        let delta = lyapunov_stable(&closed, &resid)?;
        x += delta;
        symmetrize(&mut x);
    }
    Ok(x)
}

/// Deflate uncontrollable/unobservable kernel modes of `A` before the sign
/// iteration (they put Hamiltonian eigenvalues exactly on the axis).
fn solve_care_deflating(a: &Mat, b: &Mat, c: &Mat, tol: f64) -> Result<Mat> {
    let n = a.nrows();
    let k0 = kernel_basis(a, tol);
    if k0.ncols() == 0 {
        return solve_care_core(a, b, c);
    }
    let w0 = kernel_basis(&a.transpose(), tol);
    let scale_b = b.norm().max(1.0);
    let scale_c = c.norm().max(1.0);
    if (c * &k0).norm() > tol * scale_c * 10.0 || (b.transpose() * &w0).norm() > tol * scale_b * 10.0
    {
        return Err(Error::Numerical(
            "drift has imaginary-axis modes coupled to the data; no stabilizing solution".into(),
        ));
    }
    let u1 = range_basis(a, tol);
    if u1.ncols() + k0.ncols() != n {
        return Err(Error::Numerical(
            "defective zero eigenvalue of the drift; cannot deflate".into(),
        ));
    }
    let mut t = Mat::zeros(n, n);
    t.view_mut((0, 0), (n, u1.ncols())).copy_from(&u1);
    t.view_mut((0, u1.ncols()), (n, k0.ncols())).copy_from(&k0);
    let tlu = t.clone().lu();
    let n1 = u1.ncols();
    let at = tlu
        .solve(&(a * &t))
        .ok_or_else(|| Error::Singular("deflation basis".into()))?;
    let bt = tlu
        .solve(b)
        .ok_or_else(|| Error::Singular("deflation basis".into()))?;
    let a11 = at.view((0, 0), (n1, n1)).into_owned();
    let b1 = bt.rows(0, n1).into_owned();
    let c1 = (c * &t).columns(0, n1).into_owned();
    let x1 = solve_care_core(&a11, &b1, &c1)?;
    // X = T^{-T} diag(X1, 0) T^{-1}
    let mut xz = Mat::zeros(n, n);
    xz.view_mut((0, 0), (n1, n1)).copy_from(&x1);
    let tinv = t
        .try_inverse()
        .ok_or_else(|| Error::Singular("deflation basis".into()))?;
    let mut x = tinv.transpose() * xz * tinv;
    symmetrize(&mut x);
    Ok(x)
}

/// Stabilizing solution of the positive-real ARE built by
/// [`super::prbt_are_data`]; the residual is verified against the constant
/// term before returning.
pub fn dense_riccati_solve_are(data: &ArePrbtData) -> Result<Mat> {
    let x = solve_care_deflating(&data.a, &data.b, &data.c, 1e-10)?;
    let qnorm = data.constant_term_norm().max(f64::MIN_POSITIVE);
    let resid = data.residual(&x);
    if resid > 1e-8 * qnorm {
        return Err(Error::Numerical(format!(
            "ARE residual {resid:.3e} exceeds 1e-8 * {qnorm:.3e}"
        )));
    }
    Ok(x)
}

/// Shared deflated-GARE solve: given `E`, drift `A`, input `B`, projected
/// output factor `C_proj = C P_r`, and the projector pair, solve on the
/// proper subspace and re-embed as `X = V_l X̂ V_l^T`.
fn solve_gare_on_subspace(
    e: &Mat,
    a: &Mat,
    b: &Mat,
    c_proj: &Mat,
    pr: &Mat,
    pl: &Mat,
) -> Result<Mat> {
    let tol = 1e-12;
    let vr = range_basis(pr, tol);
    let vl = range_basis(&pl.transpose(), tol);
    if vr.ncols() != vl.ncols() {
        return Err(Error::Numerical(
            "left/right deflating subspaces disagree in dimension".into(),
        ));
    }
    let ehat = vl.transpose() * e * &vr;
    let ahat = vl.transpose() * a * &vr;
    let bhat = vl.transpose() * b;
    let chat = c_proj * &vr;
    let elu = ehat.clone().lu();
    let a_red = elu
        .solve(&ahat)
        .ok_or_else(|| Error::Singular("projected E".into()))?;
    let b_red = elu
        .solve(&bhat)
        .ok_or_else(|| Error::Singular("projected E".into()))?;
    let x_red = solve_care_deflating(&a_red, &b_red, &chat, 1e-10)?;
    // X̂ = E^{-T} X' E^{-1}
    let et_lu = ehat.transpose().lu();
    let tmp = et_lu
        .solve(&x_red)
        .ok_or_else(|| Error::Singular("projected E".into()))?;
    let xhat = et_lu
        .solve(&tmp.transpose())
        .ok_or_else(|| Error::Singular("projected E".into()))?;
    let mut x = &vl * xhat * vl.transpose();
    symmetrize(&mut x);
    Ok(x)
}

/// Stabilizing solution of the primal GARE (`A1`, constant term
/// `P_r^T C^T C P_r`); the full-equation residual is verified.
pub fn dense_riccati_solve_gare(data: &GarePrbtData) -> Result<Mat> {
    let x = solve_gare_on_subspace(
        &data.e,
        &data.a1(),
        &data.b,
        &(&data.c * &data.pr),
        &data.pr,
        &data.pl,
    )?;
    let qnorm = data.constant_term_norm().max(f64::MIN_POSITIVE);
    let resid = data.residual(&x);
    if resid > 1e-8 * qnorm {
        return Err(Error::Numerical(format!(
            "GARE residual {resid:.3e} exceeds 1e-8 * {qnorm:.3e}"
        )));
    }
    Ok(x)
}

/// Stabilizing solution of the dual GARE
/// `A2 Y E^T + E Y A2^T + E Y C^T C Y E^T + P_l B B^T P_l^T = 0`,
/// solved by transposing into primal shape.
pub fn dense_riccati_solve_gare_dual(data: &GarePrbtData) -> Result<Mat> {
    let a2 = data.a2();
    let y = solve_gare_on_subspace(
        &data.e.transpose(),
        &a2.transpose(),
        &data.c.transpose(),
        &(data.b.transpose() * data.pl.transpose()),
        &data.pl.transpose(),
        &data.pr.transpose(),
    )?;
    let lhs = &a2 * &y * data.e.transpose()
        + &data.e * &y * a2.transpose()
        + &data.e * &y * data.c.transpose() * &data.c * &y * data.e.transpose()
        + &data.pl * &data.b * data.b.transpose() * data.pl.transpose();
    let qnorm = (&data.pl * &data.b * data.b.transpose() * data.pl.transpose())
        .norm()
        .max(f64::MIN_POSITIVE);
    if lhs.norm() > 1e-8 * qnorm {
        return Err(Error::Numerical(format!(
            "dual GARE residual {:.3e} exceeds 1e-8 * {qnorm:.3e}",
            lhs.norm()
        )));
    }
    Ok(y)
}

/// Dual ARE `A Y + Y A^T + Y C^T C Y + B B^T = 0`, solved by swapping the
/// roles of `B` and `C`.
pub fn dense_riccati_solve_are_dual(data: &ArePrbtData) -> Result<Mat> {
    let swapped = ArePrbtData {
        a: data.a.transpose(),
        b: data.c.transpose(),
        c: data.b.transpose(),
        dfac: data.dfac.clone(),
        sign: data.sign.clone(),
        eps_used: data.eps_used,
    };
    let y = solve_care_deflating(&swapped.a, &swapped.b, &swapped.c, 1e-10)?;
    let qnorm = (data.b.clone() * data.b.transpose())
        .norm()
        .max(f64::MIN_POSITIVE);
    let resid = (&data.a * &y
        + &y * data.a.transpose()
        + &y * data.c.transpose() * &data.c * &y
        + &data.b * data.b.transpose())
        .norm();
    if resid > 1e-8 * qnorm {
        return Err(Error::Numerical(format!(
            "dual ARE residual {resid:.3e} exceeds 1e-8 * {qnorm:.3e}"
        )));
    }
    Ok(y)
}

/// Eigenvalues of the closed loop `A + B B^T X` (diagnostic).
pub fn closed_loop_eigenvalues(data: &ArePrbtData, x: &Mat) -> Vec<num_complex::Complex64> {
    let closed: DMatrix<f64> = &data.a + &data.b * data.b.transpose() * x;
    closed.complex_eigenvalues().iter().copied().collect()
}
