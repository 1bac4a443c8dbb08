//! Low-rank RADI iteration for the positive-real (G)ARE.
//!
//! Each step solves one shifted system `(A^T + K B^T + sigma E^T) V = R`,
//! appends the scaled `V` to the low-rank factor `Z`, extends the
//! block-diagonal `Y`, and updates the residual factor `R` and feedback
//! `K = E^T X B`. The feedback term is absorbed through the
//! Sherman-Morrison-Woodbury identity so that one factorization per distinct
//! shift is reused across the whole run.

use num_complex::Complex64;

use super::shifts::ShiftSet;
use crate::linalg::{all_finite_c, to_complex, CMat, Mat};
use crate::{Error, Result};

/// Stopping control for [`radi`].
#[derive(Debug, Clone, Copy)]
pub struct RadiOptions {
    /// Relative residual target: stop once `‖R*R‖_F < tol * ‖C C^T‖_F`.
    pub tol: f64,
    /// Hard cap on the number of steps (shifts are reused round-robin).
    pub max_steps: usize,
}

impl Default for RadiOptions {
    fn default() -> Self {
        RadiOptions {
            tol: 1e-8,
            max_steps: 100,
        }
    }
}

/// Accumulated low-rank solution `X = Z Y^{-1} Z^*`.
#[derive(Debug, Clone)]
pub struct LowRankFactor {
    pub z: CMat,
    /// Hermitian `m x m` blocks of the block-diagonal `Y`.
    pub yblocks: Vec<CMat>,
    /// Feedback `K = E^T X B`.
    pub k: CMat,
    /// `‖R*R‖_F` after each completed step (Frobenius norms).
    pub residual_history: Vec<f64>,
    pub shifts_used: Vec<Complex64>,
    /// False when the step cap was hit before reaching the tolerance.
    pub converged: bool,
}

impl LowRankFactor {
    pub fn steps(&self) -> usize {
        self.yblocks.len()
    }

    /// Dense `X = Z Y^{-1} Z^*` (testing and small-problem use).
    pub fn dense_solution(&self) -> Result<CMat> {
        let n = self.z.nrows();
        let m = if self.yblocks.is_empty() {
            return Ok(CMat::zeros(n, n));
        } else {
            self.yblocks[0].nrows()
        };
        let mut x = CMat::zeros(n, n);
        for (i, y) in self.yblocks.iter().enumerate() {
            let zi = self.z.columns(i * m, m);
            let yi = y
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Singular("RADI Y block".into()))?;
            x += zi * yi * zi.adjoint();
        }
        Ok(x)
    }
}

/// Run the RADI iteration for
/// `A^T X E + E^T X A + E^T X B B^T X E + C C^T-factor = 0`
/// with `R0 = cfac` (use `cfac = C^T` for the plain equation, `(C P_r)^T`
/// for the projected GARE constant term).
pub fn radi(
    e: &Mat,
    a: &Mat,
    b: &Mat,
    cfac: &Mat,
    shifts: &ShiftSet,
    opts: &RadiOptions,
) -> Result<LowRankFactor> {
    let n = a.nrows();
    let m = cfac.ncols();
    if shifts.values.is_empty() {
        return Err(Error::InvalidArgument("empty shift set".into()));
    }
    if cfac.nrows() != n || b.nrows() != n || e.nrows() != n {
        return Err(Error::InvalidArgument("RADI dimension mismatch".into()));
    }

    let at = to_complex(&a.transpose());
    let et = to_complex(&e.transpose());
    let bc = to_complex(b);

    let mut r = to_complex(cfac);
    let mut k = CMat::zeros(n, m);
    let mut z = CMat::zeros(n, 0);
    let mut yblocks: Vec<CMat> = Vec::new();
    let mut history = Vec::new();
    let mut used = Vec::new();

    let ccnorm = (r.adjoint() * &r).norm();
    if ccnorm == 0.0 {
        return Ok(LowRankFactor {
            z,
            yblocks,
            k,
            residual_history: history,
            shifts_used: used,
            converged: true,
        });
    }

    // One factorization per distinct shift, reused round-robin.
    let mut factors: Vec<Option<nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>>> =
        vec![None; shifts.values.len()];

    let mut resid = ccnorm;
    let mut step = 0usize;
    while resid >= opts.tol * ccnorm && step < opts.max_steps {
        let idx = step % shifts.values.len();
        let sigma = shifts.values[idx];
        if sigma.re >= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "shift {sigma} has nonnegative real part"
            )));
        }
        if factors[idx].is_none() {
            let shifted = &at + &et * sigma;
            factors[idx] = Some(shifted.lu());
        }
        let lu = factors[idx].as_ref().unwrap();

        let scale = (-2.0 * sigma.re).sqrt();
        // (A^T + K B^T + sigma E^T)^{-1} R by SMW on the cached factor.
        let fr = lu
            .solve(&r)
            .ok_or_else(|| Error::Singular(format!("shifted solve at {sigma}")))?;
        let v_raw = if k.norm() == 0.0 {
            fr
        } else {
            let fk = lu
                .solve(&k)
                .ok_or_else(|| Error::Singular(format!("shifted solve at {sigma}")))?;
            let small = CMat::identity(m, m) + bc.transpose() * &fk;
            let rhs = bc.transpose() * &fr;
            let correction = small
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Singular("SMW inner block".into()))?;
            fr - fk * correction
        };
        let v = v_raw * Complex64::new(scale, 0.0);
        if !all_finite_c(&v) {
            return Err(Error::Numerical("RADI produced non-finite values".into()));
        }

        let vb = v.adjoint() * &bc;
        let ytil = CMat::identity(m, m)
            + (&vb * vb.adjoint()) * Complex64::new(1.0 / (2.0 * sigma.re), 0.0);
        let ylu = ytil.clone().lu();
        let yinv_vb_adj = ylu
            .solve(&CMat::identity(m, m))
            .ok_or_else(|| Error::Singular("RADI Y block".into()))?;

        let etv = &et * &v;
        r += &etv * &yinv_vb_adj * Complex64::new(scale, 0.0);
        k += &etv * &yinv_vb_adj * &vb;

        let mut z_new = CMat::zeros(n, z.ncols() + m);
        z_new.columns_mut(0, z.ncols()).copy_from(&z);
        z_new.columns_mut(z.ncols(), m).copy_from(&v);
        z = z_new;
        yblocks.push(ytil);
        used.push(sigma);

        resid = (r.adjoint() * &r).norm();
        history.push(resid);
        step += 1;
    }

    Ok(LowRankFactor {
        z,
        yblocks,
        k,
        residual_history: history,
        shifts_used: used,
        converged: resid < opts.tol * ccnorm,
    })
}

/// Real Cholesky-type factor `Q` with `Q Q^T = Re(Z Y^{-1} Z^*)`.
///
/// `Y^{-1} = Y_h^{-1} Y_h^{-*}` is taken blockwise from the Cholesky factor
/// of each `m x m` block; imaginary columns are dropped when every shift was
/// real.
pub fn cholesky_from_radi(f: &LowRankFactor) -> Result<Mat> {
    let n = f.z.nrows();
    if f.yblocks.is_empty() {
        return Ok(Mat::zeros(n, 0));
    }
    let m = f.yblocks[0].nrows();
    let mut w = CMat::zeros(n, f.z.ncols());
    for (i, y) in f.yblocks.iter().enumerate() {
        // nalgebra's complex Cholesky happily takes complex square roots of
        // indefinite diagonals, so definiteness must be checked explicitly.
        if crate::linalg::min_eig_hermitian_part(y) <= 0.0 {
            return Err(Error::Numerical(
                "RADI Y block not positive definite".into(),
            ));
        }
        let chol = y
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical("RADI Y block not positive definite".into()))?;
        // W_i = Z_i L^{-*}: solve L^* on the right.
        let linv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Singular("Y block factor".into()))?;
        let wi = f.z.columns(i * m, m) * linv.adjoint();
        w.columns_mut(i * m, m).copy_from(&wi);
    }
    let re = w.map(|x| x.re);
    let im = w.map(|x| x.im);
    if im.norm() <= 1e-14 * re.norm().max(f64::MIN_POSITIVE) {
        return Ok(re);
    }
    let mut q = Mat::zeros(n, 2 * w.ncols());
    q.columns_mut(0, w.ncols()).copy_from(&re);
    q.columns_mut(w.ncols(), w.ncols()).copy_from(&im);
    Ok(q)
}
