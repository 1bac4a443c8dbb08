//! Positive-real Riccati equations: problem data, a dense reference solver,
//! the low-rank RADI iteration, and Krylov shift computation.
//!
//! Both reductions solve equations with a *positive* quadratic term,
//!
//! ```text
//! A^T X   + X A     + X B B^T X       + C^T C           = 0   (ARE)
//! A^T X E + E^T X A + E^T X B B^T X E + P_r^T C^T C P_r = 0   (GARE)
//! ```
//!
//! assembled from a state realization or a Stokes form so that the solution
//! factors drive balanced truncation.

pub mod dense;
pub mod radi;
pub mod shifts;

pub use dense::{
    dense_riccati_solve_are, dense_riccati_solve_are_dual, dense_riccati_solve_gare,
    dense_riccati_solve_gare_dual,
};
pub use radi::{cholesky_from_radi, radi, LowRankFactor, RadiOptions};
pub use shifts::{compute_shifts_lrg, compute_shifts_sml, ShiftSet, ShiftStrategy};

use crate::canon::{ProjectorPair, StateRealization, StokesForm};
use crate::linalg::Mat;
use crate::{Error, Result};

/// ARE data for the positive-real balanced truncation of a state equation.
#[derive(Debug, Clone)]
pub struct ArePrbtData {
    /// `A = Â0 - B C`.
    pub a: Mat,
    /// `B = B̂0 D`.
    pub b: Mat,
    /// `C = D^T Ĉ0`.
    pub c: Mat,
    /// Factor with `D D^T = (D̂0 + D̂0^T (+ eps I))^{-1}`.
    pub dfac: Mat,
    /// Signature diagonal of the underlying states.
    pub sign: Vec<f64>,
    /// Regularization actually applied to the constant term.
    pub eps_used: f64,
}

impl ArePrbtData {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Residual `‖A^T X + X A + X B B^T X + C^T C‖_F`.
    pub fn residual(&self, x: &Mat) -> f64 {
        (self.a.transpose() * x
            + x * &self.a
            + x * &self.b * self.b.transpose() * x
            + self.c.transpose() * &self.c)
            .norm()
    }

    pub fn constant_term_norm(&self) -> f64 {
        (self.c.transpose() * &self.c).norm()
    }
}

/// GARE data for the Stokes-form balanced truncation.
#[derive(Debug, Clone)]
pub struct GarePrbtData {
    /// `Ē0` (singular for index-2 inputs).
    pub e: Mat,
    /// Raw `Ā0`; the drift of the primal equation is [`Self::a1`].
    pub abar0: Mat,
    /// `B = B̄0 D`.
    pub b: Mat,
    /// `C = D^T C̄0`.
    pub c: Mat,
    pub pr: Mat,
    pub pl: Mat,
    pub dfac: Mat,
    pub eps_used: f64,
}

impl GarePrbtData {
    pub fn order(&self) -> usize {
        self.e.nrows()
    }

    /// Drift of the primal equation: `A1 = Ā0 - B C P_r`.
    pub fn a1(&self) -> Mat {
        &self.abar0 - &self.b * &self.c * &self.pr
    }

    /// Drift of the dual equation: `A2 = Ā0 - P_l B C`.
    pub fn a2(&self) -> Mat {
        &self.abar0 - &self.pl * &self.b * &self.c
    }

    /// Factor of the constant term used by RADI: `(C P_r)^T`.
    pub fn radi_rhs_factor(&self) -> Mat {
        (&self.c * &self.pr).transpose()
    }

    /// Residual of the primal GARE at `x`.
    pub fn residual(&self, x: &Mat) -> f64 {
        let a1 = self.a1();
        let cpr = &self.c * &self.pr;
        (a1.transpose() * x * &self.e
            + self.e.transpose() * x * &a1
            + self.e.transpose() * x * &self.b * self.b.transpose() * x * &self.e
            + cpr.transpose() * cpr)
            .norm()
    }

    pub fn constant_term_norm(&self) -> f64 {
        let cpr = &self.c * &self.pr;
        (cpr.transpose() * cpr).norm()
    }
}

/// Invert the symmetrized constant term, regularizing when singular.
///
/// Returns the factor `D` with `D D^T = (S (+ eps I))^{-1}` and the
/// regularization actually used. Indefinite input violates positive
/// realness and is rejected, naming the offending eigenvalue.
fn constant_term_factor(sum: &Mat, eps_reg: f64) -> Result<(Mat, f64)> {
    let m = sum.nrows();
    let eig = sum.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let lmin = eig.eigenvalues.min();
    if lmin < -1e-10 * lmax {
        return Err(Error::NotPositiveReal(format!(
            "constant term D0 + D0^T has negative eigenvalue {lmin:.3e}"
        )));
    }
    let eps = if lmin <= 1e-12 * lmax { eps_reg } else { 0.0 };
    if eps == 0.0 && lmin <= 0.0 {
        return Err(Error::NotPositiveReal(
            "constant term is singular and no regularization was allowed".into(),
        ));
    }
    let reg = sum + Mat::identity(m, m) * eps;
    let inv = reg
        .try_inverse()
        .ok_or_else(|| Error::Singular("regularized constant term".into()))?;
    let inv = 0.5 * (&inv + inv.transpose());
    let chol = inv
        .cholesky()
        .ok_or_else(|| Error::NotPositiveReal("constant term inverse not SPD".into()))?;
    Ok((chol.l(), eps))
}

/// Assemble the ARE data from a state realization.
///
/// `eps_reg` is applied only when `M0 + M0^T` is numerically singular (the
/// regularized index-2 case).
pub fn prbt_are_data(sr: &StateRealization, eps_reg: f64) -> Result<ArePrbtData> {
    let sum = &sr.m0 + sr.m0.transpose();
    let (dfac, eps_used) = constant_term_factor(&sum, eps_reg)?;
    let b = &sr.b_hat * &dfac;
    let c = dfac.transpose() * &sr.c_hat;
    let a = sr.a_hat() - &b * &c;
    Ok(ArePrbtData {
        a,
        b,
        c,
        dfac,
        sign: sr.sign.clone(),
        eps_used,
    })
}

/// Assemble the GARE data from a Stokes form and its projectors.
pub fn prbt_gare_data(
    s: &StokesForm,
    p: &ProjectorPair,
    m0: &Mat,
    eps_reg: f64,
) -> Result<GarePrbtData> {
    let sum = m0 + m0.transpose();
    let (dfac, eps_used) = constant_term_factor(&sum, eps_reg)?;
    let b = s.bbar0() * &dfac;
    let c = dfac.transpose() * s.cbar0();
    Ok(GarePrbtData {
        e: s.ebar0(),
        abar0: s.abar0(),
        b,
        c,
        pr: p.pr.clone(),
        pl: p.pl.clone(),
        dfac,
        eps_used,
    })
}
