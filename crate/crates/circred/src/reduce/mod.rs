//! Balanced truncation of the Riccati solution factors.
//!
//! Both pipelines share one balancing core: eigendecompose `Q^T W Q`
//! (`W = I'_r` for the state-equation route, `W = Ē0` for the Stokes route),
//! keep the dominant absolute eigenvalues — the Hankel singular values with
//! signs — and contract the realization with the scaled eigenbasis. The
//! truncated realization keeps `Ẽs`/`Ãs` symmetric, which is exactly what
//! preserves reciprocity, and the transfer matrix is
//! `C̃1 S1 (s Ẽs - Ãs)^{-1} B̃1 + M0 + s M1`.

mod model;

pub use model::{parse_reduced_model, write_reduced_model};

use num_complex::Complex64;

use crate::canon::{StateRealization, StokesForm};
use crate::circuit::Formulation;
use crate::linalg::{solve_complex, symmetrize, to_complex, CMat, Mat};
use crate::{Error, Result};

/// Eigenvalues below this (relative to the largest) are treated as zero rank.
const HANKEL_RANK_TOL: f64 = 1e-12;
/// Ties tighter than this (relative to the largest) are never split.
const HANKEL_TIE_TOL: f64 = 1e-12;
/// Auto order: smallest k with `sigma_{k+1}/sigma_1 <= this`.
const AUTO_ORDER_DROP: f64 = 1e-8;

/// Requested truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderSpec {
    Fixed(usize),
    Auto,
}

/// Shared balancing data: the spectrum of `Q^T W Q` and the contraction
/// basis, ordered by decreasing `|sigma|` and cut at numerical rank.
#[derive(Debug, Clone)]
pub struct BalancingData {
    /// Retained eigenvectors of `Q^T W Q`, one column per Hankel value.
    pub u: Mat,
    /// `|Sigma|`, descending.
    pub sigma_abs: Vec<f64>,
    /// Signs of `Sigma`.
    pub signs: Vec<f64>,
}

impl BalancingData {
    pub fn rank(&self) -> usize {
        self.sigma_abs.len()
    }

    /// Resolve an order request against the spectrum (tie clusters are
    /// extended; returns the effective order).
    pub fn resolve_order(&self, order: OrderSpec) -> Result<usize> {
        let rank = self.rank();
        let mut k = match order {
            OrderSpec::Fixed(k) => {
                if k > rank {
                    return Err(Error::InvalidArgument(format!(
                        "requested order {k} exceeds numerical rank {rank}"
                    )));
                }
                k
            }
            OrderSpec::Auto => {
                let s1 = self.sigma_abs.first().copied().unwrap_or(0.0);
                let mut k = rank;
                for (i, s) in self.sigma_abs.iter().enumerate() {
                    if *s <= AUTO_ORDER_DROP * s1 {
                        k = i;
                        break;
                    }
                }
                k.max(1).min(rank)
            }
        };
        // Never split a tied cluster at the boundary.
        if k > 0 {
            let s1 = self.sigma_abs[0];
            while k < rank
                && (self.sigma_abs[k - 1] - self.sigma_abs[k]).abs() <= HANKEL_TIE_TOL * s1
            {
                k += 1;
            }
        }
        Ok(k)
    }
}

/// Decompose `Q^T W Q` into the signed Hankel spectrum.
pub fn balance(q: &Mat, w: &Mat) -> BalancingData {
    let core = q.transpose() * w * q;
    let core = 0.5 * (&core + core.transpose());
    let eig = core.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .partial_cmp(&eig.eigenvalues[a].abs())
            .unwrap()
    });
    let lmax = idx
        .first()
        .map(|&i| eig.eigenvalues[i].abs())
        .unwrap_or(0.0);
    let kept: Vec<usize> = idx
        .into_iter()
        .filter(|&i| eig.eigenvalues[i].abs() > HANKEL_RANK_TOL * lmax)
        .collect();
    let u = Mat::from_fn(eig.eigenvectors.nrows(), kept.len(), |r, c| {
        eig.eigenvectors[(r, kept[c])]
    });
    let sigma_abs = kept.iter().map(|&i| eig.eigenvalues[i].abs()).collect();
    let signs = kept
        .iter()
        .map(|&i| if eig.eigenvalues[i] >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    BalancingData {
        u,
        sigma_abs,
        signs,
    }
}

/// Signed Hankel spectrum of `Q^T W Q`, for order selection and reporting.
pub fn hankel_spectrum(q: &Mat, w: &Mat) -> (Vec<f64>, Vec<f64>) {
    let b = balance(q, w);
    (b.sigma_abs, b.signs)
}

/// Reciprocity- and passivity-preserving reduced model.
///
/// Stored in *physical* frequency units: any internal scaling of the pencil
/// has been folded into `es` and `m1`, so the transfer matrix is
/// `C1 S1 (s Es - As)^{-1} B1 + M0 + s M1` at physical `s`.
#[derive(Debug, Clone)]
pub struct ReducedModel {
    pub es: Mat,
    pub a_s: Mat,
    pub s1: Vec<f64>,
    pub b1: Mat,
    pub c1: Mat,
    pub m0: Mat,
    pub m1: Mat,
    pub formulation: Formulation,
    pub port_sign: Vec<f64>,
}

impl ReducedModel {
    pub fn order(&self) -> usize {
        self.a_s.nrows()
    }

    pub fn ports(&self) -> usize {
        self.m0.nrows()
    }

    pub fn s1_matrix(&self) -> Mat {
        Mat::from_diagonal(&nalgebra::DVector::from_vec(self.s1.clone()))
    }

    /// Evaluate the transfer matrix at a physical frequency point.
    pub fn transfer_at(&self, s: Complex64) -> Result<CMat> {
        let k = self.order();
        let mut g = to_complex(&self.m0) + to_complex(&self.m1) * s;
        if k > 0 {
            let pencil = to_complex(&self.es) * s - to_complex(&self.a_s);
            let x = solve_complex(&pencil, &to_complex(&self.b1), "reduced pencil")?;
            g += to_complex(&(&self.c1 * self.s1_matrix())) * x;
        }
        Ok(g)
    }
}

/// ARE-based truncation of a state realization (the state-equation route).
///
/// `q` is any factor with `Q Q^T = X` (dense solve or the RADI factor); the
/// realization's `M0`/`M1` ride along, so the same routine covers the
/// projected index-2 route.
pub fn rprbt1(sr: &StateRealization, q: &Mat, order: OrderSpec) -> Result<ReducedModel> {
    if q.nrows() != sr.order() {
        return Err(Error::InvalidArgument(
            "factor rows do not match the realization order".into(),
        ));
    }
    let sign = sr.sign_matrix();
    let bal = balance(q, &sign);
    let k = bal.resolve_order(order)?;

    let (w1, s1) = contraction(&bal, q, k);
    // Center I'_r A_s I'_r = Â0 I'_r.
    let center = sr.a_hat() * &sign;
    let mut a_s = w1.transpose() * &center * &w1;
    symmetrize(&mut a_s);
    let b1 = w1.transpose() * &sr.b_hat;
    let c1 =
        &sr.c_hat * &sign * &w1 * Mat::from_diagonal(&nalgebra::DVector::from_vec(s1.clone()));

    let omega0 = sr.omega0;
    Ok(ReducedModel {
        es: Mat::from_diagonal(&nalgebra::DVector::from_vec(s1.clone())) / omega0,
        a_s,
        s1,
        b1,
        c1,
        m0: sr.m0.clone(),
        m1: &sr.m1 / omega0,
        formulation: sr.formulation,
        port_sign: sr.port_sign.clone(),
    })
}

/// GARE-based truncation of a Stokes form (the projector route).
pub fn rprbt2(
    st: &StokesForm,
    q: &Mat,
    order: OrderSpec,
    m0: &Mat,
    m1: &Mat,
) -> Result<ReducedModel> {
    if q.nrows() != st.n() {
        return Err(Error::InvalidArgument(
            "factor rows do not match the Stokes dimension".into(),
        ));
    }
    let e0 = st.ebar0();
    let bal = balance(q, &e0);
    let k = bal.resolve_order(order)?;

    let (w1, s1) = contraction(&bal, q, k);
    let mut es = w1.transpose() * &e0 * &w1;
    symmetrize(&mut es);
    let mut a_s = w1.transpose() * st.abar0() * &w1;
    symmetrize(&mut a_s);
    let b1 = w1.transpose() * st.bbar0();
    let c1 = st.cbar0() * &w1 * Mat::from_diagonal(&nalgebra::DVector::from_vec(s1.clone()));

    let omega0 = st.omega0;
    Ok(ReducedModel {
        es: es / omega0,
        a_s,
        s1,
        b1,
        c1,
        m0: m0.clone(),
        m1: m1 / omega0,
        formulation: st.formulation,
        port_sign: st.port_sign.clone(),
    })
}

/// Contraction basis `W1 = Q U1 |Sigma_1|^{-1/2}` and the retained signs.
fn contraction(bal: &BalancingData, q: &Mat, k: usize) -> (Mat, Vec<f64>) {
    let mut w1 = q * bal.u.columns(0, k);
    for j in 0..k {
        let scale = bal.sigma_abs[j].sqrt().recip();
        for i in 0..w1.nrows() {
            w1[(i, j)] *= scale;
        }
    }
    (w1, bal.signs[..k].to_vec())
}
