//! Signature-canonical form, index detection, and the index-1 state equation.

use num_complex::Complex64;

use super::{ldl_semidefinite, IntegratorTerm, SvdCanonicalForm, StateRealization};
use crate::circuit::DescriptorSystem;
use crate::linalg::{solve_complex, symmetrize, to_complex, CMat, Mat};
use crate::{Error, Result};

/// Pencil index class; RLC networks never exceed two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemIndex {
    Index1,
    Index2,
}

/// Congruence-transform the descriptor system so `E0` becomes `diag(I'_r, 0)`.
pub fn to_svd_canonical(sys: &DescriptorSystem, rank_tol: f64) -> Result<SvdCanonicalForm> {
    let n = sys.n();
    let ldl = ldl_semidefinite(&sys.e0, rank_tol)?;
    let mut warnings = Vec::new();
    if ldl.rank_ambiguous {
        warnings.push(format!(
            "rank decision for E0 is ambiguous: pivot within 10x of rank_tol (rank {})",
            ldl.rank
        ));
    }
    let (v, vinv, signature) = ldl.congruence()?;
    let r = signature.r();

    let mut abar = &vinv * &sys.a0 * vinv.transpose();
    let asym = symmetrize(&mut abar);
    if asym > 1e-8 {
        warnings.push(format!("canonical A lost symmetry at level {asym:.2e}"));
    }
    let bbar = &vinv * &sys.b0;
    let cbar = &sys.c0 * vinv.transpose();

    Ok(SvdCanonicalForm {
        a11: abar.view((0, 0), (r, r)).into_owned(),
        a12: abar.view((0, r), (r, n - r)).into_owned(),
        a21: abar.view((r, 0), (n - r, r)).into_owned(),
        a22: abar.view((r, r), (n - r, n - r)).into_owned(),
        b1: bbar.rows(0, r).into_owned(),
        b2: bbar.rows(r, n - r).into_owned(),
        c1: cbar.columns(0, r).into_owned(),
        c2: cbar.columns(r, n - r).into_owned(),
        signature,
        v,
        vinv,
        formulation: sys.formulation,
        port_sign: sys.port_sign.clone(),
        omega0: sys.omega0,
        warnings,
    })
}

/// Index is one iff the algebraic block `A22` is nonsingular (or empty).
pub fn detect_index(f: &SvdCanonicalForm, sing_tol: f64) -> SystemIndex {
    if f.a22.nrows() == 0 {
        return SystemIndex::Index1;
    }
    let svd = f.a22.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= sing_tol * smax {
        SystemIndex::Index2
    } else {
        SystemIndex::Index1
    }
}

/// Convert an index-1 canonical form into the state equation.
pub fn to_state_equation(f: &SvdCanonicalForm) -> Result<StateRealization> {
    let m = f.m();
    let nk = f.a22.nrows();
    let mut warnings = f.warnings.clone();

    let (a22_a21, a22_b2) = if nk == 0 {
        (Mat::zeros(0, f.r()), Mat::zeros(0, m))
    } else {
        let ldl = ldl_semidefinite(&f.a22, 1e-13).map_err(|e| {
            Error::WrongIndex(format!("A22 factorization failed ({e}); use the index-2 path"))
        })?;
        if ldl.rank < nk {
            return Err(Error::WrongIndex(
                "A22 is numerically singular; use the index-2 path".into(),
            ));
        }
        (ldl.solve(&f.a21)?, ldl.solve(&f.b2)?)
    };

    let mut a_s = &f.a11 - &f.a12 * &a22_a21;
    let asym = symmetrize(&mut a_s);
    if asym > 1e-8 {
        warnings.push(format!("A_s lost symmetry at level {asym:.2e}"));
    }
    let b_pre = &f.b1 - &f.a12 * &a22_b2;
    let b_hat = f.signature.scale_rows(&b_pre);
    let c_hat = &f.c1 - &f.c2 * &a22_a21;
    let m0 = -(&f.c2 * &a22_b2);

    Ok(StateRealization {
        sign: f.signature.diag(),
        a_s,
        b_hat,
        c_hat,
        m1: Mat::zeros(m, m),
        m0,
        integrator: None,
        formulation: f.formulation,
        port_sign: f.port_sign.clone(),
        omega0: f.omega0,
        warnings,
    })
}

/// Split off the pure-integrator part that the canonical form introduces when
/// `A_s` is singular.
///
/// When the kernel of `A_s` is axis aligned (the circuit case) this is the
/// permutation split; otherwise a spectral split is used and the kept block
/// is re-signed by a congruence. If the integrator contribution vanishes it
/// is dropped, else it is returned as metadata on the realization.
pub fn eliminate_improper_artifact(
    sr: &StateRealization,
    sing_tol: f64,
) -> Result<StateRealization> {
    let n = sr.order();
    let scale = sr.a_s.norm();
    let ldl = ldl_semidefinite(&sr.a_s, sing_tol)?;
    if ldl.rank == n || n == 0 {
        return Ok(sr.clone());
    }

    let mut warnings = sr.warnings.clone();
    let zero_rows: Vec<usize> = (0..n)
        .filter(|&i| sr.a_s.row(i).norm() <= sing_tol * scale.max(1.0))
        .collect();

    let (kept, dropped): (StateRealization, IntegratorTerm) =
        if zero_rows.len() == n - ldl.rank {
            split_by_permutation(sr, &zero_rows)
        } else {
            split_by_spectrum(sr, sing_tol)?
        };

    let mut out = kept;
    if dropped.is_vanishing(1e-12) {
        out.integrator = None;
    } else {
        warnings.push(format!(
            "integrator term retained: |C2 B2| = {:.3e}",
            dropped.residue().norm()
        ));
        out.integrator = Some(dropped);
    }
    out.warnings = warnings;
    Ok(out)
}

fn split_by_permutation(
    sr: &StateRealization,
    drop: &[usize],
) -> (StateRealization, IntegratorTerm) {
    let n = sr.order();
    let keep: Vec<usize> = (0..n).filter(|i| !drop.contains(i)).collect();
    let sel = |rows: &[usize], cols: &[usize], m: &Mat| -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };
    let all_cols: Vec<usize> = (0..sr.m()).collect();

    let a_s = sel(&keep, &keep, &sr.a_s);
    let b_hat = sel(&keep, &all_cols, &sr.b_hat);
    let c_hat = {
        let rows: Vec<usize> = (0..sr.m()).collect();
        Mat::from_fn(rows.len(), keep.len(), |i, j| sr.c_hat[(i, keep[j])])
    };
    let sign: Vec<f64> = keep.iter().map(|&i| sr.sign[i]).collect();

    let c2 = Mat::from_fn(sr.m(), drop.len(), |i, j| sr.c_hat[(i, drop[j])]);
    let b2 = sel(drop, &all_cols, &sr.b_hat);
    let int_sign: Vec<f64> = drop.iter().map(|&i| sr.sign[i]).collect();

    (
        StateRealization {
            sign,
            a_s,
            b_hat,
            c_hat,
            m0: sr.m0.clone(),
            m1: sr.m1.clone(),
            integrator: None,
            formulation: sr.formulation,
            port_sign: sr.port_sign.clone(),
            omega0: sr.omega0,
            warnings: Vec::new(),
        },
        IntegratorTerm {
            c2,
            b2,
            sign: int_sign,
        },
    )
}

/// Spectral fallback for kernels that are not axis aligned.
fn split_by_spectrum(
    sr: &StateRealization,
    sing_tol: f64,
) -> Result<(StateRealization, IntegratorTerm)> {
    let n = sr.order();
    let eig = sr.a_s.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.amax();
    let kept_idx: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() > sing_tol * lmax)
        .collect();
    let drop_idx: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() <= sing_tol * lmax)
        .collect();
    let u1 = Mat::from_fn(n, kept_idx.len(), |i, j| eig.eigenvectors[(i, kept_idx[j])]);
    let u0 = Mat::from_fn(n, drop_idx.len(), |i, j| eig.eigenvectors[(i, drop_idx[j])]);
    let lambda1 = Mat::from_diagonal(&nalgebra::DVector::from_vec(
        kept_idx.iter().map(|&i| eig.eigenvalues[i]).collect(),
    ));

    // K = U1^T I' U1 must be invertible for the split to exist; its
    // congruence K = F J F^T yields the re-signed kept block J (F^T L1 F).
    let sign_m = sr.sign_matrix();
    let k = u1.transpose() * &sign_m * &u1;
    let kldl = ldl_semidefinite(&k, 1e-12)?;
    if kldl.rank < k.nrows() {
        return Err(Error::Numerical(
            "improper split failed: defective zero eigenvalue of I'A_s".into(),
        ));
    }
    let (fmat, _, jsig) = kldl.congruence()?;
    // Basis W1 = I' U1 F^{-T} J; then I'A_s restricted is J (F^T L1 F).
    let finv_t = fmat
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Singular("congruence factor".into()))?;
    let jdiag = jsig.diag();
    let mut w1 = &sign_m * &u1 * &finv_t;
    for (j, s) in jdiag.iter().enumerate() {
        if *s < 0.0 {
            for i in 0..n {
                w1[(i, j)] = -w1[(i, j)];
            }
        }
    }
    let a_s_new = fmat.transpose() * &lambda1 * &fmat;

    // Full transform T = [W1 | U0]; inputs map through T^{-1}.
    let mut t = Mat::zeros(n, n);
    t.view_mut((0, 0), (n, w1.ncols())).copy_from(&w1);
    t.view_mut((0, w1.ncols()), (n, u0.ncols())).copy_from(&u0);
    let tinv_b = t
        .clone()
        .lu()
        .solve(&sr.b_hat)
        .ok_or_else(|| Error::Singular("improper split transform".into()))?;
    let b1 = tinv_b.rows(0, w1.ncols()).into_owned();
    let b2 = tinv_b.rows(w1.ncols(), u0.ncols()).into_owned();
    let c1 = &sr.c_hat * &w1;
    let c2 = &sr.c_hat * &u0;

    Ok((
        StateRealization {
            sign: jdiag.clone(),
            a_s: {
                let mut a = a_s_new;
                symmetrize(&mut a);
                // stored a_s must satisfy a_hat = diag(sign) * a_s
                a
            },
            b_hat: b1,
            c_hat: c1,
            m0: sr.m0.clone(),
            m1: sr.m1.clone(),
            integrator: None,
            formulation: sr.formulation,
            port_sign: sr.port_sign.clone(),
            omega0: sr.omega0,
            warnings: Vec::new(),
        },
        IntegratorTerm {
            c2,
            b2,
            sign: vec![1.0; drop_idx.len()],
        },
    ))
}

impl SvdCanonicalForm {
    /// Reassemble the canonical pencil and evaluate its transfer matrix.
    pub fn transfer_at(&self, s: Complex64) -> Result<CMat> {
        let n = self.n();
        let r = self.r();
        let mut e = Mat::zeros(n, n);
        for (i, x) in self.signature.diag().iter().enumerate() {
            e[(i, i)] = *x;
        }
        let mut a = Mat::zeros(n, n);
        a.view_mut((0, 0), (r, r)).copy_from(&self.a11);
        a.view_mut((0, r), (r, n - r)).copy_from(&self.a12);
        a.view_mut((r, 0), (n - r, r)).copy_from(&self.a21);
        a.view_mut((r, r), (n - r, n - r)).copy_from(&self.a22);
        let mut b = Mat::zeros(n, self.m());
        b.rows_mut(0, r).copy_from(&self.b1);
        b.rows_mut(r, n - r).copy_from(&self.b2);
        let mut c = Mat::zeros(self.m(), n);
        c.columns_mut(0, r).copy_from(&self.c1);
        c.columns_mut(r, n - r).copy_from(&self.c2);
        let pencil = to_complex(&e) * s - to_complex(&a);
        let x = solve_complex(&pencil, &to_complex(&b), "canonical pencil")?;
        Ok(to_complex(&c) * x)
    }
}

impl StateRealization {
    /// Transfer matrix `Ĉ (sI - Â)^{-1} B̂ + M0 + s M1 (+ integrator/s)`.
    pub fn transfer_at(&self, s: Complex64) -> Result<CMat> {
        let n = self.order();
        let mut g = to_complex(&self.m0) + to_complex(&self.m1) * s;
        if n > 0 {
            let pencil = CMat::identity(n, n) * s - to_complex(&self.a_hat());
            let x = solve_complex(&pencil, &to_complex(&self.b_hat), "state pencil")?;
            g += to_complex(&self.c_hat) * x;
        }
        if let Some(int) = &self.integrator {
            g += to_complex(&int.residue()) / s;
        }
        Ok(g)
    }
}
