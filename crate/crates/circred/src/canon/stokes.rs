//! Stokes-type reduction of index-2 systems, spectral projectors, the
//! polynomial transfer part, and the projected state realization.

use num_complex::Complex64;

use super::{
    detect_index, ldl_semidefinite, ProjectorPair, Signature, StateRealization, StokesForm,
    SvdCanonicalForm, SystemIndex,
};
use crate::circuit::Formulation;
use crate::linalg::{solve_complex, solve_real, symmetrize, to_complex, CMat, Mat};
use crate::{Error, Result};

/// Eliminate the regular part of a singular `A22` and bring the system to
/// Stokes form: `E = diag(I'_r, 0)`, lower-right `A` block zero.
pub fn to_stokes_form(f: &SvdCanonicalForm, sing_tol: f64) -> Result<StokesForm> {
    if detect_index(f, sing_tol) == SystemIndex::Index1 {
        return Err(Error::WrongIndex(
            "A22 is nonsingular (index 1); use the state-equation path".into(),
        ));
    }
    let nk = f.a22.nrows();
    let mut warnings = f.warnings.clone();

    // A22 = F diag(S_rbar, 0) F^T with F = P L.
    let ldl = ldl_semidefinite(&f.a22, sing_tol)?;
    let rbar = ldl.rank;
    let k = nk - rbar;

    // F^{-1} X  =  L^{-1} P^T X.
    let f_inv = |x: &Mat| -> Result<Mat> {
        let mut px = Mat::zeros(nk, x.ncols());
        for (pos, &orig) in ldl.perm.iter().enumerate() {
            px.row_mut(pos).copy_from(&x.row(orig));
        }
        ldl.l
            .clone()
            .lu()
            .solve(&px)
            .ok_or_else(|| Error::Singular("Stokes triangular solve".into()))
    };

    let a21_split = f_inv(&f.a21)?;
    let b2_split = f_inv(&f.b2)?;
    let c2_split = f_inv(&f.c2.transpose())?.transpose();

    let a21_1 = a21_split.rows(0, rbar).into_owned();
    let a21_2 = a21_split.rows(rbar, k).into_owned();
    let b2_1 = b2_split.rows(0, rbar).into_owned();
    let b2_2 = b2_split.rows(rbar, k).into_owned();
    let c2_1 = c2_split.columns(0, rbar).into_owned();
    let c2_2 = c2_split.columns(rbar, k).into_owned();

    // Apply S_rbar^{-1} (diagonal) to the eliminated rows.
    let sinv_times = |x: &Mat| -> Mat {
        let mut out = x.clone();
        for i in 0..rbar {
            let d = ldl.d[i];
            for j in 0..out.ncols() {
                out[(i, j)] /= d;
            }
        }
        out
    };
    let sinv_a21_1 = sinv_times(&a21_1);
    let sinv_b2_1 = sinv_times(&b2_1);

    let a12_1 = a21_1.transpose();
    let mut abar11 = &f.a11 - &a12_1 * &sinv_a21_1;
    let asym = symmetrize(&mut abar11);
    if asym > 1e-8 {
        warnings.push(format!("Stokes A11 lost symmetry at level {asym:.2e}"));
    }
    let bbar1 = &f.b1 - &a12_1 * &sinv_b2_1;
    let cbar1 = &f.c1 - &c2_1 * &sinv_a21_1;
    let dbar0 = -(&c2_1 * &sinv_b2_1);

    let abar12 = 0.5 * (a21_2.transpose() + a21_2.transpose());
    let abar21 = abar12.transpose();

    let form = StokesForm {
        signature: f.signature.clone(),
        abar11,
        abar12,
        abar21,
        bbar1,
        bbar2: b2_2,
        cbar1,
        cbar2: c2_2,
        dbar0,
        formulation: f.formulation,
        port_sign: f.port_sign.clone(),
        omega0: f.omega0,
        warnings,
    };

    if k > 0 {
        let coupling = form.coupling();
        if coupling.clone().lu().try_inverse().is_none() {
            return Err(Error::Numerical("not a regular index-2 pencil".into()));
        }
    }
    Ok(form)
}

/// Degenerate Stokes form of an index-1 realization (`y2` empty, projectors
/// trivially the identity). Lets the GARE-based pipeline run on index-1
/// inputs.
pub fn stokes_from_index1(sr: &StateRealization) -> StokesForm {
    let r = sr.order();
    let m = sr.m();
    let r1 = sr.sign.iter().filter(|&&s| s > 0.0).count();
    let sign = sr.sign_matrix();
    StokesForm {
        signature: Signature { r1, r2: r - r1 },
        abar11: sr.a_s.clone(),
        abar12: Mat::zeros(r, 0),
        abar21: Mat::zeros(0, r),
        bbar1: &sign * &sr.b_hat,
        bbar2: Mat::zeros(0, m),
        cbar1: sr.c_hat.clone(),
        cbar2: Mat::zeros(m, 0),
        dbar0: sr.m0.clone(),
        formulation: sr.formulation,
        port_sign: sr.port_sign.clone(),
        omega0: sr.omega0,
        warnings: sr.warnings.clone(),
    }
}

/// Left and right spectral projectors of the Stokes pencil.
pub fn spectral_projectors(s: &StokesForm) -> Result<ProjectorPair> {
    let r = s.r();
    let k = s.k();
    let n = r + k;
    if k == 0 {
        let id = Mat::identity(r, r);
        return Ok(ProjectorPair {
            pl: id.clone(),
            pr: id.clone(),
            pil: id.clone(),
            pir: id,
        });
    }

    let sig_a12 = s.signature.scale_rows(&s.abar12); // I'_r A12
    let coupling = &s.abar21 * &sig_a12;
    let coup_inv_a21 = solve_real(&coupling, &s.abar21, "A21 I' A12")?;

    // Pi_l = I - A12 (A21 I' A12)^{-1} A21 I'
    let pil = Mat::identity(r, r) - &s.abar12 * s.signature.scale_cols(&coup_inv_a21);
    // Pi_r = I - I' A12 (A21 I' A12)^{-1} A21
    let pir = Mat::identity(r, r) - &sig_a12 * &coup_inv_a21;

    let mut pl = Mat::zeros(n, n);
    pl.view_mut((0, 0), (r, r)).copy_from(&pil);
    // -Pi_l A11 I' A12 (A21 I' A12)^{-1}
    let coup_inv_t = solve_real(&coupling.transpose(), &Mat::identity(k, k), "A21 I' A12")?;
    let top_right = -(&pil * &s.abar11 * &sig_a12 * coup_inv_t.transpose());
    pl.view_mut((0, r), (r, k)).copy_from(&top_right);

    let mut pr = Mat::zeros(n, n);
    pr.view_mut((0, 0), (r, r)).copy_from(&pir);
    // -(A21 I' A12)^{-1} A21 I' A11 Pi_r
    let bottom_left = -(solve_real(
        &coupling,
        &(s.signature.scale_cols(&s.abar21) * &s.abar11 * &pir),
        "A21 I' A12",
    )?);
    pr.view_mut((r, 0), (k, r)).copy_from(&bottom_left);

    Ok(ProjectorPair { pl, pr, pil, pir })
}

/// Constant and linear polynomial parts `M0`, `M1` of the transfer matrix,
/// symmetrized according to the formulation.
pub fn polynomial_part(s: &StokesForm, p: &ProjectorPair) -> Result<(Mat, Mat, Vec<String>)> {
    let m = s.m();
    let n = s.n();
    let mut warnings = Vec::new();
    if s.k() == 0 {
        return Ok((s.dbar0.clone(), Mat::zeros(m, m), warnings));
    }

    let e0 = s.ebar0();
    let a0 = s.abar0();
    let b0 = s.bbar0();
    let c0 = s.cbar0();
    let eye = Mat::identity(n, n);
    let lu = a0.clone().lu();
    let solve = |rhs: &Mat| -> Result<Mat> {
        lu.solve(rhs)
            .ok_or_else(|| Error::Singular("Stokes A0".into()))
    };

    let il = &eye - &p.pl;
    let ir = &eye - &p.pr;
    let m0_raw = -(&c0 * &ir * solve(&(&il * &b0))?) + &s.dbar0;
    let inner = &il * &e0 * &ir;
    let m1_raw = -(&c0 * solve(&(&inner * solve(&b0)?))?);

    let (m0, w0) = symmetrize_for(&m0_raw, s.formulation, &s.port_sign);
    let (m1, w1) = symmetrize_for(&m1_raw, s.formulation, &s.port_sign);
    if w0 > 1e-8 {
        warnings.push(format!("M0 asymmetry {w0:.2e} discarded"));
    }
    if w1 > 1e-8 {
        warnings.push(format!("M1 asymmetry {w1:.2e} discarded"));
    }
    Ok((m0, m1, warnings))
}

/// Symmetrize respecting the reciprocity pattern of the formulation:
/// plain symmetry for Z/Y, `M = I° M^T I°` for hybrid.
pub(crate) fn symmetrize_for(m: &Mat, form: Formulation, port_sign: &[f64]) -> (Mat, f64) {
    let partner = match form {
        Formulation::Hybrid => {
            let mut t = m.transpose();
            for (i, si) in port_sign.iter().enumerate() {
                for (j, sj) in port_sign.iter().enumerate() {
                    t[(i, j)] *= si * sj;
                }
            }
            t
        }
        _ => m.transpose(),
    };
    let sym = 0.5 * (m + &partner);
    let rel = (m - &partner).norm() / (2.0 * m.norm().max(f64::MIN_POSITIVE));
    (sym, rel)
}

/// Projected state realization of the proper part (index-2 via projectors).
///
/// The output has the same shape as the index-1 state equation and can be fed
/// to the ARE-based reduction; `M0`/`M1` carry the polynomial part.
pub fn project_to_state(s: &StokesForm, p: &ProjectorPair) -> Result<StateRealization> {
    let r = s.r();
    let m = s.m();
    let mut warnings = s.warnings.clone();

    if s.k() == 0 {
        // Degenerate case: identical to the index-1 state equation.
        return Ok(StateRealization {
            sign: s.signature.diag(),
            a_s: s.abar11.clone(),
            b_hat: s.signature.scale_rows(&s.bbar1),
            c_hat: s.cbar1.clone(),
            m0: s.dbar0.clone(),
            m1: Mat::zeros(m, m),
            integrator: None,
            formulation: s.formulation,
            port_sign: s.port_sign.clone(),
            omega0: s.omega0,
            warnings,
        });
    }

    let sig_a12 = s.signature.scale_rows(&s.abar12);
    let coupling = &s.abar21 * &sig_a12;
    let coup_inv_b2 = solve_real(&coupling, &s.bbar2, "A21 I' A12")?;
    let coup_inv_a21 = solve_real(&coupling, &s.abar21, "A21 I' A12")?;

    let mut a_s = &p.pil * &s.abar11 * &p.pir;
    let asym = symmetrize(&mut a_s);
    if asym > 1e-8 {
        warnings.push(format!("projected A_s lost symmetry at level {asym:.2e}"));
    }

    let b_p = s
        .signature
        .scale_rows(&(&p.pil * (&s.bbar1 - &s.abar11 * &sig_a12 * &coup_inv_b2)));
    let c_p = (&s.cbar1 - &s.cbar2 * s.signature.scale_cols(&coup_inv_a21) * &s.abar11) * &p.pir;

    let sig_b1 = s.signature.scale_rows(&s.bbar1);
    let m0_raw = -(&s.cbar1 * &sig_a12 * &coup_inv_b2) - &s.cbar2 * &coup_inv_a21 * &sig_b1
        + &s.cbar2
            * &coup_inv_a21
            * s.signature.scale_rows(&(&s.abar11 * &sig_a12))
            * &coup_inv_b2
        + &s.dbar0;
    let m1_raw = -(&s.cbar2 * &coup_inv_b2);

    let (m0, w0) = symmetrize_for(&m0_raw, s.formulation, &s.port_sign);
    let (m1, w1) = symmetrize_for(&m1_raw, s.formulation, &s.port_sign);
    if w0 > 1e-8 {
        warnings.push(format!("projected M0 asymmetry {w0:.2e} discarded"));
    }
    if w1 > 1e-8 {
        warnings.push(format!("projected M1 asymmetry {w1:.2e} discarded"));
    }

    debug_assert_eq!(c_p.ncols(), r);
    Ok(StateRealization {
        sign: s.signature.diag(),
        a_s,
        b_hat: b_p,
        c_hat: c_p,
        m0,
        m1,
        integrator: None,
        formulation: s.formulation,
        port_sign: s.port_sign.clone(),
        omega0: s.omega0,
        warnings,
    })
}

impl StokesForm {
    /// Transfer matrix of the assembled Stokes system (includes `D̄0`).
    pub fn transfer_at(&self, s: Complex64) -> Result<CMat> {
        let pencil = to_complex(&self.ebar0()) * s - to_complex(&self.abar0());
        let x = solve_complex(&pencil, &to_complex(&self.bbar0()), "Stokes pencil")?;
        Ok(to_complex(&self.cbar0()) * x + to_complex(&self.dbar0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::to_svd_canonical;
    use crate::circuit::{assemble_descriptor, generate_ladder, LadderTopology};
    use crate::linalg::fro_c;

    fn fig_b2() -> SvdCanonicalForm {
        let nl = generate_ladder(2, LadderTopology::FigB, 1.0, 1.0, 1.0, Formulation::Impedance)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        to_svd_canonical(&sys, 1e-11).unwrap()
    }

    #[test]
    fn fig_b_is_index2_and_reaches_stokes_form() {
        let f = fig_b2();
        assert_eq!(detect_index(&f, 1e-10), SystemIndex::Index2);
        let st = to_stokes_form(&f, 1e-10).unwrap();
        assert_eq!(st.r(), 4);
        assert_eq!(st.k(), 1);
        // Structure checks.
        assert!((st.abar21.clone() - st.abar12.transpose()).norm() < 1e-13);
    }

    #[test]
    fn stokes_elimination_preserves_io() {
        let f = fig_b2();
        let st = to_stokes_form(&f, 1e-10).unwrap();
        for &om in &[0.3, 2.0, 11.0] {
            let s = Complex64::new(0.5, om);
            let g0 = f.transfer_at(s).unwrap();
            let g1 = st.transfer_at(s).unwrap();
            assert!(
                fro_c(&(&g0 - &g1)) <= 1e-10 * fro_c(&g0),
                "IO changed at {s}: {}",
                fro_c(&(&g0 - &g1))
            );
        }
    }

    #[test]
    fn projectors_idempotent_and_transposed_pair() {
        let f = fig_b2();
        let st = to_stokes_form(&f, 1e-10).unwrap();
        let p = spectral_projectors(&st).unwrap();
        assert!((&p.pl * &p.pl - &p.pl).norm() < 1e-10);
        assert!((&p.pr * &p.pr - &p.pr).norm() < 1e-10);
        assert!((&p.pl - p.pr.transpose()).norm() < 1e-12);
        // A21 Pi_r = 0.
        assert!((&st.abar21 * &p.pir).norm() < 1e-10);
    }

    #[test]
    fn index1_rejected_by_stokes_pre() {
        let nl = generate_ladder(2, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Impedance)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        let f = to_svd_canonical(&sys, 1e-11).unwrap();
        assert!(matches!(
            to_stokes_form(&f, 1e-10),
            Err(Error::WrongIndex(_))
        ));
    }

    #[test]
    fn degenerate_stokes_from_index1() {
        let nl = generate_ladder(2, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Impedance)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        let f = to_svd_canonical(&sys, 1e-11).unwrap();
        let sr = crate::canon::to_state_equation(&f).unwrap();
        let st = stokes_from_index1(&sr);
        assert_eq!(st.k(), 0);
        let p = spectral_projectors(&st).unwrap();
        assert_eq!(p.pl, Mat::identity(4, 4));
        let (m0, m1, _) = polynomial_part(&st, &p).unwrap();
        assert!((m0 - &st.dbar0).norm() < 1e-14);
        assert!(m1.norm() < 1e-14);
        for &om in &[0.7, 5.0] {
            let s = Complex64::new(0.2, om);
            let g0 = sys.transfer_at(s).unwrap();
            let g1 = st.transfer_at(s).unwrap();
            assert!(fro_c(&(&g0 - &g1)) <= 1e-10 * fro_c(&g0));
        }
    }

    #[test]
    fn fig_b_polynomial_part_golden() {
        let f = fig_b2();
        let st = to_stokes_form(&f, 1e-10).unwrap();
        let p = spectral_projectors(&st).unwrap();
        let (m0, m1, _) = polynomial_part(&st, &p).unwrap();
        let m0_expect = Mat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(
            (&m0 - &m0_expect).norm() < 1e-10,
            "M0 = {m0} expected {m0_expect}"
        );
        // M1 must be PSD.
        let eig = m1.clone().symmetric_eigen();
        assert!(eig.eigenvalues.min() >= -1e-10 * m1.norm().max(1e-300));
    }

    #[test]
    fn projected_realization_golden_and_io() {
        let f = fig_b2();
        let st = to_stokes_form(&f, 1e-10).unwrap();
        let p = spectral_projectors(&st).unwrap();
        let sr = project_to_state(&st, &p).unwrap();

        // I'A_s matches the golden rank-3 matrix up to per-state signs.
        #[rustfmt::skip]
        let j_expect = Mat::from_row_slice(4, 4, &[
            -1.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            1.0, -1.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ]);
        let j = sr.a_hat();
        let matches_up_to_signs = (0..16).any(|mask: usize| {
            let d: Vec<f64> = (0..4)
                .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                .collect();
            let mut t = j.clone();
            for i in 0..4 {
                for jj in 0..4 {
                    t[(i, jj)] *= d[i] * d[jj];
                }
            }
            (t - &j_expect).norm() < 1e-10
        });
        assert!(matches_up_to_signs, "I'A_s = {j}");

        let ldl = ldl_semidefinite(&sr.a_s, 1e-10).unwrap();
        assert_eq!(ldl.rank, 3);

        // Full transfer including M0 + s M1 agrees with the Stokes system.
        for &om in &[0.4, 1.7, 9.0] {
            let s = Complex64::new(0.3, om);
            let g0 = st.transfer_at(s).unwrap();
            let g1 = sr.transfer_at(s).unwrap();
            assert!(
                fro_c(&(&g0 - &g1)) <= 1e-8 * fro_c(&g0),
                "proper-part mismatch at {s}: {}",
                fro_c(&(&g0 - &g1))
            );
        }
    }

    #[test]
    fn projected_coefficients_match_direct_path_when_a12_zero() {
        // If the constraint block is absent the projected quantities reduce
        // to the plain state equation.
        let nl = generate_ladder(3, LadderTopology::FigA, 1.0, 2.0, 0.5, Formulation::Impedance)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        let f = to_svd_canonical(&sys, 1e-11).unwrap();
        let sr = crate::canon::to_state_equation(&f).unwrap();
        let st = stokes_from_index1(&sr);
        let p = spectral_projectors(&st).unwrap();
        let via_proj = project_to_state(&st, &p).unwrap();
        assert!((&via_proj.a_s - &sr.a_s).norm() < 1e-12);
        assert!((&via_proj.b_hat - &sr.b_hat).norm() < 1e-12);
        assert!((&via_proj.c_hat - &sr.c_hat).norm() < 1e-12);
        assert!((&via_proj.m0 - &sr.m0).norm() < 1e-12);
    }
}
