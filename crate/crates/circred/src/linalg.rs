//! Small dense linear-algebra helpers shared by the pipeline modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vec64 = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Frobenius norm.
pub fn fro(m: &Mat) -> f64 {
    m.norm()
}

/// Frobenius norm of a complex matrix.
pub fn fro_c(m: &CMat) -> f64 {
    m.norm()
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, floor)`.
pub fn rel_diff(a: &Mat, b: &Mat) -> f64 {
    let denom = fro(b).max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

/// Replace `m` by its symmetric part and return the relative asymmetry
/// that was discarded.
pub fn symmetrize(m: &mut Mat) -> f64 {
    let asym = 0.5 * (&*m - m.transpose());
    let scale = fro(m).max(f64::MIN_POSITIVE);
    *m = 0.5 * (&*m + m.transpose());
    fro(&asym) / scale
}

/// Lift a real matrix into complex storage.
pub fn to_complex(m: &Mat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Real part of a complex matrix.
pub fn re(m: &CMat) -> Mat {
    m.map(|z| z.re)
}

/// Imaginary part of a complex matrix.
pub fn im(m: &CMat) -> Mat {
    m.map(|z| z.im)
}

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

/// Solve `a x = b` for a real square system, failing loudly on singularity.
pub fn solve_real(a: &Mat, b: &Mat, what: &str) -> Result<Mat> {
    let lu = a.clone().lu();
    lu.solve(b).ok_or_else(|| Error::Singular(what.to_string()))
}

/// Solve `a x = b` for a complex square system.
pub fn solve_complex(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    let lu = a.clone().lu();
    lu.solve(b).ok_or_else(|| Error::Singular(what.to_string()))
}

/// Inverse through LU, for small well-conditioned matrices only.
pub fn inverse(a: &Mat, what: &str) -> Result<Mat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

/// Orthonormal basis for the range of `m`, keeping singular directions above
/// `tol` relative to the largest singular value.
pub fn range_basis(m: &Mat, tol: f64) -> Mat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Mat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol * smax && s > 0.0)
        .count();
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis for the kernel of `m` (right null space).
pub fn kernel_basis(m: &Mat, tol: f64) -> Mat {
    if m.nrows() == 0 {
        return Mat::identity(m.ncols(), m.ncols());
    }
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol * smax)
        .count();
    vt.rows(rank, vt.nrows() - rank).transpose()
}

/// `n` logarithmically spaced points between `lo` and `hi` (inclusive).
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "bad log_space range");
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Smallest eigenvalue of `G + G^*`.
pub fn min_eig_hermitian_part(g: &CMat) -> f64 {
    let h = g + g.adjoint();
    // Embed the Hermitian matrix as a real symmetric one of twice the size:
    // [[Re, -Im], [Im, Re]] has the same spectrum with doubled multiplicity.
    let n = h.nrows();
    let mut s = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[(i, j)] = z.re;
            s[(i + n, j + n)] = z.re;
            s[(i, j + n)] = -z.im;
            s[(i + n, j)] = z.im;
        }
    }
    let eig = s.symmetric_eigen();
    eig.eigenvalues.min()
}

/// Check every entry for NaN/Inf.
pub fn all_finite(m: &Mat) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn all_finite_c(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_reports_asymmetry() {
        let mut m = Mat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let rel = symmetrize(&mut m);
        assert!((m[(0, 1)] - 1.0).abs() < 1e-15);
        assert!((m[(1, 0)] - 1.0).abs() < 1e-15);
        assert!(rel > 0.3 && rel < 0.7);
    }

    #[test]
    fn kernel_and_range_split_dimensions() {
        let m = Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let r = range_basis(&m, 1e-12);
        let k = kernel_basis(&m, 1e-12);
        assert_eq!(r.ncols(), 2);
        assert_eq!(k.ncols(), 1);
        assert!((k.column(0)[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_eig_of_hermitian_part_matches_real_case() {
        let g = to_complex(&Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]));
        let e = min_eig_hermitian_part(&g);
        assert!((e - (-2.0)).abs() < 1e-12);
    }

    #[test]
    fn log_space_endpoints() {
        let pts = log_space(1.0, 100.0, 3);
        assert!((pts[0] - 1.0).abs() < 1e-12);
        assert!((pts[1] - 10.0).abs() < 1e-9);
        assert!((pts[2] - 100.0).abs() < 1e-9);
    }
}
