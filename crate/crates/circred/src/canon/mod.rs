//! Canonicalization of singular symmetric pencils.
//!
//! The assembled descriptor system has a singular, symmetric `E0`. This
//! module extracts its inertia with a rank-revealing LDL factorization,
//! rewrites the system in a signature-canonical block form, detects the
//! pencil index, and converts:
//!
//! * index-1 systems into an explicit state equation,
//! * index-2 systems into a Stokes-type form with explicit spectral
//!   projectors, from which the polynomial transfer part `M0 + s M1` and a
//!   projected state realization are derived.

mod ldl;
mod state_eq;
mod stokes;

pub use ldl::{ldl_semidefinite, LdlFactor};
pub use state_eq::{
    detect_index, eliminate_improper_artifact, to_state_equation, to_svd_canonical, SystemIndex,
};
pub use stokes::{
    polynomial_part, project_to_state, spectral_projectors, stokes_from_index1, to_stokes_form,
};

use crate::circuit::Formulation;
use crate::linalg::Mat;

/// Inertia signature of `E0`: `diag(+1 x r1, -1 x r2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub r1: usize,
    pub r2: usize,
}

impl Signature {
    pub fn r(&self) -> usize {
        self.r1 + self.r2
    }

    /// The diagonal of the signature matrix.
    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![1.0; self.r()];
        for s in d.iter_mut().skip(self.r1) {
            *s = -1.0;
        }
        d
    }

    /// Dense signature matrix.
    pub fn matrix(&self) -> Mat {
        Mat::from_diagonal(&nalgebra::DVector::from_vec(self.diag()))
    }

    /// Row-scale `m` by the signature (left multiplication).
    pub fn scale_rows(&self, m: &Mat) -> Mat {
        let mut out = m.clone();
        for i in self.r1..self.r() {
            for j in 0..out.ncols() {
                out[(i, j)] = -out[(i, j)];
            }
        }
        out
    }

    /// Column-scale `m` by the signature (right multiplication).
    pub fn scale_cols(&self, m: &Mat) -> Mat {
        let mut out = m.clone();
        for j in self.r1..self.r() {
            for i in 0..out.nrows() {
                out[(i, j)] = -out[(i, j)];
            }
        }
        out
    }

    /// `I'_r m I'_r`.
    pub fn sandwich(&self, m: &Mat) -> Mat {
        self.scale_cols(&self.scale_rows(m))
    }
}

/// The descriptor system after the congruence that maps `E0` to
/// `diag(I'_r, 0)`; block partition along the `r` retained directions.
#[derive(Debug, Clone)]
pub struct SvdCanonicalForm {
    pub signature: Signature,
    pub a11: Mat,
    pub a12: Mat,
    pub a21: Mat,
    pub a22: Mat,
    pub b1: Mat,
    pub b2: Mat,
    pub c1: Mat,
    pub c2: Mat,
    /// Congruence transform: `E0 = V diag(I'_r, 0) V^T`.
    pub v: Mat,
    pub vinv: Mat,
    pub formulation: Formulation,
    pub port_sign: Vec<f64>,
    pub omega0: f64,
    pub warnings: Vec<String>,
}

impl SvdCanonicalForm {
    pub fn n(&self) -> usize {
        self.a11.nrows() + self.a22.nrows()
    }

    pub fn m(&self) -> usize {
        self.b1.ncols()
    }

    pub fn r(&self) -> usize {
        self.signature.r()
    }
}

/// Pure-integrator leftover of an improper-artifact split (kept as metadata
/// when its contribution does not vanish).
#[derive(Debug, Clone)]
pub struct IntegratorTerm {
    pub c2: Mat,
    pub b2: Mat,
    /// Signature diagonal of the integrator directions.
    pub sign: Vec<f64>,
}

impl IntegratorTerm {
    /// The residue of the `1/s` term (signature factors already absorbed).
    pub fn residue(&self) -> Mat {
        &self.c2 * &self.b2
    }

    pub fn is_vanishing(&self, tol: f64) -> bool {
        let scale = (self.c2.norm() * self.b2.norm()).max(f64::MIN_POSITIVE);
        self.c2.norm() == 0.0 || self.b2.norm() == 0.0 || self.residue().norm() <= tol * scale
    }
}

/// State equation `x' = I'_r A_s x + B u`, `z = C x + (M0 + s M1) u`.
#[derive(Debug, Clone)]
pub struct StateRealization {
    /// Signature diagonal of the state directions.
    pub sign: Vec<f64>,
    /// Symmetric `A_s`; the system matrix is `diag(sign) * A_s`.
    pub a_s: Mat,
    pub b_hat: Mat,
    pub c_hat: Mat,
    /// Constant polynomial part (equals `D̂0` on the direct index-1 path).
    pub m0: Mat,
    /// Linear polynomial part (zero on the direct index-1 path).
    pub m1: Mat,
    /// Integrator term split off by the improper-artifact elimination.
    pub integrator: Option<IntegratorTerm>,
    pub formulation: Formulation,
    pub port_sign: Vec<f64>,
    pub omega0: f64,
    pub warnings: Vec<String>,
}

impl StateRealization {
    pub fn order(&self) -> usize {
        self.a_s.nrows()
    }

    pub fn m(&self) -> usize {
        self.b_hat.ncols()
    }

    /// `Â0 = diag(sign) A_s`.
    pub fn a_hat(&self) -> Mat {
        let mut a = self.a_s.clone();
        for (i, s) in self.sign.iter().enumerate() {
            if *s < 0.0 {
                for j in 0..a.ncols() {
                    a[(i, j)] = -a[(i, j)];
                }
            }
        }
        a
    }

    pub fn sign_matrix(&self) -> Mat {
        Mat::from_diagonal(&nalgebra::DVector::from_vec(self.sign.clone()))
    }
}

/// Stokes-type index-2 form: the `E` block is `diag(I'_r, 0)` and the lower
/// right `A` block vanishes.
#[derive(Debug, Clone)]
pub struct StokesForm {
    pub signature: Signature,
    pub abar11: Mat,
    pub abar12: Mat,
    pub abar21: Mat,
    pub bbar1: Mat,
    pub bbar2: Mat,
    pub cbar1: Mat,
    pub cbar2: Mat,
    pub dbar0: Mat,
    pub formulation: Formulation,
    pub port_sign: Vec<f64>,
    pub omega0: f64,
    pub warnings: Vec<String>,
}

impl StokesForm {
    /// Dimension of the algebraic tail `y2`.
    pub fn k(&self) -> usize {
        self.abar12.ncols()
    }

    pub fn r(&self) -> usize {
        self.signature.r()
    }

    pub fn n(&self) -> usize {
        self.r() + self.k()
    }

    pub fn m(&self) -> usize {
        self.bbar1.ncols()
    }

    /// Assembled `Ē0 = diag(I'_r, 0)`.
    pub fn ebar0(&self) -> Mat {
        let n = self.n();
        let mut e = Mat::zeros(n, n);
        for (i, s) in self.signature.diag().iter().enumerate() {
            e[(i, i)] = *s;
        }
        e
    }

    /// Assembled `Ā0 = [[Ā11, Ā12], [Ā21, 0]]`.
    pub fn abar0(&self) -> Mat {
        let (r, k) = (self.r(), self.k());
        let mut a = Mat::zeros(r + k, r + k);
        a.view_mut((0, 0), (r, r)).copy_from(&self.abar11);
        a.view_mut((0, r), (r, k)).copy_from(&self.abar12);
        a.view_mut((r, 0), (k, r)).copy_from(&self.abar21);
        a
    }

    pub fn bbar0(&self) -> Mat {
        let (r, k, m) = (self.r(), self.k(), self.m());
        let mut b = Mat::zeros(r + k, m);
        b.view_mut((0, 0), (r, m)).copy_from(&self.bbar1);
        b.view_mut((r, 0), (k, m)).copy_from(&self.bbar2);
        b
    }

    pub fn cbar0(&self) -> Mat {
        let (r, k, m) = (self.r(), self.k(), self.m());
        let mut c = Mat::zeros(m, r + k);
        c.view_mut((0, 0), (m, r)).copy_from(&self.cbar1);
        c.view_mut((0, r), (m, k)).copy_from(&self.cbar2);
        c
    }

    /// `Ā21 I'_r Ā12`, the matrix whose invertibility makes the pencil a
    /// regular index-2 problem.
    pub fn coupling(&self) -> Mat {
        &self.abar21 * self.signature.scale_rows(&self.abar12)
    }
}

/// Left/right spectral projectors of the Stokes pencil, with the inner
/// projectors on the dynamic block.
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub pl: Mat,
    pub pr: Mat,
    pub pil: Mat,
    pub pir: Mat,
}
