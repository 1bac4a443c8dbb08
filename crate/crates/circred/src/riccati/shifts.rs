//! RADI shift computation via Arnoldi on (inverse) Hamiltonian operators.
//!
//! "sml" shifts are the reciprocals of Ritz values of `H^{-1}` (ARE) or
//! `H^{-1} E` (GARE): the Krylov process finds the extreme eigenvalues of
//! the inverse, i.e. the eigenvalues of smallest radius of the pencil, which
//! carry the low-frequency behavior. "lrg" shifts come from shift-invert
//! Ritz values of `(E - s0 H)^{-1} H` mapped back through
//! `lambda = 1/(1/xi + s0)`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{ArePrbtData, GarePrbtData};
use crate::linalg::{Mat, Vec64};
use crate::{Error, Result};

/// How a shift set was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftStrategy {
    Sml,
    Lrg,
    UserGiven,
}

/// A conjugate-closed set of left-half-plane shifts; conjugate partners sit
/// adjacent so that complex arithmetic cancels over a full sweep.
#[derive(Debug, Clone)]
pub struct ShiftSet {
    pub values: Vec<Complex64>,
    pub strategy: ShiftStrategy,
    /// Expansion point (Lrg only).
    pub s0: Option<f64>,
}

impl ShiftSet {
    /// Wrap user-provided shifts, enforcing the half-plane and closing the
    /// set under conjugation.
    pub fn user_given(values: Vec<Complex64>) -> Result<ShiftSet> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty shift list".into()));
        }
        for v in &values {
            if !(v.re < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "shift {v} must have negative real part"
                )));
            }
        }
        Ok(ShiftSet {
            values: conjugate_close(values),
            strategy: ShiftStrategy::UserGiven,
            s0: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Hamiltonian matrix (and pencil mass when the equation is generalized).
#[derive(Debug, Clone)]
pub struct HamiltonianPencil {
    pub h: Mat,
    pub e: Option<Mat>,
}

impl From<&ArePrbtData> for HamiltonianPencil {
    fn from(d: &ArePrbtData) -> Self {
        let n = d.order();
        let mut h = Mat::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&d.a);
        h.view_mut((0, n), (n, n)).copy_from(&(&d.b * d.b.transpose()));
        h.view_mut((n, 0), (n, n))
            .copy_from(&(-(d.c.transpose() * &d.c)));
        h.view_mut((n, n), (n, n)).copy_from(&(-d.a.transpose()));
        HamiltonianPencil { h, e: None }
    }
}

impl From<&GarePrbtData> for HamiltonianPencil {
    fn from(d: &GarePrbtData) -> Self {
        let n = d.order();
        let a1 = d.a1();
        let cpr = &d.c * &d.pr;
        let mut h = Mat::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&a1);
        h.view_mut((0, n), (n, n)).copy_from(&(&d.b * d.b.transpose()));
        h.view_mut((n, 0), (n, n))
            .copy_from(&(-(cpr.transpose() * cpr)));
        h.view_mut((n, n), (n, n)).copy_from(&(-a1.transpose()));
        let mut e = Mat::zeros(2 * n, 2 * n);
        e.view_mut((0, 0), (n, n)).copy_from(&d.e);
        e.view_mut((n, n), (n, n)).copy_from(&d.e.transpose());
        HamiltonianPencil { h, e: Some(e) }
    }
}

/// "sml" strategy: Arnoldi on the inverse Hamiltonian (pencil), reciprocal
/// Ritz values, stable half kept.
///
/// `krylov` is the Arnoldi depth, `num_shifts` the target count (conjugate
/// pairs are never split, so one extra value may be returned); `seed` fixes
/// the start vector.
pub fn compute_shifts_sml(
    pencil: &HamiltonianPencil,
    krylov: usize,
    num_shifts: usize,
    seed: u64,
) -> Result<ShiftSet> {
    let n2 = pencil.h.nrows();
    let k = krylov.min(n2);
    // Factor H, falling back to H - delta*E (delta = -1e-8) when singular.
    let (lu, delta) = {
        let lu = pencil.h.clone().lu();
        if lu_nonsingular(&lu) {
            (lu, 0.0)
        } else {
            let delta = -1e-8;
            let mass = pencil
                .e
                .clone()
                .unwrap_or_else(|| Mat::identity(n2, n2));
            let shifted = &pencil.h - mass * delta;
            let lu = shifted.lu();
            if !lu_nonsingular(&lu) {
                return Err(Error::Singular("Hamiltonian (even after shift)".into()));
            }
            (lu, delta)
        }
    };

    let op = |x: &Vec64| -> Result<Vec64> {
        let rhs = match &pencil.e {
            Some(e) => e * x,
            None => x.clone(),
        };
        lu.solve(&rhs)
            .ok_or_else(|| Error::Singular("Hamiltonian solve".into()))
    };
    let ritz = arnoldi_ritz(&op, n2, k, seed)?;

    // theta ~ 1/(lambda - delta); drop the near-null directions the singular
    // pencil mass produces, then map back.
    let tmax = ritz.iter().map(|t| t.norm()).fold(0.0f64, f64::max);
    let lambdas: Vec<Complex64> = ritz
        .into_iter()
        .filter(|t| t.norm() > 1e-12 * tmax)
        .map(|t| t.inv() + delta)
        .collect();
    finalize_shifts(lambdas, num_shifts, ShiftStrategy::Sml, None)
}

/// "lrg" strategy: shift-invert Arnoldi about `s0` on the reversed pencil,
/// mapped through `lambda = 1/(1/xi + s0)`.
pub fn compute_shifts_lrg(
    pencil: &HamiltonianPencil,
    krylov: usize,
    num_shifts: usize,
    s0: f64,
    seed: u64,
) -> Result<ShiftSet> {
    let n2 = pencil.h.nrows();
    let k = krylov.min(n2);
    let mass = pencil
        .e
        .clone()
        .unwrap_or_else(|| Mat::identity(n2, n2));
    let shifted = &mass - &pencil.h * s0;
    let lu = shifted.lu();
    if !lu_nonsingular(&lu) {
        return Err(Error::Singular("shifted pencil E - s0 H".into()));
    }
    let op = |x: &Vec64| -> Result<Vec64> {
        lu.solve(&(&pencil.h * x))
            .ok_or_else(|| Error::Singular("shifted pencil solve".into()))
    };
    let ritz = arnoldi_ritz(&op, n2, k, seed)?;
    let xmax = ritz.iter().map(|t| t.norm()).fold(0.0f64, f64::max);
    let lambdas: Vec<Complex64> = ritz
        .into_iter()
        .filter(|xi| xi.norm() > 1e-12 * xmax)
        .map(|xi| (xi.inv() + s0).inv())
        .collect();
    finalize_shifts(lambdas, num_shifts, ShiftStrategy::Lrg, Some(s0))
}

fn lu_nonsingular(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let n = lu.u().nrows();
    if n == 0 {
        return false;
    }
    let diag: Vec<f64> = (0..n).map(|i| lu.u()[(i, i)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0f64, f64::max);
    dmax > 0.0 && diag.iter().all(|&d| d > 1e-14 * dmax)
}

/// Filter to the open left half-plane, close under conjugation, order by
/// radius, and trim to the requested count without splitting pairs.
fn finalize_shifts(
    lambdas: Vec<Complex64>,
    num_shifts: usize,
    strategy: ShiftStrategy,
    s0: Option<f64>,
) -> Result<ShiftSet> {
    let mut stable: Vec<Complex64> = lambdas
        .into_iter()
        .filter(|l| l.re < 0.0 && l.re.is_finite() && l.im.is_finite())
        .collect();
    if stable.is_empty() {
        return Err(Error::Numerical(
            "no usable (stable) shifts from the Krylov sweep".into(),
        ));
    }
    // Canonical representatives: keep Im >= 0, remember whether a partner
    // existed; tiny imaginary parts collapse to real shifts.
    let mut reps: Vec<Complex64> = Vec::new();
    for l in stable.drain(..) {
        let l = if l.im.abs() <= 1e-10 * l.norm() {
            Complex64::new(l.re, 0.0)
        } else {
            l
        };
        if l.im < 0.0 {
            continue; // partner of an Im > 0 representative
        }
        // Merge near-duplicates produced by the two conjugate copies.
        if reps
            .iter()
            .any(|r| (r - l).norm() <= 1e-8 * l.norm().max(1e-300))
        {
            continue;
        }
        reps.push(l);
    }
    reps.sort_by(|a, b| {
        (a.norm(), a.re, a.im)
            .partial_cmp(&(b.norm(), b.re, b.im))
            .unwrap()
    });

    // Weight of a representative in the final set (a complex one brings its
    // conjugate along).
    let weight = |r: &Complex64| if r.im > 0.0 { 2usize } else { 1 };
    let total: usize = reps.iter().map(weight).sum();
    let picked: Vec<Complex64> = if total <= num_shifts {
        reps
    } else {
        // Trim by an even spread over the radius-sorted pool: keeps the
        // low-frequency end dense while retaining the large-radius shifts
        // that drive the residual down.
        let mut picked = Vec::new();
        let mut budget = num_shifts;
        let mut want = 0.0f64;
        let step = (reps.len() as f64) / (num_shifts as f64);
        let mut i = 0usize;
        while i < reps.len() && budget > 0 {
            if (i as f64) >= want || reps.len() - i <= budget {
                let w = weight(&reps[i]);
                picked.push(reps[i]);
                budget = budget.saturating_sub(w);
                want += step.max(1.0);
            }
            i += 1;
        }
        picked
    };

    let mut values = Vec::new();
    for rep in picked {
        values.push(rep);
        if rep.im > 0.0 {
            values.push(rep.conj());
        }
    }
    if values.is_empty() {
        return Err(Error::Numerical("shift trimming left an empty set".into()));
    }
    Ok(ShiftSet {
        values,
        strategy,
        s0,
    })
}

fn conjugate_close(values: Vec<Complex64>) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for v in values {
        if out.iter().any(|w| (w - v).norm() <= 1e-12 * v.norm()) {
            continue;
        }
        if v.im.abs() <= 1e-12 * v.norm() {
            out.push(Complex64::new(v.re, 0.0));
        } else {
            out.push(v);
            out.push(v.conj());
        }
    }
    out
}

/// Ritz values from `k` Arnoldi steps with full reorthogonalization and a
/// seeded random start vector.
fn arnoldi_ritz<F>(op: &F, n: usize, k: usize, seed: u64) -> Result<Vec<Complex64>>
where
    F: Fn(&Vec64) -> Result<Vec64>,
{
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v0 = Vec64::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    v0 /= v0.norm();

    let mut basis: Vec<Vec64> = vec![v0];
    let mut hess = Mat::zeros(k + 1, k);
    let mut k_eff = k;
    for j in 0..k {
        let mut w = op(&basis[j])?;
        // Two-pass modified Gram-Schmidt.
        for _ in 0..2 {
            for (i, vi) in basis.iter().enumerate() {
                let hij = vi.dot(&w);
                hess[(i, j)] += hij;
                w -= vi * hij;
            }
        }
        let hnext = w.norm();
        hess[(j + 1, j)] = hnext;
        let hscale = hess.column(j).norm();
        if hnext <= 1e-12 * hscale.max(f64::MIN_POSITIVE) {
            k_eff = j + 1;
            break;
        }
        basis.push(w / hnext);
    }

    let hk = hess.view((0, 0), (k_eff, k_eff)).into_owned();
    Ok(hk.complex_eigenvalues().iter().copied().collect())
}
