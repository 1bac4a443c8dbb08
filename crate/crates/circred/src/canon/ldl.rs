//! Rank-revealing symmetric indefinite LDL^T factorization.
//!
//! Produces `P^T S P = L D L^T` with `D` diagonal. Pivots are chosen by
//! Bunch-Parlett comparison of the largest remaining diagonal against the
//! largest remaining off-diagonal; indefinite 2x2 pivot blocks are
//! diagonalized in place by a Jacobi rotation, so `L` is block lower
//! triangular with unit or orthogonal-2x2 diagonal blocks. Pivoting stops at
//! the numerical rank; the unfactored trailing positions keep their original
//! relative order, which keeps golden block comparisons stable.

use super::Signature;
use crate::linalg::Mat;
use crate::{Error, Result};

const ALPHA: f64 = 0.6403882032022076; // (1 + sqrt(17)) / 8

/// Result of [`ldl_semidefinite`].
#[derive(Debug, Clone)]
pub struct LdlFactor {
    /// Block lower-triangular factor in pivot order.
    pub l: Mat,
    /// Diagonal of `D` in pivot order (zeros beyond `rank`).
    pub d: Vec<f64>,
    /// `perm[k]` is the original index sitting at pivot position `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    /// Set when the smallest accepted pivot is within a decade of the cutoff.
    pub rank_ambiguous: bool,
}

impl LdlFactor {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Reconstruct `P` as a dense matrix (column `k` is `e_{perm[k]}`).
    pub fn permutation(&self) -> Mat {
        let n = self.n();
        let mut p = Mat::zeros(n, n);
        for (k, &orig) in self.perm.iter().enumerate() {
            p[(orig, k)] = 1.0;
        }
        p
    }

    /// Reconstruct `S = P L D L^T P^T` (testing helper).
    pub fn reconstruct(&self) -> Mat {
        let p = self.permutation();
        let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(self.d.clone()));
        &p * &self.l * d * self.l.transpose() * p.transpose()
    }

    /// Solve `S x = rhs` through the factors; requires full rank.
    pub fn solve(&self, rhs: &Mat) -> Result<Mat> {
        if self.rank < self.n() {
            return Err(Error::Singular(format!(
                "LDL solve on rank-{} matrix of size {}",
                self.rank,
                self.n()
            )));
        }
        let n = self.n();
        // z = P^T rhs
        let mut z = Mat::zeros(n, rhs.ncols());
        for (k, &orig) in self.perm.iter().enumerate() {
            z.row_mut(k).copy_from(&rhs.row(orig));
        }
        let mut y = self
            .l
            .clone()
            .lu()
            .solve(&z)
            .ok_or_else(|| Error::Singular("LDL forward solve".into()))?;
        for k in 0..n {
            for j in 0..y.ncols() {
                y[(k, j)] /= self.d[k];
            }
        }
        let w = self
            .l
            .transpose()
            .lu()
            .solve(&y)
            .ok_or_else(|| Error::Singular("LDL back solve".into()))?;
        let mut x = Mat::zeros(n, rhs.ncols());
        for (k, &orig) in self.perm.iter().enumerate() {
            x.row_mut(orig).copy_from(&w.row(k));
        }
        Ok(x)
    }

    /// Congruence `S = V diag(I'_r, 0) V^T` with the signature sorted
    /// positive-first: returns `(V, V^{-1}, signature)`.
    pub fn congruence(&self) -> Result<(Mat, Mat, Signature)> {
        let n = self.n();
        // Sort retained pivots: positive first, then negative, stable.
        let mut order: Vec<usize> = Vec::with_capacity(n);
        order.extend((0..self.rank).filter(|&k| self.d[k] > 0.0));
        let n_pos = order.len();
        order.extend((0..self.rank).filter(|&k| self.d[k] < 0.0));
        let n_neg = order.len() - n_pos;
        order.extend(self.rank..n);

        // V = P L Δ Π with Δ = diag(sqrt|d|, 1 on the null part).
        let p = self.permutation();
        let mut scaled = &p * &self.l;
        for k in 0..n {
            let s = if k < self.rank { self.d[k].abs().sqrt() } else { 1.0 };
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        let mut v = Mat::zeros(n, n);
        for (newk, &oldk) in order.iter().enumerate() {
            v.column_mut(newk).copy_from(&scaled.column(oldk));
        }
        let vinv = v
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("congruence factor".into()))?;
        Ok((
            v,
            vinv,
            Signature {
                r1: n_pos,
                r2: n_neg,
            },
        ))
    }
}

/// Factor a symmetric (possibly semidefinite or indefinite) matrix.
///
/// `rank_tol` is relative to the largest pivot magnitude encountered.
pub fn ldl_semidefinite(s: &Mat, rank_tol: f64) -> Result<LdlFactor> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::InvalidArgument("LDL expects a square matrix".into()));
    }
    let asym = (s - s.transpose()).norm();
    if asym > 1e-12 * s.norm().max(1.0) {
        return Err(Error::InvalidArgument(
            "LDL expects a symmetric matrix".into(),
        ));
    }

    let mut w = 0.5 * (s + s.transpose());
    // `remaining[...]` holds original indices not yet pivoted, in original order.
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots: Vec<usize> = Vec::with_capacity(n);
    let mut d: Vec<f64> = Vec::with_capacity(n);
    // Column data of L in pivot order, keyed by original row index.
    let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    // Orthogonal 2x2 diagonal blocks: (pivot position of first column, rotation).
    let mut rot_blocks: Vec<(usize, [f64; 4])> = Vec::new();

    let mut scale = w.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut smallest_pivot = f64::INFINITY;

    while !remaining.is_empty() {
        // Largest remaining diagonal and off-diagonal.
        let (mut dmax, mut dpos) = (0.0f64, 0usize);
        for (t, &i) in remaining.iter().enumerate() {
            let a = w[(i, i)].abs();
            if a > dmax {
                dmax = a;
                dpos = t;
            }
        }
        let (mut omax, mut opair) = (0.0f64, (0usize, 0usize));
        for (t1, &i) in remaining.iter().enumerate() {
            for (t2, &j) in remaining.iter().enumerate().skip(t1 + 1) {
                let a = w[(i, j)].abs();
                if a > omax {
                    omax = a;
                    opair = (t1, t2);
                }
            }
        }

        let cutoff = rank_tol * scale;
        if dmax.max(omax) <= cutoff {
            break;
        }

        if dmax >= ALPHA * omax {
            // 1x1 pivot at the largest diagonal.
            let t = dpos;
            let piv = remaining[t];
            let dk = w[(piv, piv)];
            scale = scale.max(dk.abs());
            smallest_pivot = smallest_pivot.min(dk.abs());
            remaining.remove(t);
            let mut col = Vec::with_capacity(remaining.len());
            for &i in &remaining {
                let lik = w[(i, piv)] / dk;
                if lik != 0.0 {
                    col.push((i, lik));
                }
            }
            // Trailing update: w -= l d l^T on remaining.
            for &(i, li) in &col {
                for &(j, lj) in &col {
                    w[(i, j)] -= li * dk * lj;
                }
            }
            pivots.push(piv);
            d.push(dk);
            l_cols.push(col);
        } else {
            // 2x2 pivot on the dominating off-diagonal pair.
            let (t1, t2) = opair;
            let (p1, p2) = (remaining[t1], remaining[t2]);
            let (a, b, c) = (w[(p1, p1)], w[(p1, p2)], w[(p2, p2)]);
            let det = a * c - b * b;
            if det.abs() <= cutoff * cutoff {
                return Err(Error::Numerical(
                    "LDL 2x2 pivot numerically singular".into(),
                ));
            }
            // Remove higher position first to keep indices valid.
            remaining.remove(t2);
            remaining.remove(t1);

            // Multipliers: [li1 li2] = [w_i1 w_i2] * B^{-1}.
            let inv = [c / det, -b / det, -b / det, a / det];
            let mut col1 = Vec::new();
            let mut col2 = Vec::new();
            for &i in &remaining {
                let (wi1, wi2) = (w[(i, p1)], w[(i, p2)]);
                let li1 = wi1 * inv[0] + wi2 * inv[2];
                let li2 = wi1 * inv[1] + wi2 * inv[3];
                col1.push((i, li1));
                col2.push((i, li2));
            }
            for (t_i, &(i, li1)) in col1.iter().enumerate() {
                let li2 = col2[t_i].1;
                for (t_j, &(j, lj1)) in col1.iter().enumerate() {
                    let lj2 = col2[t_j].1;
                    // w_ij -= [li1 li2] B [lj1 lj2]^T
                    w[(i, j)] -= li1 * (a * lj1 + b * lj2) + li2 * (b * lj1 + c * lj2);
                }
            }

            // Diagonalize B with a Jacobi rotation G^T B G = diag(d1, d2).
            let theta = 0.5 * (2.0 * b).atan2(a - c);
            let (cs, sn) = (theta.cos(), theta.sin());
            let d1 = cs * cs * a + 2.0 * cs * sn * b + sn * sn * c;
            let d2 = sn * sn * a - 2.0 * cs * sn * b + cs * cs * c;
            scale = scale.max(d1.abs()).max(d2.abs());
            smallest_pivot = smallest_pivot.min(d1.abs()).min(d2.abs());

            let pos = pivots.len();
            rot_blocks.push((pos, [cs, -sn, sn, cs]));
            // L rows below the block get rotated too: [li1 li2] G.
            let rot1: Vec<(usize, f64)> = col1
                .iter()
                .zip(&col2)
                .map(|(&(i, l1), &(_, l2))| (i, l1 * cs + l2 * sn))
                .filter(|&(_, v)| v != 0.0)
                .collect();
            let rot2: Vec<(usize, f64)> = col1
                .iter()
                .zip(&col2)
                .map(|(&(i, l1), &(_, l2))| (i, -l1 * sn + l2 * cs))
                .filter(|&(_, v)| v != 0.0)
                .collect();
            pivots.push(p1);
            d.push(d1);
            l_cols.push(rot1);
            pivots.push(p2);
            d.push(d2);
            l_cols.push(rot2);
        }
    }

    let rank = pivots.len();
    let rank_ambiguous = rank > 0 && smallest_pivot <= 10.0 * rank_tol * scale;

    // Assemble perm = pivots ++ remaining (original order preserved).
    let mut perm = pivots;
    perm.extend(remaining.iter().copied());
    let mut pos_of = vec![0usize; n];
    for (k, &orig) in perm.iter().enumerate() {
        pos_of[orig] = k;
    }

    let mut l = Mat::identity(n, n);
    for (k, col) in l_cols.iter().enumerate() {
        for &(orig, val) in col {
            l[(pos_of[orig], k)] = val;
        }
    }
    for &(pos, g) in &rot_blocks {
        l[(pos, pos)] = g[0];
        l[(pos, pos + 1)] = g[1];
        l[(pos + 1, pos)] = g[2];
        l[(pos + 1, pos + 1)] = g[3];
    }
    d.resize(n, 0.0);

    let n_pos = d[..rank].iter().filter(|&&x| x > 0.0).count();
    let n_neg = rank - n_pos;
    Ok(LdlFactor {
        l,
        d,
        perm,
        rank,
        n_pos,
        n_neg,
        rank_ambiguous,
    })
}
