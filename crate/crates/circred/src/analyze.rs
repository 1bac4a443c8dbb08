//! Frequency sweeps, error metrics, and reciprocity/passivity checks.

use num_complex::Complex64;

use crate::circuit::{DescriptorSystem, Formulation};
use crate::linalg::{fro_c, log_space, min_eig_hermitian_part, CMat};
#[cfg(test)]
use crate::linalg::Mat;
use crate::reduce::ReducedModel;
use crate::{Error, Result};

/// Sampled transfer matrices over a frequency grid (rad/s, physical units).
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    pub omegas: Vec<f64>,
    pub values: Vec<CMat>,
    /// Indices of requested points that were skipped (singular pencil).
    pub skipped: Vec<f64>,
}

impl FrequencyResponse {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// The default grid: 200 log-spaced points over `[1, 1e12]` rad/s.
pub fn default_omegas() -> Vec<f64> {
    log_space(1.0, 1e12, 200)
}

fn sweep_with<F>(omegas: &[f64], mut eval: F) -> Result<FrequencyResponse>
where
    F: FnMut(Complex64) -> Result<CMat>,
{
    let mut out = FrequencyResponse {
        omegas: Vec::with_capacity(omegas.len()),
        values: Vec::with_capacity(omegas.len()),
        skipped: Vec::new(),
    };
    let mut last: Option<&f64> = None;
    for om in omegas {
        if let Some(prev) = last {
            if om <= prev {
                return Err(Error::InvalidArgument(
                    "frequency grid must be strictly increasing".into(),
                ));
            }
        }
        last = Some(om);
        match eval(Complex64::new(0.0, *om)) {
            Ok(g) => {
                out.omegas.push(*om);
                out.values.push(g);
            }
            Err(Error::Singular(_)) => out.skipped.push(*om),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Exact reference response of the descriptor system.
pub fn sweep_descriptor(sys: &DescriptorSystem, omegas: &[f64]) -> Result<FrequencyResponse> {
    sweep_with(omegas, |s| sys.transfer_at_physical(s))
}

/// Response of a reduced model.
pub fn sweep_reduced(model: &ReducedModel, omegas: &[f64]) -> Result<FrequencyResponse> {
    sweep_with(omegas, |s| model.transfer_at(s))
}

/// Per-frequency relative error `‖G - G̃‖_F / ‖G‖_F`; falls back to the
/// absolute error (flagged) where the reference vanishes.
pub fn relative_error(reference: &FrequencyResponse, reduced: &FrequencyResponse) -> Result<Vec<f64>> {
    if reference.omegas != reduced.omegas {
        return Err(Error::InvalidArgument(
            "responses sampled on different grids".into(),
        ));
    }
    Ok(reference
        .values
        .iter()
        .zip(&reduced.values)
        .map(|(g, gt)| {
            let denom = fro_c(g);
            let diff = fro_c(&(g - gt));
            if denom > 0.0 {
                diff / denom
            } else {
                diff
            }
        })
        .collect())
}

/// Maximum reciprocity residual over the sweep: symmetry for Z/Y, block
/// skew symmetry (`G = I° G^T I°`) for hybrid; Frobenius-relative.
pub fn check_reciprocity(
    resp: &FrequencyResponse,
    formulation: Formulation,
    port_sign: &[f64],
) -> f64 {
    let mut worst = 0.0f64;
    for g in &resp.values {
        let partner = match formulation {
            Formulation::Hybrid => {
                let mut t = g.transpose();
                for (i, si) in port_sign.iter().enumerate() {
                    for (j, sj) in port_sign.iter().enumerate() {
                        t[(i, j)] *= si * sj;
                    }
                }
                t
            }
            _ => g.transpose(),
        };
        let scale = fro_c(g).max(f64::MIN_POSITIVE);
        worst = worst.max(fro_c(&(g - partner)) / scale);
    }
    worst
}

/// Minimum over the sweep of the smallest eigenvalue of `G + G^*`;
/// nonnegative (to slack) certifies sampled positive realness.
pub fn check_passivity(resp: &FrequencyResponse) -> f64 {
    resp.values
        .iter()
        .map(min_eig_hermitian_part)
        .fold(f64::INFINITY, f64::min)
}

/// CSV with one row per frequency: `omega` then `re(g_ij), im(g_ij)` pairs
/// in row-major port order, 17 significant digits.
pub fn response_csv(resp: &FrequencyResponse) -> String {
    let m = resp.values.first().map(|g| g.nrows()).unwrap_or(0);
    let mut head = vec!["omega".to_string()];
    for i in 0..m {
        for j in 0..m {
            head.push(format!("re_g{}{}", i + 1, j + 1));
            head.push(format!("im_g{}{}", i + 1, j + 1));
        }
    }
    let mut out = head.join(",") + "\n";
    for (om, g) in resp.omegas.iter().zip(&resp.values) {
        let mut row = vec![format!("{om:.16e}")];
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                row.push(format!("{:.16e}", g[(i, j)].re));
                row.push(format!("{:.16e}", g[(i, j)].im));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// CSV with one scalar per frequency (relative errors, residual history...).
pub fn scalar_csv(name: &str, omegas: &[f64], values: &[f64]) -> String {
    let mut out = format!("omega,{name}\n");
    for (om, v) in omegas.iter().zip(values) {
        out.push_str(&format!("{om:.16e},{v:.16e}\n"));
    }
    out
}

/// Write a response (or scalar series) CSV to disk.
pub fn emit_csv(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}
