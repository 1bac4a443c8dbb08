//! End-to-end reduction runner shared by the CLI and the test suites.
//!
//! Wires the stages together: assembly, frequency normalization,
//! canonicalization, index detection, routing into the ARE- or GARE-based
//! truncation, Riccati solve (dense reference or RADI with computed
//! shifts), and balancing. Collects everything a reproducible run needs to
//! report.

use num_complex::Complex64;

use crate::analyze;
use crate::canon::{
    detect_index, eliminate_improper_artifact, polynomial_part, project_to_state,
    spectral_projectors, stokes_from_index1, to_state_equation, to_stokes_form, to_svd_canonical,
    SystemIndex,
};
use crate::circuit::{assemble_descriptor, auto_omega0, DescriptorSystem, Netlist};
use crate::linalg::Mat;
use crate::reduce::{hankel_spectrum, rprbt1, rprbt2, OrderSpec, ReducedModel};
use crate::riccati::shifts::HamiltonianPencil;
use crate::riccati::{
    cholesky_from_radi, compute_shifts_lrg, compute_shifts_sml, dense_riccati_solve_are,
    dense_riccati_solve_gare, prbt_are_data, prbt_gare_data, radi, RadiOptions, ShiftSet,
};
use crate::{Result, Tolerances};

/// Which truncation route to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// ARE route (state equation; projected realization for index-2).
    Rprbt1,
    /// GARE route (Stokes form; degenerate form for index-1).
    Rprbt2,
    /// Route by detected index: 1 -> ARE, 2 -> GARE.
    Auto,
}

/// Shift strategy for the RADI solver.
#[derive(Debug, Clone)]
pub enum ShiftChoice {
    Sml,
    Lrg { s0: f64 },
    Given(Vec<Complex64>),
}

/// Riccati solver backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Radi,
    Dense,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub method: MethodChoice,
    pub solver: SolverChoice,
    pub shifts: ShiftChoice,
    pub num_shifts: usize,
    /// Arnoldi depth; defaults to `2 * num_shifts`.
    pub krylov_depth: Option<usize>,
    pub radi_steps: usize,
    pub radi_tol: f64,
    pub order: OrderSpec,
    pub seed: u64,
    pub eps_reg: f64,
    /// Frequency normalization; `None` picks `1/sqrt(L̄ C̄)` automatically.
    pub omega0: Option<f64>,
    pub tols: Tolerances,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            method: MethodChoice::Auto,
            solver: SolverChoice::Radi,
            shifts: ShiftChoice::Sml,
            num_shifts: 15,
            krylov_depth: None,
            radi_steps: 30,
            radi_tol: 1e-8,
            order: OrderSpec::Auto,
            seed: 0,
            eps_reg: 1e-5,
            omega0: None,
            tols: Tolerances::default(),
        }
    }
}

/// Everything a run produces besides the model itself.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub model: ReducedModel,
    pub index: SystemIndex,
    pub method_used: &'static str,
    pub omega0: f64,
    pub eps_used: f64,
    pub shifts_used: Vec<Complex64>,
    /// `‖R*R‖_F` history (empty for the dense solver).
    pub residual_history: Vec<f64>,
    pub constant_term_norm: f64,
    pub radi_converged: Option<bool>,
    pub hankel_sigma: Vec<f64>,
    pub hankel_signs: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Run the full reduction on a netlist.
pub fn reduce_netlist(netlist: &Netlist, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let sys = assemble_descriptor(netlist)?;
    let omega0 = cfg.omega0.unwrap_or_else(|| auto_omega0(netlist));
    reduce_descriptor(&sys.normalized(omega0), cfg)
}

/// Run the reduction on an already assembled (and normalized) system.
pub fn reduce_descriptor(sys: &DescriptorSystem, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let f = to_svd_canonical(sys, cfg.tols.rank_tol)?;
    let index = detect_index(&f, cfg.tols.sing_tol);
    let mut warnings = f.warnings.clone();

    let use_gare = match (cfg.method, index) {
        (MethodChoice::Rprbt1, _) => false,
        (MethodChoice::Rprbt2, _) => true,
        (MethodChoice::Auto, SystemIndex::Index1) => false,
        (MethodChoice::Auto, SystemIndex::Index2) => true,
    };

    let report = if use_gare {
        // Stokes form (degenerate when index-1), GARE, balanced truncation.
        let st = match index {
            SystemIndex::Index2 => to_stokes_form(&f, cfg.tols.sing_tol)?,
            SystemIndex::Index1 => {
                let sr = to_state_equation(&f)?;
                let sr = eliminate_improper_artifact(&sr, cfg.tols.sing_tol)?;
                stokes_from_index1(&sr)
            }
        };
        let p = spectral_projectors(&st)?;
        let (m0, m1, poly_warn) = polynomial_part(&st, &p)?;
        warnings.extend(poly_warn);
        let data = prbt_gare_data(&st, &p, &m0, cfg.eps_reg)?;
        let cc_norm = data.constant_term_norm();

        let (q, shifts_used, history, converged) = match cfg.solver {
            SolverChoice::Dense => {
                let x = dense_riccati_solve_gare(&data)?;
                (psd_factor(&x), Vec::new(), Vec::new(), None)
            }
            SolverChoice::Radi => {
                let pencil = HamiltonianPencil::from(&data);
                let shifts = make_shifts(&pencil, cfg)?;
                let lrf = radi(
                    &data.e,
                    &data.a1(),
                    &data.b,
                    &data.radi_rhs_factor(),
                    &shifts,
                    &RadiOptions {
                        tol: cfg.radi_tol,
                        max_steps: cfg.radi_steps,
                    },
                )?;
                let q = cholesky_from_radi(&lrf)?;
                (
                    q,
                    lrf.shifts_used.clone(),
                    lrf.residual_history.clone(),
                    Some(lrf.converged),
                )
            }
        };

        let (sig, signs) = hankel_spectrum(&q, &st.ebar0());
        let model = rprbt2(&st, &q, cfg.order, &m0, &m1)?;
        PipelineReport {
            model,
            index,
            method_used: "rprbt2",
            omega0: sys.omega0,
            eps_used: data.eps_used,
            shifts_used,
            residual_history: history,
            constant_term_norm: cc_norm,
            radi_converged: converged,
            hankel_sigma: sig,
            hankel_signs: signs,
            warnings,
        }
    } else {
        // State realization (projected when index-2), ARE, truncation.
        let sr = match index {
            SystemIndex::Index1 => to_state_equation(&f)?,
            SystemIndex::Index2 => {
                let st = to_stokes_form(&f, cfg.tols.sing_tol)?;
                let p = spectral_projectors(&st)?;
                project_to_state(&st, &p)?
            }
        };
        let sr = eliminate_improper_artifact(&sr, cfg.tols.sing_tol)?;
        if let Some(int) = &sr.integrator {
            warnings.push(format!(
                "nonvanishing integrator term (|C2 B2| = {:.3e}) excluded from the reduced model",
                int.residue().norm()
            ));
        }
        warnings.extend(sr.warnings.clone());
        let data = prbt_are_data(&sr, cfg.eps_reg)?;
        let cc_norm = data.constant_term_norm();

        let (q, shifts_used, history, converged) = match cfg.solver {
            SolverChoice::Dense => {
                let x = dense_riccati_solve_are(&data)?;
                (psd_factor(&x), Vec::new(), Vec::new(), None)
            }
            SolverChoice::Radi => {
                let pencil = HamiltonianPencil::from(&data);
                let shifts = make_shifts(&pencil, cfg)?;
                let eye = Mat::identity(data.order(), data.order());
                let lrf = radi(
                    &eye,
                    &data.a,
                    &data.b,
                    &data.c.transpose(),
                    &shifts,
                    &RadiOptions {
                        tol: cfg.radi_tol,
                        max_steps: cfg.radi_steps,
                    },
                )?;
                let q = cholesky_from_radi(&lrf)?;
                (
                    q,
                    lrf.shifts_used.clone(),
                    lrf.residual_history.clone(),
                    Some(lrf.converged),
                )
            }
        };

        let (sig, signs) = hankel_spectrum(&q, &sr.sign_matrix());
        let model = rprbt1(&sr, &q, cfg.order)?;
        PipelineReport {
            model,
            index,
            method_used: "rprbt1",
            omega0: sys.omega0,
            eps_used: data.eps_used,
            shifts_used,
            residual_history: history,
            constant_term_norm: cc_norm,
            radi_converged: converged,
            hankel_sigma: sig,
            hankel_signs: signs,
            warnings,
        }
    };
    Ok(report)
}

fn make_shifts(pencil: &HamiltonianPencil, cfg: &PipelineConfig) -> Result<ShiftSet> {
    let depth = cfg.krylov_depth.unwrap_or(2 * cfg.num_shifts);
    match &cfg.shifts {
        ShiftChoice::Sml => compute_shifts_sml(pencil, depth, cfg.num_shifts, cfg.seed),
        ShiftChoice::Lrg { s0 } => compute_shifts_lrg(pencil, depth, cfg.num_shifts, *s0, cfg.seed),
        ShiftChoice::Given(vals) => ShiftSet::user_given(vals.clone()),
    }
}

/// Rank-revealing PSD factor `Q` with `Q Q^T = X` from a dense solution.
pub fn psd_factor(x: &Mat) -> Mat {
    let eig = x.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-14 * lmax)
        .collect();
    Mat::from_fn(x.nrows(), kept.len(), |r, c| {
        eig.eigenvectors[(r, kept[c])] * eig.eigenvalues[kept[c]].sqrt()
    })
}

/// Verification outcome of a model against its source netlist.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub reciprocity: f64,
    pub passivity_margin: f64,
    pub max_rel_error_low: f64,
    pub max_rel_error: f64,
    /// Frequency below which `max_rel_error_low` applies.
    pub low_cutoff: f64,
}

/// Sweep both systems and measure the preserved-property residuals.
pub fn verify_model(
    netlist: &Netlist,
    model: &ReducedModel,
    omegas: &[f64],
    low_cutoff: f64,
) -> Result<VerifyReport> {
    let sys = assemble_descriptor(netlist)?;
    let reference = analyze::sweep_descriptor(&sys, omegas)?;
    let reduced = analyze::sweep_reduced(model, omegas)?;
    let err = analyze::relative_error(&reference, &reduced)?;
    let reciprocity = analyze::check_reciprocity(&reduced, model.formulation, &model.port_sign);
    let passivity_margin = analyze::check_passivity(&reduced);
    let max_rel_error = err.iter().cloned().fold(0.0f64, f64::max);
    let max_rel_error_low = reference
        .omegas
        .iter()
        .zip(&err)
        .filter(|(om, _)| **om <= low_cutoff)
        .map(|(_, e)| *e)
        .fold(0.0f64, f64::max);
    Ok(VerifyReport {
        reciprocity,
        passivity_margin,
        max_rel_error_low,
        max_rel_error,
        low_cutoff,
    })
}
