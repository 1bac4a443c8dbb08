//! Model order reduction for RLC interconnect networks.
//!
//! The crate reduces large descriptor systems assembled from RLC netlists to
//! small state-space models while preserving the two structural properties a
//! passive network guarantees: reciprocity (symmetry or block skew symmetry of
//! the transfer matrix) and positive realness. Reduction is done by balanced
//! truncation driven by positive-real algebraic Riccati equations, which are
//! solved either densely (invariant-subspace reference solver) or by the
//! low-rank RADI iteration with Krylov-derived shifts.
//!
//! Pipeline overview:
//!
//! 1. [`circuit`] parses a netlist (or generates a ladder family) and
//!    assembles the symmetric descriptor matrices in impedance, admittance,
//!    or hybrid form.
//! 2. [`canon`] puts the singular pencil into a signature-canonical form,
//!    detects the index, and produces either a state equation (index 1) or a
//!    Stokes-type form with explicit spectral projectors (index 2).
//! 3. [`riccati`] sets up the positive-real ARE/GARE, computes shift sets,
//!    and solves the equation densely or with RADI.
//! 4. [`reduce`] balances and truncates, yielding a reduced model whose
//!    transfer matrix stays reciprocal and (sampled) positive real.
//! 5. [`analyze`] sweeps frequency responses and checks the preserved
//!    properties.

pub mod analyze;
pub mod canon;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod reduce;
pub mod riccati;

pub use error::{Error, Result};

/// Numerical tolerances shared across the pipeline.
///
/// The defaults assume circuit matrices that have been normalized to order-1
/// magnitudes (see [`circuit::DescriptorSystem::normalized`]); rank gaps are
/// then large and the thresholds uncritical.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative pivot threshold for rank decisions in LDL factorizations.
    pub rank_tol: f64,
    /// Relative singular-value threshold for index detection and kernel splits.
    pub sing_tol: f64,
    /// Asymmetry above this relative size is reported when symmetrizing.
    pub sym_warn: f64,
    /// Regularization added to a singular constant term before inversion.
    pub eps_reg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-11,
            sing_tol: 1e-10,
            sym_warn: 1e-8,
            eps_reg: 1e-5,
        }
    }
}

/// States above this size are refused by the dense kernels by default.
pub const DEFAULT_DENSE_LIMIT: usize = 2000;
