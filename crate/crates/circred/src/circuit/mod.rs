//! Netlist representation and symmetric MNA assembly.
//!
//! A parsed [`Netlist`] is turned into a [`DescriptorSystem`]
//! `E0 x' = A0 x + B0 u`, `z = C0 x` whose coefficient matrices are written
//! in symmetric form. Depending on the formulation the transfer matrix is the
//! impedance, admittance, or hybrid matrix of the network; symmetry of
//! `E0`/`A0` is what makes the transfer matrix reciprocal.

mod assemble;
mod ladder;
mod parse;

pub use assemble::{assemble_descriptor, assemble_descriptor_with_limit};
pub use ladder::{generate_ladder, LadderTopology};
pub use parse::{parse_netlist, parse_si_value};

use num_complex::Complex64;

use crate::linalg::{solve_complex, to_complex, CMat, Mat};
use crate::Result;

/// Two-terminal passive element kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Resistor,
    Inductor,
    Capacitor,
}

/// A two-terminal element between netlist nodes (`0` is ground).
#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElementKind,
    pub name: String,
    /// Terminal nodes, oriented `nodes.0 -> nodes.1`.
    pub nodes: (usize, usize),
    /// Ohms, henries, or farads; strictly positive.
    pub value: f64,
}

/// Port excitation kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    CurrentSource,
    VoltageSource,
}

/// An external port between two nodes.
#[derive(Debug, Clone)]
pub struct PortSpec {
    pub kind: PortKind,
    pub nodes: (usize, usize),
}

/// Which network matrix the assembled system realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// All ports current driven; transfer matrix is the impedance matrix.
    Impedance,
    /// All ports voltage driven; transfer matrix is the admittance matrix.
    Admittance,
    /// First half current driven, second half voltage driven.
    Hybrid,
}

impl Formulation {
    pub fn tag(&self) -> &'static str {
        match self {
            Formulation::Impedance => "Z",
            Formulation::Admittance => "Y",
            Formulation::Hybrid => "H",
        }
    }
}

/// Parsed circuit with ports and formulation choice.
#[derive(Debug, Clone)]
pub struct Netlist {
    /// Elements in file order.
    pub elements: Vec<Element>,
    /// Ports in declaration order.
    pub ports: Vec<PortSpec>,
    pub formulation: Formulation,
    /// Number of non-ground nodes after compaction.
    pub node_count: usize,
    /// `node_ids[i]` is the user-facing id of internal node `i`.
    pub node_ids: Vec<usize>,
}

impl Netlist {
    /// Internal index of a user-facing node id (ground maps to `None`).
    pub fn node_index(&self, id: usize) -> Option<usize> {
        if id == 0 {
            return None;
        }
        self.node_ids.binary_search(&id).ok()
    }

    pub fn port_count(&self) -> usize {
        self.ports.len()
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }
}

/// Assembled symmetric descriptor system.
#[derive(Debug, Clone)]
pub struct DescriptorSystem {
    pub e0: Mat,
    pub a0: Mat,
    pub b0: Mat,
    pub c0: Mat,
    pub formulation: Formulation,
    /// Diagonal of the port signature matrix (identity for Z/Y).
    pub port_sign: Vec<f64>,
    /// Frequency scale applied to `e0`: the stored pencil is in `s' = s/omega0`.
    pub omega0: f64,
}

impl DescriptorSystem {
    pub fn n(&self) -> usize {
        self.e0.nrows()
    }

    pub fn m(&self) -> usize {
        self.b0.ncols()
    }

    /// Frequency-scale the system so that `L`/`C` magnitudes become order 1.
    ///
    /// Replaces `s` by `s' = s/omega0`, which multiplies `E0` by `omega0`.
    /// The scale is recorded and undone when reporting physical frequencies.
    pub fn normalized(&self, omega0: f64) -> DescriptorSystem {
        let mut out = self.clone();
        out.e0 *= omega0 / self.omega0;
        out.omega0 = omega0;
        out
    }

    /// Evaluate the transfer matrix `C0 (s' E0 - A0)^{-1} B0` at a point of
    /// the *scaled* frequency variable.
    pub fn transfer_at(&self, s_scaled: Complex64) -> Result<CMat> {
        let pencil = to_complex(&self.e0) * s_scaled - to_complex(&self.a0);
        let x = solve_complex(&pencil, &to_complex(&self.b0), "descriptor pencil")?;
        Ok(to_complex(&self.c0) * x)
    }

    /// Evaluate the transfer matrix at a physical frequency point `s`.
    pub fn transfer_at_physical(&self, s: Complex64) -> Result<CMat> {
        self.transfer_at(s / self.omega0)
    }
}

/// Geometric-mean based automatic frequency scale for a netlist:
/// `1/sqrt(L̄ C̄)`, or `1.0` when the circuit lacks inductors or capacitors.
pub fn auto_omega0(netlist: &Netlist) -> f64 {
    let geomean = |kind: ElementKind| -> Option<f64> {
        let vals: Vec<f64> = netlist
            .elements
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.value.ln())
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some((vals.iter().sum::<f64>() / vals.len() as f64).exp())
        }
    };
    match (geomean(ElementKind::Inductor), geomean(ElementKind::Capacitor)) {
        (Some(l), Some(c)) => 1.0 / (l * c).sqrt(),
        _ => 1.0,
    }
}
