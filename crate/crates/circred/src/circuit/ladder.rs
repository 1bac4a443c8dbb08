//! Generators for the two RLC ladder families used throughout the tests.
//!
//! Both families start with a shunt resistor at node 1 and chain sections
//! over nodes `1..=2k+1`; they are mirror images of each other:
//!
//! * `FigA` repeats `series R, series L, shunt C`; every algebraic node
//!   keeps a resistive path, so the impedance form has index 1. Ports sit
//!   at the leftmost two nodes.
//! * `FigB` repeats `shunt C, series L, series R`, leaving a resistive tail
//!   that couples to the rest only through an inductor; the impedance form
//!   has index 2. Ports sit at the left end of the first section and the
//!   right end of the second (the two end nodes when `k <= 2`).

use super::{Element, ElementKind, Formulation, Netlist, PortKind, PortSpec};
use crate::{Error, Result};

/// Ladder family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderTopology {
    FigA,
    FigB,
}

/// Build a `sections`-long ladder netlist with uniform element values.
pub fn generate_ladder(
    sections: usize,
    topology: LadderTopology,
    r: f64,
    l: f64,
    c: f64,
    formulation: Formulation,
) -> Result<Netlist> {
    if sections < 1 {
        return Err(Error::InvalidArgument("sections must be >= 1".into()));
    }
    for (v, name) in [(r, "R"), (l, "L"), (c, "C")] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("nonpositive {name} value")));
        }
    }

    let mut elements = Vec::new();
    let mut push = |kind: ElementKind, tag: &str, idx: usize, n1: usize, n2: usize, value: f64| {
        elements.push(Element {
            kind,
            name: format!("{tag}{idx}"),
            nodes: (n1, n2),
            value,
        });
    };

    match topology {
        LadderTopology::FigA => {
            push(ElementKind::Resistor, "R", 0, 1, 0, r);
            for i in 1..=sections {
                let a = 2 * i - 1;
                push(ElementKind::Resistor, "R", i, a, a + 1, r);
                push(ElementKind::Inductor, "L", i, a + 1, a + 2, l);
                push(ElementKind::Capacitor, "C", i, a + 2, 0, c);
            }
        }
        LadderTopology::FigB => {
            push(ElementKind::Resistor, "R", 0, 1, 0, r);
            for i in 1..=sections {
                let a = 2 * i - 1;
                push(ElementKind::Capacitor, "C", i, a, 0, c);
                push(ElementKind::Inductor, "L", i, a, a + 1, l);
                push(ElementKind::Resistor, "R", i, a + 1, a + 2, r);
            }
        }
    }

    let port_nodes = match topology {
        LadderTopology::FigA => [(1usize, 0usize), (2, 0)],
        LadderTopology::FigB => [(1, 0), (2 * sections.min(2) + 1, 0)],
    };
    let port_kinds = match formulation {
        Formulation::Impedance => [PortKind::CurrentSource, PortKind::CurrentSource],
        Formulation::Admittance => [PortKind::VoltageSource, PortKind::VoltageSource],
        Formulation::Hybrid => [PortKind::CurrentSource, PortKind::VoltageSource],
    };
    let ports = port_nodes
        .iter()
        .zip(port_kinds)
        .map(|(&nodes, kind)| PortSpec { kind, nodes })
        .collect();

    let node_ids: Vec<usize> = (1..=2 * sections + 1).collect();
    Ok(Netlist {
        elements,
        ports,
        formulation,
        node_count: node_ids.len(),
        node_ids,
    })
}
