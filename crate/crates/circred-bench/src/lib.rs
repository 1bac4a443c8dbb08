//! Shared fixtures for the criterion benches.

use circred::circuit::{assemble_descriptor, generate_ladder, DescriptorSystem, Formulation,
    LadderTopology, Netlist};

/// Unit-valued index-1 ladder of the given length.
pub fn ladder_a(sections: usize) -> Netlist {
    generate_ladder(sections, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Impedance)
        .expect("ladder")
}

/// Unit-valued index-2 ladder of the given length.
pub fn ladder_b(sections: usize) -> Netlist {
    generate_ladder(sections, LadderTopology::FigB, 1.0, 1.0, 1.0, Formulation::Impedance)
        .expect("ladder")
}

pub fn system_of(nl: &Netlist) -> DescriptorSystem {
    assemble_descriptor(nl).expect("assembly")
}
