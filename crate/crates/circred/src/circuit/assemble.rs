//! Symmetric MNA assembly of the descriptor matrices.
//!
//! State ordering is `[node voltages; inductor currents; voltage-source
//! currents]`. The node block carries the capacitor stamp in `E0` and the
//! (negated) conductance stamp in `A0`; inductors enter through their
//! incidence columns with the inductance block negated so that both `E0` and
//! `A0` come out exactly symmetric.

use super::{DescriptorSystem, ElementKind, Formulation, Netlist, PortKind};
use crate::linalg::Mat;
use crate::{Error, Result, DEFAULT_DENSE_LIMIT};

/// Assemble with the default dense size limit.
pub fn assemble_descriptor(netlist: &Netlist) -> Result<DescriptorSystem> {
    assemble_descriptor_with_limit(netlist, DEFAULT_DENSE_LIMIT)
}

/// Assemble a netlist into its symmetric descriptor form.
pub fn assemble_descriptor_with_limit(netlist: &Netlist, limit: usize) -> Result<DescriptorSystem> {
    let nn = netlist.node_count;
    let inductors: Vec<_> = netlist
        .elements
        .iter()
        .filter(|e| e.kind == ElementKind::Inductor)
        .collect();
    let nl = inductors.len();
    let m = netlist.port_count();

    let (_n_i, n_v) = match netlist.formulation {
        Formulation::Impedance => (m, 0),
        Formulation::Admittance => (0, m),
        Formulation::Hybrid => (m / 2, m / 2),
    };
    let n = nn + nl + n_v;
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if n == 0 {
        return Err(Error::Netlist("empty system".into()));
    }

    let mut e0 = Mat::zeros(n, n);
    let mut a0 = Mat::zeros(n, n);

    // Two-terminal stamp of `val` into the node block of `target`.
    let stamp = |target: &mut Mat, map: &dyn Fn(usize) -> Option<usize>, n1, n2, val: f64| {
        let (i, j) = (map(n1), map(n2));
        if let Some(i) = i {
            target[(i, i)] += val;
        }
        if let Some(j) = j {
            target[(j, j)] += val;
        }
        if let (Some(i), Some(j)) = (i, j) {
            target[(i, j)] -= val;
            target[(j, i)] -= val;
        }
    };
    let node_of = |id: usize| netlist.node_index(id);

    let mut li = 0usize;
    for e in &netlist.elements {
        match e.kind {
            ElementKind::Capacitor => stamp(&mut e0, &node_of, e.nodes.0, e.nodes.1, e.value),
            ElementKind::Resistor => stamp(&mut a0, &node_of, e.nodes.0, e.nodes.1, -1.0 / e.value),
            ElementKind::Inductor => {
                let col = nn + li;
                // E inductor block: -L; A coupling: -A_L and its transpose.
                e0[(col, col)] = -e.value;
                if let Some(i) = node_of(e.nodes.0) {
                    a0[(i, col)] -= 1.0;
                    a0[(col, i)] -= 1.0;
                }
                if let Some(j) = node_of(e.nodes.1) {
                    a0[(j, col)] += 1.0;
                    a0[(col, j)] += 1.0;
                }
                li += 1;
            }
        }
    }

    // Incidence column of a port into rows `0..nn`.
    let port_column = |mat: &mut Mat, col: usize, nodes: (usize, usize), scale: f64| {
        if let Some(i) = node_of(nodes.0) {
            mat[(i, col)] += scale;
        }
        if let Some(j) = node_of(nodes.1) {
            mat[(j, col)] -= scale;
        }
    };

    let mut b0 = Mat::zeros(n, m);
    let mut c0;
    let mut port_sign = vec![1.0; m];

    match netlist.formulation {
        Formulation::Impedance => {
            // B0 = [-A_I; 0], C0 = B0^T.
            for (k, p) in netlist.ports.iter().enumerate() {
                port_column(&mut b0, k, p.nodes, -1.0);
            }
            c0 = b0.transpose();
        }
        Formulation::Admittance => {
            // Voltage sources append states; A couples through -A_V.
            for (k, p) in netlist.ports.iter().enumerate() {
                let col = nn + nl + k;
                if let Some(i) = node_of(p.nodes.0) {
                    a0[(i, col)] -= 1.0;
                    a0[(col, i)] -= 1.0;
                }
                if let Some(j) = node_of(p.nodes.1) {
                    a0[(j, col)] += 1.0;
                    a0[(col, j)] += 1.0;
                }
                b0[(col, k)] = 1.0;
            }
            c0 = Mat::zeros(m, n);
            for k in 0..m {
                c0[(k, nn + nl + k)] = -1.0;
            }
        }
        Formulation::Hybrid => {
            let half = m / 2;
            for (k, p) in netlist.ports.iter().enumerate() {
                match p.kind {
                    PortKind::CurrentSource => port_column(&mut b0, k, p.nodes, -1.0),
                    PortKind::VoltageSource => {
                        let vi = k - half;
                        let col = nn + nl + vi;
                        if let Some(i) = node_of(p.nodes.0) {
                            a0[(i, col)] -= 1.0;
                            a0[(col, i)] -= 1.0;
                        }
                        if let Some(j) = node_of(p.nodes.1) {
                            a0[(j, col)] += 1.0;
                            a0[(col, j)] += 1.0;
                        }
                        b0[(col, k)] = 1.0;
                    }
                }
            }
            // C0 = port_sign * B0^T with sign -1 on the voltage half.
            for s in port_sign.iter_mut().skip(half) {
                *s = -1.0;
            }
            c0 = b0.transpose();
            for k in half..m {
                for j in 0..n {
                    c0[(k, j)] = -c0[(k, j)];
                }
            }
        }
    }

    Ok(DescriptorSystem {
        e0,
        a0,
        b0,
        c0,
        formulation: netlist.formulation,
        port_sign,
        omega0: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_ladder, parse_netlist, LadderTopology};
    use num_complex::Complex64;

    /// Two sections of the resistor-terminated ladder, impedance form,
    /// ports at the leftmost two nodes.
    fn two_section_z() -> DescriptorSystem {
        let nl = generate_ladder(2, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Impedance)
            .unwrap();
        assemble_descriptor(&nl).unwrap()
    }

    #[test]
    fn two_section_ladder_matrices() {
        let sys = two_section_z();
        assert_eq!(sys.n(), 7);
        assert_eq!(sys.m(), 2);

        // E0 = diag(node caps at 3 and 5, then -L block).
        let e_expect = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.0, 0.0, 1.0, 0.0, 1.0, -1.0, -1.0,
        ]));
        assert_eq!(sys.e0, e_expect);

        #[rustfmt::skip]
        let minus_a = Mat::from_row_slice(7, 7, &[
            2.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
            -1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 1.0, -1.0, 0.0, -1.0, 0.0,
            0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
            0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0,
        ]);
        assert_eq!(sys.a0, -minus_a);

        let mut b_expect = Mat::zeros(7, 2);
        b_expect[(0, 0)] = -1.0;
        b_expect[(1, 1)] = -1.0;
        assert_eq!(sys.b0, b_expect);
        assert_eq!(sys.c0, sys.b0.transpose());
    }

    #[test]
    fn assembled_matrices_exactly_symmetric() {
        for topo in [LadderTopology::FigA, LadderTopology::FigB] {
            for form in [Formulation::Impedance, Formulation::Admittance, Formulation::Hybrid] {
                let nl = generate_ladder(3, topo, 2.0, 0.5, 3.0, form).unwrap();
                let sys = assemble_descriptor(&nl).unwrap();
                assert_eq!(sys.e0, sys.e0.transpose());
                assert_eq!(sys.a0, sys.a0.transpose());
            }
        }
    }

    #[test]
    fn impedance_output_is_b_transposed() {
        let nl =
            generate_ladder(4, LadderTopology::FigB, 1.0, 2.0, 3.0, Formulation::Impedance)
                .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        assert_eq!(sys.c0, sys.b0.transpose());
    }

    #[test]
    fn no_inductor_degenerate_blocks() {
        let nl = parse_netlist("R1 1 0 1\nC1 1 0 2\n.ports I 1 0\n.form Z").unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        assert_eq!(sys.n(), 1);
        assert_eq!(sys.e0[(0, 0)], 2.0);
        assert_eq!(sys.a0[(0, 0)], -1.0);
    }

    #[test]
    fn hybrid_response_is_block_skew() {
        let nl = generate_ladder(2, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Hybrid)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        for &om in &[0.7, 3.1, 19.0] {
            let g = sys.transfer_at(Complex64::new(0.4, om)).unwrap();
            // H11, H22 symmetric; H12 = -H21^T.
            let resid = (g[(0, 1)] + g[(1, 0)]).norm();
            assert!(resid < 1e-12 * g.norm(), "skew residual {resid}");
        }
    }

    #[test]
    fn admittance_c_is_minus_b_transposed_block() {
        let nl = generate_ladder(2, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Admittance)
            .unwrap();
        let sys = assemble_descriptor(&nl).unwrap();
        assert_eq!(sys.c0, -sys.b0.transpose());
    }

    #[test]
    fn size_limit_enforced() {
        let nl = generate_ladder(40, LadderTopology::FigA, 1.0, 1.0, 1.0, Formulation::Impedance)
            .unwrap();
        let err = assemble_descriptor_with_limit(&nl, 10).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
    }
}
