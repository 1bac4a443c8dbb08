//! Line-oriented netlist parser.
//!
//! Grammar (one statement per line, `#` starts a comment):
//!
//! ```text
//! R<name> n1 n2 value
//! L<name> n1 n2 value
//! C<name> n1 n2 value
//! .ports <I|V> n1 n2 [<I|V> n1 n2 ...]
//! .form <Z|Y|H>
//! ```
//!
//! Node `0` is ground. Values accept the SI suffixes `k m u n p`.

use std::collections::BTreeSet;

use super::{Element, ElementKind, Formulation, Netlist, PortKind, PortSpec};
use crate::{Error, Result};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse a value with an optional SI suffix (`k m u n p`).
pub fn parse_si_value(tok: &str) -> Option<f64> {
    if let Ok(v) = tok.parse::<f64>() {
        return Some(v);
    }
    if tok.len() < 2 {
        return None;
    }
    let (head, suffix) = tok.split_at(tok.len() - 1);
    let scale = match suffix {
        "k" => 1e3,
        "m" => 1e-3,
        "u" => 1e-6,
        "n" => 1e-9,
        "p" => 1e-12,
        _ => return None,
    };
    head.parse::<f64>().ok().map(|v| v * scale)
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    parse_si_value(tok).ok_or_else(|| err(line, format!("cannot parse value `{tok}`")))
}

fn parse_node(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| err(line, format!("bad node id `{tok}`")))
}

/// Parse netlist text into a validated [`Netlist`].
pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut elements = Vec::new();
    let mut ports = Vec::new();
    let mut formulation: Option<Formulation> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();

        if let Some(directive) = head.strip_prefix('.') {
            match directive.to_ascii_lowercase().as_str() {
                "ports" => {
                    let rest: Vec<&str> = toks.collect();
                    if rest.is_empty() || rest.len() % 3 != 0 {
                        return Err(err(lineno, ".ports expects groups of `<I|V> n1 n2`"));
                    }
                    for chunk in rest.chunks(3) {
                        let kind = match chunk[0] {
                            "I" | "i" => PortKind::CurrentSource,
                            "V" | "v" => PortKind::VoltageSource,
                            other => {
                                return Err(err(lineno, format!("unknown port kind `{other}`")))
                            }
                        };
                        let n1 = parse_node(chunk[1], lineno)?;
                        let n2 = parse_node(chunk[2], lineno)?;
                        if n1 == n2 {
                            return Err(err(lineno, "port terminals coincide"));
                        }
                        ports.push(PortSpec { kind, nodes: (n1, n2) });
                    }
                }
                "form" => {
                    let tok = toks
                        .next()
                        .ok_or_else(|| err(lineno, ".form expects Z, Y, or H"))?;
                    let f = match tok {
                        "Z" | "z" => Formulation::Impedance,
                        "Y" | "y" => Formulation::Admittance,
                        "H" | "h" => Formulation::Hybrid,
                        other => {
                            return Err(err(lineno, format!("unknown formulation `{other}`")))
                        }
                    };
                    if formulation.replace(f).is_some() {
                        return Err(err(lineno, "duplicate .form directive"));
                    }
                }
                other => return Err(err(lineno, format!("unknown directive `.{other}`"))),
            }
            continue;
        }

        // Element line.
        let kind = match head.chars().next().unwrap().to_ascii_uppercase() {
            'R' => ElementKind::Resistor,
            'L' => ElementKind::Inductor,
            'C' => ElementKind::Capacitor,
            other => return Err(err(lineno, format!("unknown element `{other}`"))),
        };
        let n1 = parse_node(
            toks.next().ok_or_else(|| err(lineno, "missing node"))?,
            lineno,
        )?;
        let n2 = parse_node(
            toks.next().ok_or_else(|| err(lineno, "missing node"))?,
            lineno,
        )?;
        let vtok = toks.next().ok_or_else(|| err(lineno, "missing value"))?;
        if toks.next().is_some() {
            return Err(err(lineno, "trailing tokens on element line"));
        }
        let value = parse_value(vtok, lineno)?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(err(lineno, format!("nonpositive value `{vtok}`")));
        }
        if n1 == n2 {
            return Err(err(lineno, "element terminals coincide"));
        }
        elements.push(Element {
            kind,
            name: head.to_string(),
            nodes: (n1, n2),
            value,
        });
    }

    let formulation = formulation.ok_or_else(|| Error::Netlist("missing .form directive".into()))?;
    if ports.is_empty() {
        return Err(Error::Netlist("missing .ports directive".into()));
    }
    if elements.is_empty() {
        return Err(Error::Netlist("netlist has no elements".into()));
    }

    // Formulation / port-kind consistency.
    let mismatch = |msg: &str| Err(Error::Netlist(format!("formulation/port mismatch: {msg}")));
    match formulation {
        Formulation::Impedance => {
            if ports.iter().any(|p| p.kind != PortKind::CurrentSource) {
                return mismatch("Z form requires current-source ports only");
            }
        }
        Formulation::Admittance => {
            if ports.iter().any(|p| p.kind != PortKind::VoltageSource) {
                return mismatch("Y form requires voltage-source ports only");
            }
        }
        Formulation::Hybrid => {
            let m = ports.len();
            if m % 2 != 0 {
                return mismatch("H form requires an even port count");
            }
            let (first, second) = ports.split_at(m / 2);
            if first.iter().any(|p| p.kind != PortKind::CurrentSource)
                || second.iter().any(|p| p.kind != PortKind::VoltageSource)
            {
                return mismatch("H form requires current ports first, voltage ports second");
            }
        }
    }

    // Compact node numbering; ground stays implicit.
    let mut ids = BTreeSet::new();
    for e in &elements {
        ids.insert(e.nodes.0);
        ids.insert(e.nodes.1);
    }
    let element_ids = ids.clone();
    for p in &ports {
        ids.insert(p.nodes.0);
        ids.insert(p.nodes.1);
    }
    ids.remove(&0);
    for p in &ports {
        for node in [p.nodes.0, p.nodes.1] {
            if node != 0 && !element_ids.contains(&node) {
                return Err(Error::Netlist(format!(
                    "dangling node reference: port node {node} touches no element"
                )));
            }
        }
    }
    let node_ids: Vec<usize> = ids.into_iter().collect();

    Ok(Netlist {
        elements,
        ports,
        formulation,
        node_count: node_ids.len(),
        node_ids,
    })
}
