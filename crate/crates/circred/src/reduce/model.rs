//! Plain-text serialization of reduced models.
//!
//! Layout: a header with the formulation, order `k`, and port count `m`,
//! followed by the row-major blocks `Es`, `As`, `S1`, `B1`, `C1`, `M0`,
//! `M1` in decimal with 17 significant digits.

use std::fmt::Write as _;

use super::ReducedModel;
use crate::circuit::Formulation;
use crate::linalg::Mat;
use crate::{Error, Result};

const HEADER: &str = "circred-model v1";

/// Serialize a model to the documented text format.
pub fn write_reduced_model(model: &ReducedModel) -> String {
    let k = model.order();
    let m = model.ports();
    let mut text = String::new();
    let _ = writeln!(text, "# {HEADER}");
    let _ = writeln!(text, "form {}", model.formulation.tag());
    let _ = writeln!(text, "order {k}");
    let _ = writeln!(text, "ports {m}");
    for (name, mat) in [
        ("Es", model.es.clone()),
        ("As", model.a_s.clone()),
        ("S1", model.s1_matrix()),
        ("B1", model.b1.clone()),
        ("C1", model.c1.clone()),
        ("M0", model.m0.clone()),
        ("M1", model.m1.clone()),
    ] {
        let _ = writeln!(text, "{name} {} {}", mat.nrows(), mat.ncols());
        for i in 0..mat.nrows() {
            let row: Vec<String> = (0..mat.ncols())
                .map(|j| format!("{:.16e}", mat[(i, j)]))
                .collect();
            let _ = writeln!(text, "{}", row.join(" "));
        }
    }
    text
}

/// Parse a model written by [`write_reduced_model`].
pub fn parse_reduced_model(text: &str) -> Result<ReducedModel> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let form_line = lines
        .next()
        .ok_or_else(|| Error::Format("missing form line".into()))?;
    let formulation = match form_line.strip_prefix("form ").map(str::trim) {
        Some("Z") => Formulation::Impedance,
        Some("Y") => Formulation::Admittance,
        Some("H") => Formulation::Hybrid,
        _ => return Err(Error::Format(format!("bad form line `{form_line}`"))),
    };
    let order: usize = parse_kv(lines.next(), "order")?;
    let ports: usize = parse_kv(lines.next(), "ports")?;

    let mut read_block = |name: &str, rows: usize, cols: usize| -> Result<Mat> {
        let head = lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing block {name}")))?;
        let mut toks = head.split_whitespace();
        let got = toks.next().unwrap_or("");
        if got != name {
            return Err(Error::Format(format!("expected block {name}, found {got}")));
        }
        let r: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad dimensions for {name}")))?;
        let c: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format(format!("bad dimensions for {name}")))?;
        if r != rows || c != cols {
            return Err(Error::Format(format!(
                "block {name} is {r}x{c}, expected {rows}x{cols}"
            )));
        }
        let mut mat = Mat::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("truncated block {name}")))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Format(format!("bad float `{t}` in {name}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != cols {
                return Err(Error::Format(format!(
                    "block {name} row {i} has {} entries, expected {cols}",
                    vals.len()
                )));
            }
            for (j, v) in vals.iter().enumerate() {
                mat[(i, j)] = *v;
            }
        }
        Ok(mat)
    };

    let es = read_block("Es", order, order)?;
    let a_s = read_block("As", order, order)?;
    let s1m = read_block("S1", order, order)?;
    let b1 = read_block("B1", order, ports)?;
    let c1 = read_block("C1", ports, order)?;
    let m0 = read_block("M0", ports, ports)?;
    let m1 = read_block("M1", ports, ports)?;

    let s1: Vec<f64> = (0..order).map(|i| s1m[(i, i)]).collect();
    if s1.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::Format("S1 must be a ±1 diagonal".into()));
    }

    let mut port_sign = vec![1.0; ports];
    if formulation == Formulation::Hybrid {
        for s in port_sign.iter_mut().skip(ports / 2) {
            *s = -1.0;
        }
    }

    Ok(ReducedModel {
        es,
        a_s,
        s1,
        b1,
        c1,
        m0,
        m1,
        formulation,
        port_sign,
    })
}

fn parse_kv(line: Option<&str>, key: &str) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Format(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad `{key}` line: {line}")))
}
