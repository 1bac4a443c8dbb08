//! Artifact writers: netlist text, CSV exports, and the JSON run sidecar.
//!
//! Everything here is deterministic for a fixed config and seed — no
//! timestamps, no map iteration order — so identical runs produce
//! bit-identical files.

use serde::Serialize;

use circred::circuit::{ElementKind, Netlist, PortKind};
use circred::pipeline::PipelineReport;

/// Netlist text in the grammar the parser accepts.
pub fn netlist_text(nl: &Netlist) -> String {
    let mut out = String::new();
    for e in &nl.elements {
        let tag = match e.kind {
            ElementKind::Resistor => "R",
            ElementKind::Inductor => "L",
            ElementKind::Capacitor => "C",
        };
        let name = e.name.strip_prefix(tag).unwrap_or(&e.name);
        out.push_str(&format!(
            "{tag}{name} {} {} {}\n",
            e.nodes.0, e.nodes.1, e.value
        ));
    }
    out.push_str(".ports");
    for p in &nl.ports {
        let kind = match p.kind {
            PortKind::CurrentSource => "I",
            PortKind::VoltageSource => "V",
        };
        out.push_str(&format!(" {kind} {} {}", p.nodes.0, p.nodes.1));
    }
    out.push('\n');
    out.push_str(&format!(".form {}\n", nl.formulation.tag()));
    out
}

/// Hankel spectrum CSV: index, |sigma|, sign.
pub fn hankel_csv(sigma: &[f64], signs: &[f64]) -> String {
    let mut out = String::from("index,sigma_abs,sign\n");
    for (i, (s, sg)) in sigma.iter().zip(signs).enumerate() {
        out.push_str(&format!("{},{s:.16e},{sg}\n", i + 1));
    }
    out
}

/// RADI residual history CSV (`‖R*R‖_F`, absolute and relative).
pub fn residual_csv(history: &[f64], cc_norm: f64) -> String {
    let mut out = String::from("step,residual,residual_rel\n");
    for (i, r) in history.iter().enumerate() {
        let rel = r / cc_norm.max(f64::MIN_POSITIVE);
        out.push_str(&format!("{},{r:.16e},{rel:.16e}\n", i + 1));
    }
    out
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    tool: &'static str,
    netlist: String,
    method_requested: &'a str,
    method_used: &'a str,
    solver: &'a str,
    index_detected: &'static str,
    formulation: &'static str,
    order: usize,
    ports: usize,
    omega0: f64,
    eps_regularization: f64,
    seed: u64,
    num_shifts_requested: usize,
    radi_steps_cap: usize,
    radi_tol: f64,
    radi_converged: Option<bool>,
    residual_norm: &'static str,
    shifts_used: Vec<[f64; 2]>,
    final_residual_rel: Option<f64>,
    hankel_count: usize,
    warnings: &'a [String],
}

/// JSON sidecar echoing the configuration and run outcome.
pub fn run_json(args: &crate::ReduceArgs, report: &PipelineReport) -> String {
    let sidecar = RunSidecar {
        tool: "circred",
        netlist: args.netlist.display().to_string(),
        method_requested: &args.method,
        method_used: report.method_used,
        solver: &args.solver,
        index_detected: match report.index {
            circred::canon::SystemIndex::Index1 => "index-1",
            circred::canon::SystemIndex::Index2 => "index-2",
        },
        formulation: report.model.formulation.tag(),
        order: report.model.order(),
        ports: report.model.ports(),
        omega0: report.omega0,
        eps_regularization: report.eps_used,
        seed: args.seed,
        num_shifts_requested: args.num_shifts,
        radi_steps_cap: args.steps,
        radi_tol: args.tol,
        radi_converged: report.radi_converged,
        residual_norm: "frobenius",
        shifts_used: report.shifts_used.iter().map(|s| [s.re, s.im]).collect(),
        final_residual_rel: report
            .residual_history
            .last()
            .map(|r| r / report.constant_term_norm.max(f64::MIN_POSITIVE)),
        hankel_count: report.hankel_sigma.len(),
        warnings: &report.warnings,
    };
    serde_json::to_string_pretty(&sidecar).expect("sidecar serialization") + "\n"
}
