//! Command-line front end for the reduction pipeline.
//!
//! Subcommands: `gen` (ladder netlists), `reduce` (netlist to reduced
//! model + run metadata), `verify` (property checks of a model against its
//! netlist), and `sweep` (frequency-response CSV of a netlist or model).
//!
//! Exit codes: 0 success / all checks passed, 1 numerical failure or failed
//! verification, 2 bad input (parse or validation errors).

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use circred::analyze;
use circred::circuit::{
    assemble_descriptor, generate_ladder, parse_netlist, parse_si_value, Formulation,
    LadderTopology, Netlist,
};
use circred::linalg::log_space;
use circred::pipeline::{
    reduce_netlist, verify_model, MethodChoice, PipelineConfig, ShiftChoice, SolverChoice,
};
use circred::reduce::{parse_reduced_model, write_reduced_model, OrderSpec};
use circred::Error;

#[derive(Parser)]
#[command(name = "circred", version, about = "Passive RLC model order reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ladder netlist.
    Gen(GenArgs),
    /// Reduce a netlist to a small reciprocal, passive model.
    Reduce(ReduceArgs),
    /// Check a reduced model against its source netlist.
    Verify(VerifyArgs),
    /// Sweep the frequency response of a netlist or a model to CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Z,
    Y,
    H,
}

impl From<FormArg> for Formulation {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Z => Formulation::Impedance,
            FormArg::Y => Formulation::Admittance,
            FormArg::H => Formulation::Hybrid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Figa,
    Figb,
}

#[derive(Args)]
struct GenArgs {
    /// Ladder family.
    #[arg(long, value_enum)]
    topology: TopologyArg,
    /// Number of RLC sections.
    #[arg(long)]
    sections: usize,
    /// Resistance (SI suffixes accepted: k m u n p).
    #[arg(long, default_value = "1")]
    r: String,
    /// Inductance.
    #[arg(long, default_value = "1n")]
    l: String,
    /// Capacitance.
    #[arg(long, default_value = "1n")]
    c: String,
    #[arg(long, value_enum, default_value = "z")]
    form: FormArg,
    /// Output netlist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    /// Input netlist.
    netlist: PathBuf,
    /// Truncation route: rprbt1, rprbt2, or auto.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Riccati backend: radi or dense.
    #[arg(long, default_value = "radi")]
    solver: String,
    /// Shift strategy: `sml`, `lrg:<s0>`, or `file:<path>`.
    #[arg(long, default_value = "sml")]
    shifts: String,
    #[arg(long = "num-shifts", default_value_t = 15)]
    num_shifts: usize,
    /// Arnoldi depth for shift computation (default: 2 * num-shifts).
    #[arg(long)]
    krylov: Option<usize>,
    /// RADI step cap.
    #[arg(long, default_value_t = 30)]
    steps: usize,
    /// RADI relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Reduced order: a number or `auto`.
    #[arg(long, default_value = "auto")]
    order: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Regularization for singular constant terms.
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// Frequency normalization (rad/s); default: automatic from L/C values.
    #[arg(long)]
    omega0: Option<f64>,
    /// Output directory (model.txt, hankel.csv, residual.csv, run.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepRange {
    #[arg(long = "omega-min", default_value_t = 1.0)]
    omega_min: f64,
    #[arg(long = "omega-max", default_value_t = 1e12)]
    omega_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced model file.
    model: PathBuf,
    /// Source netlist.
    netlist: PathBuf,
    #[command(flatten)]
    range: SweepRange,
    /// Reciprocity residual threshold.
    #[arg(long = "recip-tol", default_value_t = 1e-10)]
    recip_tol: f64,
    /// Allowed negative passivity slack.
    #[arg(long = "passivity-slack", default_value_t = 1e-8)]
    passivity_slack: f64,
    /// Relative-error threshold below the cutoff.
    #[arg(long = "error-tol", default_value_t = 1e-3)]
    error_tol: f64,
    /// Frequency cutoff for the error check (rad/s).
    #[arg(long = "low-cutoff", default_value_t = 1e6)]
    low_cutoff: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Netlist to sweep (exact response), unless --model is given.
    input: PathBuf,
    /// Treat the input as a reduced model file.
    #[arg(long)]
    model: bool,
    #[command(flatten)]
    range: SweepRange,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Netlist(_) | Error::Format(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn parse_value_arg(tok: &str, what: &str) -> Result<f64, Error> {
    parse_si_value(tok).ok_or_else(|| Error::Netlist(format!("cannot parse {what} value `{tok}`")))
}

fn load_netlist(path: &PathBuf) -> Result<Netlist, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_netlist(&text)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let topology = match args.topology {
        TopologyArg::Figa => LadderTopology::FigA,
        TopologyArg::Figb => LadderTopology::FigB,
    };
    let r = parse_value_arg(&args.r, "R")?;
    let l = parse_value_arg(&args.l, "L")?;
    let c = parse_value_arg(&args.c, "C")?;
    let netlist = generate_ladder(args.sections, topology, r, l, c, args.form.into())?;
    let text = output::netlist_text(&netlist);
    std::fs::write(&args.out, text)?;
    println!(
        "wrote {} ({} elements, {} ports)",
        args.out.display(),
        netlist.elements.len(),
        netlist.ports.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_shift_choice(spec: &str) -> Result<ShiftChoice, Error> {
    if spec == "sml" {
        return Ok(ShiftChoice::Sml);
    }
    if let Some(s0) = spec.strip_prefix("lrg:") {
        let s0: f64 = s0
            .parse()
            .map_err(|_| Error::Format(format!("bad lrg expansion point `{s0}`")))?;
        return Ok(ShiftChoice::Lrg { s0 });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        let mut vals = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let pair = match parts.as_slice() {
                [re] => re.parse::<f64>().map(|r| (r, 0.0)).ok(),
                [re, im] => re
                    .parse::<f64>()
                    .ok()
                    .zip(im.parse::<f64>().ok()),
                _ => None,
            };
            match pair {
                Some((re, im)) => vals.push(Complex64::new(re, im)),
                None => {
                    return Err(Error::Format(format!(
                        "shift file line {}: expected `re [im]`",
                        i + 1
                    )))
                }
            }
        }
        return Ok(ShiftChoice::Given(vals));
    }
    Err(Error::Format(format!(
        "unknown shift strategy `{spec}` (expected sml, lrg:<s0>, file:<path>)"
    )))
}

fn cmd_reduce(args: ReduceArgs) -> Result<ExitCode, Error> {
    let netlist = load_netlist(&args.netlist)?;
    let method = match args.method.as_str() {
        "rprbt1" => MethodChoice::Rprbt1,
        "rprbt2" => MethodChoice::Rprbt2,
        "auto" => MethodChoice::Auto,
        other => {
            return Err(Error::Format(format!(
                "unknown method `{other}` (expected rprbt1, rprbt2, auto)"
            )))
        }
    };
    let solver = match args.solver.as_str() {
        "radi" => SolverChoice::Radi,
        "dense" => SolverChoice::Dense,
        other => {
            return Err(Error::Format(format!(
                "unknown solver `{other}` (expected radi, dense)"
            )))
        }
    };
    let order = match args.order.as_str() {
        "auto" => OrderSpec::Auto,
        n => OrderSpec::Fixed(
            n.parse()
                .map_err(|_| Error::Format(format!("bad order `{n}`")))?,
        ),
    };
    let cfg = PipelineConfig {
        method,
        solver,
        shifts: parse_shift_choice(&args.shifts)?,
        num_shifts: args.num_shifts,
        krylov_depth: args.krylov,
        radi_steps: args.steps,
        radi_tol: args.tol,
        order,
        seed: args.seed,
        eps_reg: args.eps,
        omega0: args.omega0,
        ..Default::default()
    };

    let report = reduce_netlist(&netlist, &cfg)?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(
        args.out.join("model.txt"),
        write_reduced_model(&report.model),
    )?;
    std::fs::write(
        args.out.join("hankel.csv"),
        output::hankel_csv(&report.hankel_sigma, &report.hankel_signs),
    )?;
    std::fs::write(
        args.out.join("residual.csv"),
        output::residual_csv(&report.residual_history, report.constant_term_norm),
    )?;
    std::fs::write(args.out.join("run.json"), output::run_json(&args, &report))?;

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "reduced to order {} via {} ({:?}); artifacts in {}",
        report.model.order(),
        report.method_used,
        report.index,
        args.out.display()
    );
    if report.radi_converged == Some(false) {
        eprintln!(
            "warning: RADI stopped at the step cap with relative residual {:.3e}",
            report
                .residual_history
                .last()
                .map(|r| r / report.constant_term_norm.max(f64::MIN_POSITIVE))
                .unwrap_or(f64::NAN)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let netlist = load_netlist(&args.netlist)?;
    let model = parse_reduced_model(&std::fs::read_to_string(&args.model)?)?;
    if model.ports() != netlist.port_count() {
        return Err(Error::Netlist(format!(
            "model has {} ports but the netlist declares {}",
            model.ports(),
            netlist.port_count()
        )));
    }
    let omegas = log_space(args.range.omega_min, args.range.omega_max, args.range.points);
    let v = verify_model(&netlist, &model, &omegas, args.low_cutoff)?;

    let mut ok = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        println!("{}: {} ({detail})", name, if pass { "PASS" } else { "FAIL" });
    };
    line(
        "reciprocity",
        v.reciprocity <= args.recip_tol,
        format!("residual {:.3e} <= {:.1e}", v.reciprocity, args.recip_tol),
    );
    line(
        "passivity",
        v.passivity_margin >= -args.passivity_slack,
        format!(
            "margin {:.3e} >= -{:.1e}",
            v.passivity_margin, args.passivity_slack
        ),
    );
    line(
        "relative-error",
        v.max_rel_error_low <= args.error_tol,
        format!(
            "max {:.3e} <= {:.1e} for omega <= {:.1e}",
            v.max_rel_error_low, args.error_tol, args.low_cutoff
        ),
    );
    println!(
        "max relative error over the full sweep: {:.3e}",
        v.max_rel_error
    );
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let omegas = log_space(args.range.omega_min, args.range.omega_max, args.range.points);
    let resp = if args.model {
        let model = parse_reduced_model(&std::fs::read_to_string(&args.input)?)?;
        analyze::sweep_reduced(&model, &omegas)?
    } else {
        let netlist = load_netlist(&args.input)?;
        let sys = assemble_descriptor(&netlist)?;
        analyze::sweep_descriptor(&sys, &omegas)?
    };
    if !resp.skipped.is_empty() {
        eprintln!(
            "warning: {} frequency points skipped (singular pencil)",
            resp.skipped.len()
        );
    }
    analyze::emit_csv(&args.out, &analyze::response_csv(&resp))?;
    println!("wrote {} ({} points)", args.out.display(), resp.len());
    Ok(ExitCode::SUCCESS)
}
