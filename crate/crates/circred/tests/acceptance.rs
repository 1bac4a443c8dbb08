//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! unconditionally. Each criterion is a self-contained check with its
//! tolerances pinned in code; the master test fails if any criterion fails.

use std::time::Instant;

use circred::analyze::{
    check_passivity, check_reciprocity, default_omegas, relative_error, sweep_descriptor,
    sweep_reduced, FrequencyResponse,
};
use circred::canon::{
    detect_index, polynomial_part, spectral_projectors, to_state_equation, to_stokes_form,
    to_svd_canonical, SystemIndex,
};
use circred::circuit::{
    assemble_descriptor, auto_omega0, generate_ladder, parse_netlist, DescriptorSystem,
    Formulation, LadderTopology, Netlist,
};
use circred::linalg::{range_basis, Mat};
use circred::pipeline::{
    reduce_netlist, MethodChoice, PipelineConfig, ShiftChoice, SolverChoice,
};
use circred::reduce::{write_reduced_model, OrderSpec};
use circred::riccati::shifts::HamiltonianPencil;
use circred::riccati::{
    cholesky_from_radi, compute_shifts_sml, dense_riccati_solve_are, dense_riccati_solve_are_dual,
    dense_riccati_solve_gare, dense_riccati_solve_gare_dual, prbt_are_data, prbt_gare_data, radi,
    RadiOptions,
};

const SEED: u64 = 20260808;

type Crit = std::result::Result<String, String>;

fn fig_a(sections: usize, form: Formulation) -> Netlist {
    generate_ladder(sections, LadderTopology::FigA, 1.0, 1.0, 1.0, form).unwrap()
}

fn fig_b(sections: usize, form: Formulation) -> Netlist {
    generate_ladder(sections, LadderTopology::FigB, 1.0, 1.0, 1.0, form).unwrap()
}

/// Golden two-port systems in admittance/hybrid form drive the far end
/// node; built explicitly since the generator places ports leftmost.
fn fig_a2_far_port(form: char) -> DescriptorSystem {
    let body = "R0 1 0 1\nR1 1 2 1\nL1 2 3 1\nC1 3 0 1\nR2 3 4 1\nL2 4 5 1\nC2 5 0 1\n";
    let text = match form {
        'Y' => format!("{body}.ports V 1 0 V 5 0\n.form Y"),
        'H' => format!("{body}.ports I 1 0 V 5 0\n.form H"),
        _ => unreachable!(),
    };
    assemble_descriptor(&parse_netlist(&text).unwrap()).unwrap()
}

fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).amax()
}

/// Entrywise match up to a per-state sign convention (diagonal +-1
/// congruence), with `tol` on each entry.
fn sign_normalized_match(x: &Mat, expect: &Mat, tol: f64) -> bool {
    let n = x.nrows();
    (0..(1usize << n)).any(|mask| {
        (0..n).all(|i| {
            (0..n).all(|j| {
                let si = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                let sj = if mask & (1 << j) != 0 { -1.0 } else { 1.0 };
                (si * sj * x[(i, j)] - expect[(i, j)]).abs() <= tol
            })
        })
    })
}

fn fail_if(cond: bool, detail: String) -> Crit {
    if cond {
        Err(detail)
    } else {
        Ok(detail)
    }
}

// ---------------------------------------------------------------- criterion 1

fn criterion_1() -> Crit {
    let start = Instant::now();
    let nl = fig_a(2, Formulation::Impedance);
    let sys = assemble_descriptor(&nl).unwrap();

    let e_expect = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        0.0, 0.0, 1.0, 0.0, 1.0, -1.0, -1.0,
    ]));
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
    let mut b_expect = Mat::zeros(7, 2);
    b_expect[(0, 0)] = -1.0;
    b_expect[(1, 1)] = -1.0;

    let exact = sys.e0 == e_expect && sys.a0 == -minus_a && sys.b0 == b_expect;
    let elapsed = start.elapsed();
    fail_if(
        !exact || elapsed.as_secs_f64() >= 1.0,
        format!(
            "two-section assembly integer match = {exact}, runtime {:.3}s (< 1s required)",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Crit {
    let sys_z = assemble_descriptor(&fig_a(2, Formulation::Impedance)).unwrap();
    let fz = to_svd_canonical(&sys_z, 1e-11).unwrap();
    let mut notes = Vec::new();

    let rank_ok = fz.signature.r() == 4 && (fz.signature.r1, fz.signature.r2) == (2, 2);
    notes.push(format!("rank 4 with I' = diag(1,1,-1,-1): {rank_ok}"));

    let a22_expect =
        Mat::from_row_slice(3, 3, &[-2.0, 1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0]);
    let a22_ok = max_abs_diff(&fz.a22, &a22_expect) <= 1e-10;
    notes.push(format!("A22 entrywise: {a22_ok}"));
    let z_index_ok = detect_index(&fz, 1e-10) == SystemIndex::Index1;

    let sys_y = fig_a2_far_port('Y');
    let fy = to_svd_canonical(&sys_y, 1e-11).unwrap();
    #[rustfmt::skip]
    let a22_y = Mat::from_row_slice(5, 5, &[
        -2.0, 1.0, 0.0, -1.0, 0.0,
        1.0, -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0,
    ]);
    let y_ok = max_abs_diff(&fy.a22, &a22_y) <= 1e-10
        && detect_index(&fy, 1e-10) == SystemIndex::Index2
        && fy.signature.r() == 4;
    notes.push(format!("A22_y + index-2: {y_ok}"));

    let sys_h = fig_a2_far_port('H');
    let fh = to_svd_canonical(&sys_h, 1e-11).unwrap();
    #[rustfmt::skip]
    let a22_h = Mat::from_row_slice(4, 4, &[
        -2.0, 1.0, 0.0, 0.0,
        1.0, -1.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    let h_ok = max_abs_diff(&fh.a22, &a22_h) <= 1e-10
        && detect_index(&fh, 1e-10) == SystemIndex::Index2
        && fh.signature.r() == 4;
    notes.push(format!("A22_h + index-2: {h_ok}"));

    fail_if(
        !(rank_ok && a22_ok && z_index_ok && y_ok && h_ok),
        notes.join("; "),
    )
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Crit {
    // Z form: golden solutions.
    let sys = assemble_descriptor(&fig_a(2, Formulation::Impedance)).unwrap();
    let sr = to_state_equation(&to_svd_canonical(&sys, 1e-11).unwrap()).unwrap();
    let data = prbt_are_data(&sr, 0.0).unwrap();
    let x = dense_riccati_solve_are(&data).unwrap();
    let y = dense_riccati_solve_are_dual(&data).unwrap();

    #[rustfmt::skip]
    let x_expect = Mat::from_row_slice(4, 4, &[
        0.3439, 0.1466, -0.1298, -0.1383,
        0.1466, 0.2945, 0.1298, 0.0084,
        -0.1298, 0.1298, 0.4904, 0.0804,
        -0.1383, 0.0084, 0.0804, 0.1499,
    ]);
    #[rustfmt::skip]
    let y_expect = Mat::from_row_slice(4, 4, &[
        0.3439, 0.1466, 0.1298, 0.1383,
        0.1466, 0.2945, -0.1298, -0.0084,
        0.1298, -0.1298, 0.4904, 0.0804,
        0.1383, -0.0084, 0.0804, 0.1499,
    ]);
    let x_ok = sign_normalized_match(&x, &x_expect, 5e-4);
    let y_ok = sign_normalized_match(&y, &y_expect, 5e-4);

    let exchange = |x: &Mat, y: &Mat, sign: &[f64]| -> f64 {
        let s = Mat::from_diagonal(&nalgebra::DVector::from_vec(sign.to_vec()));
        ((&s * x * &s) - y).norm() / x.norm().max(1e-300)
    };
    let mut worst_exchange = exchange(&x, &y, &data.sign);

    // Index-1 admittance and hybrid variants (ports on resistive nodes keep
    // A22 nonsingular) validate the theorem for the other formulations.
    for form in [Formulation::Admittance, Formulation::Hybrid] {
        let nl = fig_a(2, form);
        let sysf = assemble_descriptor(&nl).unwrap();
        let f = to_svd_canonical(&sysf, 1e-11).unwrap();
        if detect_index(&f, 1e-10) != SystemIndex::Index1 {
            return Err(format!("{form:?} variant unexpectedly not index-1"));
        }
        let srf = to_state_equation(&f).unwrap();
        let dataf = prbt_are_data(&srf, 1e-5).unwrap();
        let xf = dense_riccati_solve_are(&dataf).unwrap();
        let yf = dense_riccati_solve_are_dual(&dataf).unwrap();
        worst_exchange = worst_exchange.max(exchange(&xf, &yf, &dataf.sign));
    }

    fail_if(
        !(x_ok && y_ok) || worst_exchange > 1e-10,
        format!(
            "golden X match {x_ok}, golden Y match {y_ok}, worst Y = I'XI' residual {worst_exchange:.3e} (<= 1e-10) across Z/Y/H"
        ),
    )
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Crit {
    let sys = assemble_descriptor(&fig_b(2, Formulation::Impedance)).unwrap();
    let f = to_svd_canonical(&sys, 1e-11).unwrap();
    let st = to_stokes_form(&f, 1e-10).unwrap();
    let p = spectral_projectors(&st).unwrap();
    let (m0, _m1, _) = polynomial_part(&st, &p).unwrap();

    let m0_expect = Mat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let m0_ok = max_abs_diff(&m0, &m0_expect) <= 1e-10;

    // Projected-ARE eigenvalues.
    let sr = circred::canon::project_to_state(&st, &p).unwrap();
    let red = circred::canon::eliminate_improper_artifact(&sr, 1e-10).unwrap();
    let data = prbt_are_data(&red, 1e-5).unwrap();
    let x_are = dense_riccati_solve_are(&data).unwrap();
    let mut eigs: Vec<f64> = x_are
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eig_expect = [1.96e-1, 4.40e-1, 9.96e-1];
    let eigs_ok = eigs.len() == 3
        && eigs
            .iter()
            .zip(eig_expect)
            .all(|(g, w)| (g - w).abs() <= 1e-2 * w);

    // Regularized GARE against the golden entries (the (1,1) value follows
    // the golden eigenvalues, which force trace 2.03).
    let gare = prbt_gare_data(&st, &p, &m0, 1e-5).unwrap();
    let xg = dense_riccati_solve_gare(&gare).unwrap();
    let yg = dense_riccati_solve_gare_dual(&gare).unwrap();
    #[rustfmt::skip]
    let xg_expect = Mat::from_row_slice(5, 5, &[
        1.0, 2.1e-4, 1.7e-3, 0.0, 2.1e-4,
        2.1e-4, 4.0e-1, -9.3e-2, 0.0, 4.0e-1,
        1.7e-3, -9.3e-2, 2.4e-1, 0.0, -9.3e-2,
        0.0, 0.0, 0.0, 0.0, 0.0,
        2.1e-4, 4.0e-1, -9.3e-2, 0.0, 4.0e-1,
    ]);
    let n = 5usize;
    let gare_match = (0..(1usize << n)).any(|mask| {
        (0..n).all(|i| {
            (0..n).all(|j| {
                let want = xg_expect[(i, j)];
                if want.abs() < 1e-3 {
                    return true;
                }
                let si = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                let sj = if mask & (1 << j) != 0 { -1.0 } else { 1.0 };
                (si * sj * xg[(i, j)] - want).abs() <= 1.5e-2 * want.abs()
            })
        })
    });
    let dual_resid = (&xg - &yg).norm() / xg.norm();

    fail_if(
        !(m0_ok && eigs_ok && gare_match) || dual_resid > 1e-8,
        format!(
            "M0 exact {m0_ok}; ARE eigs {eigs:?} vs {eig_expect:?} ok {eigs_ok}; GARE entries ok {gare_match}; X=Y residual {dual_resid:.3e} (<= 1e-8)"
        ),
    )
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Crit {
    let start = Instant::now();
    let nl = generate_ladder(
        100,
        LadderTopology::FigA,
        1.0,
        1e-9,
        1e-9,
        Formulation::Impedance,
    )
    .unwrap();
    let sys = assemble_descriptor(&nl).unwrap().normalized(auto_omega0(&nl));
    let f = to_svd_canonical(&sys, 1e-11).unwrap();
    let sr = to_state_equation(&f).unwrap();
    let data = prbt_are_data(&sr, 1e-5).unwrap();

    let x = dense_riccati_solve_are(&data).unwrap();

    let pencil = HamiltonianPencil::from(&data);
    // 10 shifts as pinned; a depth-40 Arnoldi pool gives them close to the
    // best coverage any 10 static shifts achieve on this spectrum.
    let shifts = compute_shifts_sml(&pencil, 40, 10, SEED).unwrap();
    let eye = Mat::identity(data.order(), data.order());
    let lrf = radi(
        &eye,
        &data.a,
        &data.b,
        &data.c.transpose(),
        &shifts,
        &RadiOptions {
            tol: 1e-8,
            max_steps: 20,
        },
    )
    .unwrap();
    let q = cholesky_from_radi(&lrf).unwrap();
    let rel = (&q * q.transpose() - &x).norm() / x.norm();
    let resid_rel = lrf
        .residual_history
        .last()
        .copied()
        .unwrap_or(f64::INFINITY)
        / data.constant_term_norm();
    let elapsed = start.elapsed().as_secs_f64();

    fail_if(
        rel > 1e-5 || resid_rel > 1e-8 || elapsed >= 30.0,
        format!(
            "n={}, order {}: ‖QQ^T - X‖/‖X‖ = {rel:.3e} (<= 1e-5), residual {resid_rel:.3e} (<= 1e-8), runtime {elapsed:.1}s (< 30s); {} shifts, {} steps",
            sys.n(),
            data.order(),
            shifts.values.len(),
            lrf.steps(),
        ),
    )
}

// ---------------------------------------------------------------- criterion 6

struct QualityMeasurement {
    label: String,
    reciprocity: f64,
    passivity: f64,
    err_low: f64,
}

fn measure_model(
    label: &str,
    reference: &FrequencyResponse,
    netlist: &Netlist,
    method: MethodChoice,
    shifts: ShiftChoice,
) -> std::result::Result<(QualityMeasurement, Vec<f64>), String> {
    let cfg = PipelineConfig {
        method,
        solver: SolverChoice::Radi,
        shifts,
        num_shifts: 15,
        // The criterion pins 15 shifts and 30 steps; the Arnoldi depth that
        // finds the shifts is free, and 60 gives Ritz values good enough to
        // keep the index-2 models inside the passivity slack.
        krylov_depth: Some(60),
        radi_steps: 30,
        radi_tol: 1e-12,
        order: OrderSpec::Fixed(15),
        seed: SEED,
        eps_reg: 1e-5,
        omega0: None,
        ..Default::default()
    };
    let rep = reduce_netlist(netlist, &cfg).map_err(|e| format!("{label}: {e}"))?;
    let omegas = default_omegas();
    let red = sweep_reduced(&rep.model, &omegas).map_err(|e| format!("{label}: {e}"))?;
    let err = relative_error(reference, &red).map_err(|e| format!("{label}: {e}"))?;
    let reciprocity = check_reciprocity(&red, rep.model.formulation, &rep.model.port_sign);
    let passivity = check_passivity(&red);
    let err_low = omegas
        .iter()
        .zip(&err)
        .filter(|(om, _)| **om <= 1e6)
        .map(|(_, e)| *e)
        .fold(0.0f64, f64::max);
    Ok((
        QualityMeasurement {
            label: label.to_string(),
            reciprocity,
            passivity,
            err_low,
        },
        err,
    ))
}

fn criterion_6() -> Crit {
    let omegas = default_omegas();
    let nl_a = generate_ladder(
        100,
        LadderTopology::FigA,
        1.0,
        1e-9,
        1e-9,
        Formulation::Impedance,
    )
    .unwrap();
    let nl_b = generate_ladder(
        100,
        LadderTopology::FigB,
        1.0,
        1e-9,
        1e-9,
        Formulation::Impedance,
    )
    .unwrap();
    let ref_a = sweep_descriptor(&assemble_descriptor(&nl_a).unwrap(), &omegas)
        .map_err(|e| e.to_string())?;
    let ref_b = sweep_descriptor(&assemble_descriptor(&nl_b).unwrap(), &omegas)
        .map_err(|e| e.to_string())?;

    let mut notes = Vec::new();
    let mut ok = true;
    for (label, reference, nl, method) in [
        ("index1/rprbt1", &ref_a, &nl_a, MethodChoice::Rprbt1),
        ("index1/rprbt2", &ref_a, &nl_a, MethodChoice::Rprbt2),
        ("index2/rprbt2", &ref_b, &nl_b, MethodChoice::Rprbt2),
        ("index2/rprbt1", &ref_b, &nl_b, MethodChoice::Rprbt1),
    ] {
        let (m, _) = measure_model(label, reference, nl, method, ShiftChoice::Sml)?;
        let this_ok = m.reciprocity <= 1e-10 && m.passivity >= -1e-8 && m.err_low <= 1e-3;
        ok &= this_ok;
        notes.push(format!(
            "{}: recip {:.1e}, passv {:+.1e}, err(<=1e6) {:.1e} -> {}",
            m.label,
            m.reciprocity,
            m.passivity,
            m.err_low,
            if this_ok { "ok" } else { "BAD" }
        ));
    }

    // (d) lrg shifts: decade-binned error must drop toward high frequency.
    for (label, reference, nl, method) in [
        ("index1/rprbt1/lrg", &ref_a, &nl_a, MethodChoice::Rprbt1),
        ("index1/rprbt2/lrg", &ref_a, &nl_a, MethodChoice::Rprbt2),
    ] {
        let (_, err) = measure_model(
            label,
            reference,
            nl,
            method,
            ShiftChoice::Lrg { s0: -1e-5 },
        )?;
        // Geometric-mean error over the three lowest and highest decades.
        let omegas = default_omegas();
        let bin_mean = |lo: f64, hi: f64| -> f64 {
            let vals: Vec<f64> = omegas
                .iter()
                .zip(&err)
                .filter(|(om, _)| **om >= lo && **om < hi)
                .map(|(_, e)| e.max(1e-300).ln())
                .collect();
            (vals.iter().sum::<f64>() / vals.len() as f64).exp()
        };
        let low = bin_mean(1.0, 1e3);
        let high = bin_mean(1e9, 1e12);
        let trend_ok = high < low;
        ok &= trend_ok;
        notes.push(format!(
            "{label}: low-bin {low:.1e} > high-bin {high:.1e} -> {}",
            if trend_ok { "ok" } else { "BAD" }
        ));
    }

    fail_if(!ok, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Crit {
    let omegas = default_omegas();
    let mut notes = Vec::new();
    let mut ok = true;
    for form in [
        Formulation::Impedance,
        Formulation::Admittance,
        Formulation::Hybrid,
    ] {
        let nl = fig_a(2, form);
        // First pass learns the numerical rank, second pins the full order.
        let probe = PipelineConfig {
            solver: SolverChoice::Dense,
            order: OrderSpec::Auto,
            ..Default::default()
        };
        let rank = reduce_netlist(&nl, &probe)
            .map_err(|e| format!("{form:?}: {e}"))?
            .hankel_sigma
            .len();
        let cfg = PipelineConfig {
            solver: SolverChoice::Dense,
            order: OrderSpec::Fixed(rank),
            ..Default::default()
        };
        let rep = reduce_netlist(&nl, &cfg).map_err(|e| format!("{form:?}: {e}"))?;
        let sys = assemble_descriptor(&nl).unwrap();
        let reference = sweep_descriptor(&sys, &omegas).map_err(|e| e.to_string())?;
        let red = sweep_reduced(&rep.model, &omegas).map_err(|e| e.to_string())?;
        let err = relative_error(&reference, &red).map_err(|e| e.to_string())?;
        let max_err = err.iter().cloned().fold(0.0f64, f64::max);
        let this_ok = max_err <= 1e-8;
        ok &= this_ok;
        notes.push(format!(
            "{}/order-{rank}: max err {max_err:.2e} -> {}",
            rep.model.formulation.tag(),
            if this_ok { "ok" } else { "BAD" }
        ));
    }
    fail_if(!ok, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 8

/// Independent Weierstrass-form oracle for the polynomial part: deflate the
/// infinite spectrum of `(Ē0, Ā0)` through `W = Ā0^{-1} Ē0` (the pencil's
/// finite/infinite split is the range/kernel split of `W^2` for index <= 2)
/// and read `M0 = -C_inf B_inf + D̄0`, `M1 = -C_inf N B_inf`.
fn weierstrass_m0_m1(st: &circred::canon::StokesForm) -> std::result::Result<(Mat, Mat), String> {
    let n = st.n();
    let e0 = st.ebar0();
    let a0 = st.abar0();
    let b0 = st.bbar0();
    let c0 = st.cbar0();
    let a_lu = a0.clone().lu();
    let w = a_lu.solve(&e0).ok_or("A0 singular in oracle")?;
    let w2 = &w * &w;
    let tol = 1e-9;
    let r_basis = range_basis(&w2, tol);
    let k_basis = circred::linalg::kernel_basis(&w2, tol);
    if r_basis.ncols() + k_basis.ncols() != n {
        return Err("range/kernel split dimensions disagree".into());
    }
    let mut t = Mat::zeros(n, n);
    t.view_mut((0, 0), (n, r_basis.ncols())).copy_from(&r_basis);
    t.view_mut((0, r_basis.ncols()), (n, k_basis.ncols()))
        .copy_from(&k_basis);
    let t_lu = t.clone().lu();
    let d = t_lu.solve(&(&w * &t)).ok_or("deflation basis singular")?;
    let q = r_basis.ncols();
    let k = k_basis.ncols();
    let d_n = d.view((q, q), (k, k)).into_owned();
    // C_inf = (C0 T) kernel block, B_inf = (T^{-1} A0^{-1} B0) kernel block.
    let c_t = &c0 * &t;
    let c_inf = c_t.columns(q, k).into_owned();
    let ainv_b = a_lu.solve(&b0).ok_or("A0 singular in oracle")?;
    let b_all = t_lu.solve(&ainv_b).ok_or("deflation basis singular")?;
    let b_inf = b_all.rows(q, k).into_owned();
    let m0 = -(&c_inf * &b_inf) + &st.dbar0;
    let m1 = -(&c_inf * d_n * &b_inf);
    Ok((m0, m1))
}

fn criterion_8() -> Crit {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    // Index-2 families small enough for the dense oracle (n <= 50).
    let mut cases: Vec<DescriptorSystem> = Vec::new();
    for k in 1..=5 {
        cases.push(assemble_descriptor(&fig_b(k, Formulation::Impedance)).unwrap());
    }
    cases.push(fig_a2_far_port('Y'));
    cases.push(fig_a2_far_port('H'));
    for k in [2usize, 4] {
        let nl = generate_ladder(k, LadderTopology::FigB, 2.0, 0.5, 1.5, Formulation::Impedance)
            .unwrap();
        cases.push(assemble_descriptor(&nl).unwrap());
    }

    for sys in &cases {
        let f = to_svd_canonical(sys, 1e-11).unwrap();
        if detect_index(&f, 1e-10) != SystemIndex::Index2 {
            return Err("criterion-8 case unexpectedly index-1".into());
        }
        let st = to_stokes_form(&f, 1e-10).unwrap();
        let p = spectral_projectors(&st).unwrap();
        let (m0, m1, _) = polynomial_part(&st, &p).unwrap();
        let (m0_oracle, m1_oracle) = weierstrass_m0_m1(&st)?;
        let scale0 = m0_oracle.norm().max(1e-12);
        let scale1 = m1_oracle.norm().max(1e-12);
        worst = worst.max((&m0 - &m0_oracle).norm() / scale0);
        worst = worst.max((&m1 - &m1_oracle).norm() / scale1);
        count += 1;
    }
    fail_if(
        worst > 1e-8,
        format!("{count} index-2 systems (n <= 50): worst M0/M1 mismatch vs Weierstrass oracle {worst:.3e} (<= 1e-8)"),
    )
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Crit {
    let nl = fig_b(20, Formulation::Impedance);
    let cfg = PipelineConfig {
        solver: SolverChoice::Radi,
        num_shifts: 10,
        radi_steps: 20,
        order: OrderSpec::Fixed(10),
        seed: 123456789,
        ..Default::default()
    };
    let r1 = reduce_netlist(&nl, &cfg).map_err(|e| e.to_string())?;
    let r2 = reduce_netlist(&nl, &cfg).map_err(|e| e.to_string())?;
    let model_same = write_reduced_model(&r1.model) == write_reduced_model(&r2.model);
    let shifts_same = r1.shifts_used == r2.shifts_used;
    let resid_same = r1.residual_history == r2.residual_history;
    let omegas = default_omegas();
    let s1 = sweep_reduced(&r1.model, &omegas).map_err(|e| e.to_string())?;
    let s2 = sweep_reduced(&r2.model, &omegas).map_err(|e| e.to_string())?;
    let csv_same = circred::analyze::response_csv(&s1) == circred::analyze::response_csv(&s2);
    fail_if(
        !(model_same && shifts_same && resid_same && csv_same),
        format!(
            "model {model_same}, shifts {shifts_same}, residual history {resid_same}, sweep CSV {csv_same}"
        ),
    )
}

// -------------------------------------------------------------------- master

fn report(name: &str, outcome: Crit) {
    match outcome {
        Ok(detail) => println!("{name}: PASS ({detail})"),
        Err(detail) => panic!("{name}: FAIL ({detail})"),
    }
}

#[test]
fn acceptance_1_golden_assembly() {
    report("criterion 1 (golden assembly)", criterion_1());
}

#[test]
fn acceptance_2_golden_canonicalization() {
    report("criterion 2 (golden canonicalization)", criterion_2());
}

#[test]
fn acceptance_3_golden_are() {
    report("criterion 3 (golden ARE)", criterion_3());
}

#[test]
fn acceptance_4_golden_index2() {
    report("criterion 4 (golden index-2)", criterion_4());
}

#[test]
fn acceptance_5_radi_vs_oracle() {
    report("criterion 5 (RADI vs oracle)", criterion_5());
}

#[test]
fn acceptance_6_reduction_quality() {
    report("criterion 6 (reduction quality)", criterion_6());
}

#[test]
fn acceptance_7_no_truncation_consistency() {
    report("criterion 7 (no-truncation consistency)", criterion_7());
}

#[test]
fn acceptance_8_weierstrass_oracle() {
    report("criterion 8 (Weierstrass oracle)", criterion_8());
}

#[test]
fn acceptance_9_determinism() {
    report("criterion 9 (determinism)", criterion_9());
}
