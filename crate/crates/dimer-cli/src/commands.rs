use crate::output::emit_table;
use crate::{CliError, OracleCommand, OutputArgs, WeightArgs};
use dimer_core::asymptotics::{
    fitted_log_slope, leading_term, probe_csv, ratio_probe, AsymptoticCase, CaseKind,
};
use dimer_core::greens::{
    coefficients, coefficients_by_solve, delta_residual, green_eval, GreenCase,
};
use dimer_core::inverse::{invk_csv, invk_entry, invk_sweep, invk_uniform, invk_vertex};
use dimer_core::lattice::{
    build_window_matrix, enumerate_matchings, FiniteWindow, Sublattice, VertexId,
};
use dimer_core::oracle::{
    cylinder_entries_extrapolated, matching_count_check, truncated_green_solve, WindowInverse,
};
use dimer_core::spectral::{
    is_critical, root_norm_profile, root_norm_profile_csv, roots as transfer_roots,
    torus_curve_minimum, Side,
};
use dimer_core::{QuadratureSpec, UpDown, WeightParams};
use num_complex::Complex64;

fn weights(args: &WeightArgs) -> Result<WeightParams, CliError> {
    WeightParams::new(args.a, args.b).map_err(|e| CliError::usage(e.to_string()))
}

fn updown(s: &str) -> UpDown {
    if s == "down" {
        UpDown::Down
    } else {
        UpDown::Up
    }
}

impl CliError {
    pub(crate) fn usage2(msg: impl Into<String>) -> Self {
        CliError::usage(msg)
    }
}

pub fn criticality(w: &WeightArgs) -> Result<(), CliError> {
    let params = weights(w)?;
    let gap = (params.a - params.b).abs();
    let torus_min = torus_curve_minimum(params, 200);
    let grid_verdict = torus_min < 0.05 * (1.0 + params.a + params.b);
    let regime = if is_critical(params) {
        "critical"
    } else {
        "non-critical"
    };
    println!("regime: {regime}");
    println!("|a-b| = {gap:.17}");
    println!(
        "torus root search: min |p(z,w)| = {torus_min:.6e} over 200x200 grid -> {}",
        if grid_verdict { "root found (critical)" } else { "no root (non-critical)" }
    );
    if grid_verdict != is_critical(params) {
        return Err(CliError::numerical2(
            "criticality classification disagrees with the torus search",
        ));
    }
    Ok(())
}

impl CliError {
    pub(crate) fn numerical2(msg: impl Into<String>) -> Self {
        CliError::numerical(msg)
    }
}

pub fn roots_cmd(w: &WeightArgs, samples: usize, out: &OutputArgs) -> Result<(), CliError> {
    if samples < 2 {
        return Err(CliError::usage2("--samples must be at least 2"));
    }
    let params = weights(w)?;
    let rows = root_norm_profile(params, samples);
    emit_table(&out.out, &out.format, &root_norm_profile_csv(&rows))
}

pub use roots_cmd as roots;

pub fn green(
    w: &WeightArgs,
    i: &str,
    j: &str,
    n: i64,
    n0: i64,
    theta: f64,
    with_coefficients: bool,
) -> Result<(), CliError> {
    let params = weights(w)?;
    let omega = Complex64::from_polar(1.0, theta);
    let value = green_eval(updown(i), updown(j), n, n0, omega, params)
        .map_err(|e| CliError::numerical2(e.to_string()))?;
    println!("G[{i}{j}]({n}, {n0}; e^(i {theta})) = {:.17e} + {:.17e} i", value.re, value.im);
    if with_coefficients {
        let case = GreenCase::for_n0(n0);
        let k = coefficients(case, n0, omega, params)
            .map_err(|e| CliError::numerical2(e.to_string()))?;
        let s = coefficients_by_solve(case, n0, omega, params)
            .map_err(|e| CliError::numerical2(e.to_string()))?;
        let names = match case {
            GreenCase::Gt => ["c1", "c2", "c3", "c4", "d1", "d2", "d3", "d4"],
            GreenCase::Lt => ["c'1", "c'2", "c'3", "c'4", "d'1", "d'2", "d'3", "d'4"],
        };
        for (q, name) in names.iter().enumerate() {
            let (closed, solved) = if q < 4 {
                (k.c[q], s.c[q])
            } else {
                (k.d[q - 4], s.d[q - 4])
            };
            println!(
                "{name} = {:.17e} + {:.17e} i   (solve dev {:.2e})",
                closed.re,
                closed.im,
                (closed - solved).norm()
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn invk(
    w: &WeightArgs,
    i: &str,
    j: &str,
    n0: i64,
    n: i64,
    m: i64,
    tol: f64,
    sweep: bool,
    dn: i64,
    dm: i64,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let params = weights(w)?;
    let quad = QuadratureSpec {
        abs_tol: tol,
        ..Default::default()
    };
    quad.validate().map_err(|e| CliError::usage2(e.to_string()))?;
    if sweep {
        let rows = invk_sweep(
            updown(i),
            updown(j),
            n0,
            (n - dn, n + dn),
            (m - dm, m + dm),
            params,
            &quad,
        )
        .map_err(|e| CliError::numerical2(e.to_string()))?;
        emit_table(&out.out, &out.format, &invk_csv(&rows))
    } else {
        let e = invk_entry(updown(i), updown(j), n0, n, m, params, &quad)
            .map_err(|e| CliError::numerical2(e.to_string()))?;
        println!("value = {:.17e}", e.value);
        println!("imag_residual = {:.3e}", e.imag_residual);
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn asymptote(
    w: &WeightArgs,
    case: &str,
    i: &str,
    j: &str,
    n0: Option<i64>,
    n: Option<i64>,
    m: i64,
    p: Option<i64>,
    schedule: &[i64],
    tol: f64,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let params = weights(w)?;
    let need_n0 = || n0.ok_or_else(|| CliError::usage2("--n0 is required for this case"));
    let kind = match case {
        "cor1" => CaseKind::Cor1 {
            n0: need_n0()?,
            n: n.ok_or_else(|| CliError::usage2("--n is required for cor1"))?,
        },
        "cor2" => CaseKind::Cor2 { n0: need_n0()?, m },
        "cor3" => CaseKind::Cor3 { n0: need_n0()?, m },
        "cor4" => CaseKind::Cor4 { n0: need_n0()?, m },
        "cor5" => CaseKind::Cor5 { n0: need_n0()?, m },
        "cor6" => CaseKind::Cor6 {
            p: p.ok_or_else(|| CliError::usage2("--p is required for cor6"))?,
            m,
        },
        "cor7" => CaseKind::Cor7 {
            p: p.ok_or_else(|| CliError::usage2("--p is required for cor7"))?,
            m,
        },
        _ => return Err(CliError::usage2("unknown case")),
    };
    let acase = AsymptoticCase {
        kind,
        i: updown(i),
        j: updown(j),
        params,
    };
    acase
        .validate()
        .map_err(|e| CliError::usage2(e.to_string()))?;
    let quad = QuadratureSpec {
        abs_tol: tol,
        ..Default::default()
    };
    let report = ratio_probe(&acase, schedule, &quad)
        .map_err(|e| CliError::numerical2(e.to_string()))?;
    let mut csv = probe_csv(&report);
    if let Some(q) = report.error_decay_exponent {
        csv.push_str(&format!("# fitted error-decay exponent: {q:.6}\n"));
    }
    emit_table(&out.out, &out.format, &csv)
}

pub fn oracle(w: &WeightArgs, what: OracleCommand) -> Result<(), CliError> {
    let params = weights(w)?;
    match what {
        OracleCommand::Count {
            n_min,
            n_max,
            m_min,
            m_max,
        } => {
            if n_min > n_max || m_min > m_max {
                return Err(CliError::usage2("empty window"));
            }
            let win = FiniteWindow::new(n_min, n_max, m_min, m_max);
            let (det, en, agree) = matching_count_check(win, params)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            println!("|det K~| = {det:.17e}");
            println!("enumeration weighted sum = {en:.17e}");
            println!("agree = {agree}");
            if !agree {
                return Err(CliError::numerical2("counting check failed"));
            }
            Ok(())
        }
        OracleCommand::Window {
            radius,
            i,
            j,
            wn,
            wm,
            bn,
            bm,
        } => {
            let win = FiniteWindow::centered(radius);
            let inv = WindowInverse::compute(win, params)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let wk = if i == "down" { Sublattice::WDown } else { Sublattice::WUp };
            let bk = if j == "down" { Sublattice::BDown } else { Sublattice::BUp };
            let v = inv
                .entry(VertexId::new(wk, wn, wm), VertexId::new(bk, bn, bm))
                .map_err(|e| CliError::usage2(e.to_string()))?;
            println!("entry = {v:.17e}");
            println!("condition estimate = {:.3e}", inv.condition_estimate);
            Ok(())
        }
        OracleCommand::Cylinder {
            margin,
            circumference,
            i,
            j,
            wn,
            wm,
            bn,
            bm,
        } => {
            let wk = if i == "down" { Sublattice::WDown } else { Sublattice::WUp };
            let bk = if j == "down" { Sublattice::BDown } else { Sublattice::BUp };
            let probes = [(VertexId::new(wk, wn, wm), VertexId::new(bk, bn, bm))];
            let v = cylinder_entries_extrapolated(margin, circumference, params, &probes)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            println!("entry = {:.17e}", v[0]);
            Ok(())
        }
    }
}

pub fn validate(level: &str) -> Result<(), CliError> {
    let mut failures = 0usize;
    let mut last = std::time::Instant::now();
    let mut report = |name: &str, pass: bool, detail: String| {
        let dt = last.elapsed();
        last = std::time::Instant::now();
        println!(
            "[{}] {name}: {detail} ({dt:.2?})",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    };

    let p14 = WeightParams::new(1.0, 4.0).unwrap();
    let p11 = WeightParams::new(1.0, 1.0).unwrap();
    let p53 = WeightParams::new(0.5, 3.0).unwrap();

    // spectral identities on a theta grid
    {
        let mut worst_prod: f64 = 0.0;
        let mut worst_res: f64 = 0.0;
        for params in [p14, p11, p53] {
            for k in 1..128 {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
                let omega = Complex64::from_polar(1.0, theta);
                for side in [Side::Left, Side::Right] {
                    let (rp, rm) = transfer_roots(side, omega, params);
                    worst_prod = worst_prod.max((rp * rm - Complex64::ONE).norm());
                    let mt = dimer_core::spectral::transfer_matrix(side, omega, params);
                    for (branch, r) in [
                        (dimer_core::spectral::Branch::Plus, rp),
                        (dimer_core::spectral::Branch::Minus, rm),
                    ] {
                        if let Some(v) = dimer_core::spectral::eigvec(side, branch, omega, params)
                        {
                            let mv = mt.mul_vec(v);
                            let res = ((mv[0] - r * v[0]).norm_sqr()
                                + (mv[1] - r * v[1]).norm_sqr())
                            .sqrt()
                                / (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                            worst_res = worst_res.max(res);
                        }
                    }
                }
            }
        }
        report(
            "spectral identities",
            worst_prod < 1e-12 && worst_res < 1e-10,
            format!("max |r+r- - 1| = {worst_prod:.2e}, max eigen-residual = {worst_res:.2e}"),
        );
    }

    // delta property of the closed-form Green functions
    {
        let mut worst: f64 = 0.0;
        for params in [p14, p53] {
            for (n0, theta) in [(2i64, 1.3), (-2, 0.7), (1, 2.2), (0, 1.0)] {
                let r = delta_residual(n0, Complex64::from_polar(1.0, theta), params, 6)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                worst = worst.max(r);
            }
        }
        report(
            "Green delta property",
            worst < 1e-10,
            format!("max residual = {worst:.2e}"),
        );
    }

    // closed-form coefficients vs junction solve
    {
        let mut worst: f64 = 0.0;
        for params in [p14, p53] {
            for (case, n0) in [
                (GreenCase::Gt, 1i64),
                (GreenCase::Gt, 3),
                (GreenCase::Lt, 0),
                (GreenCase::Lt, -2),
            ] {
                for theta in [0.5, 1.7, 2.9, 4.1, 5.3] {
                    let omega = Complex64::from_polar(1.0, theta);
                    let a = coefficients(case, n0, omega, params)
                        .map_err(|e| CliError::numerical2(e.to_string()))?;
                    let b = coefficients_by_solve(case, n0, omega, params)
                        .map_err(|e| CliError::numerical2(e.to_string()))?;
                    for q in 0..4 {
                        let s = a.c[q].norm().max(a.d[q].norm()).max(1.0);
                        worst = worst.max((a.c[q] - b.c[q]).norm() / s);
                        worst = worst.max((a.d[q] - b.d[q]).norm() / s);
                    }
                }
            }
        }
        report(
            "coefficient solve agreement",
            worst < 1e-10,
            format!("max relative deviation = {worst:.2e}"),
        );
    }

    // counting checks
    {
        let mut ok = true;
        let mut detail = String::new();
        for params in [p11, p14, p53] {
            let win = FiniteWindow::new(-1, 0, 0, 1);
            let (det, en, agree) = matching_count_check(win, params)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            ok &= agree;
            detail = format!("last: |det| = {det:.6e} vs enumeration {en:.6e}");
        }
        report("counting theorem", ok, detail);
    }

    // truncated solve vs closed form
    {
        let mut worst: f64 = 0.0;
        let omega = Complex64::from_polar(1.0, 1.1);
        for n0 in [-2i64, 1] {
            let table = truncated_green_solve(n0, omega, 40, p14)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            for n in -25..=25i64 {
                let closed = dimer_core::greens::green_matrix(n, n0, omega, p14)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                let solved = table[(n + 40) as usize];
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max((closed[i][j] - solved[i][j]).norm());
                    }
                }
            }
        }
        report(
            "truncated Green solve",
            worst < 1e-8,
            format!("max deviation = {worst:.2e}"),
        );
    }

    if level == "full" {
        // uniform degeneration of the interface integrals
        {
            let quad = QuadratureSpec::default();
            let mut worst: f64 = 0.0;
            for (i, j, n0, n, m) in [
                (UpDown::Up, UpDown::Up, 1i64, 1i64, 0i64),
                (UpDown::Up, UpDown::Down, 2, 1, 1),
                (UpDown::Down, UpDown::Up, 1, -1, 2),
                (UpDown::Down, UpDown::Down, -1, 2, -1),
            ] {
                let a = invk_entry(i, j, n0, n, m, p11, &quad)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                let b = invk_uniform(i, j, n - n0, m, &quad)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                worst = worst.max((a.value - b.value).abs());
            }
            report(
                "uniform degeneration",
                worst < 1e-8,
                format!("max deviation = {worst:.2e}"),
            );
        }
        // window inverse vs integrals at uniform weights
        {
            let quad = QuadratureSpec::default();
            let inv = WindowInverse::compute(FiniteWindow::centered(15), p11)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let mut worst: f64 = 0.0;
            for (wv, bv) in [
                (
                    VertexId::new(Sublattice::WUp, 0, 0),
                    VertexId::new(Sublattice::BUp, 0, 0),
                ),
                (
                    VertexId::new(Sublattice::WUp, 1, 0),
                    VertexId::new(Sublattice::BUp, 0, 0),
                ),
            ] {
                let w = inv
                    .entry(wv, bv)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                let q = invk_vertex(wv, bv, p11, &quad)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                worst = worst.max((w - q.value).abs() / q.value.abs().max(1e-3));
            }
            // open-boundary effects on the critical side decay like ~0.4/margin
            report(
                "window vs integral (uniform)",
                worst < 0.03,
                format!("max relative deviation = {worst:.2e} at margin 15"),
            );
        }
        // cylinder oracle vs integrals at interface weights
        {
            let quad = QuadratureSpec::default();
            let probes = [
                (
                    VertexId::new(Sublattice::WUp, 1, 0),
                    VertexId::new(Sublattice::BUp, 2, 0),
                ),
                (
                    VertexId::new(Sublattice::WDown, -1, 0),
                    VertexId::new(Sublattice::BUp, -2, 0),
                ),
            ];
            let cyl = cylinder_entries_extrapolated(40, 256, p14, &probes)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let mut worst: f64 = 0.0;
            for (k, (wv, bv)) in probes.iter().enumerate() {
                let q = invk_vertex(*wv, *bv, p14, &quad)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                worst = worst.max((cyl[k] - q.value).abs() / q.value.abs().max(1e-6));
            }
            report(
                "cylinder vs integral (interface)",
                worst < 0.02,
                format!("max relative deviation = {worst:.2e}"),
            );
        }
        // Cor1 probe
        {
            let quad = QuadratureSpec::default();
            let case = AsymptoticCase {
                kind: CaseKind::Cor1 { n0: 1, n: 2 },
                i: UpDown::Up,
                j: UpDown::Up,
                params: p14,
            };
            let rep = ratio_probe(&case, &[100, 200], &quad)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let last = rep.rows.last().unwrap().ratio;
            report(
                "vertical asymptote probe",
                (last - 1.0).abs() < 0.05,
                format!("ratio at m=200: {last:.4}"),
            );
        }
        // exponential rate
        {
            let quad = QuadratureSpec {
                abs_tol: 1e-13,
                ..Default::default()
            };
            let mut samples = Vec::new();
            for n in (-12..=-6i64).rev() {
                let e = invk_entry(UpDown::Up, UpDown::Up, 1, n, 0, p14, &quad)
                    .map_err(|e| CliError::numerical2(e.to_string()))?;
                samples.push((n, e.value));
            }
            let slope = fitted_log_slope(&samples, true);
            let expect = ((7.0 + 3.0 * 5.0_f64.sqrt()) / 2.0).ln();
            report(
                "exponential decay rate",
                (slope - expect).abs() < 0.02 * expect,
                format!("fitted {slope:.5} vs log|r1+(1)| = {expect:.5}"),
            );
        }
        // enumeration-free basics to close the suite
        {
            let win = FiniteWindow::new(0, 1, 0, 1);
            let (count, weighted) = enumerate_matchings(win, p11)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let det = build_window_matrix(win, p11)
                .abs_determinant()
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            report(
                "2x2 faces count",
                count == 36 && (det - weighted).abs() < 1e-9,
                format!("count = {count}, |det| = {det:.3}"),
            );
        }
        // leading-term constant of the printed right-half case
        {
            let case = AsymptoticCase {
                kind: CaseKind::Cor1 { n0: 1, n: 2 },
                i: UpDown::Up,
                j: UpDown::Up,
                params: p14,
            };
            let lead = leading_term(&case, 1)
                .map_err(|e| CliError::numerical2(e.to_string()))?;
            let expect = 1.0 / (3.0 * std::f64::consts::PI);
            report(
                "printed constant 1/(3 pi)",
                (lead - expect).abs() < 1e-6 * expect,
                format!("{lead:.10} vs {expect:.10}"),
            );
        }
    }

    if failures > 0 {
        Err(CliError {
            code: 3,
            message: format!("{failures} validation suite(s) failed"),
        })
    } else {
        Ok(())
    }
}
