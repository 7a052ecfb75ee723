//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the report.

use dimer_core::asymptotics::{
    fitted_log_slope, leading_term, ratio_probe, AsymptoticCase, CaseKind,
};
use dimer_core::greens::{delta_residual, green_matrix, GreenCase, UpDown};
use dimer_core::inverse::{invk_entry, invk_uniform, invk_vertex};
use dimer_core::lattice::{
    build_window_matrix, enumerate_matchings, kasteleyn_entry, FiniteWindow, Sublattice, VertexId,
};
use dimer_core::oracle::{cylinder_entries_extrapolated, truncated_green_solve_multi, WindowInverse};
use dimer_core::spectral::{eigvec, roots, transfer_matrix, Branch, Side};
use dimer_core::{QuadratureSpec, WeightParams};
use num_complex::Complex64;
use std::time::Instant;

fn params(a: f64, b: f64) -> WeightParams {
    WeightParams::new(a, b).unwrap()
}

fn report(name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Criterion 1: |det K~| equals the weighted exhaustive enumeration on
/// windows up to 3x3 faces for three weight pairs; exact integers at (1,1).
#[test]
fn criterion_1_counting() {
    let t0 = Instant::now();
    let mut worst_rel: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (1.0, 4.0), (0.5, 3.0)] {
        let w = params(a, b);
        for win in [
            FiniteWindow::new(0, 0, 0, 0),
            FiniteWindow::new(-1, 0, 0, 0),
            FiniteWindow::new(0, 1, 0, 1),
            FiniteWindow::new(-1, 0, -1, 1),
            FiniteWindow::new(-1, 1, 0, 2),
        ] {
            let det = build_window_matrix(win, w).abs_determinant().unwrap();
            let (_, weighted) = enumerate_matchings(win, w).unwrap();
            worst_rel = worst_rel.max((det - weighted).abs() / weighted.max(1.0));
        }
    }
    // exact integer match at (1,1) on 2x2 faces
    let (count, weighted) =
        enumerate_matchings(FiniteWindow::new(0, 1, 0, 1), params(1.0, 1.0)).unwrap();
    let det = build_window_matrix(FiniteWindow::new(0, 1, 0, 1), params(1.0, 1.0))
        .abs_determinant()
        .unwrap();
    let exact = count == 36 && weighted == 36.0 && (det - 36.0).abs() < 1e-9;
    let pass = worst_rel < 1e-12 && exact && t0.elapsed().as_secs() < 10;
    report(
        "1 (counting)",
        pass,
        &format!(
            "worst relative deviation {worst_rel:.2e}, 2x2-face count {count}, {:.2?}",
            t0.elapsed()
        ),
    );
    assert!(pass);
}

/// Criterion 2: spectral identities on a 512-point grid for three pairs;
/// the non-critical gap at (1,4); the unit-modulus set at (1,1).
#[test]
fn criterion_2_spectral_identities() {
    let t0 = Instant::now();
    let mut worst_prod: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (1.0, 4.0), (0.5, 3.0)] {
        let w = params(a, b);
        for k in 1..512 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 512.0;
            let omega = Complex64::from_polar(1.0, theta);
            for side in [Side::Left, Side::Right] {
                let (rp, rm) = roots(side, omega, w);
                worst_prod = worst_prod.max((rp * rm - Complex64::ONE).norm());
                let m = transfer_matrix(side, omega, w);
                for (branch, r) in [(Branch::Plus, rp), (Branch::Minus, rm)] {
                    if let Some(v) = eigvec(side, branch, omega, w) {
                        let mv = m.mul_vec(v);
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
    // (1,4): spectral gap
    let mut min_r1p = f64::INFINITY;
    for k in 0..512 {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / 512.0;
        let (rp, _) = roots(Side::Left, Complex64::from_polar(1.0, theta), params(1.0, 4.0));
        min_r1p = min_r1p.min(rp.norm());
    }
    // (1,1): |r1+| = 1 on a nonempty theta-set (the closed grid includes the
    // degenerate point theta = 0, where the roots are exactly (1, 1))
    let mut unit_set = 0usize;
    for k in 0..512 {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / 512.0;
        let (rp, _) = roots(Side::Left, Complex64::from_polar(1.0, theta), params(1.0, 1.0));
        if (rp.norm() - 1.0).abs() < 1e-12 {
            unit_set += 1;
        }
    }
    let pass = worst_prod < 1e-12
        && worst_res < 1e-10
        && min_r1p > 1.0
        && unit_set > 0
        && t0.elapsed().as_secs() < 5;
    report(
        "2 (spectral identities)",
        pass,
        &format!(
            "|r+r- - 1| <= {worst_prod:.2e}, eigen-residual <= {worst_res:.2e}, \
             min |r1+| at (1,4) = {min_r1p:.4}, unit-modulus points at (1,1) = {unit_set}, {:.2?}",
            t0.elapsed()
        ),
    );
    assert!(pass);
}

/// Criterion 3: the worked root values at omega = 1, a = 1, b = 4.
#[test]
fn criterion_3_printed_roots() {
    let (rp, rm) = roots(Side::Left, Complex64::ONE, params(1.0, 4.0));
    let s5 = 5.0_f64.sqrt();
    let expect_p = (-7.0 - 3.0 * s5) / 2.0;
    let expect_m = (-7.0 + 3.0 * s5) / 2.0;
    let dev = (rp.re - expect_p)
        .abs()
        .max((rm.re - expect_m).abs())
        .max(rp.im.abs())
        .max(rm.im.abs());
    let pass = dev < 1e-12;
    report(
        "3 (printed root values)",
        pass,
        &format!("max deviation {dev:.2e} from (-7 -+ 3 sqrt 5)/2"),
    );
    assert!(pass);
}

/// Criterion 4: closed-form Green functions match the truncated solve over
/// 8 omega x 6 n0 x 2 weight pairs, and satisfy the delta property.
#[test]
fn criterion_4_green_master_check() {
    let t0 = Instant::now();
    let thetas = [0.5, 1.2, 1.9, 2.6, 3.4, 4.1, 4.9, 5.7];
    let n0s = [-3i64, -1, 0, 1, 2, 3];
    let mut worst_solve: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;
    // the slowest transfer mode at the shallowest grid angle needs ~75 columns
    // of clearance for 1e-8 truncation error
    let n_range = 90i64;
    let compare = 13i64;
    for (a, b) in [(1.0, 4.0), (0.5, 3.0)] {
        let w = params(a, b);
        for &theta in &thetas {
            let omega = Complex64::from_polar(1.0, theta);
            let tables = truncated_green_solve_multi(&n0s, omega, n_range, w).unwrap();
            for (k, &n0) in n0s.iter().enumerate() {
                for n in -compare..=compare {
                    let closed = green_matrix(n, n0, omega, w).unwrap();
                    let solved = tables[k][(n + n_range) as usize];
                    for i in 0..2 {
                        for j in 0..2 {
                            worst_solve = worst_solve.max((closed[i][j] - solved[i][j]).norm());
                        }
                    }
                }
                worst_delta = worst_delta.max(delta_residual(n0, omega, w, 5).unwrap());
            }
        }
    }
    let pass = worst_solve < 1e-8 && worst_delta < 1e-10 && t0.elapsed().as_secs() < 30;
    report(
        "4 (Green master check)",
        pass,
        &format!(
            "closed-vs-solve <= {worst_solve:.2e}, delta residual <= {worst_delta:.2e}, {:.2?}",
            t0.elapsed()
        ),
    );
    assert!(pass);
}

/// Criterion 5: quadrature entries against the independent finite-lattice
/// oracle within 2% at (1,4), and against the uniform reference at a = b.
#[test]
fn criterion_5_oracle_agreement() {
    let t0 = Instant::now();
    let w14 = params(1.0, 4.0);
    let quad = QuadratureSpec::default();
    use Sublattice::{BDown, BUp, WDown, WUp};
    let v = VertexId::new;
    let probes: Vec<(VertexId, VertexId)> = vec![
        (v(WUp, 1, 0), v(BUp, 2, 0)),
        (v(WUp, 2, 1), v(BUp, 1, 0)),
        (v(WDown, 0, 0), v(BDown, 1, 0)),
        (v(WDown, 1, 0), v(BDown, 0, 1)),
        (v(WUp, 0, 0), v(BDown, 3, 1)),
        (v(WDown, 3, 0), v(BUp, 0, -1)),
        (v(WUp, 1, 2), v(BDown, 1, 0)),
        (v(WDown, 2, 2), v(BUp, 2, 0)),
        (v(WUp, 2, 0), v(BUp, -1, 1)),
        (v(WDown, -1, 0), v(BUp, -2, 0)),
        (v(WUp, 4, 0), v(BUp, 1, 1)),
        (v(WUp, 1, 1), v(BUp, 4, 0)),
        (v(WDown, 5, 2), v(BDown, 2, 0)),
        (v(WUp, 3, 3), v(BUp, 3, 0)),
        (v(WDown, 0, 1), v(BUp, 3, 0)),
        (v(WDown, 2, 0), v(BDown, 2, 3)),
        (v(WDown, -1, 1), v(BDown, 0, 0)),
        (v(WUp, 0, 2), v(BUp, 0, 0)),
        (v(WUp, 2, 2), v(BDown, 0, 0)),
        (v(WDown, 1, 1), v(BUp, 1, 0)),
    ];
    assert_eq!(probes.len(), 20);
    // margin >= 20 in every direction; the cylinder is periodic vertically and
    // open ends in n sit 40 and 80 faces away, Richardson-extrapolated.
    let oracle = cylinder_entries_extrapolated(40, 256, w14, &probes).unwrap();
    let mut worst_rel: f64 = 0.0;
    for (k, (wv, bv)) in probes.iter().enumerate() {
        let e = invk_vertex(*wv, *bv, w14, &quad).unwrap();
        let rel = (e.value - oracle[k]).abs() / e.value.abs().max(oracle[k].abs());
        worst_rel = worst_rel.max(rel);
    }
    // a = b = 1 degeneration against the uniform residue route
    let w11 = params(1.0, 1.0);
    let mut worst_uniform: f64 = 0.0;
    for (i, j, n0, n, m) in [
        (UpDown::Up, UpDown::Up, 1i64, 1i64, 0i64),
        (UpDown::Up, UpDown::Down, 2, 1, 1),
        (UpDown::Down, UpDown::Up, 1, -1, 2),
        (UpDown::Down, UpDown::Down, -1, 2, -1),
        (UpDown::Up, UpDown::Up, 2, 5, 3),
    ] {
        let a = invk_entry(i, j, n0, n, m, w11, &quad).unwrap().value;
        let b = invk_uniform(i, j, n - n0, m, &quad).unwrap().value;
        worst_uniform = worst_uniform.max((a - b).abs());
    }
    let pass = worst_rel < 0.02 && worst_uniform < 1e-6 && t0.elapsed().as_secs() < 300;
    report(
        "5 (oracle agreement)",
        pass,
        &format!(
            "20 probes vs cylinder oracle: worst {:.2}%, uniform degeneration <= {worst_uniform:.2e}, {:.2?}",
            100.0 * worst_rel,
            t0.elapsed()
        ),
    );
    assert!(pass);
}

/// Criterion 6, attainable part: the vertical-asymptote ratios for the two
/// sub-cases whose subleading constants fit the stated windows, and the
/// printed constant `1/(3 pi)` of the right-half case.
#[test]
fn criterion_6_vertical_asymptotics() {
    let t0 = Instant::now();
    let w14 = params(1.0, 4.0);
    let quad = QuadratureSpec::default();
    let mut pass = true;
    let mut detail = String::new();
    for (name, n0, n) in [("0<n0<n", 1i64, 2i64), ("n0<0<n", -1, 2)] {
        let case = AsymptoticCase {
            kind: CaseKind::Cor1 { n0, n },
            i: UpDown::Up,
            j: UpDown::Up,
            params: w14,
        };
        let rep = ratio_probe(&case, &[100, 500], &quad).unwrap();
        let (r100, r500) = (rep.rows[0].ratio, rep.rows[1].ratio);
        pass &= (r100 - 1.0).abs() < 0.05 && (r500 - 1.0).abs() < 0.01;
        detail.push_str(&format!("{name}: m=100 {r100:.4}, m=500 {r500:.4}; "));
    }
    // leading constant of the 0<n0<n case is exactly 1/(3 pi m)
    let case = AsymptoticCase {
        kind: CaseKind::Cor1 { n0: 1, n: 2 },
        i: UpDown::Up,
        j: UpDown::Up,
        params: w14,
    };
    let lead = leading_term(&case, 1).unwrap();
    let expect = 1.0 / (3.0 * std::f64::consts::PI);
    let const_ok = (lead - expect).abs() < 1e-6 * expect;
    pass &= const_ok;
    detail.push_str(&format!(
        "constant {lead:.8} vs 1/(3 pi) = {expect:.8}"
    ));
    detail.push_str(&format!(", {:.2?}", t0.elapsed()));
    report("6 (vertical asymptotics, cases 1 and 3)", pass, &detail);
    assert!(pass);
}

/// Criterion 6, gapped-to-gapped sub-case at the stated tolerance windows.
///
/// The leading constant is verified exactly (the ratio reaches 1.00 by
/// m ~ 1600), but the approach behaves like 1 - 8.5/m for the minimal
/// geometry n = -2, n0 = -1, so the stated windows (5% by m = 100, 1% by
/// m = 500) are not attainable: the measured ratios are ~0.915 and ~0.982.
/// The criterion is asserted as stated and is expected to fail; see the
/// decisions ledger for the measured convergence evidence.
#[test]
fn criterion_6_case2_stated_windows() {
    let w14 = params(1.0, 4.0);
    let quad = QuadratureSpec::default();
    let case = AsymptoticCase {
        kind: CaseKind::Cor1 { n0: -1, n: -2 },
        i: UpDown::Up,
        j: UpDown::Up,
        params: w14,
    };
    let rep = ratio_probe(&case, &[100, 500], &quad).unwrap();
    let (r100, r500) = (rep.rows[0].ratio, rep.rows[1].ratio);
    let pass = (r100 - 1.0).abs() < 0.05 && (r500 - 1.0).abs() < 0.01;
    report(
        "6 (vertical asymptotics, case n<n0<0 at stated windows)",
        pass,
        &format!("m=100 ratio {r100:.4} (want 1 +- 0.05), m=500 ratio {r500:.4} (want 1 +- 0.01)"),
    );
    assert!(
        pass,
        "known shortfall: the subleading constant of this sub-case (~8.5/m) exceeds \
         the stated windows; measured m=100 ratio {r100:.4}, m=500 ratio {r500:.4}"
    );
}

/// Criterion 7: the fitted exponential rate on the left side equals
/// log |r1+(1)| within 2% (1/n prefactor compensated in the fit).
#[test]
fn criterion_7_exponential_rates() {
    let t0 = Instant::now();
    let w14 = params(1.0, 4.0);
    let quad = QuadratureSpec {
        abs_tol: 1e-13,
        ..Default::default()
    };
    let expect = ((7.0 + 3.0 * 5.0_f64.sqrt()) / 2.0).ln();
    let mut pass = true;
    let mut detail = String::new();
    for (name, n0) in [("across interface (Cor3)", 1i64), ("left half (Cor5)", -1)] {
        let mut samples = Vec::new();
        for n in -14..=-6i64 {
            let e = invk_entry(UpDown::Up, UpDown::Up, n0, n, 0, w14, &quad).unwrap();
            samples.push((n, e.value));
        }
        let slope = fitted_log_slope(&samples, true);
        let rel = (slope - expect).abs() / expect;
        pass &= rel < 0.02;
        detail.push_str(&format!("{name}: slope {slope:.5} (dev {:.2}%); ", 100.0 * rel));
    }
    detail.push_str(&format!("target log|r1+(1)| = {expect:.5}, {:.2?}", t0.elapsed()));
    report("7 (exponential rates)", pass, &detail);
    assert!(pass);
}

/// Criterion 8: reality of all computed entries and the partition of unity,
/// both in the window oracle (1e-12) and through the integrals (1e-3).
#[test]
fn criterion_8_reality_and_partition() {
    let t0 = Instant::now();
    let w14 = params(1.0, 4.0);
    let quad = QuadratureSpec::default();
    // reality across a spread of entries
    let mut worst_imag: f64 = 0.0;
    for (i, j, n0, n, m) in [
        (UpDown::Up, UpDown::Up, 2i64, 5i64, 3i64),
        (UpDown::Up, UpDown::Down, -1, 2, 1),
        (UpDown::Down, UpDown::Up, 1, -3, -2),
        (UpDown::Down, UpDown::Down, 3, 1, 7),
    ] {
        let e = invk_entry(i, j, n0, n, m, w14, &quad).unwrap();
        worst_imag = worst_imag.max(e.imag_residual / e.value.abs().max(1.0));
    }
    // partition of unity in the window oracle (exact combinatorics)
    let inv = WindowInverse::compute(FiniteWindow::centered(4), w14).unwrap();
    let mut worst_window: f64 = 0.0;
    for wv in [
        VertexId::new(Sublattice::WUp, 0, 0),
        VertexId::new(Sublattice::WDown, 0, 0),
        VertexId::new(Sublattice::WUp, -1, 1),
        VertexId::new(Sublattice::WDown, 1, -1),
    ] {
        let total: f64 = wv
            .neighbors()
            .iter()
            .map(|b| inv.edge_probability(wv, *b, w14).unwrap())
            .sum();
        worst_window = worst_window.max((total - 1.0).abs());
    }
    // partition of unity through the contour integrals
    let mut worst_integral: f64 = 0.0;
    for wv in [
        VertexId::new(Sublattice::WUp, 0, 0),
        VertexId::new(Sublattice::WDown, 1, 0),
    ] {
        let mut total = 0.0;
        for b in wv.neighbors() {
            let k = kasteleyn_entry(b, wv, w14).unwrap();
            total += k * invk_vertex(wv, b, w14, &quad).unwrap().value;
        }
        worst_integral = worst_integral.max((total - 1.0).abs());
    }
    let pass = worst_imag < 1e-8 && worst_window < 1e-12 && worst_integral < 1e-3;
    report(
        "8 (reality and partition of unity)",
        pass,
        &format!(
            "imag residual <= {worst_imag:.2e}, window sum deviation <= {worst_window:.2e}, \
             integral sum deviation <= {worst_integral:.2e}, {:.2?}",
            t0.elapsed()
        ),
    );
    assert!(pass);
}
