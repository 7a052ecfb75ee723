//! Closed-form piecewise Green's functions of the Fourier-reduced interface
//! operator, with an independent linear-solve validator.
//!
//! For fixed `omega` on the unit circle the reduced operator acts on pairs
//! `(G_up(n), G_down(n))` through the rows
//!
//! ```text
//! R1(n):  G_up(n+1) - G_up(n) - (z_i(n)/omega) G_down(n) = delta[n == n0] (up column)
//! R2(n):  z_i(n) G_up(n) + G_down(n) - G_down(n-1)       = delta[n == n0] (down column)
//! ```
//!
//! with `z_1` on rows `n <= 0` and `z_2` on rows `n > 0`. The closed forms
//! below solve this system exactly; the transcription is treated as untrusted
//! input and every formula is gated by `coefficients_by_solve`, which imposes
//! the junction conditions directly.

use crate::lattice::WeightParams;
use crate::spectral::{eigvec, roots, z_funcs, Branch, CVec2, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Case selector: `Gt` covers `n0 > 0` (the `G^>` family), `Lt` covers
/// `n0 <= 0` (the `G^<` family; `n0 = 0` is routed here since its first
/// branches include `n <= n0` with `n0 <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenCase {
    Gt,
    Lt,
}

impl GreenCase {
    pub fn for_n0(n0: i64) -> Self {
        if n0 > 0 {
            GreenCase::Gt
        } else {
            GreenCase::Lt
        }
    }
}

/// White (row) / black (column) sublattice index of a Green component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpDown {
    Up,
    Down,
}

impl UpDown {
    pub fn idx(self) -> usize {
        match self {
            UpDown::Up => 0,
            UpDown::Down => 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("degenerate point: {what} vanishes at omega = {omega} (excluded from evaluation)")]
    Degenerate { what: &'static str, omega: Complex64 },
    #[error("case {case:?} requires n0 {requirement}, got {n0}")]
    WrongCase {
        case: GreenCase,
        requirement: &'static str,
        n0: i64,
    },
    #[error("junction system is singular or inconsistent (residual {residual:.3e})")]
    SingularSystem { residual: f64 },
}

/// The eight coefficients of one case at fixed `(n0, omega)`.
#[derive(Debug, Clone, Copy)]
pub struct GreenCoeffs {
    pub case: GreenCase,
    pub n0: i64,
    pub omega: Complex64,
    /// `c1..c4` for `Gt`, `c'1..c'4` for `Lt`.
    pub c: [Complex64; 4],
    /// `d1..d4` for `Gt`, `d'1..d'4` for `Lt`.
    pub d: [Complex64; 4],
}

/// Spectral quantities shared by every coefficient formula.
struct Ctx {
    omega: Complex64,
    z1: Complex64,
    z2: Complex64,
    r1p: Complex64,
    r1m: Complex64,
    r2p: Complex64,
    r2m: Complex64,
    v1p: CVec2,
    v1m: CVec2,
    v2p: CVec2,
    v2m: CVec2,
}

impl Ctx {
    fn new(omega: Complex64, params: WeightParams) -> Result<Self, GreenError> {
        let (z1, z2) = z_funcs(omega, params);
        if z1.norm() < 1e-14 {
            return Err(GreenError::Degenerate { what: "z1", omega });
        }
        if z2.norm() < 1e-14 {
            return Err(GreenError::Degenerate { what: "z2", omega });
        }
        let (r1p, r1m) = roots(Side::Left, omega, params);
        let (r2p, r2m) = roots(Side::Right, omega, params);
        if (r2p - r2m).norm() < 1e-14 {
            return Err(GreenError::Degenerate {
                what: "r2+ - r2-",
                omega,
            });
        }
        if (r1p - r1m).norm() < 1e-14 {
            return Err(GreenError::Degenerate {
                what: "r1+ - r1-",
                omega,
            });
        }
        let v = |side, branch| eigvec(side, branch, omega, params).expect("z != 0 checked above");
        Ok(Self {
            omega,
            z1,
            z2,
            r1p,
            r1m,
            r2p,
            r2m,
            v1p: v(Side::Left, Branch::Plus),
            v1m: v(Side::Left, Branch::Minus),
            v2p: v(Side::Right, Branch::Plus),
            v2m: v(Side::Right, Branch::Minus),
        })
    }

    /// `r1+ z1 (r2- - 1) + r2- z2 (1 - r1+)`, the bracketed denominator that
    /// both coefficient families share.
    fn den_a(&self) -> Complex64 {
        self.r1p * self.z1 * (self.r2m - 1.0) + self.r2m * self.z2 * (1.0 - self.r1p)
    }
}

fn powi(base: Complex64, exp: i64) -> Complex64 {
    base.powi(exp as i32)
}

/// Appendix-style closed forms for all eight coefficients of the case.
pub fn coefficients(
    case: GreenCase,
    n0: i64,
    omega: Complex64,
    params: WeightParams,
) -> Result<GreenCoeffs, GreenError> {
    check_case(case, n0)?;
    let x = Ctx::new(omega, params)?;
    let da = x.den_a();
    if da.norm() < 1e-300 {
        return Err(GreenError::Degenerate {
            what: "junction denominator",
            omega,
        });
    }
    let (z1, z2) = (x.z1, x.z2);
    let (r1p, r1m, r2p, r2m) = (x.r1p, x.r1m, x.r2p, x.r2m);
    let w = x.omega;
    let (c, d) = match case {
        GreenCase::Gt => {
            let c1 = (1.0 - r2m) * powi(r2p, -n0) * w / da;
            let c2 = (r2m - 1.0) * powi(r2p, -n0) * w / (z2 * (r2p - r2m));
            let c3 = (r2m - 1.0) * powi(r2p, -n0) * w
                * (r1p * z1 * (1.0 - r2p) + r2p * z2 * (r1p - 1.0))
                / ((r2m - r2p) * z2 * (-da));
            let c4 = powi(r2m, -n0) * (r2p - 1.0) * w / (z2 * (r2p - r2m)) + c3;
            let d1 = -(r2m * powi(r2p, 1 - n0) * z2) / (-da);
            let d2 = r2m * powi(r2p, 1 - n0) / (r2m - r2p);
            let d3 = r2m * powi(r2p, 1 - n0) * (r1p * z1 * (r2p - 1.0) + r2p * z2 * (1.0 - r1p))
                / ((r2p - r2m) * da);
            let d4 = r2p * powi(r2m, 1 - n0) / (r2m - r2p) + d3;
            ([c1, c2, c3, c4], [d1, d2, d3, d4])
        }
        GreenCase::Lt => {
            let c2 = powi(r1m, -n0) * (r1p - 1.0) * w
                * (r1m * z1 * (r2m - 1.0) + r2m * z2 * (1.0 - r1m))
                / ((r1m - r1p) * z1 * da);
            let c1 = (r1m - 1.0) * powi(r1p, -n0) * w / ((r1p - r1m) * z1) + c2;
            let c3 = powi(r1m, -n0) * (r1p - 1.0) * w / ((r1p - r1m) * z1);
            let c4 = powi(r1m, -n0) * (r1p - 1.0) * w / (-da);
            let d2 = powi(r1m, 1 - n0) * r1p * (r1m * z1 * (r2m - 1.0) + r2m * z2 * (1.0 - r1m))
                / ((r1p - r1m) * da);
            let d1 = r1m * powi(r1p, 1 - n0) / (r1m - r1p) + d2;
            let d3 = powi(r1m, 1 - n0) * r1p / (r1m - r1p);
            let d4 = powi(r1m, 1 - n0) * r1p * z1 / da;
            ([c1, c2, c3, c4], [d1, d2, d3, d4])
        }
    };
    Ok(GreenCoeffs {
        case,
        n0,
        omega,
        c,
        d,
    })
}

fn check_case(case: GreenCase, n0: i64) -> Result<(), GreenError> {
    match case {
        GreenCase::Gt if n0 <= 0 => Err(GreenError::WrongCase {
            case,
            requirement: "> 0",
            n0,
        }),
        GreenCase::Lt if n0 > 0 => Err(GreenError::WrongCase {
            case,
            requirement: "<= 0",
            n0,
        }),
        _ => Ok(()),
    }
}

/// Which of the four basis solutions is active at column `n`, per family.
/// Returns `(vector, radial factor base, region ordinal)` for each of the four
/// coefficients; inactive entries contribute zero.
fn basis(
    x: &Ctx,
    case: GreenCase,
    family: UpDown,
    n0: i64,
    coeff: usize,
    n: i64,
) -> Option<(CVec2, Complex64)> {
    let active = match (case, family) {
        // G^>: columns of the c-family live on (-inf,0], (0,n0], (0,n0], (n0,inf)
        (GreenCase::Gt, UpDown::Up) => match coeff {
            0 => n <= 0,
            1 | 2 => n > 0 && n <= n0,
            3 => n > n0,
            _ => unreachable!(),
        },
        // d-family: (-inf,0], (0,n0), (0,n0), [n0,inf)
        (GreenCase::Gt, UpDown::Down) => match coeff {
            0 => n <= 0,
            1 | 2 => n > 0 && n < n0,
            3 => n >= n0,
            _ => unreachable!(),
        },
        // G^<: c-family on (-inf,n0], (n0,0], (n0,0], (0,inf)
        (GreenCase::Lt, UpDown::Up) => match coeff {
            0 => n <= n0,
            1 | 2 => n > n0 && n <= 0,
            3 => n > 0,
            _ => unreachable!(),
        },
        // d-family: (-inf,n0), [n0,0], [n0,0], (0,inf)
        (GreenCase::Lt, UpDown::Down) => match coeff {
            0 => n < n0,
            1 | 2 => n >= n0 && n <= 0,
            3 => n > 0,
            _ => unreachable!(),
        },
    };
    if !active {
        return None;
    }
    let (v, r) = match (case, coeff) {
        (GreenCase::Gt, 0) => (x.v1p, x.r1p),
        (GreenCase::Gt, 1) => (x.v2p, x.r2p),
        (GreenCase::Gt, 2) | (GreenCase::Gt, 3) => (x.v2m, x.r2m),
        (GreenCase::Lt, 0) | (GreenCase::Lt, 1) => (x.v1p, x.r1p),
        (GreenCase::Lt, 2) => (x.v1m, x.r1m),
        (GreenCase::Lt, 3) => (x.v2m, x.r2m),
        _ => unreachable!(),
    };
    Some((v, r))
}

/// Assembles the column pair `(G_{up,j}(n), G_{down,j}(n))` from a coefficient
/// 4-vector.
fn assemble_column(
    x: &Ctx,
    case: GreenCase,
    family: UpDown,
    n0: i64,
    coeffs: &[Complex64; 4],
    n: i64,
) -> CVec2 {
    let mut out = [Complex64::ZERO; 2];
    for (q, k) in coeffs.iter().enumerate() {
        if let Some((v, r)) = basis(x, case, family, n0, q, n) {
            let f = *k * powi(r, n);
            out[0] += f * v[0];
            out[1] += f * v[1];
        }
    }
    out
}

/// The full 2x2 Green matrix `[i][j]` at column `n` (rows: white up/down,
/// columns: black up/down).
pub fn green_matrix(
    n: i64,
    n0: i64,
    omega: Complex64,
    params: WeightParams,
) -> Result<[[Complex64; 2]; 2], GreenError> {
    let case = GreenCase::for_n0(n0);
    let k = coefficients(case, n0, omega, params)?;
    let x = Ctx::new(omega, params)?;
    let cu = assemble_column(&x, case, UpDown::Up, n0, &k.c, n);
    let cd = assemble_column(&x, case, UpDown::Down, n0, &k.d, n);
    Ok([[cu[0], cd[0]], [cu[1], cd[1]]])
}

/// Single component `G_{ij}(n, n0; omega)`.
pub fn green_eval(
    i: UpDown,
    j: UpDown,
    n: i64,
    n0: i64,
    omega: Complex64,
    params: WeightParams,
) -> Result<Complex64, GreenError> {
    Ok(green_matrix(n, n0, omega, params)?[i.idx()][j.idx()])
}

/// Reduced-operator residual of the closed-form Green matrix against the
/// Kronecker delta, maximised over `n` in a window of radius `span` around
/// `{0, n0}`. This is the master correctness check for the closed forms.
pub fn delta_residual(
    n0: i64,
    omega: Complex64,
    params: WeightParams,
    span: i64,
) -> Result<f64, GreenError> {
    let lo = n0.min(0) - span;
    let hi = n0.max(0) + span;
    let g: Vec<[[Complex64; 2]; 2]> = ((lo - 1)..=(hi + 1))
        .map(|n| green_matrix(n, n0, omega, params))
        .collect::<Result<_, _>>()?;
    let at = |n: i64| &g[(n - lo + 1) as usize];
    let mut worst: f64 = 0.0;
    for n in lo..=hi {
        let z = crate::spectral::z_of(Side::for_column(n), omega, params);
        for j in 0..2 {
            let r1 = at(n + 1)[0][j] - at(n)[0][j] - z / omega * at(n)[1][j];
            let r2 = z * at(n)[0][j] + at(n)[1][j] - at(n - 1)[1][j];
            let want1 = if n == n0 && j == 0 { Complex64::ONE } else { Complex64::ZERO };
            let want2 = if n == n0 && j == 1 { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((r1 - want1).norm()).max((r2 - want2).norm());
        }
    }
    Ok(worst)
}

/// Determines the coefficients independently of the closed forms by imposing
/// the delta-matching rows at the junction columns (`n in {0, n0-1, n0, n0+1}`
/// and the region boundaries) as a least-squares system, together with the
/// region-extension identities that the junction rows imply.
pub fn coefficients_by_solve(
    case: GreenCase,
    n0: i64,
    omega: Complex64,
    params: WeightParams,
) -> Result<GreenCoeffs, GreenError> {
    check_case(case, n0)?;
    let x = Ctx::new(omega, params)?;
    let mut solved: [[Complex64; 4]; 2] = [[Complex64::ZERO; 4]; 2];
    for family in [UpDown::Up, UpDown::Down] {
        let lo = n0.min(0) - 2;
        let hi = n0.max(0) + 2;
        let ncols = 4usize;
        let mut rows: Vec<[Complex64; 4]> = Vec::new();
        let mut rhs: Vec<Complex64> = Vec::new();
        // component of the basis solution q at column n
        let phi = |q: usize, n: i64, comp: usize| -> Complex64 {
            basis(&x, case, family, n0, q, n)
                .map(|(v, r)| v[comp] * powi(r, n))
                .unwrap_or(Complex64::ZERO)
        };
        for n in lo..=hi {
            let z = crate::spectral::z_of(Side::for_column(n), omega, params);
            let mut row1 = [Complex64::ZERO; 4];
            let mut row2 = [Complex64::ZERO; 4];
            for q in 0..ncols {
                row1[q] = phi(q, n + 1, 0) - phi(q, n, 0) - z / omega * phi(q, n, 1);
                row2[q] = z * phi(q, n, 0) + phi(q, n, 1) - phi(q, n - 1, 1);
            }
            let hit = n == n0;
            rows.push(row1);
            rhs.push(if hit && family == UpDown::Up {
                Complex64::ONE
            } else {
                Complex64::ZERO
            });
            rows.push(row2);
            rhs.push(if hit && family == UpDown::Down {
                Complex64::ONE
            } else {
                Complex64::ZERO
            });
        }
        // Region-extension identities at the delta junction. They follow from
        // the rows whenever the interior region is nonempty and pin the
        // interior pair when it is empty (n0 = 1 for Gt, n0 = 0 for Lt).
        {
            let (vm, rm, jump) = match (case, family) {
                // mid-region expression minus far-branch expression at n0
                (GreenCase::Gt, UpDown::Up) => (x.v2m, x.r2m, [-Complex64::ONE, Complex64::ZERO]),
                (GreenCase::Gt, UpDown::Down) => (x.v2m, x.r2m, [Complex64::ZERO, -Complex64::ONE]),
                // left-branch expression minus mid-region expression at n0
                (GreenCase::Lt, UpDown::Up) => (x.v1p, x.r1p, [-Complex64::ONE, Complex64::ZERO]),
                (GreenCase::Lt, UpDown::Down) => (x.v1p, x.r1p, [Complex64::ZERO, -Complex64::ONE]),
            };
            for comp in 0..2 {
                let mut row = [Complex64::ZERO; 4];
                match case {
                    GreenCase::Gt => {
                        // (c2 v2+ r2+^n0 + c3 v2- r2-^n0) - c4 v2- r2-^n0 = jump
                        row[1] = x.v2p[comp] * powi(x.r2p, n0);
                        row[2] = x.v2m[comp] * powi(x.r2m, n0);
                        row[3] = -(vm[comp] * powi(rm, n0));
                    }
                    GreenCase::Lt => {
                        // c1 v1+ r1+^n0 - (c2 v1+ r1+^n0 + c3 v1- r1-^n0) = jump
                        row[0] = vm[comp] * powi(rm, n0);
                        row[1] = -(x.v1p[comp] * powi(x.r1p, n0));
                        row[2] = -(x.v1m[comp] * powi(x.r1m, n0));
                    }
                }
                rows.push(row);
                rhs.push(jump[comp]);
            }
        }
        let nr = rows.len();
        let mut a = DMatrix::<Complex64>::zeros(nr, ncols);
        let mut bvec = DVector::<Complex64>::zeros(nr);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a[(r, c)] = *v;
            }
            bvec[r] = rhs[r];
        }
        // The radial powers make the unknowns span many orders of magnitude;
        // equilibrate columns so every coefficient solves to relative
        // accuracy, then polish with one refinement step.
        let mut col_scale = [1.0_f64; 4];
        for c in 0..ncols {
            let s = a.column(c).iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
            if s > 0.0 {
                col_scale[c] = s;
                for r in 0..nr {
                    a[(r, c)] /= Complex64::from(s);
                }
            }
        }
        let svd = a.clone().svd(true, true);
        let mut sol = svd
            .solve(&bvec, 1e-13)
            .map_err(|_| GreenError::SingularSystem { residual: f64::NAN })?;
        let r1 = &bvec - &a * &sol;
        if let Ok(correction) = svd.solve(&r1, 1e-13) {
            sol += correction;
        }
        let resid = (&a * &sol - &bvec).norm();
        let scale = bvec.norm().max(1.0);
        if resid > 1e-8 * scale {
            return Err(GreenError::SingularSystem { residual: resid });
        }
        for q in 0..4 {
            solved[family.idx()][q] = sol[q] / Complex64::from(col_scale[q]);
        }
    }
    Ok(GreenCoeffs {
        case,
        n0,
        omega,
        c: solved[0],
        d: solved[1],
    })
}

/// Asymptotic region selector for the little-g functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarRegion {
    /// The decaying branch as `n -> +inf` (`r_{2,-}^n` stripped).
    RightFar,
    /// The decaying branch as `n -> -inf` (`r_{1,+}^n` stripped).
    LeftFar,
}

/// Little-g value: the far-branch coefficient of `G` with the radial factor
/// stripped, so that `G_{ij}(n) = g * r^n` throughout the far region.
pub fn little_g(
    i: UpDown,
    j: UpDown,
    region: FarRegion,
    n0: i64,
    omega: Complex64,
    params: WeightParams,
) -> Result<Complex64, GreenError> {
    let case = GreenCase::for_n0(n0);
    let k = coefficients(case, n0, omega, params)?;
    let x = Ctx::new(omega, params)?;
    let fam = match j {
        UpDown::Up => k.c,
        UpDown::Down => k.d,
    };
    let (coef, v) = match region {
        FarRegion::RightFar => (fam[3], x.v2m),
        FarRegion::LeftFar => (fam[0], x.v1p),
    };
    Ok(coef * v[i.idx()])
}

/// Splits the `n0`-dependence of the outermost coefficients:
/// `c4(n0) = r2-^{-n0} c41 + r2+^{-n0} c42` and
/// `c'1(n0) = r1+^{-n0} c'11 + r1-^{-n0} c'12`, extracted by evaluating at two
/// distinct `n0` and solving the 2x2 system.
pub fn interface_coeff_split(
    omega: Complex64,
    params: WeightParams,
) -> Result<(Complex64, Complex64, Complex64, Complex64), GreenError> {
    let x = Ctx::new(omega, params)?;
    let solve2 = |m: [[Complex64; 2]; 2], r: [Complex64; 2]| -> Result<(Complex64, Complex64), GreenError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-280 {
            return Err(GreenError::SingularSystem { residual: det.norm() });
        }
        Ok((
            (r[0] * m[1][1] - r[1] * m[0][1]) / det,
            (m[0][0] * r[1] - m[1][0] * r[0]) / det,
        ))
    };
    let c4 = |n0: i64| coefficients(GreenCase::Gt, n0, omega, params).map(|k| k.c[3]);
    let (c41, c42) = solve2(
        [
            [powi(x.r2m, -1), powi(x.r2p, -1)],
            [powi(x.r2m, -2), powi(x.r2p, -2)],
        ],
        [c4(1)?, c4(2)?],
    )?;
    let c1p = |n0: i64| coefficients(GreenCase::Lt, n0, omega, params).map(|k| k.c[0]);
    let (c1p1, c1p2) = solve2(
        [
            [powi(x.r1p, 1), powi(x.r1m, 1)],
            [powi(x.r1p, 2), powi(x.r1m, 2)],
        ],
        [c1p(-1)?, c1p(-2)?],
    )?;
    Ok((c41, c42, c1p1, c1p2))
}
