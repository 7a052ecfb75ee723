//! Transfer-matrix spectral data: the symbol functions `z_i`, the eigenvalue
//! pairs `r_{i,+/-}`, eigenvectors `v_{i,+/-}`, the spectral curve and the
//! criticality classification.
//!
//! The roots are taken from the characteristic polynomial
//! `r^2 - (2 - z_i^2/omega) r + 1 = 0` of the column transfer matrix. Printed
//! formulas elsewhere flip the sign of the `z^2` term; the trace convention
//! used here is the one consistent with the transfer matrix, the eigenvector
//! shape and the worked root values, so it is authoritative throughout.

use crate::lattice::WeightParams;
use num_complex::Complex64;

/// 2-vector over the complex field.
pub type CVec2 = [Complex64; 2];

/// 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn mul_vec(&self, v: CVec2) -> CVec2 {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }
}

/// Which half of the lattice a transfer step lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Columns `n <= 0`, symbol `z_1 = a*omega - b`.
    Left,
    /// Columns `n > 0`, symbol `z_2 = a*(omega - 1)`.
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    pub fn for_column(n: i64) -> Self {
        if n <= 0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// `z_1 = a*omega - b` and `z_2 = a*(omega - 1)`.
pub fn z_funcs(omega: Complex64, params: WeightParams) -> (Complex64, Complex64) {
    (
        params.a * omega - params.b,
        params.a * (omega - Complex64::ONE),
    )
}

pub fn z_of(side: Side, omega: Complex64, params: WeightParams) -> Complex64 {
    let (z1, z2) = z_funcs(omega, params);
    match side {
        Side::Left => z1,
        Side::Right => z2,
    }
}

/// One-column transfer matrix `[[1, z/omega], [-z, 1 - z^2/omega]]`.
pub fn transfer_matrix(side: Side, omega: Complex64, params: WeightParams) -> Mat2 {
    let z = z_of(side, omega, params);
    let zw = z / omega;
    Mat2([
        [Complex64::ONE, zw],
        [-z, Complex64::ONE - zw * z],
    ])
}

/// Eigenvalues of the transfer matrix, labeled so `|r_plus| >= |r_minus|`;
/// their product is exactly one.
///
/// Computed from `d = z^2/omega` as `r = 1 + (-d +/- sqrt(d(d-4)))/2`, which
/// stays accurate near the degenerate point `z = 0` where the naive
/// discriminant `trace^2 - 4` cancels catastrophically. The smaller root is
/// returned as the reciprocal of the larger one.
pub fn roots(side: Side, omega: Complex64, params: WeightParams) -> (Complex64, Complex64) {
    let z = z_of(side, omega, params);
    let d = z * z / omega;
    if d.norm() == 0.0 {
        return (Complex64::ONE, Complex64::ONE);
    }
    let s = (d * (d - 4.0)).sqrt();
    let ra = Complex64::ONE + (-d + s) / 2.0;
    let rb = Complex64::ONE + (-d - s) / 2.0;
    let big = if ra.norm() >= rb.norm() { ra } else { rb };
    (big, big.inv())
}

/// Eigenvector branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Eigenvector `v = (z/omega, r - 1)` for the requested branch. Returns `None`
/// at the degenerate point `z = 0`, where the vector collapses to zero and
/// callers must special-case.
pub fn eigvec(side: Side, branch: Branch, omega: Complex64, params: WeightParams) -> Option<CVec2> {
    let z = z_of(side, omega, params);
    if z.norm() == 0.0 {
        return None;
    }
    let (rp, rm) = roots(side, omega, params);
    let r = match branch {
        Branch::Plus => rp,
        Branch::Minus => rm,
    };
    Some([z / omega, r - Complex64::ONE])
}

/// The spectral curve `p(z, omega) = -2 - 2ab + b^2/omega + a^2*omega + 1/z + z`.
/// With `a = b = 1` this reduces to `z + 1/z + omega + 1/omega - 4`.
pub fn spectral_curve(z: Complex64, omega: Complex64, params: WeightParams) -> Complex64 {
    let (a, b) = (params.a, params.b);
    -Complex64::new(2.0 + 2.0 * a * b, 0.0) + b * b / omega + a * a * omega + z.inv() + z
}

/// Critical iff `|a - b| < 2` (boundary classified non-critical).
pub fn is_critical(params: WeightParams) -> bool {
    (params.a - params.b).abs() < 2.0
}

/// Minimum of `|p(z, omega)|` over a `resolution x resolution` grid on the
/// unit torus. Used to cross-check `is_critical` against a direct root search.
pub fn torus_curve_minimum(params: WeightParams, resolution: usize) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..resolution {
        let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / resolution as f64;
        let z = Complex64::from_polar(1.0, phi);
        for j in 0..resolution {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / resolution as f64;
            let omega = Complex64::from_polar(1.0, theta);
            let v = spectral_curve(z, omega, params).norm();
            if v < min {
                min = v;
            }
        }
    }
    min
}

/// Full spectral data at one point on (or off) the unit circle.
#[derive(Debug, Clone, Copy)]
pub struct SpectralData {
    pub omega: Complex64,
    pub z1: Complex64,
    pub z2: Complex64,
    pub r1_plus: Complex64,
    pub r1_minus: Complex64,
    pub r2_plus: Complex64,
    pub r2_minus: Complex64,
    pub v1_plus: Option<CVec2>,
    pub v1_minus: Option<CVec2>,
    pub v2_plus: Option<CVec2>,
    pub v2_minus: Option<CVec2>,
}

impl SpectralData {
    pub fn at(omega: Complex64, params: WeightParams) -> Self {
        let (z1, z2) = z_funcs(omega, params);
        let (r1p, r1m) = roots(Side::Left, omega, params);
        let (r2p, r2m) = roots(Side::Right, omega, params);
        Self {
            omega,
            z1,
            z2,
            r1_plus: r1p,
            r1_minus: r1m,
            r2_plus: r2p,
            r2_minus: r2m,
            v1_plus: eigvec(Side::Left, Branch::Plus, omega, params),
            v1_minus: eigvec(Side::Left, Branch::Minus, omega, params),
            v2_plus: eigvec(Side::Right, Branch::Plus, omega, params),
            v2_minus: eigvec(Side::Right, Branch::Minus, omega, params),
        }
    }
}

/// One sample of the root-norm sweep.
#[derive(Debug, Clone, Copy)]
pub struct RootNormRow {
    pub theta: f64,
    pub r1p: f64,
    pub r1m: f64,
    pub r2p: f64,
    pub r2m: f64,
}

/// Root moduli at `theta_k = 2 pi k / samples` for `k = 1..samples-1`
/// (the degenerate endpoint `theta = 0` is excluded).
pub fn root_norm_profile(params: WeightParams, samples: usize) -> Vec<RootNormRow> {
    assert!(samples >= 2, "need at least two samples");
    (1..samples)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let omega = Complex64::from_polar(1.0, theta);
            let (r1p, r1m) = roots(Side::Left, omega, params);
            let (r2p, r2m) = roots(Side::Right, omega, params);
            RootNormRow {
                theta,
                r1p: r1p.norm(),
                r1m: r1m.norm(),
                r2p: r2p.norm(),
                r2m: r2m.norm(),
            }
        })
        .collect()
}

/// CSV emission with the fixed header `theta,r1p,r1m,r2p,r2m`.
pub fn root_norm_profile_csv(rows: &[RootNormRow]) -> String {
    let mut out = String::from("theta,r1p,r1m,r2p,r2m\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.theta, r.r1p, r.r1m, r.r2p, r.r2m
        ));
    }
    out
}
