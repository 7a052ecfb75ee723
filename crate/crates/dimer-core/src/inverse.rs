//! Numerical evaluation of inverse Kasteleyn entries: the contour integral of
//! the interface Green's function, the residue-route reference integral for
//! the uniform lattice, and edge probabilities / correlations.
//!
//! The physical pairing, fixed against the finite-lattice oracles, is
//!
//! ```text
//! K~^{-1}(w_i(n, m), b_j(n0, 0))
//!     = eps_ij / (2 pi) * Int_0^{2 pi} G_ij(n, n0; e^{i t}) e^{i t (m + sigma_ij)} dt
//! ```
//!
//! with `eps = +1` on diagonal components and `-1` off-diagonal, and the
//! vertical offsets `sigma(up,down) = +1`, `sigma(down,up) = -1`, zero on the
//! diagonal. The `(n, m)` argument belongs to the white vertex and `(n0, 0)`
//! to the black one; `n0` selects the case (`n0 > 0` the `G^>` family,
//! `n0 <= 0` the `G^<` family). The twists absorb the bookkeeping offset
//! between the Green-function calculus and the lattice labeling; all of them
//! are pinned by the a = b degeneration and the cylinder oracle.

use crate::greens::{green_matrix, GreenError, UpDown};
use crate::lattice::{kasteleyn_entry, VertexId, WeightParams};
use crate::quad::{integrate_circle, QuadError, QuadratureSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InverseError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error("vertices {0:?} and {1:?} are not adjacent")]
    NotAdjacent(VertexId, VertexId),
    #[error("edge set of size {0} exceeds the determinant guard of 4")]
    TooManyEdges(usize),
    #[error("expected a (white, black) pair, got {0:?}, {1:?}")]
    WrongColors(VertexId, VertexId),
}

/// One computed inverse entry with its reality diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct InvKEntry {
    pub i: UpDown,
    pub j: UpDown,
    pub n0: i64,
    pub n: i64,
    pub m: i64,
    pub value: f64,
    pub imag_residual: f64,
}

fn eps_sigma(i: UpDown, j: UpDown) -> (f64, i64) {
    match (i, j) {
        (UpDown::Up, UpDown::Up) | (UpDown::Down, UpDown::Down) => (1.0, 0),
        (UpDown::Up, UpDown::Down) => (-1.0, 1),
        (UpDown::Down, UpDown::Up) => (-1.0, -1),
    }
}

/// `K~^{-1}(w_i(n, m), b_j(n0, 0))` for the interface lattice.
pub fn invk_entry(
    i: UpDown,
    j: UpDown,
    n0: i64,
    n: i64,
    m: i64,
    params: WeightParams,
    quad: &QuadratureSpec,
) -> Result<InvKEntry, InverseError> {
    let (eps, sigma) = eps_sigma(i, j);
    let mu = m + sigma;
    let oscillation = mu.abs().max(n.abs() / 2).max(n0.abs() / 2);
    let (integral, _err) = integrate_circle(
        |theta| {
            let omega = Complex64::from_polar(1.0, theta);
            let g = green_matrix(n, n0, omega, params)
                .map(|g| g[i.idx()][j.idx()])
                .unwrap_or(Complex64::ZERO);
            g * Complex64::from_polar(1.0, theta * mu as f64)
        },
        oscillation,
        quad,
    )?;
    let value = eps * integral / (2.0 * std::f64::consts::PI);
    Ok(InvKEntry {
        i,
        j,
        n0,
        n,
        m,
        value: value.re,
        imag_residual: value.im.abs(),
    })
}

fn updown_of(v: VertexId) -> UpDown {
    if v.sublattice.updown() == 0 {
        UpDown::Up
    } else {
        UpDown::Down
    }
}

/// `K~^{-1}(w, b)` for arbitrary concrete vertices (translates the pair so
/// the black vertex sits at row zero).
pub fn invk_vertex(
    w: VertexId,
    b: VertexId,
    params: WeightParams,
    quad: &QuadratureSpec,
) -> Result<InvKEntry, InverseError> {
    if w.is_black() || !b.is_black() {
        return Err(InverseError::WrongColors(w, b));
    }
    invk_entry(
        updown_of(w),
        updown_of(b),
        b.n,
        w.n,
        w.m - b.m,
        params,
        quad,
    )
}

/// `lambda_{+-}(theta)` of the uniform-lattice denominator, computed from
/// `d = tau - 2 = 4 sin^2(theta/2)` to stay accurate near `theta = 0`.
fn uniform_lambdas(theta: f64) -> (f64, f64) {
    let s = (theta / 2.0).sin();
    let d = 4.0 * s * s;
    let root = (d * (d + 4.0)).sqrt();
    (1.0 + (d + root) / 2.0, 1.0 + (d - root) / 2.0)
}

/// Residue of the `z`-integral: `lambda_-^{|k-1|} / (lambda_- - lambda_+)`.
fn uniform_residue(k: i64, theta: f64) -> f64 {
    let (lp, lm) = uniform_lambdas(theta);
    lm.powi((k - 1).unsigned_abs() as i32) / (lm - lp)
}

/// `K~^{-1}(w_i(n, m), b_j(0, 0))` for the uniform lattice (`a = b = 1`),
/// evaluated by residues in `z` followed by quadrature in `theta`.
pub fn invk_uniform(
    i: UpDown,
    j: UpDown,
    n: i64,
    m: i64,
    quad: &QuadratureSpec,
) -> Result<InvKEntry, InverseError> {
    let (integral, _err) = integrate_circle(
        |theta| {
            let omega = Complex64::from_polar(1.0, theta);
            let fz = match (i, j) {
                (UpDown::Up, UpDown::Up) => {
                    Complex64::new(uniform_residue(n + 1, theta) - uniform_residue(n, theta), 0.0)
                }
                (UpDown::Up, UpDown::Down) => {
                    (Complex64::ONE - omega) * uniform_residue(n + 1, theta)
                }
                (UpDown::Down, UpDown::Up) => {
                    (Complex64::ONE - omega.inv()) * uniform_residue(n + 1, theta)
                }
                (UpDown::Down, UpDown::Down) => Complex64::new(
                    uniform_residue(n + 2, theta) - uniform_residue(n + 1, theta),
                    0.0,
                ),
            };
            fz * Complex64::from_polar(1.0, theta * m as f64)
        },
        m.abs().max(n.abs() / 2),
        quad,
    )?;
    let value = integral / (2.0 * std::f64::consts::PI);
    Ok(InvKEntry {
        i,
        j,
        n0: 0,
        n,
        m,
        value: value.re,
        imag_residual: value.im.abs(),
    })
}

/// Kenyon's formula: probability that every edge in the set is covered.
/// Each edge is a `(white, black)` adjacent pair; at most four edges.
pub fn edge_probability(
    edges: &[(VertexId, VertexId)],
    params: WeightParams,
    quad: &QuadratureSpec,
) -> Result<f64, InverseError> {
    if edges.is_empty() || edges.len() > 4 {
        return Err(InverseError::TooManyEdges(edges.len()));
    }
    let mut prefactor = 1.0;
    for (w, b) in edges {
        if w.is_black() || !b.is_black() {
            return Err(InverseError::WrongColors(*w, *b));
        }
        prefactor *= kasteleyn_entry(*b, *w, params)
            .ok_or(InverseError::NotAdjacent(*w, *b))?;
    }
    let k = edges.len();
    let mut minor = nalgebra::DMatrix::<f64>::zeros(k, k);
    for (r, (w, _)) in edges.iter().enumerate() {
        for (c, (_, b)) in edges.iter().enumerate() {
            minor[(r, c)] = invk_vertex(*w, *b, params, quad)?.value;
        }
    }
    Ok(prefactor * minor.lu().determinant())
}

/// A batch sweep over a rectangle of `(n, m)` offsets, parallelized over
/// entries with deterministic output ordering.
pub fn invk_sweep(
    i: UpDown,
    j: UpDown,
    n0: i64,
    n_range: (i64, i64),
    m_range: (i64, i64),
    params: WeightParams,
    quad: &QuadratureSpec,
) -> Result<Vec<InvKEntry>, InverseError> {
    let mut points = Vec::new();
    for n in n_range.0..=n_range.1 {
        for m in m_range.0..=m_range.1 {
            points.push((n, m));
        }
    }
    points
        .par_iter()
        .map(|&(n, m)| invk_entry(i, j, n0, n, m, params, quad))
        .collect()
}

/// CSV emission with the fixed header `i,j,n0,n,m,value,imag_residual`.
pub fn invk_csv(entries: &[InvKEntry]) -> String {
    let mut out = String::from("i,j,n0,n,m,value,imag_residual\n");
    for e in entries {
        let tag = |u: UpDown| match u {
            UpDown::Up => "up",
            UpDown::Down => "down",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{:.16e},{:.16e}\n",
            tag(e.i),
            tag(e.j),
            e.n0,
            e.n,
            e.m,
            e.value,
            e.imag_residual
        ));
    }
    out
}
