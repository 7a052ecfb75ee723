//! The interface-weighted square lattice: coordinates, edge weights, Kasteleyn
//! orientation, and finite-window Kasteleyn matrices for the brute-force oracles.
//!
//! Every face `(n, m)` owns four vertices. In global integer coordinates
//! `(x, y)`: `b_down` at `(2n, 2m)`, `w_down` at `(2n+1, 2m)`, `w_up` at
//! `(2n, 2m+1)` and `b_up` at `(2n+1, 2m+1)`. All horizontal edges have weight
//! one. A vertical edge whose bottom endpoint is black weighs `a`; one whose
//! bottom endpoint is white weighs `b` on faces with column `n <= 0` and `a`
//! on faces with `n > 0`. Horizontal edges are oriented rightward; vertical
//! edges point down on even global columns and up on odd ones.

use thiserror::Error;

/// Positive edge-weight pair defining both halves of the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub a: f64,
    pub b: f64,
}

impl WeightParams {
    pub fn new(a: f64, b: f64) -> Result<Self, LatticeError> {
        if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(LatticeError::NonPositiveWeight { a, b });
        }
        Ok(Self { a, b })
    }

    /// True iff `b - a > 2`, the regime with a gapped left half.
    pub fn strong_interface(&self) -> bool {
        self.b - self.a > 2.0
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("edge weights must be positive and finite, got a={a}, b={b}")]
    NonPositiveWeight { a: f64, b: f64 },
    #[error("window has {vertices} vertices, enumeration guard is {guard}")]
    EnumerationGuard { vertices: usize, guard: usize },
    #[error("window is degenerate (white count {whites} != black count {blacks})")]
    CountMismatch { whites: usize, blacks: usize },
}

/// The four vertex classes of the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sublattice {
    BUp,
    BDown,
    WUp,
    WDown,
}

impl Sublattice {
    pub fn is_black(self) -> bool {
        matches!(self, Sublattice::BUp | Sublattice::BDown)
    }

    /// Row/column index within the 2x2 fundamental domain: up = 0, down = 1.
    pub fn updown(self) -> usize {
        match self {
            Sublattice::BUp | Sublattice::WUp => 0,
            Sublattice::BDown | Sublattice::WDown => 1,
        }
    }
}

/// A lattice vertex, addressed by its face coordinate and sublattice tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub n: i64,
    pub m: i64,
    pub sublattice: Sublattice,
}

impl VertexId {
    pub fn new(sublattice: Sublattice, n: i64, m: i64) -> Self {
        Self { n, m, sublattice }
    }

    /// Global integer coordinates.
    pub fn position(&self) -> (i64, i64) {
        match self.sublattice {
            Sublattice::BDown => (2 * self.n, 2 * self.m),
            Sublattice::WDown => (2 * self.n + 1, 2 * self.m),
            Sublattice::WUp => (2 * self.n, 2 * self.m + 1),
            Sublattice::BUp => (2 * self.n + 1, 2 * self.m + 1),
        }
    }

    /// Vertex at global coordinates `(x, y)`.
    pub fn from_position(x: i64, y: i64) -> Self {
        let n = x.div_euclid(2);
        let m = y.div_euclid(2);
        let sub = match (x.rem_euclid(2), y.rem_euclid(2)) {
            (0, 0) => Sublattice::BDown,
            (1, 0) => Sublattice::WDown,
            (0, 1) => Sublattice::WUp,
            (1, 1) => Sublattice::BUp,
            _ => unreachable!(),
        };
        Self::new(sub, n, m)
    }

    pub fn is_black(&self) -> bool {
        self.sublattice.is_black()
    }

    /// The four lattice neighbours (right, left, up, down).
    pub fn neighbors(&self) -> [VertexId; 4] {
        let (x, y) = self.position();
        [
            VertexId::from_position(x + 1, y),
            VertexId::from_position(x - 1, y),
            VertexId::from_position(x, y + 1),
            VertexId::from_position(x, y - 1),
        ]
    }
}

/// Weight of the edge `{u, v}`, or `None` when the vertices are not adjacent.
/// Symmetric in its arguments.
pub fn edge_weight(u: VertexId, v: VertexId, params: WeightParams) -> Option<f64> {
    let (xu, yu) = u.position();
    let (xv, yv) = v.position();
    let (dx, dy) = (xv - xu, yv - yu);
    if dx.abs() + dy.abs() != 1 || u.is_black() == v.is_black() {
        return None;
    }
    if dy == 0 {
        return Some(1.0);
    }
    // Vertical edge; classify by its bottom endpoint.
    let (xb, yb) = if dy > 0 { (xu, yu) } else { (xv, yv) };
    if (xb + yb).rem_euclid(2) == 0 {
        Some(params.a) // black below
    } else if xb.div_euclid(2) <= 0 {
        Some(params.b) // white below, left of / on the interface column
    } else {
        Some(params.a)
    }
}

/// Kasteleyn orientation sign `s(u, v)`: `+1` if the edge points from `u` to
/// `v`, `-1` the other way, `0` when not adjacent. Antisymmetric.
pub fn kasteleyn_sign(u: VertexId, v: VertexId) -> i8 {
    let (xu, yu) = u.position();
    let (xv, yv) = v.position();
    let (dx, dy) = (xv - xu, yv - yu);
    if dx.abs() + dy.abs() != 1 || u.is_black() == v.is_black() {
        return 0;
    }
    if dy == 0 {
        // horizontal edges point rightward
        if dx > 0 {
            1
        } else {
            -1
        }
    } else if xu.rem_euclid(2) == 0 {
        // even columns point down
        if dy < 0 {
            1
        } else {
            -1
        }
    } else {
        // odd columns point up
        if dy > 0 {
            1
        } else {
            -1
        }
    }
}

/// Signed weighted entry `K(b, w) = s(b, w) * wt(b, w)` for adjacent pairs.
pub fn kasteleyn_entry(b: VertexId, w: VertexId, params: WeightParams) -> Option<f64> {
    let wt = edge_weight(b, w, params)?;
    Some(f64::from(kasteleyn_sign(b, w)) * wt)
}

/// A rectangular block of faces with open (free) boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteWindow {
    pub n_min: i64,
    pub n_max: i64,
    pub m_min: i64,
    pub m_max: i64,
}

impl FiniteWindow {
    pub fn new(n_min: i64, n_max: i64, m_min: i64, m_max: i64) -> Self {
        assert!(n_min <= n_max && m_min <= m_max, "empty window");
        Self {
            n_min,
            n_max,
            m_min,
            m_max,
        }
    }

    /// Square window of faces `[-radius, radius]^2`.
    pub fn centered(radius: i64) -> Self {
        Self::new(-radius, radius, -radius, radius)
    }

    pub fn face_count(&self) -> usize {
        ((self.n_max - self.n_min + 1) * (self.m_max - self.m_min + 1)) as usize
    }

    /// All vertices of all faces in the window, in a fixed (column-major) order.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(4 * self.face_count());
        for x in 2 * self.n_min..=2 * self.n_max + 1 {
            for y in 2 * self.m_min..=2 * self.m_max + 1 {
                out.push(VertexId::from_position(x, y));
            }
        }
        out
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.n >= self.n_min && v.n <= self.n_max && v.m >= self.m_min && v.m <= self.m_max
    }
}

/// The window Kasteleyn matrix `K~` with rows indexed by white vertices and
/// columns by black ones. Edges leaving the vertex set are dropped.
#[derive(Debug, Clone)]
pub struct SparseKasteleynMatrix {
    pub whites: Vec<VertexId>,
    pub blacks: Vec<VertexId>,
    /// Per white row: `(black column index, signed weight)`.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseKasteleynMatrix {
    /// Builds the matrix over an arbitrary vertex set.
    pub fn from_vertices(vertices: &[VertexId], params: WeightParams) -> Self {
        let mut whites: Vec<VertexId> = vertices.iter().copied().filter(|v| !v.is_black()).collect();
        let mut blacks: Vec<VertexId> = vertices.iter().copied().filter(|v| v.is_black()).collect();
        whites.sort_unstable();
        blacks.sort_unstable();
        let black_index: std::collections::HashMap<VertexId, usize> =
            blacks.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let rows = whites
            .iter()
            .map(|w| {
                let mut row = Vec::with_capacity(4);
                for b in w.neighbors() {
                    if let Some(&j) = black_index.get(&b) {
                        if let Some(entry) = kasteleyn_entry(b, *w, params) {
                            row.push((j, entry));
                        }
                    }
                }
                row
            })
            .collect();
        Self {
            whites,
            blacks,
            rows,
        }
    }

    pub fn is_square(&self) -> bool {
        self.whites.len() == self.blacks.len()
    }

    /// Distinguishes windows that cannot support a perfect matching by count.
    pub fn check_square(&self) -> Result<(), LatticeError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LatticeError::CountMismatch {
                whites: self.whites.len(),
                blacks: self.blacks.len(),
            })
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.whites.len(), self.blacks.len());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `|det K~|`; by the counting theorem this is the weighted matching sum.
    pub fn abs_determinant(&self) -> Result<f64, LatticeError> {
        self.check_square()?;
        Ok(self.to_dense().lu().determinant().abs())
    }
}

/// Builds the Kasteleyn matrix of a window with open boundary.
pub fn build_window_matrix(window: FiniteWindow, params: WeightParams) -> SparseKasteleynMatrix {
    SparseKasteleynMatrix::from_vertices(&window.vertices(), params)
}

/// Hard cap for the exhaustive matching enumeration.
pub const ENUMERATION_GUARD: usize = 36;

/// Exhaustively enumerates perfect matchings of the sub-lattice induced by
/// `vertices`. Returns the number of matchings and the weighted sum over
/// matchings of the product of covered edge weights.
pub fn enumerate_matchings_of(
    vertices: &[VertexId],
    params: WeightParams,
) -> Result<(u64, f64), LatticeError> {
    if vertices.len() > ENUMERATION_GUARD {
        return Err(LatticeError::EnumerationGuard {
            vertices: vertices.len(),
            guard: ENUMERATION_GUARD,
        });
    }
    let mut verts: Vec<VertexId> = vertices.to_vec();
    verts.sort_unstable();
    let index: std::collections::HashMap<VertexId, usize> =
        verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let adjacency: Vec<Vec<(usize, f64)>> = verts
        .iter()
        .map(|v| {
            v.neighbors()
                .iter()
                .filter_map(|u| {
                    let j = *index.get(u)?;
                    Some((j, edge_weight(*v, *u, params)?))
                })
                .collect()
        })
        .collect();

    fn recurse(adjacency: &[Vec<(usize, f64)>], covered: &mut [bool]) -> (u64, f64) {
        let Some(u) = covered.iter().position(|c| !c) else {
            return (1, 1.0);
        };
        covered[u] = true;
        let mut count = 0;
        let mut weighted = 0.0;
        for &(v, wt) in &adjacency[u] {
            if !covered[v] {
                covered[v] = true;
                let (c, t) = recurse(adjacency, covered);
                count += c;
                weighted += wt * t;
                covered[v] = false;
            }
        }
        covered[u] = false;
        (count, weighted)
    }

    let mut covered = vec![false; verts.len()];
    Ok(recurse(&adjacency, &mut covered))
}

/// Enumeration over a whole window.
pub fn enumerate_matchings(
    window: FiniteWindow,
    params: WeightParams,
) -> Result<(u64, f64), LatticeError> {
    enumerate_matchings_of(&window.vertices(), params)
}
