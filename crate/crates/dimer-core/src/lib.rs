//! Numerical machinery for the dimer model on the infinite square lattice
//! with an interface weighting: periodic in the vertical direction, with the
//! vertical edge-weight pattern switching from an `(a, b)`-alternation on
//! columns `n <= 0` to a constant `a` on columns `n > 0`.
//!
//! The crate computes inverse Kasteleyn operator entries by contour
//! integration of closed-form piecewise Green's functions, classifies the
//! weighting (critical vs. non-critical), evaluates dimer edge probabilities
//! and correlations, and provides the leading-order asymptotics of the
//! inverse entries in every decay regime — each piece validated against
//! independent brute-force oracles (exhaustive matching enumeration, dense
//! window inverses, truncated Green solves, and an m-periodic cylinder).

pub mod asymptotics;
pub mod greens;
pub mod inverse;
pub mod lattice;
pub mod oracle;
pub mod quad;
pub mod spectral;

pub use greens::{GreenCase, GreenCoeffs, UpDown};
pub use inverse::{InvKEntry, InverseError};
pub use lattice::{FiniteWindow, Sublattice, VertexId, WeightParams};
pub use quad::QuadratureSpec;
