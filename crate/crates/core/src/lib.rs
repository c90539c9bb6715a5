//! Coordinate-chart engine for k-symplectic Hamiltonian and Lagrangian field
//! theory.
//!
//! The crate builds the canonical geometry of the k-tangent and k-cotangent
//! bundles over `R^n`, solves the geometric field equations pointwise,
//! detects symmetries and pseudosymmetries of k-vector fields, and constructs
//! and verifies conservation laws, both from Cartan symmetries (Noether) and
//! from symmetry/pseudosymmetry pairs acting on invariant forms.
//!
//! Everything lives on a single global chart; see [`chart::ChartSpace`] for
//! the coordinate naming scheme.

pub mod bundles;
pub mod calculus;
pub mod chart;
pub mod conservation;
pub mod dynamics;
pub mod expr;
pub mod grid;
pub mod linalg;
pub mod quadrature;
pub mod residual;
pub mod sampling;
pub mod sections;
pub mod symmetry;

pub use calculus::{PForm, ScalarField, VectorField};
pub use chart::{Chart, ChartKind, ChartSpace};
pub use expr::Expr;
pub use residual::Residual;
