//! Spectral toolkit for the two-dimensional Dirac operator with
//! infinite-mass (MIT-bag) boundary conditions on right triangles.
//!
//! The crate is organised around four pieces:
//!
//! * [`geometry`] — right-triangle domains, the mass parameter, boundary
//!   phase constants, and the area/perimeter constraint parametrizations.
//! * [`bounds`] — closed-form lower/upper bounds for the squared lowest
//!   positive eigenvalue and the eccentricity classifiers built on them.
//! * [`dirac1d`] — exact 1D fiber solvers: transcendental secular
//!   equations per tan/cot branch, eigenfunction reconstruction, and an
//!   independent adaptive-RK shooting oracle.
//! * [`dirac2d`] — variational 2D solver: structured meshes, spinor
//!   boundary constraints with corner elimination, Hermitian form
//!   assembly, sparse/dense eigensolvers, Richardson extrapolation, and
//!   a polygon form assembler.
//!
//! All quantities are dimensionless; the eigenvalue problem is scale
//! covariant, so only length ratios matter.

pub mod bounds;
pub mod dirac1d;
pub mod dirac2d;
pub mod geometry;

pub use geometry::{BoundaryPhases, ConstraintKind, ConstraintSpec, Mass, RightTriangle};
