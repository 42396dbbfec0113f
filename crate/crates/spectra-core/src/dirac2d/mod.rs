//! Variational 2D solver for the Dirac quadratic form on triangles and
//! polygons.
//!
//! The squared lowest positive eigenvalue is the infimum of
//! `Q[u] = |grad u|^2 + m^2 |u|^2 + m |trace u|^2` over spinor fields
//! satisfying `psi2 = i (n1 + i n2) psi1` on the boundary. The discrete
//! model uses conforming piecewise-linear elements on a structured mesh
//! with the boundary relation eliminated node by node; both incident
//! relations are imposed at corners, which pins the spinor to zero there.
//! The reduced pencil is Hermitian, and the mass-shifted energy pencil
//! `(A - m^2 B, B)` is solved for its smallest eigenvalue by inverse
//! iteration (assembled directly as `S + m Bd`, so no large-mass
//! cancellation occurs). Ladder solves extrapolate in the mesh parameter
//! with a fitted convergence order.

mod assemble;
mod eigen;
mod extrapolate;
mod mesh;
mod polygon;
mod quadrature;
mod sparse;

pub use assemble::{assemble_form, boundary_constraints, DiscreteForm, DofMap, NodeDofs};
pub use eigen::{
    generalized_eigenvalues_dense, smallest_eigenpair, symmetric_eigenvalues_dense, EigenOptions,
    SmallestPair,
};
pub use extrapolate::{extrapolate, Extrapolation};
pub use mesh::{build_mesh, infinite_mass_phase, BoundaryEdge, SideSpec, TriangleMesh};
pub use polygon::{build_polygon_mesh, Polygon};
pub use quadrature::{psi_o, rayleigh_quotient, PsiO, SpinorField};
pub use sparse::{Csr, HermitianCsr};

use crate::geometry::{GeometryError, Mass, RightTriangle};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Dirac2dError {
    #[error("mesh has an untagged boundary edge between nodes {n0} and {n1}")]
    UntaggedBoundaryEdge { n0: usize, n1: usize },
    #[error("element {element} is degenerate or inverted (signed area {area:.3e})")]
    SingularElement { element: usize, area: f64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertices must be counterclockwise (signed area {0:.3e})")]
    NotCounterClockwise(f64),
    #[error("polygon is self-intersecting (sides {e0} and {e1} cross)")]
    SelfIntersecting { e0: usize, e1: usize },
    #[error("polygon triangulation failed (no ear found; vertices may be degenerate)")]
    EarClippingFailed,
    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,
    #[error("conjugate gradient stalled: relative residual {residual:.3e} after {iters} iterations")]
    CgStalled { residual: f64, iters: usize },
    #[error("eigensolver did not converge: residual norm {residual:.3e} after {iters} outer iterations")]
    EigenNotConverged { residual: f64, iters: usize },
    #[error("extrapolation needs >= 3 resolutions in geometric progression, got {0:?}")]
    BadLadder(Vec<usize>),
    #[error("trial field violates the boundary constraints: defect {defect:.3e} at scale {scale:.3e}")]
    ConstraintViolation { defect: f64, scale: f64 },
    #[error("trial field is numerically zero")]
    ZeroTrialField,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One 2D eigenvalue solve at a fixed mesh.
#[derive(Debug, Clone)]
pub struct Lambda1Solve {
    /// Mesh subdivisions per leg.
    pub n: usize,
    /// Smallest eigenvalue of the energy pencil, approximates
    /// `lambda_1^2 - m^2`.
    pub nu: f64,
    /// `nu + m^2`, approximates `lambda_1^2`.
    pub mu: f64,
    /// Positive root `sqrt(mu)`; by charge conjugation this is the lowest
    /// positive eigenvalue.
    pub lambda1: f64,
    /// Complex dimension of the reduced pencil.
    pub dim: usize,
    /// Converged eigenvector in the realified reduced basis.
    pub vector: Vec<f64>,
}

/// Smallest form eigenvalue of the triangle at one mesh resolution.
pub fn lambda1(tri: &RightTriangle, m: Mass, n: usize) -> Result<Lambda1Solve, Dirac2dError> {
    lambda1_with_start(tri, m, n, None)
}

fn lambda1_with_start(
    tri: &RightTriangle,
    m: Mass,
    n: usize,
    start: Option<Vec<f64>>,
) -> Result<Lambda1Solve, Dirac2dError> {
    let mesh = build_mesh(tri, n);
    let form = assemble_form(&mesh, m)?;
    let opts = EigenOptions {
        start,
        ..EigenOptions::default()
    };
    let pair = smallest_eigenpair(&form.energy.realified(), &form.b.realified(), &opts)?;
    let mu = pair.value + m.value() * m.value();
    Ok(Lambda1Solve {
        n,
        nu: pair.value,
        mu,
        lambda1: mu.sqrt(),
        dim: form.dim(),
        vector: pair.vector,
    })
}

/// A ladder of mesh resolutions with Richardson extrapolation of
/// `lambda_1^2 - m^2`.
#[derive(Debug, Clone)]
pub struct Lambda1Ladder {
    /// `(n, nu(n))` per resolution, in input order.
    pub points: Vec<(usize, f64)>,
    /// Extrapolation of `nu`; `mu = nu + m^2`.
    pub extrapolation: Extrapolation,
    /// Extrapolated `lambda_1^2`.
    pub mu: f64,
    /// Extrapolated lowest positive eigenvalue.
    pub lambda1: f64,
}

/// Runs the mesh ladder, warm-starting each level from the interpolated
/// eigenvector of the previous one when the resolutions nest (ratio 2).
pub fn lambda1_ladder(
    tri: &RightTriangle,
    m: Mass,
    mesh_ns: &[usize],
) -> Result<Lambda1Ladder, Dirac2dError> {
    if mesh_ns.len() < 3 {
        return Err(Dirac2dError::BadLadder(mesh_ns.to_vec()));
    }
    let mut points = Vec::with_capacity(mesh_ns.len());
    let mut prev: Option<Lambda1Solve> = None;
    for &n in mesh_ns {
        let start = prev.as_ref().and_then(|p| {
            if n == 2 * p.n {
                prolong_structured(tri, p.n, &p.vector).ok()
            } else {
                None
            }
        });
        let solve = lambda1_with_start(tri, m, n, start)?;
        points.push((n, solve.nu));
        prev = Some(solve);
    }
    let extrapolation = extrapolate(&points)?;
    let mu = extrapolation.value + m.value() * m.value();
    Ok(Lambda1Ladder {
        points,
        extrapolation,
        mu,
        lambda1: mu.sqrt(),
    })
}

/// Prolongs a converged realified eigenvector from the structured mesh at
/// `n` onto the nested mesh at `2n` (P1 interpolation, then projection
/// onto the fine constraints).
fn prolong_structured(
    tri: &RightTriangle,
    n: usize,
    vector: &[f64],
) -> Result<Vec<f64>, Dirac2dError> {
    let coarse_mesh = build_mesh(tri, n);
    let coarse = boundary_constraints(&coarse_mesh)?;
    let fine_mesh = build_mesh(tri, 2 * n);
    let fine = boundary_constraints(&fine_mesh)?;

    let d = coarse.n_complex;
    let z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::new(vector[k], vector[k + d]))
        .collect();
    let coarse_field = coarse.expand(&z);

    let coarse_at = |i: usize, j: usize| coarse_field[mesh::structured_index(n, i, j)];
    let nf = 2 * n;
    let mut fine_field = vec![(Complex64::default(), Complex64::default()); fine_mesh.points.len()];
    for j in 0..=nf {
        for i in 0..=(nf - j) {
            let v = match (i % 2, j % 2) {
                (0, 0) => coarse_at(i / 2, j / 2),
                (1, 0) => avg(coarse_at(i / 2, j / 2), coarse_at(i / 2 + 1, j / 2)),
                (0, 1) => avg(coarse_at(i / 2, j / 2), coarse_at(i / 2, j / 2 + 1)),
                _ => avg(
                    coarse_at(i / 2 + 1, j / 2),
                    coarse_at(i / 2, j / 2 + 1),
                ),
            };
            fine_field[mesh::structured_index(nf, i, j)] = v;
        }
    }
    let zf = fine.reduce_field(&fine_field);
    let df = fine.n_complex;
    let mut out = vec![0.0; 2 * df];
    for (k, c) in zf.iter().enumerate() {
        out[k] = c.re;
        out[k + df] = c.im;
    }
    Ok(out)
}

fn avg(p: (Complex64, Complex64), q: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1))
}
