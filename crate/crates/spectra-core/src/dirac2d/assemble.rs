//! Constraint elimination and Hermitian form assembly.
//!
//! The scalar P1 stiffness, mass, and boundary-mass matrices act
//! identically on both spinor components; the components couple only
//! through the boundary relation `psi2 = phase * psi1`, eliminated here at
//! the degree-of-freedom level. Assembly runs in parallel over fixed
//! element chunks merged in chunk order, so results are bit-reproducible
//! regardless of thread count.

use super::mesh::TriangleMesh;
use super::sparse::HermitianCsr;
use super::Dirac2dError;
use crate::geometry::Mass;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Degrees of freedom carried by one node.
#[derive(Debug, Clone, Copy)]
pub enum NodeDofs {
    /// Interior node: independent `psi1` and `psi2`.
    Interior { psi1: usize, psi2: usize },
    /// Boundary node on one side: `psi1` free, `psi2 = phase * psi1`.
    Boundary { dof: usize, phase: Complex64 },
    /// Node shared by sides with different phases: `psi1 = psi2 = 0`.
    Corner,
}

/// Node-to-basis bookkeeping for the reduced (constrained) pencil.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub nodes: Vec<NodeDofs>,
    pub n_complex: usize,
}

impl DofMap {
    /// Number of complex unknowns in the reduced basis.
    pub fn dim(&self) -> usize {
        self.n_complex
    }

    /// Expands a reduced vector into the full per-node spinor field.
    pub fn expand(&self, z: &[Complex64]) -> Vec<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        self.nodes
            .iter()
            .map(|nd| match *nd {
                NodeDofs::Interior { psi1, psi2 } => (z[psi1], z[psi2]),
                NodeDofs::Boundary { dof, phase } => (z[dof], phase * z[dof]),
                NodeDofs::Corner => (zero, zero),
            })
            .collect()
    }

    /// Projects a per-node spinor field onto the reduced basis (interior
    /// components copied, boundary nodes keep `psi1`, corners dropped).
    pub fn reduce_field(&self, field: &[(Complex64, Complex64)]) -> Vec<Complex64> {
        let mut z = vec![Complex64::new(0.0, 0.0); self.n_complex];
        for (node, nd) in self.nodes.iter().enumerate() {
            match *nd {
                NodeDofs::Interior { psi1, psi2 } => {
                    z[psi1] = field[node].0;
                    z[psi2] = field[node].1;
                }
                NodeDofs::Boundary { dof, .. } => z[dof] = field[node].0,
                NodeDofs::Corner => {}
            }
        }
        z
    }
}

/// Builds the constraint map from the tagged mesh.
///
/// Every element edge incident to exactly one element must carry a side
/// tag; nodes touched by two sides with different phases become corners
/// and lose both components.
pub fn boundary_constraints(mesh: &TriangleMesh) -> Result<DofMap, Dirac2dError> {
    let n_nodes = mesh.n_nodes();
    // edges used by exactly one element form the boundary
    let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for e in &mesh.elements {
        for (p, q) in [(e[0], e[1]), (e[1], e[2]), (e[2], e[0])] {
            let key = (p.min(q), p.max(q));
            *edge_use.entry(key).or_insert(0) += 1;
        }
    }
    let mut tagged: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for be in &mesh.boundary_edges {
        let key = (be.nodes[0].min(be.nodes[1]), be.nodes[0].max(be.nodes[1]));
        tagged.insert(key, be.side);
    }
    for (&key, &uses) in &edge_use {
        if uses == 1 && !tagged.contains_key(&key) {
            return Err(Dirac2dError::UntaggedBoundaryEdge {
                n0: key.0,
                n1: key.1,
            });
        }
    }

    let mut node_phase: Vec<Option<Complex64>> = vec![None; n_nodes];
    let mut corner: Vec<bool> = vec![false; n_nodes];
    for be in &mesh.boundary_edges {
        let phase = mesh.sides[be.side].phase;
        for &nd in &be.nodes {
            match node_phase[nd] {
                None => node_phase[nd] = Some(phase),
                Some(p) => {
                    if (p - phase).norm() > 1e-12 {
                        corner[nd] = true;
                    }
                }
            }
        }
    }
    for &nd in &mesh.corner_nodes {
        corner[nd] = true;
    }

    let mut nodes = Vec::with_capacity(n_nodes);
    let mut next = 0usize;
    for nd in 0..n_nodes {
        if corner[nd] {
            nodes.push(NodeDofs::Corner);
        } else if let Some(phase) = node_phase[nd] {
            nodes.push(NodeDofs::Boundary { dof: next, phase });
            next += 1;
        } else {
            nodes.push(NodeDofs::Interior {
                psi1: next,
                psi2: next + 1,
            });
            next += 2;
        }
    }
    Ok(DofMap {
        nodes,
        n_complex: next,
    })
}

/// Hermitian matrix pair of the constrained form.
#[derive(Debug, Clone)]
pub struct DiscreteForm {
    /// `Q[u] = |grad u|^2 + m^2 |u|^2 + m |trace u|^2` in the reduced basis.
    pub a: HermitianCsr,
    /// Mass matrix in the reduced basis.
    pub b: HermitianCsr,
    /// `A - m^2 B`, assembled directly as stiffness plus `m` times the
    /// boundary mass (no cancellation at large mass).
    pub energy: HermitianCsr,
    pub dof_map: DofMap,
    pub mass: f64,
}

impl DiscreteForm {
    pub fn dim(&self) -> usize {
        self.dof_map.n_complex
    }

    /// `u^H A u` for a reduced vector.
    pub fn quadratic(&self, u: &[Complex64]) -> f64 {
        self.a.quadratic(u)
    }

    pub fn mass_quadratic(&self, u: &[Complex64]) -> f64 {
        self.b.quadratic(u)
    }

    /// Worst hermiticity defect across the stored matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        self.a
            .hermiticity_defect()
            .max(self.b.hermiticity_defect())
            .max(self.energy.hermiticity_defect())
    }

    /// Entrywise distance to another form on the same dof layout.
    pub fn max_entry_diff(&self, other: &DiscreteForm) -> f64 {
        self.a
            .max_entry_diff(&other.a)
            .max(self.b.max_entry_diff(&other.b))
    }

    /// Estimate of `||A||` (max absolute row sum).
    pub fn a_norm(&self) -> f64 {
        self.a.max_abs_row_sum()
    }
}

struct ScalarTriplets {
    stiffness: Vec<(u32, u32, f64)>,
    mass: Vec<(u32, u32, f64)>,
}

fn element_triplets(mesh: &TriangleMesh) -> Result<ScalarTriplets, Dirac2dError> {
    let chunk = 2048;
    let results: Vec<Result<ScalarTriplets, Dirac2dError>> = mesh
        .elements
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, elems)| {
            let mut st = Vec::with_capacity(9 * elems.len());
            let mut ms = Vec::with_capacity(9 * elems.len());
            for (off, e) in elems.iter().enumerate() {
                let [p, q, r] = [mesh.points[e[0]], mesh.points[e[1]], mesh.points[e[2]]];
                let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
                let area = 0.5 * det;
                let diam2 = (q[0] - p[0]).powi(2)
                    + (q[1] - p[1]).powi(2)
                    + (r[0] - p[0]).powi(2)
                    + (r[1] - p[1]).powi(2);
                if !(area > 1e-14 * diam2) {
                    return Err(Dirac2dError::SingularElement {
                        element: c * chunk + off,
                        area,
                    });
                }
                // P1 gradients: grad phi_k = (b_k, c_k) / det
                let bg = [
                    [q[1] - r[1], r[0] - q[0]],
                    [r[1] - p[1], p[0] - r[0]],
                    [p[1] - q[1], q[0] - p[0]],
                ];
                for ii in 0..3 {
                    for jj in 0..3 {
                        let s = area * (bg[ii][0] * bg[jj][0] + bg[ii][1] * bg[jj][1])
                            / (det * det);
                        let m = area / 12.0 * if ii == jj { 2.0 } else { 1.0 };
                        st.push((e[ii] as u32, e[jj] as u32, s));
                        ms.push((e[ii] as u32, e[jj] as u32, m));
                    }
                }
            }
            Ok(ScalarTriplets {
                stiffness: st,
                mass: ms,
            })
        })
        .collect();
    let mut stiffness = Vec::new();
    let mut mass = Vec::new();
    for r in results {
        let r = r?;
        stiffness.extend(r.stiffness);
        mass.extend(r.mass);
    }
    Ok(ScalarTriplets { stiffness, mass })
}

fn boundary_triplets(mesh: &TriangleMesh) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::with_capacity(4 * mesh.boundary_edges.len());
    for be in &mesh.boundary_edges {
        let [p, q] = be.nodes;
        let (pp, pq) = (mesh.points[p], mesh.points[q]);
        let h = (pq[0] - pp[0]).hypot(pq[1] - pp[1]);
        // exact edge mass of linear traces
        out.push((p as u32, p as u32, h / 3.0));
        out.push((q as u32, q as u32, h / 3.0));
        out.push((p as u32, q as u32, h / 6.0));
        out.push((q as u32, p as u32, h / 6.0));
    }
    out
}

/// Component coefficients `(c1, c2)` of every dof owned by a node.
fn node_dof_coeffs(nd: &NodeDofs, buf: &mut Vec<(usize, Complex64, Complex64)>) {
    buf.clear();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match *nd {
        NodeDofs::Interior { psi1, psi2 } => {
            buf.push((psi1, one, zero));
            buf.push((psi2, zero, one));
        }
        NodeDofs::Boundary { dof, phase } => buf.push((dof, one, phase)),
        NodeDofs::Corner => {}
    }
}

/// Reduces a scalar (component-diagonal) matrix into the constrained basis.
fn reduce_scalar(
    triplets: &[(u32, u32, f64)],
    dof_map: &DofMap,
) -> Vec<(u32, u32, Complex64)> {
    let mut out = Vec::with_capacity(4 * triplets.len());
    let mut bi = Vec::new();
    let mut bj = Vec::new();
    for &(i, j, v) in triplets {
        node_dof_coeffs(&dof_map.nodes[i as usize], &mut bi);
        node_dof_coeffs(&dof_map.nodes[j as usize], &mut bj);
        for &(p, ci1, ci2) in &bi {
            for &(q, cj1, cj2) in &bj {
                let w = ci1.conj() * cj1 + ci2.conj() * cj2;
                if w.re != 0.0 || w.im != 0.0 {
                    out.push((p as u32, q as u32, v * w));
                }
            }
        }
    }
    out
}

/// Assembles the reduced Hermitian pencil of `Q` on `mesh` at mass `m`.
pub fn assemble_form(mesh: &TriangleMesh, m: Mass) -> Result<DiscreteForm, Dirac2dError> {
    let dof_map = boundary_constraints(mesh)?;
    let m = m.value();
    let scalar = element_triplets(mesh)?;
    let bd = boundary_triplets(mesh);

    let d = dof_map.n_complex;
    let stiff = HermitianCsr::from_triplets(d, reduce_scalar(&scalar.stiffness, &dof_map));
    let mass_red = HermitianCsr::from_triplets(d, reduce_scalar(&scalar.mass, &dof_map));
    let bd_red = HermitianCsr::from_triplets(d, reduce_scalar(&bd, &dof_map));

    let energy = HermitianCsr::linear_combination(&[(1.0, &stiff), (m, &bd_red)]);
    let a = HermitianCsr::linear_combination(&[(1.0, &stiff), (m * m, &mass_red), (m, &bd_red)]);
    Ok(DiscreteForm {
        a,
        b: mass_red,
        energy,
        dof_map,
        mass: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac2d::mesh::build_mesh;
    use crate::geometry::RightTriangle;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn tri(a: f64, b: f64) -> RightTriangle {
        RightTriangle::new(a, b).unwrap()
    }

    fn random_reduced(form: &DiscreteForm, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..form.dim())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    #[test]
    fn constraint_classification() {
        let mesh = build_mesh(&tri(1.0, 1.0), 4);
        let dm = boundary_constraints(&mesh).unwrap();
        let mut interior = 0;
        let mut boundary = 0;
        let mut corner = 0;
        for nd in &dm.nodes {
            match nd {
                NodeDofs::Interior { .. } => interior += 1,
                NodeDofs::Boundary { .. } => boundary += 1,
                NodeDofs::Corner => corner += 1,
            }
        }
        assert_eq!(corner, 3);
        assert_eq!(boundary, 3 * 4 - 3);
        assert_eq!(interior, 15 - 3 * 4 + 3 - 3 + 3 - 3);
        assert_eq!(interior, 3);
        assert_eq!(dm.n_complex, 2 * interior + boundary);
        // a node on the bottom leg carries the phase 1 relation
        let bottom = mesh
            .boundary_edges
            .iter()
            .find(|e| e.side == 0)
            .unwrap()
            .nodes[1];
        match dm.nodes[bottom] {
            NodeDofs::Boundary { phase, .. } => {
                assert!((phase - Complex64::new(1.0, 0.0)).norm() < 1e-15)
            }
            _ => panic!("expected boundary node"),
        }
    }

    #[test]
    fn untagged_boundary_edge_is_rejected() {
        let mut mesh = build_mesh(&tri(1.0, 1.0), 4);
        mesh.boundary_edges.pop();
        assert!(matches!(
            boundary_constraints(&mesh),
            Err(Dirac2dError::UntaggedBoundaryEdge { .. })
        ));
    }

    #[test]
    fn quadratic_matches_independent_quadrature() {
        // oracle: 7-point Gauss rule per element on the expanded P1 field,
        // exact for the quadratic integrands, plus edge Simpson for traces
        let m = 0.7;
        let mesh = build_mesh(&tri(2.0, 1.0), 6);
        let form = assemble_form(&mesh, crate::geometry::Mass::new(m).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let z = random_reduced(&form, &mut rng);
        let field = form.dof_map.expand(&z);

        let w: [f64; 7] = [
            0.225,
            0.13239415278850616,
            0.13239415278850616,
            0.13239415278850616,
            0.12593918054482717,
            0.12593918054482717,
            0.12593918054482717,
        ];
        let x1 = 0.05971587178976982;
        let x2 = 0.47014206410511505;
        let y1 = 0.7974269853530873;
        let y2 = 0.10128650732345633;
        let bary: [[f64; 3]; 7] = [
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [x2, x2, x1],
            [x2, x1, x2],
            [x1, x2, x2],
            [y2, y2, y1],
            [y2, y1, y2],
            [y1, y2, y2],
        ];
        let mut integral = 0.0;
        for e in &mesh.elements {
            let vals: Vec<(Complex64, Complex64)> = e.iter().map(|&k| field[k]).collect();
            let [p, q, r] = [mesh.points[e[0]], mesh.points[e[1]], mesh.points[e[2]]];
            let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
            let area = 0.5 * det;
            // constant gradient of each component
            let grad = |c: usize| -> (Complex64, Complex64) {
                let f = |k: usize| if c == 0 { vals[k].0 } else { vals[k].1 };
                let gx = (f(0) * (q[1] - r[1]) + f(1) * (r[1] - p[1]) + f(2) * (p[1] - q[1]))
                    / det;
                let gy = (f(0) * (r[0] - q[0]) + f(1) * (p[0] - r[0]) + f(2) * (q[0] - p[0]))
                    / det;
                (gx, gy)
            };
            let (g1x, g1y) = grad(0);
            let (g2x, g2y) = grad(1);
            let grad_sq = g1x.norm_sqr() + g1y.norm_sqr() + g2x.norm_sqr() + g2y.norm_sqr();
            let mut mass_sq = 0.0;
            for (k, wk) in w.iter().enumerate() {
                let u1 = vals[0].0 * bary[k][0] + vals[1].0 * bary[k][1] + vals[2].0 * bary[k][2];
                let u2 = vals[0].1 * bary[k][0] + vals[1].1 * bary[k][1] + vals[2].1 * bary[k][2];
                mass_sq += wk * (u1.norm_sqr() + u2.norm_sqr());
            }
            integral += area * grad_sq + m * m * area * mass_sq;
        }
        for be in &mesh.boundary_edges {
            let (u, v) = (field[be.nodes[0]], field[be.nodes[1]]);
            let pp = mesh.points[be.nodes[0]];
            let pq = mesh.points[be.nodes[1]];
            let h = (pq[0] - pp[0]).hypot(pq[1] - pp[1]);
            // Simpson, exact on products of linears
            let mid = (0.5 * (u.0 + v.0), 0.5 * (u.1 + v.1));
            let f0 = u.0.norm_sqr() + u.1.norm_sqr();
            let f1 = mid.0.norm_sqr() + mid.1.norm_sqr();
            let f2 = v.0.norm_sqr() + v.1.norm_sqr();
            integral += m * h / 6.0 * (f0 + 4.0 * f1 + f2);
        }
        let direct = form.quadratic(&z);
        assert_relative_eq!(direct, integral, max_relative = 1e-10);
    }

    #[test]
    fn zero_mass_removes_boundary_and_mass_terms() {
        let mesh = build_mesh(&tri(1.0, 1.0), 5);
        let f0 = assemble_form(&mesh, crate::geometry::Mass::ZERO).unwrap();
        assert!(f0.a.max_entry_diff(&f0.energy) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = random_reduced(&f0, &mut rng);
        assert_relative_eq!(f0.quadratic(&z), f0.energy.quadratic(&z), max_relative = 1e-14);
    }

    #[test]
    fn form_dominates_mass_squared() {
        let mesh = build_mesh(&tri(1.5, 0.8), 8);
        let m = 2.3;
        let form = assemble_form(&mesh, crate::geometry::Mass::new(m).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z = random_reduced(&form, &mut rng);
            let q = form.quadratic(&z);
            let b = form.mass_quadratic(&z);
            assert!(q >= m * m * b - 1e-10 * q.abs());
        }
    }

    #[test]
    fn hermitian_to_machine_precision() {
        for (a, b, m) in [(1.0, 1.0, 0.0), (2.0, 1.0, 1.0), (0.5, 3.0, 10.0)] {
            let mesh = build_mesh(&tri(a, b), 9);
            let form = assemble_form(&mesh, crate::geometry::Mass::new(m).unwrap()).unwrap();
            assert!(form.hermiticity_defect() < 1e-13);
        }
    }

    #[test]
    fn singular_element_is_rejected() {
        let mut mesh = build_mesh(&tri(1.0, 1.0), 3);
        let e = mesh.elements[0];
        mesh.points[e[1]] = mesh.points[e[0]];
        assert!(matches!(
            assemble_form(&mesh, crate::geometry::Mass::ZERO),
            Err(Dirac2dError::SingularElement { .. })
        ));
    }
}
