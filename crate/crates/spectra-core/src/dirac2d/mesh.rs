//! Structured triangulations of the right triangle and the generic mesh
//! container shared with the polygon assembler.

use crate::geometry::{boundary_phases, RightTriangle};
use num_complex::Complex64;

/// One straight boundary side: outward unit normal and the spinor trace
/// phase imposed along it.
#[derive(Debug, Clone, Copy)]
pub struct SideSpec {
    pub normal: [f64; 2],
    pub phase: Complex64,
}

/// A boundary sub-edge, tagged with the side it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub side: usize,
}

/// Conforming triangulation with tagged boundary and corner data.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub points: Vec<[f64; 2]>,
    /// Positively oriented node triples.
    pub elements: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub sides: Vec<SideSpec>,
    /// Nodes where two sides with different phases meet.
    pub corner_nodes: Vec<usize>,
    /// Subdivision count along each side.
    pub subdivisions: usize,
}

impl TriangleMesh {
    pub fn n_nodes(&self) -> usize {
        self.points.len()
    }

    /// Sum of signed element areas.
    pub fn total_area(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| {
                let [p, q, r] = [self.points[e[0]], self.points[e[1]], self.points[e[2]]];
                0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
            })
            .sum()
    }

    /// Copy of the mesh with every side phase recomputed from its outward
    /// normal as `i (n1 + i n2)`.
    pub fn with_phases_from_normals(&self) -> TriangleMesh {
        let mut out = self.clone();
        for side in &mut out.sides {
            side.phase = infinite_mass_phase(side.normal);
        }
        out
    }
}

/// The infinite-mass trace phase `i (n1 + i n2) = (-n2, n1)` of an outward
/// unit normal.
pub fn infinite_mass_phase(normal: [f64; 2]) -> Complex64 {
    Complex64::new(-normal[1], normal[0])
}

/// Index of the structured node `(i, j)` on the subdivision-`n` triangle
/// (row-major over `j`, with row `j` holding `n + 1 - j` nodes).
pub(crate) fn structured_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i + j <= n);
    j * (2 * n + 3 - j) / 2 + i
}

/// Structured mesh of the right triangle with `n` subdivisions per leg:
/// `(n+1)(n+2)/2` nodes and `n^2` positively oriented elements.
pub fn build_mesh(tri: &RightTriangle, n: usize) -> TriangleMesh {
    assert!(n >= 2, "build_mesh requires n >= 2, got {n}");
    let (a, b) = (tri.a(), tri.b());
    let idx = |i: usize, j: usize| structured_index(n, i, j);
    let mut points = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for j in 0..=n {
        for i in 0..=(n - j) {
            points.push([a * i as f64 / n as f64, b * j as f64 / n as f64]);
        }
    }
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..(n - j) {
            elements.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            if i + j + 1 < n {
                elements.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    let mut boundary_edges = Vec::with_capacity(3 * n);
    for i in 0..n {
        boundary_edges.push(BoundaryEdge {
            nodes: [idx(i, 0), idx(i + 1, 0)],
            side: 0,
        });
        boundary_edges.push(BoundaryEdge {
            nodes: [idx(0, i), idx(0, i + 1)],
            side: 1,
        });
        boundary_edges.push(BoundaryEdge {
            nodes: [idx(n - i, i), idx(n - i - 1, i + 1)],
            side: 2,
        });
    }
    let phases = boundary_phases(tri);
    let h = tri.hypotenuse();
    let sides = vec![
        SideSpec {
            normal: [0.0, -1.0],
            phase: Complex64::new(1.0, 0.0),
        },
        SideSpec {
            normal: [-1.0, 0.0],
            phase: Complex64::new(0.0, -1.0),
        },
        SideSpec {
            normal: [b / h, a / h],
            phase: phases.ab_phase,
        },
    ];
    TriangleMesh {
        points,
        elements,
        boundary_edges,
        sides,
        corner_nodes: vec![idx(0, 0), idx(n, 0), idx(0, n)],
        subdivisions: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn counts_match_closed_forms() {
        let tri = RightTriangle::new(1.0, 1.0).unwrap();
        let mesh = build_mesh(&tri, 2);
        assert_eq!(mesh.n_nodes(), 6);
        assert_eq!(mesh.elements.len(), 4);
        assert_eq!(mesh.boundary_edges.len(), 6);

        let tri2 = RightTriangle::new(2.0, 1.0).unwrap();
        let mesh2 = build_mesh(&tri2, 64);
        assert_eq!(mesh2.n_nodes(), 2145);
        assert_eq!(mesh2.elements.len(), 64 * 64);
    }

    #[test]
    fn element_areas_sum_to_triangle_area() {
        for (a, b, n) in [(1.0, 1.0, 7), (2.0, 1.0, 16), (0.3, 5.0, 33)] {
            let tri = RightTriangle::new(a, b).unwrap();
            let mesh = build_mesh(&tri, n);
            assert_relative_eq!(mesh.total_area(), tri.area(), max_relative = 1e-12);
        }
    }

    #[test]
    fn elements_positively_oriented() {
        let tri = RightTriangle::new(2.0, 1.0).unwrap();
        let mesh = build_mesh(&tri, 9);
        for e in &mesh.elements {
            let [p, q, r] = [mesh.points[e[0]], mesh.points[e[1]], mesh.points[e[2]]];
            let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
            assert!(det > 0.0);
        }
    }

    #[test]
    fn normal_phases_match_named_phases() {
        for (a, b) in [(1.0, 1.0), (2.0, 1.0), (0.4, 3.0)] {
            let tri = RightTriangle::new(a, b).unwrap();
            let mesh = build_mesh(&tri, 4);
            let generic = mesh.with_phases_from_normals();
            for (s, g) in mesh.sides.iter().zip(&generic.sides) {
                assert!((s.phase - g.phase).norm() < 1e-15);
            }
        }
    }
}
