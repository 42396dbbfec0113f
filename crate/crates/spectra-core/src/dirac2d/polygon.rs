//! Simple-polygon domains: validation, ear-clipping triangulation, and
//! uniform refinement into the shared mesh container.

use super::mesh::{infinite_mass_phase, BoundaryEdge, SideSpec, TriangleMesh};
use super::Dirac2dError;
use std::collections::BTreeMap;

/// A simple polygon with counterclockwise vertices.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - o[0]) * (q[1] - o[1]) - (q[0] - o[0]) * (p[1] - o[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self, Dirac2dError> {
        let n = vertices.len();
        if n < 3 {
            return Err(Dirac2dError::TooFewVertices(n));
        }
        let signed_area: f64 = (0..n)
            .map(|i| {
                let p = vertices[i];
                let q = vertices[(i + 1) % n];
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
            * 0.5;
        if !(signed_area > 0.0) {
            return Err(Dirac2dError::NotCounterClockwise(signed_area));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // skip adjacent sides (they share an endpoint)
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (p1, p2) = (vertices[i], vertices[(i + 1) % n]);
                let (q1, q2) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(p1, p2, q1, q2) {
                    return Err(Dirac2dError::SelfIntersecting { e0: i, e1: j });
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }
}

fn point_in_triangle(pt: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    let scale = cross(a, b, c).abs().max(f64::MIN_POSITIVE);
    let tol = -1e-12 * scale;
    cross(a, b, pt) >= tol && cross(b, c, pt) >= tol && cross(c, a, pt) >= tol
}

fn ear_clip(vertices: &[[f64; 2]]) -> Result<Vec<[usize; 3]>, Dirac2dError> {
    let mut remaining: Vec<usize> = (0..vertices.len()).collect();
    let mut triangles = Vec::with_capacity(vertices.len() - 2);
    while remaining.len() > 3 {
        let n = remaining.len();
        let mut clipped = false;
        for k in 0..n {
            let (ip, i, inx) = (
                remaining[(k + n - 1) % n],
                remaining[k],
                remaining[(k + 1) % n],
            );
            let (a, b, c) = (vertices[ip], vertices[i], vertices[inx]);
            if cross(a, b, c) <= 0.0 {
                continue;
            }
            let blocked = remaining.iter().any(|&other| {
                other != ip
                    && other != i
                    && other != inx
                    && point_in_triangle(vertices[other], a, b, c)
            });
            if !blocked {
                triangles.push([ip, i, inx]);
                remaining.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return Err(Dirac2dError::EarClippingFailed);
        }
    }
    triangles.push([remaining[0], remaining[1], remaining[2]]);
    Ok(triangles)
}

/// Meshes the polygon: ear-clipping triangulation followed by `refinements`
/// rounds of uniform 4-way refinement. Side phases come from the outward
/// normals; vertices joining sides with different phases become corners.
pub fn build_polygon_mesh(
    poly: &Polygon,
    refinements: usize,
) -> Result<TriangleMesh, Dirac2dError> {
    let verts = poly.vertices();
    let n_sides = verts.len();
    let mut points: Vec<[f64; 2]> = verts.to_vec();
    let mut elements = ear_clip(verts)?;
    let mut boundary: Vec<BoundaryEdge> = (0..n_sides)
        .map(|i| BoundaryEdge {
            nodes: [i, (i + 1) % n_sides],
            side: i,
        })
        .collect();

    for _ in 0..refinements {
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |p: usize, q: usize, points: &mut Vec<[f64; 2]>| -> usize {
            let key = (p.min(q), p.max(q));
            *midpoints.entry(key).or_insert_with(|| {
                let m = [
                    0.5 * (points[p][0] + points[q][0]),
                    0.5 * (points[p][1] + points[q][1]),
                ];
                points.push(m);
                points.len() - 1
            })
        };
        let mut next_elements = Vec::with_capacity(4 * elements.len());
        for e in &elements {
            let [p, q, r] = *e;
            let pq = midpoint(p, q, &mut points);
            let qr = midpoint(q, r, &mut points);
            let rp = midpoint(r, p, &mut points);
            next_elements.push([p, pq, rp]);
            next_elements.push([pq, q, qr]);
            next_elements.push([rp, qr, r]);
            next_elements.push([pq, qr, rp]);
        }
        elements = next_elements;
        let mut next_boundary = Vec::with_capacity(2 * boundary.len());
        for be in &boundary {
            let m = midpoint(be.nodes[0], be.nodes[1], &mut points);
            next_boundary.push(BoundaryEdge {
                nodes: [be.nodes[0], m],
                side: be.side,
            });
            next_boundary.push(BoundaryEdge {
                nodes: [m, be.nodes[1]],
                side: be.side,
            });
        }
        boundary = next_boundary;
    }

    let sides: Vec<SideSpec> = (0..n_sides)
        .map(|i| {
            let p = verts[i];
            let q = verts[(i + 1) % n_sides];
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            let normal = [(q[1] - p[1]) / len, -(q[0] - p[0]) / len];
            SideSpec {
                normal,
                phase: infinite_mass_phase(normal),
            }
        })
        .collect();
    let corner_nodes: Vec<usize> = (0..n_sides)
        .filter(|&i| {
            let prev = (i + n_sides - 1) % n_sides;
            (sides[prev].phase - sides[i].phase).norm() > 1e-12
        })
        .collect();

    Ok(TriangleMesh {
        points,
        elements,
        boundary_edges: boundary,
        sides,
        corner_nodes,
        subdivisions: 1 << refinements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_polygons() {
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]),
            Err(Dirac2dError::TooFewVertices(2))
        ));
        // clockwise square
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]),
            Err(Dirac2dError::NotCounterClockwise(_))
        ));
        // one crossing pair of non-adjacent sides, positive signed area
        assert!(matches!(
            Polygon::new(vec![
                [0.0, 0.0],
                [4.0, 0.0],
                [4.0, 3.0],
                [1.0, -1.0],
                [0.0, 3.0]
            ]),
            Err(Dirac2dError::SelfIntersecting { .. })
        ));
    }

    #[test]
    fn square_mesh_counts_and_area() {
        let sq = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let mesh = build_polygon_mesh(&sq, 3).unwrap();
        assert_eq!(mesh.elements.len(), 2 * 64);
        assert_relative_eq!(mesh.total_area(), 1.0, max_relative = 1e-13);
        assert_eq!(mesh.corner_nodes.len(), 4);
        // every boundary edge keeps a valid side tag
        for be in &mesh.boundary_edges {
            assert!(be.side < 4);
        }
    }

    #[test]
    fn pentagon_meshes_cleanly() {
        let pent = Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [4.0, 1.0],
            [3.0, 2.5],
            [1.0, 2.0],
        ])
        .unwrap();
        let mesh = build_polygon_mesh(&pent, 2).unwrap();
        assert_eq!(mesh.elements.len(), 3 * 16);
        let shoelace: f64 = {
            let v = pent.vertices();
            (0..5)
                .map(|i| {
                    let p = v[i];
                    let q = v[(i + 1) % 5];
                    p[0] * q[1] - q[0] * p[1]
                })
                .sum::<f64>()
                * 0.5
        };
        assert_relative_eq!(mesh.total_area(), shoelace, max_relative = 1e-12);
        for e in &mesh.elements {
            let [p, q, r] = [mesh.points[e[0]], mesh.points[e[1]], mesh.points[e[2]]];
            assert!(cross(p, q, r) > 0.0);
        }
    }
}
