//! Conforming triangle meshes with tagged boundary edges.

mod format;
mod triangulate;

pub use format::{parse_mesh, write_mesh};
pub use triangulate::{triangulate, triangulate_opts, MeshOptions};

use std::collections::BTreeMap;

use crate::error::{Result, RwgError};
use crate::geometry::SegmentTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: SegmentTag,
}

/// Triangulation of a polygonal domain. Triangles are positively oriented;
/// every boundary edge carries the tag of the polygon segment it lies on.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Target maximum element size the mesh was built for.
    pub h_max: f64,
    /// Grading exponent used near corner markers.
    pub gamma_mesh: f64,
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            min = min.min(self.triangle_min_angle_deg(t));
        }
        min
    }

    pub fn triangle_min_angle_deg(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let p = [self.nodes[a], self.nodes[b], self.nodes[c]];
        let mut min = f64::INFINITY;
        for i in 0..3 {
            let u = [p[(i + 1) % 3][0] - p[i][0], p[(i + 1) % 3][1] - p[i][1]];
            let v = [p[(i + 2) % 3][0] - p[i][0], p[(i + 2) % 3][1] - p[i][1]];
            let dot = u[0] * v[0] + u[1] * v[1];
            let cross = (u[0] * v[1] - u[1] * v[0]).abs();
            min = min.min(cross.atan2(dot).to_degrees());
        }
        min
    }

    pub fn shortest_edge(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in &self.triangles {
            for i in 0..3 {
                let p = self.nodes[t[i]];
                let q = self.nodes[t[(i + 1) % 3]];
                min = min.min(((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt());
            }
        }
        min
    }

    /// Map from undirected edge to the (1 or 2) triangles sharing it.
    pub fn edge_uses(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                map.entry(key).or_default().push(t);
            }
        }
        map
    }

    /// Full structural check: positive areas, conformity (interior edges
    /// shared by exactly two triangles, boundary edges by exactly one and
    /// tagged), index ranges, and the minimum-angle bound. The angle bound
    /// is capped by the sharpest input corner when the polygon itself has
    /// an angle below `min_angle_deg`.
    pub fn validate(&self, min_angle_deg: f64) -> Result<()> {
        let n = self.nodes.len();
        for (i, p) in self.nodes.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(RwgError::Mesh(format!("node {i} not finite")));
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(RwgError::Mesh(format!("triangle {t} references missing node")));
            }
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                return Err(RwgError::Mesh(format!("triangle {t} has non-positive area {area}")));
            }
        }
        let uses = self.edge_uses();
        let mut tagged: BTreeMap<(usize, usize), SegmentTag> = BTreeMap::new();
        for e in &self.boundary_edges {
            if e.a >= n || e.b >= n {
                return Err(RwgError::Mesh("boundary edge references missing node".into()));
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            if tagged.insert(key, e.tag).is_some() {
                return Err(RwgError::Mesh(format!("duplicate boundary edge {key:?}")));
            }
        }
        for (key, ts) in &uses {
            match ts.len() {
                1 => {
                    if !tagged.contains_key(key) {
                        return Err(RwgError::Mesh(format!("edge {key:?} on the boundary but untagged")));
                    }
                }
                2 => {
                    if tagged.contains_key(key) {
                        return Err(RwgError::Mesh(format!("interior edge {key:?} carries a boundary tag")));
                    }
                }
                k => return Err(RwgError::Mesh(format!("edge {key:?} used by {k} triangles"))),
            }
        }
        for key in tagged.keys() {
            if !uses.contains_key(key) {
                return Err(RwgError::Mesh(format!("tagged edge {key:?} not part of any triangle")));
            }
        }
        let min = self.min_angle_deg();
        if min < min_angle_deg {
            return Err(RwgError::Mesh(format!(
                "minimum angle {min:.2}° below required {min_angle_deg:.2}°"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SegmentTag;

    pub fn square_mesh_two_tris() -> Mesh {
        Mesh {
            nodes: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            boundary_edges: vec![
                BoundaryEdge { a: 0, b: 1, tag: SegmentTag::Dirichlet },
                BoundaryEdge { a: 1, b: 2, tag: SegmentTag::Gamma2 },
                BoundaryEdge { a: 2, b: 3, tag: SegmentTag::Dirichlet },
                BoundaryEdge { a: 3, b: 0, tag: SegmentTag::Gamma1 },
            ],
            h_max: 2.0,
            gamma_mesh: 0.0,
        }
    }

    #[test]
    fn two_triangle_square_validates() {
        let m = square_mesh_two_tris();
        m.validate(20.0).unwrap();
        assert!((m.triangle_area(0) - 0.5).abs() < 1e-15);
        assert!((m.min_angle_deg() - 45.0).abs() < 1e-9);
    }

    #[test]
    fn flipped_triangle_fails() {
        let mut m = square_mesh_two_tris();
        m.triangles[0] = [0, 2, 1];
        assert!(m.validate(20.0).is_err());
    }

    #[test]
    fn missing_tag_fails() {
        let mut m = square_mesh_two_tris();
        m.boundary_edges.pop();
        assert!(m.validate(20.0).is_err());
    }
}
