//! Point evaluation of finite-element solutions via a uniform-grid locator.

use num_complex::Complex64;

use crate::error::{Result, RwgError};
use crate::mesh::Mesh;

use super::{shape_values, FemSolution};

pub(crate) struct PointLocator {
    lo: [f64; 2],
    inv_cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl PointLocator {
    pub(crate) fn build(mesh: &Mesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &mesh.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let ntri = mesh.triangles.len().max(1);
        let area = (hi[0] - lo[0]).max(1e-300) * (hi[1] - lo[1]).max(1e-300);
        let cell = (area / ntri as f64).sqrt().max(1e-12) * 2.0;
        let nx = (((hi[0] - lo[0]) / cell).ceil() as usize).clamp(1, 4096);
        let ny = (((hi[1] - lo[1]) / cell).ceil() as usize).clamp(1, 4096);
        let cell_x = (hi[0] - lo[0]).max(1e-300) / nx as f64;
        let cell_y = (hi[1] - lo[1]).max(1e-300) / ny as f64;
        let cell = cell_x.max(cell_y);
        let mut cells = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let (mut tlo, mut thi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for &v in tri {
                for k in 0..2 {
                    tlo[k] = tlo[k].min(mesh.nodes[v][k]);
                    thi[k] = thi[k].max(mesh.nodes[v][k]);
                }
            }
            let i0 = (((tlo[0] - lo[0]) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((thi[0] - lo[0]) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((tlo[1] - lo[1]) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            let j1 = (((thi[1] - lo[1]) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * nx + i].push(t as u32);
                }
            }
        }
        PointLocator { lo, inv_cell: 1.0 / cell, nx, ny, cells }
    }

    /// Returns the containing triangle and barycentric coordinates, or None.
    pub(crate) fn locate(&self, mesh: &Mesh, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let i = (((p[0] - self.lo[0]) * self.inv_cell).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = (((p[1] - self.lo[1]) * self.inv_cell).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        let mut consider = |t: usize, best: &mut Option<(usize, [f64; 3], f64)>| {
            if let Some(lam) = barycentric(mesh, t, p) {
                let min_l = lam[0].min(lam[1]).min(lam[2]);
                if best.as_ref().map_or(true, |b| min_l > b.2) {
                    *best = Some((t, lam, min_l));
                }
            }
        };
        for &t in &self.cells[j * self.nx + i] {
            consider(t as usize, &mut best);
        }
        match best {
            Some((t, lam, min_l)) if min_l >= -1e-10 => Some((t, lam)),
            _ => {
                // fall back to scanning neighbouring cells, then give up
                for dj in -1isize..=1 {
                    for di in -1isize..=1 {
                        let ii = (i as isize + di).clamp(0, self.nx as isize - 1) as usize;
                        let jj = (j as isize + dj).clamp(0, self.ny as isize - 1) as usize;
                        for &t in &self.cells[jj * self.nx + ii] {
                            consider(t as usize, &mut best);
                        }
                    }
                }
                match best {
                    Some((t, lam, min_l)) if min_l >= -1e-10 => Some((t, lam)),
                    _ => None,
                }
            }
        }
    }
}

fn barycentric(mesh: &Mesh, t: usize, p: [f64; 2]) -> Option<[f64; 3]> {
    let [a, b, c] = mesh.triangles[t];
    let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
    let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
    if det == 0.0 {
        return None;
    }
    let l1 = ((p[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (p[1] - pa[1])) / det;
    let l2 = ((pb[0] - pa[0]) * (p[1] - pa[1]) - (p[0] - pa[0]) * (pb[1] - pa[1])) / det;
    Some([1.0 - l1 - l2, l1, l2])
}

pub(crate) fn evaluate(sol: &FemSolution, points: &[[f64; 2]]) -> Result<Vec<Complex64>> {
    let forms = &sol.forms;
    let mesh = &forms.mesh;
    let mut out = Vec::with_capacity(points.len());
    for (idx, &p) in points.iter().enumerate() {
        let (t, lam) = forms
            .locator()
            .locate(mesh, p)
            .ok_or(RwgError::PointOutsideDomain { index: idx, x: p[0], y: p[1] })?;
        let s = shape_values(forms.order, lam);
        let elem = &forms.elems[t];
        let mut v = Complex64::ZERO;
        for i in 0..forms.order.nodes_per_tri() {
            v += sol.values[elem[i]] * s[i];
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, ElementOrder};
    use crate::geometry::{PolygonalBoundary, SegmentTag};
    use crate::mesh::triangulate;
    use std::sync::Arc;

    fn interpolant(order: ElementOrder, f: &dyn Fn([f64; 2]) -> f64) -> FemSolution {
        let b = PolygonalBoundary {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            segments: (0..4).map(|i| (i, (i + 1) % 4, SegmentTag::Gamma1)).collect(),
            corner_markers: vec![],
        };
        let mesh = Arc::new(triangulate(&b, 0.25, 0.0).unwrap());
        let forms = Arc::new(assemble(&mesh, order).unwrap());
        let values = forms.fe_nodes.iter().map(|&p| Complex64::new(f(p), 0.0)).collect();
        FemSolution { forms, values, k_sq: 0.0 }
    }

    #[test]
    fn nodal_points_are_exact() {
        let sol = interpolant(ElementOrder::P2, &|p| p[0] * p[0] - p[1] * p[1] + 0.5 * p[0] * p[1]);
        let pts: Vec<[f64; 2]> = sol.forms.fe_nodes.clone();
        let vals = sol.evaluate(&pts).unwrap();
        for (v, &p) in vals.iter().zip(&pts) {
            let exact = p[0] * p[0] - p[1] * p[1] + 0.5 * p[0] * p[1];
            assert!((v.re - exact).abs() < 1e-13, "{} vs {exact}", v.re);
        }
    }

    #[test]
    fn constant_field_everywhere() {
        let sol = interpolant(ElementOrder::P1, &|_| 4.25);
        let v = sol.evaluate_one([0.37, 0.613]).unwrap();
        assert!((v.re - 4.25).abs() < 1e-13);
    }

    #[test]
    fn quadratic_exact_for_p2() {
        let sol = interpolant(ElementOrder::P2, &|p| p[0] * p[0] - p[1] * p[1]);
        let v = sol.evaluate_one([0.311, 0.729]).unwrap();
        let exact = 0.311f64.powi(2) - 0.729f64.powi(2);
        assert!((v.re - exact).abs() < 1e-13, "{} vs {exact}", v.re);
    }

    #[test]
    fn outside_point_errors_with_index() {
        let sol = interpolant(ElementOrder::P1, &|_| 1.0);
        let err = sol.evaluate(&[[0.5, 0.5], [2.0, 2.0]]).unwrap_err();
        match err {
            RwgError::PointOutsideDomain { index, .. } => assert_eq!(index, 1),
            e => panic!("unexpected error {e}"),
        }
    }
}
