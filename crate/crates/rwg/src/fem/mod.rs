//! Lagrange finite elements on triangle meshes: form assembly, complex
//! Robin solves, generalized Dirichlet eigenproblems, point evaluation and
//! radial coefficient extraction at corners.

mod corner;
mod eigen;
mod evaluate;
pub(crate) mod quad;
mod solver;

pub use corner::{corner_coefficient, CornerFit, CornerFitSpec, RadialModel};
pub use eigen::{solve_eigen, EigenPair};
pub use solver::{solve_robin, solve_robin_real, RobinBc, RobinSystem};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, RwgError};
use crate::geometry::SegmentTag;
use crate::mesh::Mesh;
use quad::{gauss_legendre_unit, TRI_DEG2, TRI_DEG4};

/// Polynomial order of the Lagrange elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    P1,
    P2,
}

impl ElementOrder {
    pub fn nodes_per_tri(self) -> usize {
        match self {
            ElementOrder::P1 => 3,
            ElementOrder::P2 => 6,
        }
    }

    pub fn nodes_per_edge(self) -> usize {
        match self {
            ElementOrder::P1 => 2,
            ElementOrder::P2 => 3,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(ElementOrder::P1),
            2 => Ok(ElementOrder::P2),
            _ => Err(RwgError::Config(format!("element order must be 1 or 2, got {v}"))),
        }
    }
}

/// Boundary edge with its finite-element trace nodes and geometry.
#[derive(Debug, Clone)]
pub struct BEdgeElem {
    pub tag: SegmentTag,
    /// `[end0, end1, mid]`; `mid` is unused for P1.
    pub fe_nodes: [usize; 3],
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub len: f64,
}

impl BEdgeElem {
    pub fn point(&self, t: f64) -> [f64; 2] {
        [self.p0[0] + t * (self.p1[0] - self.p0[0]), self.p0[1] + t * (self.p1[1] - self.p0[1])]
    }
}

/// Assembled stiffness/mass/boundary-mass forms on the free (non-Dirichlet)
/// degrees of freedom, plus the dof bookkeeping needed to evaluate solutions.
///
/// Immutable after construction and safe to share across threads.
pub struct AssembledForms {
    pub mesh: Arc<Mesh>,
    pub order: ElementOrder,
    /// All FE node coordinates: mesh vertices first, then edge midpoints (P2).
    pub fe_nodes: Vec<[f64; 2]>,
    /// Per-triangle FE node indices (first 3 valid for P1).
    pub elems: Vec<[usize; 6]>,
    /// FE node → free dof index, `usize::MAX` for Dirichlet nodes.
    pub free_of_node: Vec<usize>,
    /// Free dof index → FE node.
    pub node_of_free: Vec<usize>,
    /// Stiffness ∫∇u·∇v triplets on free dofs.
    pub k_trip: Vec<(usize, usize, f64)>,
    /// Mass ∫uv triplets on free dofs.
    pub m_trip: Vec<(usize, usize, f64)>,
    /// Boundary mass ∫_Γ uv triplets per tag, on free dofs.
    pub b_trip: BTreeMap<SegmentTag, Vec<(usize, usize, f64)>>,
    /// Boundary edges with FE trace information.
    pub boundary_elems: Vec<BEdgeElem>,
    locator: evaluate::PointLocator,
    edge_rule: Vec<(f64, f64)>,
}

impl AssembledForms {
    pub fn n_free(&self) -> usize {
        self.node_of_free.len()
    }

    pub fn boundary_with_tag(&self, tag: SegmentTag) -> impl Iterator<Item = &BEdgeElem> {
        self.boundary_elems.iter().filter(move |e| e.tag == tag)
    }

    pub(crate) fn locator(&self) -> &evaluate::PointLocator {
        &self.locator
    }

    /// 4-point Gauss rule on [0,1] used for all boundary quadrature.
    pub fn edge_rule(&self) -> &[(f64, f64)] {
        &self.edge_rule
    }

    /// Trace of a nodal field along a boundary edge at parameter `t`.
    pub fn edge_trace(&self, e: &BEdgeElem, t: f64, values: &[Complex64]) -> Complex64 {
        match self.order {
            ElementOrder::P1 => {
                values[e.fe_nodes[0]] * (1.0 - t) + values[e.fe_nodes[1]] * t
            }
            ElementOrder::P2 => {
                values[e.fe_nodes[0]] * ((1.0 - t) * (1.0 - 2.0 * t))
                    + values[e.fe_nodes[1]] * (t * (2.0 * t - 1.0))
                    + values[e.fe_nodes[2]] * (4.0 * t * (1.0 - t))
            }
        }
    }

    /// Boundary load vector `∫_Γtag g·φ_i ds` on free dofs.
    pub fn boundary_load(&self, tag: SegmentTag, g: &dyn Fn([f64; 2]) -> Complex64) -> Vec<Complex64> {
        let mut load = vec![Complex64::ZERO; self.n_free()];
        for e in self.boundary_with_tag(tag) {
            for &(t, w) in &self.edge_rule {
                let x = e.point(t);
                let gv = g(x) * (w * e.len);
                let shp: [f64; 3] = match self.order {
                    ElementOrder::P1 => [1.0 - t, t, 0.0],
                    ElementOrder::P2 => [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
                };
                for k in 0..self.order.nodes_per_edge() {
                    let dof = self.free_of_node[e.fe_nodes[k]];
                    if dof != usize::MAX {
                        load[dof] += gv * shp[k];
                    }
                }
            }
        }
        load
    }

    /// L² inner product of two trace functions over the tagged boundary:
    /// `∫ f(s) conj(g(s)) ds` with both given as closures of (edge, t).
    pub fn boundary_inner<F, G>(&self, tag: SegmentTag, f: F, g: G) -> Complex64
    where
        F: Fn(&BEdgeElem, f64) -> Complex64,
        G: Fn(&BEdgeElem, f64) -> Complex64,
    {
        let mut acc = Complex64::ZERO;
        for e in self.boundary_with_tag(tag) {
            for &(t, w) in &self.edge_rule {
                acc += f(e, t) * g(e, t).conj() * (w * e.len);
            }
        }
        acc
    }
}

/// Assembles stiffness, mass and per-tag boundary-mass forms.
///
/// Element integrals are exact for the polynomial products of the chosen
/// order (degree-2 rule for stiffness, degree-4 for mass, 4-point Gauss on
/// edges). Dirichlet dofs (nodes on `DIRICHLET` edges) are eliminated.
pub fn assemble(mesh: &Arc<Mesh>, order: ElementOrder) -> Result<AssembledForms> {
    let nv = mesh.nodes.len();
    let mut fe_nodes = mesh.nodes.clone();
    let mut elems: Vec<[usize; 6]> = Vec::with_capacity(mesh.triangles.len());

    // midpoint nodes for P2
    let mut edge_mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(ti);
        if !(area > 0.0) || !area.is_finite() {
            return Err(RwgError::Assembly(format!("triangle {ti} is degenerate (area {area})")));
        }
        let mut elem = [0usize; 6];
        elem[..3].copy_from_slice(tri);
        if order == ElementOrder::P2 {
            for i in 0..3 {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let key = (a.min(b), a.max(b));
                let mid = *edge_mid.entry(key).or_insert_with(|| {
                    let p = mesh.nodes[key.0];
                    let q = mesh.nodes[key.1];
                    fe_nodes.push([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]);
                    fe_nodes.len() - 1
                });
                elem[3 + i] = mid;
            }
        }
        elems.push(elem);
    }

    // Dirichlet nodes: endpoints and midnodes of DIRICHLET boundary edges.
    let mut dirichlet = vec![false; fe_nodes.len()];
    let mut boundary_elems = Vec::with_capacity(mesh.boundary_edges.len());
    for be in &mesh.boundary_edges {
        let key = (be.a.min(be.b), be.a.max(be.b));
        let mid = if order == ElementOrder::P2 {
            *edge_mid
                .get(&key)
                .ok_or_else(|| RwgError::Assembly(format!("boundary edge {key:?} not part of any triangle")))?
        } else {
            usize::MAX
        };
        if be.tag == SegmentTag::Dirichlet {
            dirichlet[be.a] = true;
            dirichlet[be.b] = true;
            if mid != usize::MAX {
                dirichlet[mid] = true;
            }
        }
        let p0 = mesh.nodes[be.a];
        let p1 = mesh.nodes[be.b];
        let len = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
        boundary_elems.push(BEdgeElem { tag: be.tag, fe_nodes: [be.a, be.b, mid], p0, p1, len });
    }

    let mut free_of_node = vec![usize::MAX; fe_nodes.len()];
    let mut node_of_free = Vec::new();
    for (i, &d) in dirichlet.iter().enumerate() {
        if !d {
            free_of_node[i] = node_of_free.len();
            node_of_free.push(i);
        }
    }

    // volume forms
    let n_en = order.nodes_per_tri();
    let mut k_trip = Vec::new();
    let mut m_trip = Vec::new();
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let area = mesh.triangle_area(ti);
        // constant barycentric gradients
        let grads = [
            [(p[1][1] - p[2][1]) / (2.0 * area), (p[2][0] - p[1][0]) / (2.0 * area)],
            [(p[2][1] - p[0][1]) / (2.0 * area), (p[0][0] - p[2][0]) / (2.0 * area)],
            [(p[0][1] - p[1][1]) / (2.0 * area), (p[1][0] - p[0][0]) / (2.0 * area)],
        ];
        let elem = &elems[ti];

        let mut ke = [[0.0f64; 6]; 6];
        for (&(l1, l2), &w) in TRI_DEG2.points.iter().zip(TRI_DEG2.weights) {
            let lam = [1.0 - l1 - l2, l1, l2];
            let g = shape_gradients(order, lam, &grads);
            for i in 0..n_en {
                for j in 0..n_en {
                    ke[i][j] += w * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        let mut me = [[0.0f64; 6]; 6];
        for (&(l1, l2), &w) in TRI_DEG4.points.iter().zip(TRI_DEG4.weights) {
            let lam = [1.0 - l1 - l2, l1, l2];
            let s = shape_values(order, lam);
            for i in 0..n_en {
                for j in 0..n_en {
                    me[i][j] += w * area * s[i] * s[j];
                }
            }
        }
        for i in 0..n_en {
            let gi = free_of_node[elem[i]];
            if gi == usize::MAX {
                continue;
            }
            for j in 0..n_en {
                let gj = free_of_node[elem[j]];
                if gj == usize::MAX {
                    continue;
                }
                k_trip.push((gi, gj, ke[i][j]));
                m_trip.push((gi, gj, me[i][j]));
            }
        }
    }

    // boundary mass per tag
    let edge_rule = gauss_legendre_unit(4);
    let mut b_trip: BTreeMap<SegmentTag, Vec<(usize, usize, f64)>> = BTreeMap::new();
    for e in &boundary_elems {
        let trip = b_trip.entry(e.tag).or_default();
        let npe = order.nodes_per_edge();
        let mut be_mat = [[0.0f64; 3]; 3];
        for &(t, w) in &edge_rule {
            let shp: [f64; 3] = match order {
                ElementOrder::P1 => [1.0 - t, t, 0.0],
                ElementOrder::P2 => [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
            };
            for i in 0..npe {
                for j in 0..npe {
                    be_mat[i][j] += w * e.len * shp[i] * shp[j];
                }
            }
        }
        for i in 0..npe {
            let gi = free_of_node[e.fe_nodes[i]];
            if gi == usize::MAX {
                continue;
            }
            for j in 0..npe {
                let gj = free_of_node[e.fe_nodes[j]];
                if gj == usize::MAX {
                    continue;
                }
                trip.push((gi, gj, be_mat[i][j]));
            }
        }
    }

    let locator = evaluate::PointLocator::build(mesh);
    Ok(AssembledForms {
        mesh: Arc::clone(mesh),
        order,
        fe_nodes,
        elems,
        free_of_node,
        node_of_free,
        k_trip,
        m_trip,
        b_trip,
        boundary_elems,
        locator,
        edge_rule,
    })
}

/// Shape function values at barycentric coordinates.
pub(crate) fn shape_values(order: ElementOrder, lam: [f64; 3]) -> [f64; 6] {
    match order {
        ElementOrder::P1 => [lam[0], lam[1], lam[2], 0.0, 0.0, 0.0],
        ElementOrder::P2 => [
            lam[0] * (2.0 * lam[0] - 1.0),
            lam[1] * (2.0 * lam[1] - 1.0),
            lam[2] * (2.0 * lam[2] - 1.0),
            4.0 * lam[1] * lam[2],
            4.0 * lam[2] * lam[0],
            4.0 * lam[0] * lam[1],
        ],
    }
}

/// Shape function gradients given the (constant) barycentric gradients.
fn shape_gradients(order: ElementOrder, lam: [f64; 3], gl: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut g = [[0.0f64; 2]; 6];
    match order {
        ElementOrder::P1 => {
            g[..3].copy_from_slice(gl);
        }
        ElementOrder::P2 => {
            for i in 0..3 {
                let f = 4.0 * lam[i] - 1.0;
                g[i] = [f * gl[i][0], f * gl[i][1]];
            }
            let pairs = [(1, 2), (2, 0), (0, 1)];
            for (k, &(a, b)) in pairs.iter().enumerate() {
                g[3 + k] = [
                    4.0 * (lam[a] * gl[b][0] + lam[b] * gl[a][0]),
                    4.0 * (lam[a] * gl[b][1] + lam[b] * gl[a][1]),
                ];
            }
        }
    }
    g
}

/// Complex nodal field over a mesh; Dirichlet nodes hold exact zeros.
#[derive(Clone)]
pub struct FemSolution {
    pub forms: Arc<AssembledForms>,
    /// Values on all FE nodes.
    pub values: Vec<Complex64>,
    /// The k² the solve was performed at (0 for Laplace problems).
    pub k_sq: f64,
}

impl FemSolution {
    pub fn evaluate(&self, points: &[[f64; 2]]) -> Result<Vec<Complex64>> {
        evaluate::evaluate(self, points)
    }

    pub fn evaluate_one(&self, p: [f64; 2]) -> Result<Complex64> {
        Ok(evaluate::evaluate(self, std::slice::from_ref(&p))?[0])
    }

    /// Maximum |value| over all nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// CSV export: `node_index,x,y,re,im`.
    pub fn export_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "node_index,x,y,re,im")?;
        for (i, (p, v)) in self.forms.fe_nodes.iter().zip(&self.values).enumerate() {
            writeln!(w, "{},{:.16e},{:.16e},{:.16e},{:.16e}", i, p[0], p[1], v.re, v.im)?;
        }
        Ok(())
    }
}
