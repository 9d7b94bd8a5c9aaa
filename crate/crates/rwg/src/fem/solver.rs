//! Sparse direct solves for the Robin-Helmholtz systems.
//!
//! The discrete operator is `A = K − k²·M + Σ_tag σ_tag·B_tag` with complex
//! Robin coefficients σ. One LU factorization is reused for all right-hand
//! sides at the same (k², σ); factorizations solve through `&self` and can
//! be shared across threads. faer is pinned to sequential mode so repeated
//! runs are bit-identical; outer loops parallelize over independent solves.

use std::sync::{Arc, Once};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::error::{Result, RwgError};
use crate::geometry::SegmentTag;

use super::{AssembledForms, FemSolution};

static FAER_SEQ: Once = Once::new();

pub(crate) fn faer_sequential() {
    FAER_SEQ.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// `y = A·x` for sparse A and dense x.
pub(crate) fn spmm<T: faer::traits::ComplexField>(a: &SparseColMat<usize, T>, x: &Mat<T>) -> Mat<T> {
    let mut y = Mat::<T>::zeros(a.nrows(), x.ncols());
    faer::sparse::linalg::matmul::sparse_dense_matmul(
        y.as_mut(),
        faer::Accum::Replace,
        a.as_ref(),
        x.as_ref(),
        T::one_impl(),
        faer::Par::Seq,
    );
    y
}

/// Robin boundary condition `∂_n u + σ u = g` on a tagged boundary part.
pub struct RobinBc<'a> {
    pub tag: SegmentTag,
    /// Coefficient σ multiplying `u` (the radiation problems use σ = iζ).
    pub coeff: Complex64,
    /// Boundary data, or `None` for homogeneous data on this tag.
    pub data: Option<&'a dyn Fn([f64; 2]) -> Complex64>,
}

/// Factored Robin-Helmholtz system at fixed k² and Robin coefficients.
pub struct RobinSystem {
    forms: Arc<AssembledForms>,
    k_sq: f64,
    lu: faer::sparse::solvers::Lu<usize, c64>,
    a: SparseColMat<usize, c64>,
}

impl RobinSystem {
    /// Assembles and factors `K − k²M + Σ σ_tag B_tag`.
    pub fn new(forms: &Arc<AssembledForms>, k_sq: f64, coeffs: &[(SegmentTag, Complex64)]) -> Result<Self> {
        faer_sequential();
        let n = forms.n_free();
        let mut trip: Vec<Triplet<usize, usize, c64>> =
            Vec::with_capacity(forms.k_trip.len() + forms.m_trip.len());
        for &(i, j, v) in &forms.k_trip {
            trip.push(Triplet::new(i, j, c64::new(v, 0.0)));
        }
        for &(i, j, v) in &forms.m_trip {
            trip.push(Triplet::new(i, j, c64::new(-k_sq * v, 0.0)));
        }
        for &(tag, s) in coeffs {
            if let Some(bt) = forms.b_trip.get(&tag) {
                for &(i, j, v) in bt {
                    trip.push(Triplet::new(i, j, c64::new(s.re * v, s.im * v)));
                }
            }
        }
        let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| RwgError::Solver(format!("failed to build system matrix: {e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| RwgError::Solver(format!("LU factorization failed: {e:?}")))?;
        Ok(RobinSystem { forms: Arc::clone(forms), k_sq, lu, a })
    }

    /// Solves for the given boundary loads; checks the algebraic residual
    /// and rejects near-singular systems.
    pub fn solve(&self, loads: &[(SegmentTag, &dyn Fn([f64; 2]) -> Complex64)]) -> Result<FemSolution> {
        let n = self.forms.n_free();
        let mut rhs = vec![Complex64::ZERO; n];
        for (tag, g) in loads {
            let l = self.forms.boundary_load(*tag, *g);
            for (r, v) in rhs.iter_mut().zip(l) {
                *r += v;
            }
        }
        self.solve_rhs(&rhs)
    }

    pub fn solve_rhs(&self, rhs: &[Complex64]) -> Result<FemSolution> {
        let n = self.forms.n_free();
        let norm_b: f64 = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let mut values = vec![Complex64::ZERO; self.forms.fe_nodes.len()];
        if norm_b == 0.0 {
            return Ok(FemSolution { forms: Arc::clone(&self.forms), values, k_sq: self.k_sq });
        }
        let mut b = Mat::<c64>::zeros(n, 1);
        for (i, v) in rhs.iter().enumerate() {
            b[(i, 0)] = c64::new(v.re, v.im);
        }
        let x = self.lu.solve(&b);
        // relative algebraic residual ‖Ax−b‖/‖b‖; spikes when the system is
        // near-singular (k² at an interior resonance of the truncated domain)
        let r = spmm(&self.a, &x) - &b;
        let norm_r = r.norm_l2();
        if !(norm_r / norm_b < 1e-8) {
            return Err(RwgError::Solver(format!(
                "near-singular system at k² = {} (relative residual {:.3e}); shift k² or change the mesh",
                self.k_sq,
                norm_r / norm_b
            )));
        }
        for (dof, &node) in self.forms.node_of_free.iter().enumerate() {
            let v = x[(dof, 0)];
            values[node] = Complex64::new(v.re, v.im);
        }
        Ok(FemSolution { forms: Arc::clone(&self.forms), values, k_sq: self.k_sq })
    }
}

/// One-shot Robin solve: `(K − k²M + Σ iζB)u = load` with the data from `robin`.
pub fn solve_robin(forms: &Arc<AssembledForms>, k_sq: f64, robin: &[RobinBc<'_>]) -> Result<FemSolution> {
    let coeffs: Vec<(SegmentTag, Complex64)> = robin.iter().map(|r| (r.tag, r.coeff)).collect();
    let sys = RobinSystem::new(forms, k_sq, &coeffs)?;
    let loads: Vec<(SegmentTag, &dyn Fn([f64; 2]) -> Complex64)> =
        robin.iter().filter_map(|r| r.data.map(|d| (r.tag, d))).collect();
    sys.solve(&loads)
}

/// Real-valued Robin solve (real σ, real g, e.g. the Laplace narrow-shape
/// problem). The imaginary part of the result is exactly zero.
pub fn solve_robin_real(
    forms: &Arc<AssembledForms>,
    k_sq: f64,
    robin: &[(SegmentTag, f64, Option<&dyn Fn([f64; 2]) -> f64>)],
) -> Result<FemSolution> {
    faer_sequential();
    let n = forms.n_free();
    let mut trip: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(forms.k_trip.len() + forms.m_trip.len());
    for &(i, j, v) in &forms.k_trip {
        trip.push(Triplet::new(i, j, v));
    }
    if k_sq != 0.0 {
        for &(i, j, v) in &forms.m_trip {
            trip.push(Triplet::new(i, j, -k_sq * v));
        }
    }
    for &(tag, s, _) in robin {
        if let Some(bt) = forms.b_trip.get(&tag) {
            for &(i, j, v) in bt {
                trip.push(Triplet::new(i, j, s * v));
            }
        }
    }
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| RwgError::Solver(format!("failed to build system matrix: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| RwgError::Solver(format!("LU factorization failed: {e:?}")))?;

    let mut rhs = vec![0.0f64; n];
    for &(tag, _, data) in robin {
        if let Some(g) = data {
            let load = forms.boundary_load(tag, &|p| Complex64::new(g(p), 0.0));
            for (r, v) in rhs.iter_mut().zip(load) {
                *r += v.re;
            }
        }
    }
    let norm_b: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut values = vec![Complex64::ZERO; forms.fe_nodes.len()];
    if norm_b == 0.0 {
        return Ok(FemSolution { forms: Arc::clone(forms), values, k_sq });
    }
    let mut b = Mat::<f64>::zeros(n, 1);
    for (i, v) in rhs.iter().enumerate() {
        b[(i, 0)] = *v;
    }
    let x = lu.solve(&b);
    let r = spmm(&a, &x) - &b;
    if !(r.norm_l2() / norm_b < 1e-8) {
        return Err(RwgError::Solver(format!(
            "near-singular system at k² = {k_sq} (relative residual {:.3e}); shift k² or change the mesh",
            r.norm_l2() / norm_b
        )));
    }
    for (dof, &node) in forms.node_of_free.iter().enumerate() {
        values[node] = Complex64::new(x[(dof, 0)], 0.0);
    }
    Ok(FemSolution { forms: Arc::clone(forms), values, k_sq })
}

/// Builds a real sparse matrix on the free dofs from triplets.
pub(crate) fn real_csc(n: usize, trip: &[(usize, usize, f64)]) -> Result<SparseColMat<usize, f64>> {
    let t: Vec<Triplet<usize, usize, f64>> = trip.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
        .map_err(|e| RwgError::Solver(format!("failed to build sparse matrix: {e:?}")))
}
