//! Generalized symmetric eigenproblem `K v = λ M v` on the free dofs, by
//! shift-inverted block subspace iteration with Rayleigh–Ritz extraction.
//!
//! One sparse factorization of `K − σM` is reused across all iterations;
//! the start block comes from a fixed-seed generator so results are
//! reproducible across runs and platforms.

use std::sync::Arc;

use faer::prelude::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RwgError};

use super::solver::{faer_sequential, real_csc, spmm};
use super::{AssembledForms, FemSolution};

/// Eigenvalue with its M-normalized eigenfunction (∫|v|² = 1).
pub struct EigenPair {
    pub eigenvalue: f64,
    pub eigenfunction: FemSolution,
    /// ‖K v − λ M v‖ / ‖M v‖, recorded at extraction.
    pub residual: f64,
}

/// Computes the `n_ev` smallest eigenvalues above the shift (ascending),
/// with eigenfunctions normalized to unit L² norm.
pub fn solve_eigen(forms: &Arc<AssembledForms>, n_ev: usize, shift: f64) -> Result<Vec<EigenPair>> {
    if n_ev == 0 {
        return Err(RwgError::Config("n_ev must be at least 1".into()));
    }
    faer_sequential();
    let n = forms.n_free();
    if n < n_ev {
        return Err(RwgError::Solver(format!("{n} free dofs cannot support {n_ev} eigenpairs")));
    }
    let k = real_csc(n, &forms.k_trip)?;
    let m = real_csc(n, &forms.m_trip)?;
    let a = if shift == 0.0 {
        real_csc(n, &forms.k_trip)?
    } else {
        let mut trip = forms.k_trip.clone();
        trip.extend(forms.m_trip.iter().map(|&(i, j, v)| (i, j, -shift * v)));
        real_csc(n, &trip)?
    };
    let lu = a
        .sp_lu()
        .map_err(|e| RwgError::Solver(format!("factorization of shifted operator failed: {e:?}")))?;

    let block = (n_ev + 3).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut x = Mat::<f64>::zeros(n, block);
    for j in 0..block {
        for i in 0..n {
            x[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }

    let mut prev = vec![f64::INFINITY; n_ev];
    let mut ritz_vals = vec![0.0; block];
    let max_iter = 300;
    let mut converged = false;
    for _iter in 0..max_iter {
        // inverse iteration step: X ← (K − σM)⁻¹ M X
        let mx = spmm(&m, &x);
        let mut z = lu.solve(&mx);

        // M-orthonormalize the block
        let mz = spmm(&m, &z);
        let gram = dense_to_na(&z.transpose().to_owned()) * dense_to_na(&mz);
        let chol = nalgebra::Cholesky::new(gram)
            .ok_or_else(|| RwgError::NotConverged("subspace collapsed during orthonormalization".into()))?;
        let linv_t = chol
            .l()
            .try_inverse()
            .ok_or_else(|| RwgError::NotConverged("singular Gram factor".into()))?
            .transpose();
        z = mat_times_small(&z, &linv_t);

        // Rayleigh–Ritz on the orthonormalized block
        let kz = spmm(&k, &z);
        let h = dense_to_na(&z.transpose().to_owned()) * dense_to_na(&kz);
        let h_sym = (h.clone() + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h_sym);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let mut v_sorted = DMatrix::<f64>::zeros(block, block);
        for (col, &oi) in order.iter().enumerate() {
            v_sorted.set_column(col, &eig.eigenvectors.column(oi));
            ritz_vals[col] = eig.eigenvalues[oi];
        }
        x = mat_times_small(&z, &v_sorted);

        let change = (0..n_ev)
            .map(|i| (ritz_vals[i] - prev[i]).abs() / ritz_vals[i].abs().max(1e-300))
            .fold(0.0f64, f64::max);
        prev[..n_ev].copy_from_slice(&ritz_vals[..n_ev]);
        if change < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RwgError::NotConverged(format!(
            "eigen iteration did not reach tolerance in {max_iter} iterations; last Ritz values {:?}",
            &ritz_vals[..n_ev]
        )));
    }

    let mut pairs = Vec::with_capacity(n_ev);
    for idx in 0..n_ev {
        let lambda = ritz_vals[idx];
        if !(lambda > shift) {
            return Err(RwgError::Solver(format!(
                "eigenvalue {lambda} not above the shift {shift}; mesh or shift invalid"
            )));
        }
        let mut v = Mat::<f64>::zeros(n, 1);
        for i in 0..n {
            v[(i, 0)] = x[(i, idx)];
        }
        let mv = spmm(&m, &v);
        let norm2: f64 = (0..n).map(|i| v[(i, 0)] * mv[(i, 0)]).sum();
        let scale = norm2.sqrt().recip();
        for i in 0..n {
            v[(i, 0)] *= scale;
        }
        let mv = spmm(&m, &v);
        let kv = spmm(&k, &v);
        let mut res2 = 0.0;
        let mut mv2 = 0.0;
        for i in 0..n {
            res2 += (kv[(i, 0)] - lambda * mv[(i, 0)]).powi(2);
            mv2 += mv[(i, 0)].powi(2);
        }
        let residual = res2.sqrt() / mv2.sqrt();
        let mut values = vec![Complex64::ZERO; forms.fe_nodes.len()];
        for (dof, &node) in forms.node_of_free.iter().enumerate() {
            values[node] = Complex64::new(v[(dof, 0)], 0.0);
        }
        pairs.push(EigenPair {
            eigenvalue: lambda,
            eigenfunction: FemSolution { forms: Arc::clone(forms), values, k_sq: lambda },
            residual,
        });
    }
    Ok(pairs)
}

fn dense_to_na(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn mat_times_small(big: &Mat<f64>, small: &DMatrix<f64>) -> Mat<f64> {
    let (n, k) = (big.nrows(), big.ncols());
    let kc = small.ncols();
    let mut out = Mat::<f64>::zeros(n, kc);
    for j in 0..kc {
        for l in 0..k {
            let s = small[(l, j)];
            if s != 0.0 {
                for i in 0..n {
                    out[(i, j)] += big[(i, l)] * s;
                }
            }
        }
    }
    out
}
