//! Transverse modes of the strip cross-section.
//!
//! The cross-section `D = (−l/2, l/2)` with Dirichlet ends has eigenvalues
//! `λ²_q = (πq/l)²` (the thresholds). At energy `k²` between thresholds
//! `M` and `M+1`, modes `m = 1..M` propagate with longitudinal wavenumber
//! `ν_m = √(k² − λ²_m)` and flux-normalized profile
//! `Ψ_m(y) = √(2/(l·ν_m))·{cos, sin}(λ_m y)` (cosine for odd m, sine for
//! even m), so that `∫ Ψ_m Ψ_n dy = δ_mn / ν_m`.

use crate::error::{Result, RwgError};
use crate::fem::quad::gauss_legendre_unit;

#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub l: f64,
    pub k_sq: f64,
    /// Number of propagating modes.
    pub m_count: usize,
    /// Transverse eigenvalue roots λ_m = πm/l, m = 1..M.
    pub lambdas: Vec<f64>,
    /// Longitudinal wavenumbers ν_m = √(k² − λ²_m).
    pub nus: Vec<f64>,
    /// Normalization amplitudes √(2/(l·ν_m)).
    pub amps: Vec<f64>,
}

impl ModeBasis {
    /// Decay rate of the first evanescent mode, √(λ²_{M+1} − k²).
    pub fn evanescent_rate(&self) -> f64 {
        let lam_next = std::f64::consts::PI * (self.m_count as f64 + 1.0) / self.l;
        (lam_next * lam_next - self.k_sq).sqrt()
    }

    /// Transverse profile Ψ_m(y); `m` is 1-based.
    pub fn psi(&self, m: usize, y: f64) -> f64 {
        let lam = self.lambdas[m - 1];
        let amp = self.amps[m - 1];
        if m % 2 == 1 {
            amp * (lam * y).cos()
        } else {
            amp * (lam * y).sin()
        }
    }

    /// Quadrature check of the flux normalization `∫ Ψ_m Ψ_n = δ_mn/ν_m`;
    /// returns the largest deviation.
    pub fn normalization_defect(&self) -> f64 {
        let rule = gauss_legendre_unit(64);
        let mut worst = 0.0f64;
        for m in 1..=self.m_count {
            for n in 1..=self.m_count {
                let mut acc = 0.0;
                for &(t, w) in &rule {
                    let y = -self.l / 2.0 + t * self.l;
                    acc += w * self.l * self.psi(m, y) * self.psi(n, y);
                }
                let expect = if m == n { 1.0 / self.nus[m - 1] } else { 0.0 };
                worst = worst.max((acc - expect).abs());
            }
        }
        worst
    }
}

/// Builds the propagating-mode basis at energy `k²`.
///
/// Fails below the first threshold and exactly at a threshold.
pub fn mode_basis(l: f64, k_sq: f64) -> Result<ModeBasis> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(RwgError::Config(format!("strip width must be positive, got {l}")));
    }
    let base = (std::f64::consts::PI / l).powi(2);
    if !(k_sq > base) {
        return Err(RwgError::Config(format!(
            "k² = {k_sq} is at or below the first threshold {base}; no propagating mode"
        )));
    }
    let ratio = (k_sq / base).sqrt();
    let m_count = ratio.floor() as usize;
    if (ratio - ratio.round()).abs() < 1e-12 {
        return Err(RwgError::Config(format!(
            "k² = {k_sq} sits exactly at threshold {}; move off the threshold",
            base * ratio.round().powi(2)
        )));
    }
    let mut lambdas = Vec::with_capacity(m_count);
    let mut nus = Vec::with_capacity(m_count);
    let mut amps = Vec::with_capacity(m_count);
    for m in 1..=m_count {
        let lam = std::f64::consts::PI * m as f64 / l;
        let nu = (k_sq - lam * lam).sqrt();
        lambdas.push(lam);
        nus.push(nu);
        amps.push((2.0 / (l * nu)).sqrt());
    }
    Ok(ModeBasis { l, k_sq, m_count, lambdas, nus, amps })
}

/// One-mode window `(π/l)², (2π/l)²` of the strip.
pub fn one_mode_window(l: f64) -> (f64, f64) {
    let base = (std::f64::consts::PI / l).powi(2);
    (base, 4.0 * base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn one_mode_at_k2_20() {
        let b = mode_basis(1.0, 20.0).unwrap();
        assert_eq!(b.m_count, 1);
        assert!((b.lambdas[0] * b.lambdas[0] - PI * PI).abs() < 1e-12);
        assert!((b.nus[0] - (20.0 - PI * PI).sqrt()).abs() < 1e-12);
        assert!(b.normalization_defect() < 1e-12);
    }

    #[test]
    fn two_modes_at_k2_45() {
        let b = mode_basis(1.0, 45.0).unwrap();
        assert_eq!(b.m_count, 2);
        assert!(b.normalization_defect() < 1e-12);
    }

    #[test]
    fn threshold_rejected() {
        assert!(mode_basis(1.0, 4.0 * PI * PI).is_err());
        assert!(mode_basis(1.0, PI * PI).is_err());
        assert!(mode_basis(1.0, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn flux_normalization_holds_in_windows(frac in 0.05f64..0.95, band in 1usize..4) {
            // k² strictly inside the band-th window
            let lo = (PI * band as f64).powi(2);
            let hi = (PI * (band as f64 + 1.0)).powi(2);
            let k_sq = lo + frac * (hi - lo);
            let b = mode_basis(1.0, k_sq).unwrap();
            prop_assert_eq!(b.m_count, band);
            prop_assert!(b.normalization_defect() < 1e-11);
        }
    }
}
