//! Radial coefficient extraction at corners.
//!
//! Solutions behave like `c·r^p·Φ(φ)` near a marked corner. The single-point
//! formulas are noisy on finite elements, so the coefficient is recovered
//! from a window fit: the solution is sampled on an annulus, projected onto
//! the angular profile Φ by Gauss quadrature at each radius, and the
//! projected radial profile is least-squares fitted against the radial
//! model. The angular projection also suppresses the higher angular
//! harmonics (`cos(3πφ/ω)`, …), which are orthogonal to Φ.

use num_complex::Complex64;

use crate::error::{Result, RwgError};

use super::quad::gauss_legendre_unit;
use super::FemSolution;

/// Radial basis of the fit.
#[derive(Debug, Clone, Copy)]
pub enum RadialModel {
    /// Pure power `r^p`.
    Power,
    /// Helmholtz-corrected power: the Bessel solution `J_p(kr)` normalized
    /// to `r^p` as `r → 0`. Removes the `O((kr)²)` curvature of corner
    /// coefficients of Helmholtz solutions.
    BesselJ { k: f64 },
    /// Two-term model `c₊·r^p + c₋·r^{−p}`; `value` is the `r^p`
    /// coefficient and `companion` the `r^{−p}` one.
    PowerPair,
}

pub struct CornerFitSpec<'a> {
    pub corner: [f64; 2],
    /// Exponent `p` of the leading term `r^p` (may be negative).
    pub exponent: f64,
    /// Angular range of the sampled sector.
    pub phi_range: (f64, f64),
    /// Angular profile Φ(φ).
    pub profile: &'a dyn Fn(f64) -> f64,
    /// Radial window `[r_min, r_max]`.
    pub r_window: (f64, f64),
    pub n_radii: usize,
    pub n_angles: usize,
    pub radial: RadialModel,
    /// Known term subtracted from the solution before fitting, as a
    /// function of `(r, φ)` local to the corner.
    pub subtract: Option<&'a dyn Fn(f64, f64) -> Complex64>,
    /// Relative fit residual above which the window is rejected.
    pub residual_threshold: f64,
}

impl<'a> CornerFitSpec<'a> {
    pub fn new(
        corner: [f64; 2],
        exponent: f64,
        phi_range: (f64, f64),
        profile: &'a dyn Fn(f64) -> f64,
        r_window: (f64, f64),
    ) -> Self {
        CornerFitSpec {
            corner,
            exponent,
            phi_range,
            profile,
            r_window,
            n_radii: 5,
            n_angles: 7,
            radial: RadialModel::Power,
            subtract: None,
            residual_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CornerFit {
    /// Coefficient of the leading radial term `r^p`.
    pub value: Complex64,
    /// Coefficient of the paired term (PowerPair only), else zero.
    pub companion: Complex64,
    /// Relative rms residual of the radial fit.
    pub residual: f64,
}

pub fn corner_coefficient(sol: &FemSolution, spec: &CornerFitSpec<'_>) -> Result<CornerFit> {
    let (r_min, r_max) = spec.r_window;
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(RwgError::EmptyWindow { r_min, r_max });
    }
    if spec.n_radii < 2 || spec.n_angles < 2 {
        return Err(RwgError::Config("corner fit needs at least 2 radii and 2 angles".into()));
    }
    let radii: Vec<f64> = (0..spec.n_radii)
        .map(|i| r_min * (r_max / r_min).powf(i as f64 / (spec.n_radii - 1) as f64))
        .collect();
    let angles = gauss_legendre_unit(spec.n_angles);
    let (phi0, phi1) = spec.phi_range;

    // angular projection per radius: ∫ u(r,φ)Φ(φ)dφ / ∫ Φ²dφ
    let mut phi_sq = 0.0;
    for &(t, w) in &angles {
        let phi = phi0 + t * (phi1 - phi0);
        let p = (spec.profile)(phi);
        phi_sq += w * p * p;
    }
    if phi_sq < 1e-30 {
        return Err(RwgError::Numeric("angular profile vanishes on the sampled rays".into()));
    }

    let mut points = Vec::with_capacity(spec.n_radii * spec.n_angles);
    for &r in &radii {
        for &(t, _) in &angles {
            let phi = phi0 + t * (phi1 - phi0);
            points.push([spec.corner[0] + r * phi.cos(), spec.corner[1] + r * phi.sin()]);
        }
    }
    let mut vals = sol.evaluate(&points)?;
    if let Some(sub) = spec.subtract {
        let mut idx = 0;
        for &r in &radii {
            for &(t, _) in &angles {
                let phi = phi0 + t * (phi1 - phi0);
                vals[idx] -= sub(r, phi);
                idx += 1;
            }
        }
    }

    let mut projected = Vec::with_capacity(spec.n_radii);
    for (i, _) in radii.iter().enumerate() {
        let mut acc = Complex64::ZERO;
        for (q, &(t, w)) in angles.iter().enumerate() {
            let phi = phi0 + t * (phi1 - phi0);
            acc += vals[i * spec.n_angles + q] * (w * (spec.profile)(phi));
        }
        projected.push(acc / phi_sq);
    }

    // radial least squares
    let basis: Vec<Vec<f64>> = match spec.radial {
        RadialModel::Power => vec![radii.iter().map(|&r| r.powf(spec.exponent)).collect()],
        RadialModel::BesselJ { k } => vec![radii.iter().map(|&r| normalized_bessel(spec.exponent, k, r)).collect()],
        RadialModel::PowerPair => vec![
            radii.iter().map(|&r| r.powf(spec.exponent)).collect(),
            radii.iter().map(|&r| r.powf(-spec.exponent)).collect(),
        ],
    };
    let nb = basis.len();
    let mut ata = [[0.0f64; 2]; 2];
    let mut atb = [Complex64::ZERO; 2];
    for i in 0..radii.len() {
        for a in 0..nb {
            for b in 0..nb {
                ata[a][b] += basis[a][i] * basis[b][i];
            }
            atb[a] += projected[i] * basis[a][i];
        }
    }
    let coeffs: [Complex64; 2] = if nb == 1 {
        [atb[0] / ata[0][0], Complex64::ZERO]
    } else {
        let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
        if det.abs() < 1e-300 {
            return Err(RwgError::Numeric("corner fit basis is degenerate on this window".into()));
        }
        [
            (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det,
            (atb[1] * ata[0][0] - atb[0] * ata[1][0]) / det,
        ]
    };

    let mut res2 = 0.0;
    let mut ref2 = 0.0;
    for i in 0..radii.len() {
        let mut fit = Complex64::ZERO;
        for a in 0..nb {
            fit += coeffs[a] * basis[a][i];
        }
        res2 += (projected[i] - fit).norm_sqr();
        ref2 += projected[i].norm_sqr();
    }
    let residual = (res2 / ref2.max(1e-300)).sqrt();
    if residual > spec.residual_threshold {
        return Err(RwgError::WindowContaminated { residual, threshold: spec.residual_threshold });
    }
    Ok(CornerFit { value: coeffs[0], companion: coeffs[1], residual })
}

/// `Γ(p+1)·(2/k)^p·J_p(kr)`, the Helmholtz radial mode normalized so that
/// it approaches `r^p` as `r → 0`. Ascending series; converges fast for
/// the moderate `kr` used in corner windows.
fn normalized_bessel(p: f64, k: f64, r: f64) -> f64 {
    let z = -(k * r / 2.0) * (k * r / 2.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        term *= z / (m as f64 * (p + m as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    r.powf(p) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble, ElementOrder, FemSolution};
    use crate::geometry::build_sector;
    use crate::mesh::triangulate;
    use std::f64::consts::FRAC_PI_2;
    use std::sync::Arc;

    fn sector_interpolant(h: f64, radius: f64, f: &dyn Fn([f64; 2]) -> f64) -> FemSolution {
        let b = build_sector(FRAC_PI_2, radius, h).unwrap();
        let mesh = Arc::new(triangulate(&b, h, 0.0).unwrap());
        let forms = Arc::new(assemble(&mesh, ElementOrder::P2).unwrap());
        let values = forms.fe_nodes.iter().map(|&p| Complex64::new(f(p), 0.0)).collect();
        FemSolution { forms, values, k_sq: 0.0 }
    }

    fn profile(phi: f64) -> f64 {
        (2.0 * phi).cos() // Φ for ω = π/2
    }

    #[test]
    fn exact_member_recovered_to_machine_precision() {
        // u = 3 r² cos 2φ = 3(x² − y²) lies in the P2 space exactly
        let sol = sector_interpolant(0.05, 1.0, &|p| 3.0 * (p[0] * p[0] - p[1] * p[1]));
        let spec = CornerFitSpec::new([0.0, 0.0], 2.0, (-0.7, 0.7), &profile, (0.1, 0.4));
        let fit = corner_coefficient(&sol, &spec).unwrap();
        assert!((fit.value.re - 3.0).abs() < 1e-10, "c = {}", fit.value);
        assert!(fit.value.im.abs() < 1e-12);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn higher_order_contamination_suppressed() {
        let sol = sector_interpolant(0.02, 0.35, &|p| {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let phi = p[1].atan2(p[0]);
            3.0 * r * r * (2.0 * phi).cos() + 0.1 * r.powi(6) * (6.0 * phi).cos()
        });
        let spec = CornerFitSpec::new([0.0, 0.0], 2.0, (-0.7, 0.7), &profile, (0.04, 0.1));
        let fit = corner_coefficient(&sol, &spec).unwrap();
        assert!((fit.value.re - 3.0).abs() < 1e-4, "c = {}", fit.value);
    }

    #[test]
    fn empty_window_is_error() {
        let sol = sector_interpolant(0.1, 1.0, &|p| p[0]);
        let spec = CornerFitSpec::new([0.0, 0.0], 2.0, (-0.7, 0.7), &profile, (0.5, 0.4));
        match corner_coefficient(&sol, &spec) {
            Err(RwgError::EmptyWindow { .. }) => {}
            other => panic!("expected EmptyWindow, got {:?}", other.map(|f| f.value)),
        }
    }

    #[test]
    fn power_pair_separates_growing_and_decaying() {
        // u = 2 r² Φ + 0.05 r^{-2} Φ on an annulus away from the corner
        let sol = sector_interpolant(0.02, 1.0, &|p| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            let phi = p[1].atan2(p[0]);
            (2.0 * r2 + 0.05 / r2.max(1e-9)) * (2.0 * phi).cos()
        });
        let spec = CornerFitSpec {
            radial: RadialModel::PowerPair,
            n_radii: 8,
            n_angles: 10,
            ..CornerFitSpec::new([0.0, 0.0], 2.0, (-0.7, 0.7), &profile, (0.3, 0.8))
        };
        let fit = corner_coefficient(&sol, &spec).unwrap();
        assert!((fit.value.re - 2.0).abs() < 2e-3, "growing = {}", fit.value);
        assert!((fit.companion.re - 0.05).abs() < 2e-3, "decaying = {}", fit.companion);
    }

    #[test]
    fn bessel_model_reduces_to_power_at_k_zero() {
        assert!((normalized_bessel(2.0, 1e-12, 0.5) - 0.25).abs() < 1e-12);
        // J_2(x) check against series at moderate argument
        let v = normalized_bessel(2.0, 3.0, 0.5); // kr = 1.5
        // Γ(3)·(2/3)²·J₂(1.5); J₂(1.5) = 0.2320876721442147
        let expect = 2.0 * (2.0f64 / 3.0).powi(2) * 0.2320876721442147;
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }
}
