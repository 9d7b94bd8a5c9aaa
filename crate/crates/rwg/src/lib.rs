//! Resonant tunneling in a 2D quantum waveguide with two narrows.
//!
//! A strip waveguide is pinched by two scaled copies of a cone-with-disk
//! shape; the piece between the pinches acts as a resonator and the
//! transmission probability `T(k²)` develops a sharp Lorentzian peak near
//! the resonator eigenvalue. This crate computes the tunneling
//! characteristics by two independent routes and compares them:
//!
//! * a finite-element scattering-matrix method on the truncated waveguide
//!   (modules [`mesh`], [`fem`], [`modes`], [`scattering`]), and
//! * closed-form asymptotic formulas in the narrow diameter, with their
//!   geometry constants computed from three ε-independent limit problems
//!   (modules [`constants`], [`asymptotic`]).
//!
//! [`peak`] and [`compare`] drive k²-sweeps, peak location and the
//! asymptotic/numerical comparison study; [`config`] and the `rwg` binary
//! provide the file and command-line surface.

pub mod asymptotic;
pub mod compare;
pub mod config;
pub mod constants;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod modes;
pub mod peak;
pub mod scattering;

pub use error::{Result, RwgError};
pub use geometry::WaveguideGeometry;

/// Cap the global rayon thread pool from the `RWG_THREADS` environment
/// variable. No-op if the pool is already built or the variable is unset.
pub fn init_threads() {
    if let Ok(v) = std::env::var("RWG_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
