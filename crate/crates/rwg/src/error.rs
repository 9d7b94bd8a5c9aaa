//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, RwgError>;

#[derive(Debug, Error)]
pub enum RwgError {
    /// Invalid or inconsistent geometric parameters.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Mesh generation or mesh invariant failure.
    #[error("mesh: {0}")]
    Mesh(String),

    /// Mesh file / config file syntax or schema violation.
    #[error("format: {0}")]
    Format(String),

    /// Invalid run configuration.
    #[error("config: {0}")]
    Config(String),

    /// Form assembly failure (degenerate elements, inconsistent dofs).
    #[error("assembly: {0}")]
    Assembly(String),

    /// Linear solver failure (including near-singular systems).
    #[error("solver: {0}")]
    Solver(String),

    /// Eigenvalue or fixed-point iteration did not converge.
    #[error("not converged: {0}")]
    NotConverged(String),

    /// Point evaluation outside the meshed domain.
    #[error("point {index} at ({x}, {y}) lies outside the mesh")]
    PointOutsideDomain { index: usize, x: f64, y: f64 },

    /// Corner fit window is empty or malformed.
    #[error("corner fit: empty or inverted window [{r_min}, {r_max}]")]
    EmptyWindow { r_min: f64, r_max: f64 },

    /// Corner fit residual above threshold.
    #[error("corner fit: window contaminated by higher-order terms (residual {residual:.3e} > {threshold:.3e})")]
    WindowContaminated { residual: f64, threshold: f64 },

    /// Transmission samples are not single-peaked.
    #[error("peak search: non-unimodal samples: {0}")]
    NonUnimodal(String),

    /// Maximum found at a bracket end.
    #[error("peak search: maximum at bracket edge (k² = {k_sq:.9}) — widen bracket or recheck constants")]
    PeakAtBracketEdge { k_sq: f64 },

    /// Generic numerical failure with context.
    #[error("numeric: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl RwgError {
    /// CLI exit code: 2 for validation/input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RwgError::Geometry(_)
            | RwgError::Format(_)
            | RwgError::Config(_)
            | RwgError::Io(_)
            | RwgError::Json(_) => 2,
            _ => 3,
        }
    }
}
