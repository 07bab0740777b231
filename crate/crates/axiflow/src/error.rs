use thiserror::Error;

/// Which rotation-axis endpoint a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisEnd {
    /// θ = 0, physical x = a = c − d.
    Left,
    /// θ = π, physical x = b = c + d.
    Right,
}

impl std::fmt::Display for AxisEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxisEnd::Left => write!(f, "left"),
            AxisEnd::Right => write!(f, "right"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Grid sizes must be even so that θ = π/2 is a node and profiles can
    /// be mirrored node-for-node.
    #[error("grid size must be even and at least {min}, got {n}")]
    BadGridSize { n: usize, min: usize },

    #[error("field length {len} does not match grid size {n} (+1)")]
    LengthMismatch { len: usize, n: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// The profile lost the quadratic touchdown h ~ ½h″·θ² at an axis
    /// endpoint; curvature there is no longer defined.
    #[error("axis degeneracy at {end} endpoint: fitted h'' = {h2:e}")]
    AxisDegeneracy { end: AxisEnd, h2: f64 },

    /// 2d²h + (h′/sin θ)² fell below the floor somewhere strictly inside
    /// (0, π); the surface is about to pinch and the equation degenerates.
    #[error("degenerate denominator at θ = {theta}: {value:e}")]
    PinchDenominator { theta: f64, value: f64 },

    #[error("time step underflow at t = {t}: dt = {dt:e}")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("eigensolver did not converge for {n}×{n} matrix")]
    EigenSolver { n: usize },

    #[error("{0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
