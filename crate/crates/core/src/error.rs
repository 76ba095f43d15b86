use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("bundle is in the {found} frame, expected {expected}")]
    FrameMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("not a diffeomorphism: {0}")]
    NotDiffeomorphism(String),

    #[error("perturbed path gamma +/- eps*phi is not a diffeomorphism at eps = {eps:e}")]
    PerturbationTooLarge { eps: f64 },

    #[error(
        "wave breaking at t = {t:.6}: max |u_x| = {max_slope:.6e} exceeds ceiling {ceiling:.3e}"
    )]
    WaveBreaking {
        t: f64,
        max_slope: f64,
        ceiling: f64,
    },

    #[error(
        "peakon collision between #{i} and #{j} at t = {t:.6} (gap {gap:.3e}); \
         estimated collision time {t_collision:.6}"
    )]
    PeakonCollision {
        i: usize,
        j: usize,
        t: f64,
        gap: f64,
        t_collision: f64,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that end a run as a physical/numerical outcome
    /// (breaking, collision, divergence) rather than a usage mistake.
    pub fn is_numerical_halt(&self) -> bool {
        matches!(
            self,
            Error::WaveBreaking { .. } | Error::PeakonCollision { .. } | Error::NonFinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}
