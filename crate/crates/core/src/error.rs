use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Invalid(#[from] ValidationReport),

    #[error("inverse Green's matrix is singular at omega = {omega}")]
    Singular { omega: f64 },

    #[error(
        "adaptive quadrature did not converge within {budget} subintervals \
         (estimated relative error {error:e})"
    )]
    QuadratureNonConvergence { budget: usize, error: f64 },

    #[error("invalid quadrature: {0}")]
    Quadrature(String),

    #[error("layout mismatch: {0}")]
    Layout(String),

    #[error("no closed-form minor for pair ({row}, {col}); use 1-based pairs (1,N), (1,N-1), (2,N), (2,N-1)")]
    UnsupportedMinor { row: usize, col: usize },

    #[error("temperature-dependent friction is non-positive ({gamma}) at bead {bead}")]
    NonPositiveFriction { bead: usize, gamma: f64 },

    #[error("integration blew up at step {step} (non-finite state)")]
    IntegrationBlowup { step: u64 },

    #[error("empty measurement window")]
    EmptyWindow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::IntegrationBlowup { .. }
        )
    }
}
