use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A structural check (unitarity, hermiticity, trace) failed.
    #[error("{what} check failed: defect {defect:.3e}")]
    Validation { what: &'static str, defect: f64 },

    /// Slice doubling hit the ceiling before the self-convergence defect
    /// dropped below tolerance. `history` holds `(slices, defect)` pairs.
    #[error("propagator did not converge within {max_slices} slices (history: {history:?})")]
    Convergence {
        max_slices: usize,
        history: Vec<(usize, f64)>,
    },

    /// A dense factorization failed or produced an inaccurate result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
