use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{func}: argument {arg} outside the domain ({expected})")]
    Domain {
        func: &'static str,
        arg: f64,
        expected: &'static str,
    },

    #[error("gamma has a pole at x = {0}")]
    Pole(f64),

    #[error("eigensolver did not converge for eigenvalue {index} within {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    #[error("invalid backend specification: {0}")]
    InvalidBackend(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{}:{line}: {msg}", path.display())]
    MatrixFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("extrapolation of the boundary flux did not settle: successive estimates {prev} and {last}")]
    Extrapolation { prev: f64, last: f64 },

    #[error("half-line quadrature tail estimate {tail:e} exceeds {limit:e} of the integral")]
    QuadratureTail { tail: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to a distinct CLI exit status.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Extrapolation { .. } | Error::QuadratureTail { .. }
        )
    }
}
