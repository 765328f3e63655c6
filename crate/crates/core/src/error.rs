use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A Bayes factor cannot be produced by any admissible test statistic.
    #[error("value out of attainable range in {op}: {detail}")]
    OutOfRange { op: &'static str, detail: String },

    #[error("numerically singular matrix: {0}")]
    Singular(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    /// Studies lack what the selected synthesis method needs.
    #[error("insufficient data for {method}: {}", .studies.join("; "))]
    InsufficientData {
        method: &'static str,
        studies: Vec<String>,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical routine rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Singular(_) | Error::OutOfRange { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
