use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantum number or coordinate outside the domain of the system.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state not normalized: integral of |psi|^2 = {norm:.3e} (tolerance {tolerance:.1e})")]
    Normalization { norm: f64, tolerance: f64 },
    #[error("floating-point overflow: {0}")]
    Overflow(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("eigensolver did not converge: {0}")]
    Convergence(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("level {level}: {source}")]
    AtLevel { level: i64, source: Box<Error> },
    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn at_level(self, level: i64) -> Self {
        match self {
            e @ Error::AtLevel { .. } => e,
            e => Error::AtLevel { level, source: Box::new(e) },
        }
    }

    /// The innermost error, looking through level annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for configuration and usage problems as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(self.root(), Error::Config(_))
    }
}
