use polyaxial::Error;

/// Everything that ends a run early, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("{0}")]
    Computation(Error),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Computation(_) => 1,
            Failure::Numerical(_) => 3,
        }
    }
}

pub fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::Overflow(_) | Error::NonFinite(_) | Error::NonFiniteMultiplier(_)
    )
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if is_numerical(&e) => Failure::Numerical(e),
            Error::InvalidOrder { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidGrid(_)
            | Error::InvalidExponent(_)
            | Error::DimensionMismatch { .. }
            | Error::NonPositivePolynomial(_)
            | Error::ZeroWavenumber => Failure::Config(e.to_string()),
            e => Failure::Computation(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
