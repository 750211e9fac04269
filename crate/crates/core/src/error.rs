use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bessel order or multi-index component out of range.
    #[error("alpha[{index}] ≤ −1/2 (got {value})")]
    InvalidOrder { index: usize, value: f64 },

    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("multi-index mismatch between {0} and {1}")]
    AlphaMismatch(&'static str, &'static str),

    #[error("samples live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value count {found} does not match grid size {expected}")]
    ValueCount { expected: usize, found: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("exponent p = {0} must satisfy p >= 1")]
    InvalidExponent(f64),

    #[error("reference norm vanishes")]
    ZeroNorm,

    #[error("multiplier is not finite at frequency node {0}")]
    NonFiniteMultiplier(usize),

    #[error("kernel evaluated at an endpoint of its support on axis {axis} (alpha < 1/2 is singular there)")]
    EndpointSingular { axis: usize },

    #[error("function is not integrable: {0}")]
    NotIntegrable(String),

    #[error("required range [{lo}, {hi}] is not evaluable for this function")]
    NotEvaluable { lo: f64, hi: f64 },

    #[error("numerical overflow while computing {0}")]
    Overflow(&'static str),

    #[error("polynomial is not strictly positive on [0, inf): {0}")]
    NonPositivePolynomial(String),

    #[error("wavenumber k must be nonzero")]
    ZeroWavenumber,

    #[error("distribution cannot be represented on the physical grid (round-trip defect {0:e})")]
    NotRepresentable(f64),

    #[error("grid under-resolved: {0}")]
    UnderResolved(String),

    #[error("no closed-form transform available for {0}")]
    NoClosedForm(&'static str),

    #[error("invalid snapshot: {0}")]
    Snapshot(String),
}
