use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs at least two breakpoints, got {0}")]
    TooFew(usize),
    #[error("breakpoints must be strictly increasing (index {index}: {prev} >= {next})")]
    NonMonotone { index: usize, prev: f64, next: f64 },
    #[error("breakpoints must be strictly positive (index {index}: {value})")]
    NonPositive { index: usize, value: f64 },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("expected {expected} cell values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("step functions live on different grids")]
    GridMismatch,
    #[error("division by zero on cell {0} where the dividend is nonzero")]
    DivisionByZero(usize),
    #[error("negative base {base} on cell {cell} with non-integer exponent {exponent}")]
    DomainError {
        cell: usize,
        base: f64,
        exponent: f64,
    },
    #[error("argument must be strictly positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("bad exponent: {0}")]
    BadExponent(String),
    #[error("tail truncated: {0}")]
    TruncatedTail(String),
    #[error("weight outside class: {0}")]
    OutOfClass(String),
    #[error("negative value {value} on cell {cell}")]
    NegativeInput { cell: usize, value: f64 },
    #[error("grid has no cells")]
    EmptyGrid,
    #[error("cell {0} carries zero weight mass")]
    ZeroMass(usize),
    #[error("function vanishes identically")]
    ZeroFunction,
    #[error("abscissae must be strictly increasing (index {0})")]
    NonMonotoneAbscissa(usize),
    #[error("invalid quadrature spec: {0}")]
    BadQuadrature(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TooFew(_) => "too_few",
            Error::NonMonotone { .. } => "non_monotone",
            Error::NonPositive { .. } => "non_positive",
            Error::NonFinite(_) => "non_finite",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::GridMismatch => "grid_mismatch",
            Error::DivisionByZero(_) => "division_by_zero",
            Error::DomainError { .. } => "domain_error",
            Error::NonPositiveArgument(_) => "non_positive_argument",
            Error::DivergentIntegral(_) => "divergent_integral",
            Error::BadExponent(_) => "bad_exponent",
            Error::TruncatedTail(_) => "truncated_tail",
            Error::OutOfClass(_) => "out_of_class",
            Error::NegativeInput { .. } => "negative_input",
            Error::EmptyGrid => "empty_grid",
            Error::ZeroMass(_) => "zero_mass",
            Error::ZeroFunction => "zero_function",
            Error::NonMonotoneAbscissa(_) => "non_monotone_abscissa",
            Error::BadQuadrature(_) => "bad_quadrature",
            Error::Invalid(_) => "invalid",
        }
    }
}
