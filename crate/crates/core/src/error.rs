use thiserror::Error;

/// Errors reported by the library.
///
/// Construction-time parameter problems and runtime numerical failures are
/// kept as distinct variants so callers (in particular the CLI) can map them
/// to different exit classes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Jacobi exponents must each exceed -1, got alpha = {alpha}, beta = {beta}")]
    InvalidExponents { alpha: f64, beta: f64 },

    #[error("band edge omega must lie in the half-open interval (-1, 1], got {0}")]
    InvalidBandEdge(f64),

    #[error(
        "quadrature order {got} is below the required minimum {min} for this truncation level"
    )]
    QuadOrderTooSmall { got: usize, min: usize },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("quadrature rule must have at least one node")]
    EmptyRule,

    #[error("point {0} lies outside the open interval (-1, 1)")]
    OutOfDomain(f64),

    #[error(
        "eigensolver did not converge building the Gauss-Jacobi rule (a = {a}, b = {b}, m = {m})"
    )]
    RuleEigenFailure { a: f64, b: f64, m: usize },

    #[error("eigensolver did not converge on a {0}x{0} symmetric matrix")]
    EigenFailure(usize),

    #[error("operand sizes do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error(
        "block ({row}, {col}) does not commute with the exchange matrix (residual {residual:.3e})"
    )]
    NotExchangeCommuting {
        row: usize,
        col: usize,
        residual: f64,
    },

    #[error("matrix is not symmetric (asymmetry {0:.3e} exceeds tolerance)")]
    NotSymmetric(f64),

    #[error("matrix is not tridiagonal")]
    NotTridiagonal,

    #[error("the first-order system requires beta = alpha - 1 with alpha > 0, got alpha = {alpha}, beta = {beta}")]
    NotFirstOrderFamily { alpha: f64, beta: f64 },

    #[error("a grid of {0} points cannot cover the band interval ending at omega = {1}; need at least 2 points and a non-empty interval")]
    InvalidGrid(usize, f64),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
}

impl Error {
    /// True for errors caused by invalid input parameters (as opposed to
    /// numerical failures at runtime).
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidExponents { .. }
                | Error::InvalidBandEdge(_)
                | Error::QuadOrderTooSmall { .. }
                | Error::InvalidTolerance(_)
                | Error::EmptyRule
                | Error::OutOfDomain(_)
                | Error::DimensionMismatch(..)
                | Error::NotFirstOrderFamily { .. }
                | Error::InvalidGrid(..)
        )
    }
}
