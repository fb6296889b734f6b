use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The inverse-square term overwhelms the centrifugal barrier, so the
    /// reduced operator is not defined.
    #[error("attractive singularity: effective angular term gamma^2 = {delta_sq} < 0")]
    AttractiveSingularity { delta_sq: f64 },

    #[error("invalid range [{lo}, {hi}]: endpoints must be positive and ordered")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("found {found} real roots, expected {expected}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("root {root} has recurrence residual {residual:e} after polishing")]
    ResidualTooLarge { root: f64, residual: f64 },

    #[error("series does not terminate at degree {degree}: tail coefficient {residual:e}")]
    NotTruncated { degree: usize, residual: f64 },

    #[error(
        "overlap matrix of size {size} is not numerically positive definite (pivot {pivot}); \
         reduce the basis size or use extended precision"
    )]
    IllConditionedOverlap { size: usize, pivot: usize },

    #[error("domain [0, {xi_max}] too small: eigenfunction tail {tail:e} relative to its maximum")]
    DomainTooSmall { xi_max: f64, tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
