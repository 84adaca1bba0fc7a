use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields or rings")]
    DescriptorMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("enumeration bound exceeded: {what} needs {needed}, bound is {bound}")]
    BoundExceeded { what: String, needed: u128, bound: u128 },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("lattice leaves the precision window: {0}")]
    WindowOverflow(String),
    #[error("lattice is not integral (L is not contained in its dual)")]
    NotIntegral,
    #[error("lattice is not a vertex lattice")]
    NotVertex,
    #[error("vertex lattice has type 0, the quotient is zero")]
    ZeroType,
    #[error("quotient has dimension 0")]
    ZeroDim,
    #[error("subspaces live in different spaces or levels")]
    SpaceMismatch,
    #[error("lattice is not between the bounds of the quotient frame")]
    NotSandwiched,
    #[error("Witt index {witt} is smaller than the requested dimension {dim}")]
    WittIndexTooSmall { witt: usize, dim: usize },
    #[error("subspace is not stable under Frobenius")]
    NotRational,
    #[error("the pi-modular case (n even, 2h = n) is excluded")]
    PiModularExcluded,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("tau-iteration did not stabilise inside the window")]
    NotStable,
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bound_check(what: &str, needed: u128, bound: u128) -> Result<()> {
    if needed > bound {
        Err(Error::BoundExceeded { what: what.to_string(), needed, bound })
    } else {
        Ok(())
    }
}
