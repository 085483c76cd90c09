use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative numeric routine did not converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Fewer critical points than expected; usually numerically coincident roots.
    #[error("expected {expected} critical points, found {found}")]
    CriticalPoints { expected: usize, found: usize },

    /// The matrix lies on the degenerate locus (some off-diagonal entry vanishes).
    #[error(
        "off-diagonal entry b[{index}] = {modulus:e} is below tolerance (degenerate locus B = 0)"
    )]
    DegenerateLocus { index: usize, modulus: f64 },

    #[error("matrix sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("size {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    /// Interpolated spectral polynomial is not monic to the required accuracy.
    #[error("interpolation is ill-conditioned: leading coefficient {0}")]
    Interpolation(f64),

    #[error("integer overflow in exact arithmetic ({0})")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
