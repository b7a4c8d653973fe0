use thiserror::Error;

/// Errors raised by the numerical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fourier coefficient requested at or above the Nyquist index of a grid.
    #[error("frequency {k} is not below the Nyquist limit of a {m}-point grid")]
    AboveNyquist { k: i64, m: usize },

    /// The sign-change scan did not find the expected number of zeros.
    #[error("root count mismatch for n={n}, q={q}: expected {expected}, found {found}")]
    RootCount {
        n: usize,
        q: f64,
        expected: usize,
        found: usize,
    },

    /// No parameter on the scan reproduces the requested breakpoint.
    #[error("breakpoint inversion failed for n={n}, h={h}: {reason}")]
    Inversion { n: usize, h: f64, reason: String },

    /// A lower bound exceeded an upper bound, or a similar internal contradiction.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("simplex iteration cap of {cap} pivots reached")]
    IterationCap { cap: usize },

    #[error("singular basis matrix in simplex")]
    SingularBasis,

    /// Jackson polynomial denominator 1 - chi(k) + tau(k) vanished.
    #[error("vanishing denominator {value:e} at frequency {k}")]
    VanishingDenominator { k: i64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
