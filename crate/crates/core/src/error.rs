use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates from its conjugate transpose by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("density operator trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("Kraus operators are not complete: max |sum A^dag A - I| = {deviation:e}")]
    NotComplete { deviation: f64 },

    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension {dim} exceeds the configured maximum {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("grid would need about {evaluations} evaluations (limit {limit})")]
    GridTooLarge { evaluations: u128, limit: u128 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NotConverged { sweeps: usize },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Errors that signal a broken numerical invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotUnitTrace { .. }
                | Error::NotPositive { .. }
                | Error::NotComplete { .. }
                | Error::NotConverged { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, 0.0, 1.0)
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, lo, hi })
    }
}
