use thiserror::Error;

/// Errors raised by the core library.
///
/// Variants are grouped by the CLI into input errors (bad parameters or
/// malformed data) and numerical errors (non-convergence, conditioning,
/// budget exhaustion); see [`Error::is_input_error`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse `{input}`: unexpected token `{token}`")]
    Parse { input: String, token: String },

    #[error("no closed form available for {0}")]
    UnsupportedClosedForm(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("custom gauge rejected: {0}")]
    NotSymmetric(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("oracle violation: {0}")]
    OracleViolation(String),

    #[error("ellipsoid method stopped after {iterations} iterations without certifying the gap (achieved relative gap {gap:.3e})")]
    Convergence { iterations: usize, gap: f64 },

    #[error("ellipsoid shape matrix lost positive definiteness at iteration {iteration}")]
    Conditioning { iteration: usize },

    #[error("enumeration budget exceeded: about {estimate:.3e} profiles, budget {budget}")]
    BudgetExceeded { estimate: f64, budget: u64 },

    #[error("quadrature did not converge: orders {low} and {high} differ by {rel_diff:.3e}")]
    QuadratureNonConvergence { low: usize, high: usize, rel_diff: f64 },

    #[error("too many rejected samples: {rejected} of {total}")]
    Rejections { rejected: u64, total: u64 },

    #[error("acceptance rate {rate:.3e} too small; use a smaller dimension")]
    LowAcceptance { rate: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed matrix data: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidInput(_)
                | Error::Parse { .. }
                | Error::UnsupportedClosedForm(_)
                | Error::Domain(_)
                | Error::NotSymmetric(_)
                | Error::Io(_)
                | Error::Format(_)
        )
    }
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::Parse { .. } => "parse",
            Error::UnsupportedClosedForm(_) => "unsupported_closed_form",
            Error::Domain(_) => "domain",
            Error::NotSymmetric(_) => "not_symmetric",
            Error::Numerical(_) => "numerical",
            Error::OracleViolation(_) => "oracle_violation",
            Error::Convergence { .. } => "convergence",
            Error::Conditioning { .. } => "conditioning",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
            Error::Rejections { .. } => "rejections",
            Error::LowAcceptance { .. } => "low_acceptance",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidInput(format!("entry {i} is not finite ({})", x[i]))),
        None => Ok(()),
    }
}
