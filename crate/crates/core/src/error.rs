use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// `Domain`, `Contract`, `Degenerate` and `Geometric` are caller mistakes or
/// inputs outside an operation's mathematical domain; `NonConvergence` is an
/// iteration that ran out of budget.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("pole at {re}+{im}i")]
    Pole { re: f64, im: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("geometric domain error: {0}")]
    Geometric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },
}

impl Error {
    /// Short machine-readable tag, used by the CLI's JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Contract(_) => "contract",
            Error::Pole { .. } => "pole",
            Error::Degenerate(_) => "degenerate",
            Error::Geometric(_) => "geometric",
            Error::Unsupported(_) => "unsupported",
            Error::NonConvergence { .. } => "non_convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
