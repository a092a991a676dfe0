use thiserror::Error;

/// Errors raised by the finite-blocklength machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate channel: output law does not depend on the input")]
    DegenerateChannel,

    #[error("quadrature did not converge within {evals} evaluations (estimate {estimate:e}, error {error:e})")]
    QuadratureBudget { evals: usize, estimate: f64, error: f64 },

    #[error("saddlepoint bracket expansion failed; last bracket [{lo:e}, {hi:e}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("saddlepoint regime degraded near d = 1/4 (d = {0})")]
    DomainDegradation(f64),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: u64, max: u64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("search cap exceeded: {0}")]
    SearchCap(String),

    #[error("disagreement between independent evaluations: {0}")]
    Inconsistent(String),

    #[error("table cache: {0}")]
    Cache(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
