use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root refinement did not converge after {iterations} iterations near {at}")]
    Convergence { iterations: usize, at: f64 },

    #[error("weight is not integrable near the origin: {0}")]
    NonIntegrable(String),

    #[error("accuracy target {requested:e} not reached (error bound {achieved:e})")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("quadrature failed on [{a}, {b}]: error estimate {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        a: f64,
        b: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("hypothesis ({condition}) violated at s = {at}: {detail}")]
    HypothesisViolation {
        condition: char,
        at: f64,
        detail: String,
    },

    #[error("positivity required: {0}")]
    PositivityRequired(String),

    #[error("weighted norm overflow: {output:e} exceeds 10x the input bound {bound:e}")]
    NormOverflow { output: f64, bound: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last difference {last_difference:e}, observed ratio {ratio})")]
    NoConvergence {
        iterations: usize,
        last_difference: f64,
        ratio: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
