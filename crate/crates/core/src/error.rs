use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tau = {tau} lies outside the profile domain [{lo}, {hi}]")]
    Domain { tau: f64, lo: f64, hi: f64 },

    #[error("integration produced non-finite values; last valid tau = {last_tau}")]
    IntegrationFailure { last_tau: f64 },

    #[error("matrix is not symplectic: |det - 1| = {deviation:e} exceeds {tol:e}")]
    NonSymplectic { deviation: f64, tol: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed design: theta vanishes at tau = {tau} with theta' = {slope} (expected +-2)")]
    MalformedDesign { tau: f64, slope: f64 },

    #[error("amplitude is singular at tau = {tau}: series residual {residual:e}")]
    SingularAmplitude { tau: f64, residual: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("descriptor error: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
