use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system size {size}: {reason}")]
    InvalidSize { size: usize, reason: &'static str },

    #[error("tilt angle {0} is outside [0, pi/2]")]
    InvalidTilt(f64),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("site {site} out of range for a chain of {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("gate sites must be distinct, got ({0}, {0})")]
    RepeatedSite(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (Frobenius deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("dense materialization is capped at {cap} sites, requested {num_sites}")]
    DenseCap { num_sites: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(
        "Krylov step failed at t = {time}: local error {error:.3e} exceeds tolerance \
         {tolerance:.1e} with dt = {dt:.3e}"
    )]
    KrylovStep {
        time: f64,
        dt: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("only {found} samples in window [{t1}, {t2}], need at least {required}")]
    TooFewSamples {
        t1: f64,
        t2: f64,
        found: usize,
        required: usize,
    },

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
}
