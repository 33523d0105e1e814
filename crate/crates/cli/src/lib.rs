//! Batch runner behind the `easym` binary.
//!
//! [`run_experiment`] turns an [`ExperimentConfig`] into a [`ResultRecord`];
//! [`write_outputs`] stores it as one CSV per probe series plus
//! `summary.json` and a `config.toml` echo that reproduces the run.

pub mod config;
mod output;
pub mod presets;
mod runner;

pub use config::ExperimentConfig;
pub use output::{format_number, read_series_csv, write_outputs};
pub use runner::{run_experiment, AnalysisOutput, Provenance, ResultRecord, RunRecord, SeriesData, SeriesValues};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Sorts library errors into bad input versus numerical breakdown.
    pub fn from_core(e: easym::Error) -> Self {
        use easym::Error as E;
        match e {
            E::InvalidSize { .. }
            | E::InvalidTilt(_)
            | E::InvalidRegion(_)
            | E::SiteOutOfRange { .. }
            | E::RepeatedSite(_)
            | E::DimensionMismatch { .. }
            | E::DenseCap { .. }
            | E::InvalidParameter(_)
            | E::InvalidSeries(_)
            | E::TooFewSamples { .. } => CliError::Config(e.to_string()),
            E::NonUnitary(_)
            | E::Eigensolver(_)
            | E::NoConvergence { .. }
            | E::KrylovStep { .. }
            | E::InvalidDensityMatrix(_)
            | E::DegenerateFit(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<easym::Error> for CliError {
    fn from(e: easym::Error) -> Self {
        CliError::from_core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
