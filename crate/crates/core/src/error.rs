use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while loading data, fitting models or evaluating estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` ({reason})")]
    Parse {
        /// One-based data row number; the header row is not counted.
        row: usize,
        column: String,
        value: String,
        reason: String,
    },

    #[error("degenerate treatment arms: {treated} treated, {control} control")]
    DegenerateArm { treated: usize, control: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("Newton-Raphson did not converge after {iterations} iterations (score norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("separation detected: |theta[{index}]| = {value:.3} exceeds 30, fitted probabilities are numerically 0 or 1")]
    Separation { index: usize, value: f64 },

    #[error("collinear design in {0}: matrix is numerically singular")]
    Collinearity(&'static str),

    #[error("arm {arm} has {size} units, at least {needed} required")]
    InsufficientData { arm: u8, size: usize, needed: usize },

    #[error("empty trimmed population: all weights are zero (scores span [{min_score:.6}, {max_score:.6}])")]
    EmptyPopulation { min_score: f64, max_score: f64 },

    #[error("unstable bootstrap: {failed} of {replicates} replicates failed (limit 5%)")]
    UnstableBootstrap { failed: usize, replicates: usize },

    #[error("too many failed Monte Carlo replications: {failed} of {replications} (limit 2%)")]
    UnstableSimulation { failed: usize, replications: usize },

    #[error("no cutoff in (0, 1) solves the ATT equation (right-hand side spans [{rhs_min:.6}, {rhs_max:.6}])")]
    NoSolution { rhs_min: f64, rhs_max: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors a resampled or simulated dataset can trigger by bad luck; the
    /// bootstrap and the simulation runner drop these and count them.
    pub fn is_sampling_failure(&self) -> bool {
        matches!(
            self,
            Error::DegenerateArm { .. }
                | Error::Separation { .. }
                | Error::NonConvergence { .. }
                | Error::Collinearity(_)
                | Error::InsufficientData { .. }
                | Error::EmptyPopulation { .. }
        )
    }

    /// Validation problems with user-supplied data or configuration, as
    /// opposed to numerical failures during estimation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::MissingColumn(_)
                | Error::Parse { .. }
                | Error::DegenerateArm { .. }
                | Error::InvalidInput(_)
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}
