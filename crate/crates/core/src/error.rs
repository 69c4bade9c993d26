use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("potential derivative is only defined for x > 0, got {0}")]
    Domain(f64),

    #[error("pure Tsallis derivative has range (-inf, 0), cannot invert y = {0}")]
    Range(f64),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("invalid potential parameters: weight = {weight}, inv_eta = {inv_eta}")]
    InvalidParams { weight: f64, inv_eta: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("probability underflowed to zero for arm {arm}")]
    Underflow { arm: usize },

    #[error("round {round} was never registered")]
    UnknownRound { round: usize },

    #[error("observation from round {round} already arrived at round {arrived_at}")]
    DuplicateArrival { round: usize, arrived_at: usize },

    #[error("observation from round {origin} cannot arrive at earlier round {arrival}")]
    ArrivalBeforeOrigin { origin: usize, arrival: usize },

    #[error("loss {0} outside [0, 1]")]
    InvalidLoss(f64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("cannot step past the horizon n = {n}")]
    HorizonExceeded { n: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },
}
