use thiserror::Error;

/// Errors produced by path construction, evaluation and the solvers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A path or clock was queried outside the time range it covers.
    #[error("time {t} is outside the covered horizon [0, {horizon})")]
    Horizon { t: f64, horizon: f64 },

    /// Inputs violate a structural requirement (meshes, windows, shapes).
    #[error("configuration error: {0}")]
    Config(String),

    /// A time change cannot be inverted (flat segment or nonzero start).
    #[error("time change is not invertible: {0}")]
    NonInvertible(String),

    /// The time-change problem starts below zero.
    #[error("invalid initial condition: z + driver(0) = {0} < 0")]
    InvalidInitialCondition(f64),

    /// Serialization or file format problem.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
