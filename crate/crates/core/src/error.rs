use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains no observations")]
    EmptyInput,

    #[error("price coordinate {p} appears more than once")]
    DuplicateP { p: f64 },

    #[error("non-finite value in row {row}")]
    NonFiniteValue { row: usize },

    #[error("block [{start}, {end}) is out of range for {len} observations")]
    IndexOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("step curve does not cover the data range [{lo}, {hi}]")]
    CurveDoesNotCoverData { lo: f64, hi: f64 },

    #[error("price {p} lies below the curve domain starting at {start}")]
    BelowDomain { p: f64, start: f64 },

    #[error("invalid step curve: {0}")]
    InvalidCurve(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no path with at most {max_arcs} blocks satisfies the minimum step length {step_min}")]
    InfeasibleStepMin { max_arcs: usize, step_min: f64 },

    #[error("no completion from vertex {vertex} within {arcs} arcs")]
    InfeasibleCardinality { vertex: usize, arcs: usize },

    #[error("instance too large for exhaustive search ({observations} observations, K = {k})")]
    InstanceTooLarge { observations: usize, k: usize },

    #[error("gap requires a positive lower bound, got {lb}")]
    NonPositiveLB { lb: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
