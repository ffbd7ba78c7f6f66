use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not unitary (max |U U^H - I| = {deviation:e}, tolerance {tolerance:e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("real branch requested but matrix has nonzero imaginary parts (max |Im| = {max_imag:e})")]
    RealBranchComplexInput { max_imag: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("circuit on {n_qubits} qubits exceeds the simulation cap of {cap}")]
    TooLarge { n_qubits: usize, cap: usize },

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("zero pattern cannot host an orthogonal matrix: {0}")]
    InfeasiblePattern(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("worker {worker} failed: {source}")]
    Worker {
        worker: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("verification failed: max deviation {deviation:e} exceeds {tolerance:e}")]
    Verification { deviation: f64, tolerance: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
