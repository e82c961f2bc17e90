use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("circuit contains measurements")]
    ContainsMeasurement,

    #[error("gate {0} is not in the basis set {{U1, U2, U3, CNOT, Measure}}")]
    NonBasisGate(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("malformed Pauli string: {0}")]
    MalformedPauli(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("quasiparticle weight has a pole: {0}")]
    Pole(String),

    #[error("recompilation failed after {layers} layers (best cost {best_cost:.3e})")]
    Recompile { layers: usize, best_cost: f64 },

    #[error("recompilation chain aborted at step {step}: {source}")]
    Chain {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
