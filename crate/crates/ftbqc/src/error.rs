use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("duplicate target qubits in gate application")]
    DuplicateTargets,

    #[error("register of {requested} qubits exceeds the {cap}-qubit simulator cap")]
    QubitCapExceeded { requested: usize, cap: usize },

    #[error("Pauli channel rates violate normalization (sum {sum})")]
    ChannelNotNormalized { sum: f64 },

    #[error("generator rows do not pairwise commute (rows {row_a} and {row_b})")]
    GeneratorsAnticommute { row_a: usize, row_b: usize },

    #[error("generator rows are linearly dependent over GF(2)")]
    GeneratorsDependent,

    #[error("syndrome length {got} does not match n-k = {expected}")]
    SyndromeLength { expected: usize, got: usize },

    #[error("state lies outside the code space (projector overlap {overlap})")]
    OutsideCodeSpace { overlap: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("measurement pattern is malformed: {0}")]
    InvalidPattern(String),

    #[error("node {0} is not present in the register")]
    NodeAbsent(usize),

    #[error("decoy estimator requires v2 = 0 (got v2 = {0})")]
    UnsupportedDecoyConfig(f64),

    #[error("invalid decoy parameters: {0}")]
    InvalidDecoyParams(String),

    #[error("invalid channel parameters: {0}")]
    InvalidChannelParams(String),

    #[error("pulse bound requires epsilon < S (epsilon = {epsilon}, S = {s})")]
    EpsilonNotBelowS { epsilon: f64, s: f64 },

    #[error("repetition count diverges: level error is exactly zero")]
    RepetitionsDiverge,

    #[error("invalid resource parameters: {0}")]
    InvalidResourceParams(String),

    #[error("invalid brickwork dimensions: rows = {rows}, columns = {cols}")]
    InvalidBrickworkDims { rows: usize, cols: usize },

    #[error("dependency on unmeasured node ({row}, {col})")]
    UnmeasuredDependency { row: usize, col: usize },

    #[error("angle {0} is not a multiple of pi/4")]
    OffGridAngle(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
