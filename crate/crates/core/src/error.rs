use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("node {label} is outside 1..={n}")]
    NodeOutOfRange { label: usize, n: usize },

    #[error("node {0} listed more than once")]
    DuplicateNode(usize),

    #[error("node set is empty")]
    EmptyNodeSet,

    #[error("graph size {n} exceeds the configured cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two independent routes produced different answers.
    #[error("cross-check disagreement: {0}")]
    Disagreement(String),

    #[error("no node set of size <= {0} found")]
    NotFound(usize),

    #[error("vector is not in the unobservable subspace: {0}")]
    NotUnobservable(String),

    #[error("configuration is observable; no witness exists")]
    NoWitness,

    #[error("controllability Gramian is singular beyond tolerance; horizon too short")]
    HorizonTooShort,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("simulation error: {0}")]
    Simulation(String),
}
