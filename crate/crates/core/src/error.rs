use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("separation is undefined for fewer than two nodes")]
    UndefinedSeparation,

    #[error("node sets are incomparable: {0} vs {1} nodes")]
    IncomparableSets(usize, usize),

    #[error("moment vectors live on different frequency sets")]
    FrequencySetMismatch,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sampling budget exhausted after {0} rejection rounds")]
    SamplingBudgetExhausted(usize),

    #[error("no closed form available for the {0} window")]
    ClosedFormUnavailable(&'static str),

    #[error("point lies outside the localizer support")]
    OutOfDomain,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("unbalanced transport problem: source mass {source_mass}, sink mass {sink_mass}")]
    UnbalancedProblem { source_mass: f64, sink_mass: f64 },

    #[error("matching is not a bijection between the node sets")]
    NonBijective,

    #[error("cluster of {0} nodes exceeds the supported pair-cluster size")]
    ClusterSizeExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),
}
