use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space of {requested} points exceeds the limit of {limit}")]
    SizeOverflow { requested: u128, limit: u128 },

    #[error("edge list is empty")]
    EmptyEdgeList,

    #[error("self loop at vertex {0}")]
    SelfLoop(usize),

    #[error("graph has {components} components but no separation schedule")]
    DisconnectedComponent { components: usize },

    #[error("separation schedule has {got} entries, {needed} needed")]
    ScheduleTooShort { needed: usize, got: usize },

    #[error("separation schedule is not a metric: {0}")]
    InvalidSeparation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {point} is outside a space of {len} points")]
    PointOutOfRange { point: usize, len: usize },

    #[error("operators live on different spaces")]
    SpaceMismatch,

    #[error(
        "norm iteration did not converge after {iterations} steps; norm in [{lower}, {upper}]"
    )]
    NonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("exhaustion is not increasing at step {0}")]
    NonMonotoneExhaustion(usize),

    #[error("exhaustion does not end with the whole space")]
    IncompleteExhaustion,

    #[error("witness domain is empty")]
    EmptyDomain,

    #[error("every localization window is empty after margin exclusion")]
    NoWindows,

    #[error("blocks {0} and {1} overlap")]
    OverlappingBlocks(usize, usize),

    #[error("schedule is not strictly increasing at index {0}")]
    NonIncreasingSchedule(usize),

    #[error("direction sequence has {available} usable terms, tail of {tail} requested")]
    InsufficientTail { available: usize, tail: usize },

    #[error("direction term {index} leaves the space within the window")]
    WindowOutsideSpace { index: usize },

    #[error("no empirical limit: {} entries oscillate, worst {worst}", offending.len())]
    NoEmpiricalLimit {
        offending: Vec<(usize, usize, f64)>,
        worst: f64,
    },

    #[error("direction sequence {sequence} does not escape the family at term {index}")]
    NotEscaping { sequence: usize, index: usize },

    #[error("set is not sparse enough: tail gap {gap} does not exceed {needed}")]
    NotSparse { gap: i64, needed: i64 },

    #[error("no simple {d}-regular graph on {n} vertices: {reason}")]
    InvalidDegree {
        n: usize,
        d: usize,
        reason: &'static str,
    },

    #[error("gave up after {retries} attempts, best second eigenvalue {best_lambda}")]
    RetriesExhausted { retries: usize, best_lambda: f64 },

    #[error("spectral certificate {lambda} is not below the degree {degree}")]
    DegenerateSpectrum { lambda: f64, degree: f64 },

    #[error("growth condition cannot reach kappa {kappa}: block {block} gives {achieved}")]
    GrowthUnsatisfiable {
        kappa: f64,
        block: usize,
        achieved: f64,
    },

    #[error("unknown sequence generator `{0}`")]
    UnknownGenerator(String),
}
