use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid search space (v={v}, L={l}): need v >= 3 and L >= 1")]
    InvalidParams { v: usize, l: usize },

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("genotype length mismatch: expected {expected} slots, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid genotype: {0}")]
    InvalidGenotype(String),

    #[error("infeasible distance profile (d1={d1}, d2={d2}) for n1={n1}, n2={n2}")]
    InfeasibleProfile {
        d1: usize,
        d2: usize,
        n1: usize,
        n2: usize,
    },

    #[error("enumeration needs {outcomes} outcomes, limit is {limit}")]
    Intractable { outcomes: u128, limit: u128 },

    #[error("operator {0} is not supported here")]
    UnsupportedOperator(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(&'static str),

    #[error("samples have zero variance; use an empirical distribution instead of a Gaussian fit")]
    ZeroVariance,

    #[error("no pre-hitting distance samples were collected")]
    EmptySample,

    #[error("fitness missing or not a number for {0}")]
    MissingFitness(String),

    #[error("genotype {0} appears more than once")]
    DuplicateGenotype(String),

    #[error("maximum fitness {fitness} is shared by {first} and {second}; the optimum must be unique")]
    TiedOptimum {
        first: String,
        second: String,
        fitness: f64,
    },

    #[error("landscape: {0}")]
    Landscape(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
