use thiserror::Error;

/// Errors raised by the drift, strength, bound and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("problem size n must be positive")]
    ZeroProblemSize,

    #[error("fitness distance d = {d} is out of range for n = {n}")]
    DistanceOutOfRange { d: u64, n: u64 },

    #[error("mutation strength r = {r} exceeds n = {n}")]
    StrengthOutOfRange { r: u64, n: u64 },

    #[error("exact rational oracle supports n <= {limit}, got n = {n}")]
    OracleLimit { n: u64, limit: u64 },

    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("index k must be at least 1")]
    ZeroIndex,

    #[error("epsilon must satisfy 0 < eps < 1/2, got {0}")]
    InvalidEpsilon(f64),

    #[error("mutation strength {0} must be odd")]
    EvenStrength(u64),

    #[error("invalid strength pair ({low}, {high}): need odd 1 <= low < high")]
    InvalidStrengthPair { low: u64, high: u64 },

    #[error("no sign change of A({low}, p) - A({high}, p) on [{lo}, {hi}]")]
    NoSignChange { low: u64, high: u64, lo: f64, hi: f64 },

    #[error("bisection did not reach tolerance within {0} iterations")]
    BisectionLimit(usize),

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },

    #[error("relative distance p = {0} > 1/2 needs the problem size n")]
    MissingProblemSize(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid drift specification: {0}")]
    InvalidDriftSpec(String),

    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),

    #[error("state 0 is not reached almost surely from state {0}")]
    Unreachable(usize),

    #[error("invalid operator distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
