use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("N = {n} is not a multiple of m = {m}")]
    NotMultiple { m: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} exceeds the cap of {cap} (use the long-run setting to lift it)")]
    TooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("eigensolver did not converge after {iterations} iterations (dimension {dim})")]
    NoConvergence { dim: usize, iterations: usize },

    #[error("eigenvalue 1 has multiplicity {multiplicity}; the invariant density is not unique")]
    NotErgodic { multiplicity: usize },

    #[error("the map is not mixing: {0}")]
    NotMixing(String),

    #[error("matrix is not column stochastic (column sum deviation {deviation:e})")]
    NotColumnStochastic { deviation: f64 },

    #[error("z = {z} lies outside the convergence disc of radius {radius}")]
    OutsideConvergence { z: f64, radius: f64 },
}
