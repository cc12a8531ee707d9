use thiserror::Error;

/// Errors raised by the channel computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("{what} did not converge: estimated error {achieved:e}, requested {requested:e}")]
    NoConvergence {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("root not bracketed: f({lo:e}) and f({hi:e}) have the same sign")]
    Bracket { lo: f64, hi: f64 },

    #[error("invalid trajectory constants: {0}")]
    InvalidConstants(String),

    #[error("index ({i}, {j}) out of range 1..={max}")]
    IndexOutOfRange { max: usize, i: usize, j: usize },

    #[error("overflow evaluating {0}; use the log-scaled variant")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        function,
        value,
        expected,
    }
}
