use thiserror::Error;

/// Rejections raised while building key material.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyError {
    #[error("{name} = {value} is outside the accepted range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("x0 = {x0} is the nontrivial fixed point 1 - 1/mu of mu = {mu}")]
    FixedPoint { mu: f64, x0: f64 },
    #[error("cannot parse key: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error("format error: {0}")]
    Format(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
