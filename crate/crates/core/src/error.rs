use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("digit {0} does not fit in 64 bits")]
    DigitOverflow(String),

    #[error("requested working precision of {0} bits exceeds the supported maximum")]
    PrecisionTooHigh(u32),

    #[error("series needs {needed} terms, above the budget of {budget}")]
    TermBudget { needed: u64, budget: u64 },

    #[error("could not certify an error bound of 2^-{target} (got {achieved:e})")]
    Uncertified { target: u32, achieved: f64 },

    #[error("empty digit sequence")]
    EmptyDigits,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(
    name: &'static str,
    value: impl std::fmt::Display,
    expected: &'static str,
) -> Result<T> {
    Err(Error::Domain {
        name,
        value: value.to_string(),
        expected,
    })
}
