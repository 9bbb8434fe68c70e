use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("negative root {0} (only non-negative roots are supported)")]
    NegativeRoot(String),

    #[error("empty root multiset")]
    EmptyRoots,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("coefficient sign pattern violated: {0}")]
    SignPattern(String),

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("precision overflow: dynamic range of {needed} bits exceeds budget of {budget} bits")]
    PrecisionOverflow { needed: u64, budget: u64 },

    #[error("precision budget exceeded after {steps} refinement steps (achieved relative width {achieved:e})")]
    PrecisionBudgetExceeded { steps: u32, achieved: f64 },

    #[error(
        "found {found} of {expected} roots; polynomial is not real-rooted with non-negative roots"
    )]
    MissingRoots { found: usize, expected: usize },

    #[error("exact rational coefficients required")]
    InexactInput,

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by running out of working precision rather than
    /// by malformed input.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionOverflow { .. } | Error::PrecisionBudgetExceeded { .. }
        )
    }
}
