use thiserror::Error;

/// Errors shared across the crate.
///
/// Evaluation errors (`OutsideDomain`, `BranchCut`, `Pole`, `CriticalPoint`)
/// are raised lazily, at the point where a jet is actually requested.
/// Construction errors (`UnknownName`, `Parse`, `KindDomain`, `Support`,
/// `Hypothesis`, `Fiber`) are raised eagerly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} lies outside the open domain `{domain}`")]
    OutsideDomain { z: String, domain: String },

    #[error("log branch cut (or branch point) hit at argument {at}")]
    BranchCut { at: String },

    #[error("pole encountered: {at}")]
    Pole { at: String },

    #[error("critical point: first derivative vanishes at {at}")]
    CriticalPoint { at: String },

    #[error("shift target {a} is not admissible: {why}")]
    Fiber { a: String, why: String },

    #[error("coefficient support invalid: {0}")]
    Support(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("seminorm kind not defined here: {0}")]
    KindDomain(String),

    #[error("suite skipped: {0}")]
    SuiteSkipped(String),

    #[error("cannot parse `{input}`: {why}")]
    Parse { input: String, why: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, why: impl Into<String>) -> Self {
        Error::Parse { input: input.into(), why: why.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
