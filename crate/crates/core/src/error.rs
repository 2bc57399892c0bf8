use thiserror::Error;

/// Errors raised by the library.
///
/// The variants fall into three groups: invalid input (domains, ranges,
/// characteristics), broken preconditions detected during a computation
/// (`DenominatorResidue`, `NotProportional`), and internal consistency
/// failures that contradict a proved statement (`TheoremViolation`,
/// `MembershipFailure`, `MinimalityFailure`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("bad characteristic: {0}")]
    BadCharacteristic(String),

    #[error("denominator vanishes under specialization to the {0}-th roots of unity")]
    DenominatorVanishes(u64),

    #[error("numerator is not divisible by the common denominator: {0}")]
    DenominatorResidue(String),

    #[error("quotient is not a scalar: {0}")]
    NotProportional(String),

    #[error("degenerate lift at m = {0}: both reductions vanish")]
    DegenerateLift(u32),

    #[error("coprime normalization failed: {0}")]
    NormalizationFailure(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("parameters outside the admissible range: {0}")]
    RangeViolation(String),

    #[error("membership check failed: {0}")]
    MembershipFailure(String),

    #[error("minimality check failed: {0}")]
    MinimalityFailure(String),

    #[error("valuation of zero is undefined")]
    ZeroInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that signal an implementation bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::TheoremViolation(_)
                | Error::MembershipFailure(_)
                | Error::MinimalityFailure(_)
                | Error::NotProportional(_)
                | Error::NormalizationFailure(_)
                | Error::DegenerateLift(_)
                | Error::DenominatorResidue(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
