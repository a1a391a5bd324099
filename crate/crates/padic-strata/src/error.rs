//! Error taxonomy for the stratum calculus.
//!
//! Every fallible operation in this crate distinguishes between *decisions*
//! (a definite yes/no answer, returned as a value), *honest refusals*
//! (the input is outside the class the algorithm can certify, e.g.
//! [`Error::CertificationUnavailable`] or [`Error::Undecidable`]) and
//! *resource failures* (the working precision does not suffice to decide,
//! e.g. [`Error::InsufficientPrecision`]). Callers must never interpret a
//! refusal as a negative decision.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The working precision does not suffice to decide the question or to
    /// represent the result with at least one certified digit.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// Inversion of a provably-zero element, or of an element whose reduction
    /// is zero where a unit is required.
    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    /// Hensel lifting requires residue factors that are pairwise coprime.
    #[error("residue factors are not coprime: {0}")]
    NonCoprimeFactors(String),

    /// The valuation of the element cannot be determined at the working
    /// precision (all known digits vanish).
    #[error("valuation indeterminate: {0}")]
    IndeterminateValuation(String),

    /// An operation requiring an integral element received a non-integral one.
    #[error("element is not integral: {0}")]
    NotIntegral(String),

    /// The element does not generate a semi-pure configuration (its minimal
    /// polynomial certificate rules semi-purity out).
    #[error("element is not semi-pure: {0}")]
    NotSemiPure(String),

    /// A threshold search (e.g. for the critical exponent) left its
    /// well-defined window.
    #[error("threshold out of window: {0}")]
    ThresholdOutOfWindow(String),

    /// Two filtered objects that must share a period do not.
    #[error("period mismatch: {0}")]
    PeriodMismatch(String),

    /// No matching between the index sets of two strata exists. This is a
    /// *decision*, reported as an error only by interfaces that must return a
    /// matching; decision-level interfaces return it as a verdict.
    #[error("no matching exists: {0}")]
    NoMatching(String),

    /// The classification algorithm cannot decide the question for this input
    /// (outside the decidable fragment). Distinct from a precision failure.
    #[error("undecidable for this input: {0}")]
    Undecidable(String),

    /// The normalization search for a tame corestriction exhausted its finite
    /// candidate set without finding a filtration-compatible normalizer.
    #[error("corestriction normalization failed: {0}")]
    NormalizationFailed(String),

    /// Two strata expected to sit at the same depth of an induction differ.
    #[error("depth mismatch: {0}")]
    DepthMismatch(String),

    /// An operation requiring a certified semisimple stratum received one
    /// without (or failing) a certificate.
    #[error("stratum is not certified semisimple: {0}")]
    NotCertifiedSemisimple(String),

    /// A character operation was requested outside the singleton range
    /// `r >= floor(n/2) + 1`.
    #[error("outside the singleton range: {0}")]
    OutOfSingletonRange(String),

    /// An endo-parameter or stratum that must be full (covering the whole
    /// ambient space) is not.
    #[error("object is not full: {0}")]
    NotFull(String),

    /// Labels (index sets, simple-component labels) are inconsistent between
    /// two objects that must share them.
    #[error("inconsistent labeling: {0}")]
    InconsistentLabeling(String),

    /// A structural parameter is invalid (unsupported p or f, nonpositive
    /// period, malformed lattice data, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The certification machinery (Hensel split + Newton polygon residual
    /// criteria) cannot certify this input either way. An honest refusal.
    #[error("certification unavailable: {0}")]
    CertificationUnavailable(String),

    /// An input document or expression failed to parse.
    #[error("parse error: {0}")]
    ParseError(String),
}
