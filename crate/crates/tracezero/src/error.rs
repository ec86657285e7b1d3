//! Crate-wide error type.
//!
//! Errors are split into two broad families: *validation* errors caused by
//! ill-formed inputs (bad parameters, malformed payloads, out-of-domain
//! requests) and *computational* errors signalling that an algorithm could
//! not complete (no square root exists, a sampling loop exhausted its retry
//! budget, an internal exactness assertion failed).

use thiserror::Error;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Division or inversion of zero in a field.
    #[error("division by zero")]
    DivisionByZero,
    /// Two elements from different field contexts were mixed.
    #[error("field context mismatch: {0}")]
    ContextMismatch(&'static str),
    /// An extension of unsupported degree was requested.
    #[error("invalid extension degree {0} (must be at least 2)")]
    InvalidDegree(usize),
    /// A modular inverse does not exist; carries the degree of the
    /// nontrivial gcd that was found.
    #[error("polynomial is not invertible modulo the given modulus (gcd has degree {0})")]
    NotInvertible(usize),
    /// The element is not a square in its field.
    #[error("element is not a square")]
    NotASquare,
    /// No sign choice of the modular square root satisfies v^phi = -v.
    #[error("no anti-invariant square root exists for the given u")]
    NoAntiInvariantRoot,
    /// Curve parameters are invalid (wrong degree, not squarefree, ...).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    /// A Mumford pair failed validation.
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    /// The divisor is not in the trace zero subgroup.
    #[error("divisor is not trace zero")]
    NotTraceZero,
    /// An elliptic-only operation was called with genus > 1.
    #[error("operation requires genus 1")]
    NotElliptic,
    /// A point operation received the point at infinity where an affine
    /// point is required.
    #[error("point at infinity is not a valid input here")]
    PointAtInfinity,
    /// A compressed payload is not in the image of the representation map.
    #[error("malformed compressed input: {0}")]
    MalformedInput(String),
    /// An exact polynomial division left a nonzero remainder; this always
    /// signals a bug upstream, never bad user input.
    #[error("exact division left a nonzero remainder")]
    InexactDivision,
    /// The norm of a polynomial failed to have base-field coefficients;
    /// signals an internal bug.
    #[error("norm has a coefficient outside the base field")]
    NormNotRational,
    /// A solve step found no (or no unique) solution.
    #[error("no solution: {0}")]
    NoSolution(String),
    /// Root finding found no root where one was required.
    #[error("polynomial has no root in the field")]
    NoRoot,
    /// A brute-force enumeration was refused because the search space
    /// exceeds the safety guard.
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    /// Random sampling exceeded its retry bound.
    #[error("sampling exhausted its retry bound")]
    SamplingExhausted,
    /// The fast path needs a Kummer extension (n | q-1) but the context
    /// does not have one; callers should fall back to the generic path.
    #[error("no Kummer extension available (extension degree does not divide q-1)")]
    KummerUnavailable,
    /// The input is outside the domain of an explicit fast path; callers
    /// should fall back to the generic path.
    #[error("input has a special shape not covered by the fast path: {0}")]
    SpecialShape(String),
    /// An intermediate point sum in the elliptic line product hit the point
    /// at infinity; callers should fall back to the generic path.
    #[error("degenerate chord in line product")]
    DegenerateChord,
}

impl Error {
    /// True for errors caused by ill-formed *input* (parameters, payloads),
    /// false for errors arising during computation. The CLI maps the former
    /// to exit code 2 and the latter to exit code 1.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ContextMismatch(_)
                | Error::InvalidDegree(_)
                | Error::InvalidCurve(_)
                | Error::InvalidDivisor(_)
                | Error::NotTraceZero
                | Error::MalformedInput(_)
                | Error::TooLarge(_)
        )
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
