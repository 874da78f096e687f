// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all analysis stages.

use alloc::vec::Vec;

/// Failure modes of the analysis tool chain.
///
/// Precondition violations and numerically uncertifiable outcomes are kept
/// apart so callers can distinguish bad input from a pencil that genuinely
/// resists analysis at the requested tolerance.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two operands disagree in dimension.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// A spanning set was empty and no ambient dimension was supplied.
    #[error("empty spanning set without an ambient dimension")]
    EmptySpan,

    /// An input matrix or vector contains NaN or infinite entries.
    #[error("non-finite entries in {context}")]
    NonFinite { context: &'static str },

    /// A generic precondition violation.
    #[error("invalid input: {reason}")]
    InvalidInput { reason: &'static str },

    /// `zE + A` is singular at the requested point, to working precision.
    #[error("pencil is singular at z = {re:e} + {im:e}i (sigma_min = {sigma_min:e})")]
    SingularPoint { re: f64, im: f64, sigma_min: f64 },

    /// A sample grid does not satisfy the estimator's requirements.
    #[error("invalid sample grid: {reason}")]
    InvalidGrid { reason: &'static str },

    /// The invariant-subspace chain kept shrinking past the step budget.
    #[error("subspace chain did not stabilize within {steps} steps (dims {dims:?})")]
    NonStabilization { steps: usize, dims: Vec<usize> },

    /// The chain is too short to select the requested member.
    #[error("subspace chain holds {len} spaces, step {needed} was requested")]
    ChainTooShort { len: usize, needed: usize },

    /// `E` restricted to the candidate subspace is not injective enough.
    #[error("injectivity gap {gap:e} is at or below the threshold {threshold:e}")]
    InjectivityGapTooSmall { gap: f64, threshold: f64 },

    /// The preimage space disagrees with the candidate domain, so no
    /// generator can be certified on it.
    #[error("generator domain defect: preimage space has dim {v_dim}, candidate has dim {u_dim}")]
    DomainDefect { v_dim: usize, u_dim: usize },

    /// The initial value is too far from the admissible subspace.
    #[error(
        "initial value is not consistent: relative distance {distance:e} to the \
         admissible subspace exceeds {tol:e}; only u0 in U admits mild solutions"
    )]
    InconsistentInitialValue { distance: f64, tol: f64 },

    /// A time grid violates its ordering or sign requirements.
    #[error("invalid time grid: {reason}")]
    InvalidTimeGrid { reason: &'static str },

    /// A quadrature contour violates its shape requirements.
    #[error("invalid contour: {reason}")]
    InvalidContour { reason: &'static str },

    /// The contour truncation diagnostic exceeded its budget; the requested
    /// accuracy cannot be certified on this contour.
    #[error("contour truncation indicator {indicator:e} exceeds the budget {budget:e}")]
    ContourTruncation { indicator: f64, budget: f64 },

    /// A solution trace lacks the data this operation needs.
    #[error("operation needs a contour-route trace carrying its node data")]
    NoContourData,

    /// An internal numerical step failed to converge or produced garbage.
    #[error("numerical failure in {context}")]
    Numerical { context: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;
