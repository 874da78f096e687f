// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Sampled solution trajectories shared by the semigroup and contour
//! routes.

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::laplace::ContourData;
use crate::linalg;

/// Which construction produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Matrix-exponential evolution of the reduced generator.
    Semigroup,
    /// Contour quadrature of the resolvent representation.
    Laplace,
}

/// A trajectory `u(t_i)` with its initial value and verification data.
#[derive(Debug, Clone)]
pub struct SolutionTrace {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub x0: DVector<f64>,
    pub provenance: Provenance,
    /// Mild-formulation residual at each time, filled by
    /// [`crate::semigroup::verify_mild`].
    pub residual_profile: Option<Vec<f64>>,
    /// Contour node data enabling re-evaluation at other times; present on
    /// contour-route traces only.
    pub(crate) contour: Option<ContourData>,
}

impl SolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }
}

/// Validates a time grid: finite, strictly increasing, optionally
/// nonnegative, not empty.
pub(crate) fn check_time_grid(times: &[f64], require_nonneg: bool) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimeGrid {
            reason: "empty time grid",
        });
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid {
            reason: "non-finite time value",
        });
    }
    if require_nonneg && times[0] < 0.0 {
        return Err(Error::InvalidTimeGrid {
            reason: "times must be nonnegative",
        });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid {
            reason: "times must be strictly increasing",
        });
    }
    Ok(())
}

/// Relative L2 discrepancy of two traces on the same time grid,
/// normalized by the larger of the two path norms.
pub fn relative_l2_discrepancy(a: &SolutionTrace, b: &SolutionTrace) -> Result<f64> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "trace discrepancy",
            expected: a.len(),
            found: b.len(),
        });
    }
    for (ta, tb) in a.times.iter().zip(&b.times) {
        if (ta - tb).abs() > 1e-9 * (1.0 + ta.abs()) {
            return Err(Error::InvalidTimeGrid {
                reason: "traces sampled on different grids",
            });
        }
    }
    let diffs: Vec<DVector<f64>> = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| x - y)
        .collect();
    let num = linalg::path_l2_norm(&a.times, &diffs)?;
    let na = linalg::path_l2_norm(&a.times, &a.states)?;
    let nb = linalg::path_l2_norm(&b.times, &b.states)?;
    let den = na.max(nb);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}
