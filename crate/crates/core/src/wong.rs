// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! The nested invariant-subspace chain of a pencil and the resolvent
//! identities that certify it.
//!
//! Starting from the full space, each step maps through `E` and pulls
//! back through `A`: `IV_{k+1} = A^{-1}[E[IV_k]]`. The chain is
//! nonincreasing and stabilizes after at most `n` proper steps; the
//! stabilized space carries the solvable dynamics, and the member at
//! position `index + 1` is the consistent-initial-value space.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::pencil::{IndexEstimate, Pencil};
use crate::subspace::{Subspace, SubspaceRelation};

/// The computed chain.
#[derive(Debug, Clone)]
pub struct WongResult {
    /// `IV_0, IV_1, ...` up to and including the first repeated space.
    pub spaces: Vec<Subspace>,
    /// Dimensions of the spaces, in order.
    pub dims: Vec<usize>,
    /// First `k` with `IV_k = IV_{k+1}` at tolerance.
    pub stabilized_at: usize,
    /// The index estimate consulted when this chain feeds later stages.
    pub index_used: Option<IndexEstimate>,
}

impl WongResult {
    /// The stabilized (final) space of the chain.
    pub fn stabilized_space(&self) -> &Subspace {
        self.spaces.last().expect("chain is never empty")
    }

    /// Records which index estimate downstream consumers paired with this
    /// chain.
    pub fn attach_index(&mut self, idx: IndexEstimate) {
        self.index_used = Some(idx);
    }

    /// Largest basis-accuracy estimate along the chain, the natural sine
    /// tolerance for membership checks against chain spaces.
    pub fn chain_sensitivity(&self) -> f64 {
        self.spaces
            .iter()
            .map(|s| s.sensitivity())
            .fold(0.0, f64::max)
    }
}

/// Computes the chain until it stabilizes. `tol_factor` scales rank
/// cutoffs (0 for adaptive defaults); `max_steps` bounds the chain length
/// (0 for the default `n + 1`). A chain still strictly shrinking past the
/// bound is an error, not a result.
pub fn wong_sequence(p: &Pencil, tol_factor: f64, max_steps: usize) -> Result<WongResult> {
    let n = p.dim();
    let budget = if max_steps == 0 { n + 1 } else { max_steps };
    let mut spaces = vec![Subspace::full(n)];
    let mut dims = vec![n];

    let stabilized_at = loop {
        let k = spaces.len() - 1;
        let current = &spaces[k];
        // The kernel of A sits inside every chain member, so a zero space
        // can only map to itself: the chain has stabilized.
        if current.is_zero() {
            break k;
        }
        if spaces.len() > budget {
            return Err(Error::NonStabilization {
                steps: budget,
                dims,
            });
        }
        let image = current.image(p.e(), tol_factor)?;
        let next = image.preimage(p.a(), tol_factor)?;
        if next.dim() > current.dim() {
            return Err(Error::Numerical {
                context: "invariant subspace chain expanded",
            });
        }
        let cmp_tol = if tol_factor > 0.0 { 10.0 * tol_factor } else { 0.0 };
        let relation = next.compare(current, cmp_tol)?;
        let dim = next.dim();
        spaces.push(next);
        dims.push(dim);
        if relation == SubspaceRelation::Equal {
            break k;
        }
    };

    Ok(WongResult {
        spaces,
        dims,
        stabilized_at,
        index_used: None,
    })
}

/// The consistent-initial-value space `IV_{index + 1}` for the given
/// index estimate. Falls back to the stabilized space when the chain
/// repeats earlier (the members coincide from there on).
pub fn consistent_space<'a>(w: &'a WongResult, idx: &IndexEstimate) -> Result<&'a Subspace> {
    let needed = idx.index + 1;
    if needed < w.spaces.len() {
        return Ok(&w.spaces[needed]);
    }
    if w.stabilized_at < w.spaces.len() {
        return Ok(w.stabilized_space());
    }
    Err(Error::ChainTooShort {
        len: w.spaces.len(),
        needed,
    })
}

/// Residual maxima of the chain's resolvent identities over sampled
/// points and vectors.
#[derive(Debug, Clone)]
pub struct ChainIdentityReport {
    /// `max |E (zE+A)^{-1} A x - A (zE+A)^{-1} E x|` over all samples.
    pub commutation_max: f64,
    /// Largest sine angle of `(zE+A)^{-1} E x` against the next chain
    /// space, for `x` drawn from each chain member.
    pub membership_max: f64,
    /// `max |z (zE+A)^{-1} E x - x|` for `x` in chain members past the
    /// first; decays like `1/|z|` along the real axis.
    pub expansion_max: Option<f64>,
    /// Per-space membership maxima, indexed like `spaces`.
    pub membership_per_space: Vec<f64>,
}

/// Samples the three chain identities: commutation through the resolvent,
/// invariance of chain members under `(zE+A)^{-1} E`, and the expansion
/// defect on members past the first. `z = 0` is rejected; singular sample
/// points surface as errors.
pub fn chain_identity_check<R: Rng + ?Sized>(
    p: &Pencil,
    w: &WongResult,
    z_samples: &[C64],
    x_per_space: usize,
    rng: &mut R,
) -> Result<ChainIdentityReport> {
    if z_samples.is_empty() || x_per_space == 0 {
        return Err(Error::InvalidInput {
            reason: "identity check needs sample points and vectors",
        });
    }
    if z_samples.iter().any(|z| z.norm() == 0.0) {
        return Err(Error::InvalidInput {
            reason: "z = 0 is not an admissible resolvent point",
        });
    }

    let ec = linalg::to_complex(p.e());
    let ac = linalg::to_complex(p.a());
    let mut commutation_max = 0.0f64;
    let mut expansion_max: Option<f64> = None;
    let mut membership_per_space = vec![0.0f64; w.spaces.len()];

    // Draw the sample vectors once per space, reused across z.
    let mut space_samples: Vec<Vec<DVector<f64>>> = Vec::with_capacity(w.spaces.len());
    for space in &w.spaces {
        let mut xs = Vec::new();
        for _ in 0..x_per_space {
            if let Some(x) = space.random_unit(rng) {
                xs.push(x);
            }
        }
        space_samples.push(xs);
    }

    for &z in z_samples {
        let solver = p.resolvent_solver(z)?;
        for (k, xs) in space_samples.iter().enumerate() {
            let target = &w.spaces[(k + 1).min(w.spaces.len() - 1)];
            for x in xs {
                let xc = linalg::to_complex_vec(x);
                let rex = solver.solve(&(&ec * &xc))?;
                let rax = solver.solve(&(&ac * &xc))?;
                let commutation = (&ec * &rax - &ac * &rex).norm();
                commutation_max = commutation_max.max(commutation);
                let membership = target.sine_angle_complex(&rex);
                membership_per_space[k] = membership_per_space[k].max(membership);
                if k >= 1 {
                    let defect = (&rex * z - &xc).norm();
                    expansion_max = Some(expansion_max.unwrap_or(0.0).max(defect));
                }
            }
        }
    }

    Ok(ChainIdentityReport {
        commutation_max,
        membership_max: membership_per_space.iter().copied().fold(0.0, f64::max),
        expansion_max,
        membership_per_space,
    })
}

/// `|(sE + A)^{-1} s E x - x|`, the remainder of the scaled-resolvent
/// identity at a real scale `s`; for `x` in the first chain member this
/// decays like `1/s`.
pub fn scaled_resolvent_defect(p: &Pencil, scale: f64, x: &DVector<f64>) -> Result<f64> {
    if !(scale.is_finite() && scale != 0.0) {
        return Err(Error::InvalidInput {
            reason: "scale must be finite and nonzero",
        });
    }
    let z = C64::new(scale, 0.0);
    let solver = p.resolvent_solver(z)?;
    let ex = linalg::to_complex_vec(&(p.e() * x));
    let rex = solver.solve(&ex)?;
    Ok((rex * z - linalg::to_complex_vec(x)).norm())
}
