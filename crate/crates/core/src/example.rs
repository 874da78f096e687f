// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! A concrete family of pencils from a transport equation on a periodic
//! interval, used to exercise the analysis far from toy sizes.
//!
//! The continuous model lives on the circle `(-2, 2]`: `E` multiplies by
//! the indicator of `[-1, 1]` and `A` adds the complementary indicator to
//! a first derivative. Discretizing on cell midpoints with central
//! differences keeps the structure exactly: the difference matrix is
//! skew, `E` has a zero-one diagonal, and `E + (A - D) = I` bitwise.
//!
//! The family is a source of pencils where `E` restricted to the first
//! chain space is injective but loses its lower bound as the mesh
//! refines: a smooth function supported outside `[-1, 1]` is killed by
//! `E` exactly while lying ever closer to the chain space.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pencil::Pencil;
use crate::subspace::Subspace;

/// Midpoint discretization of the periodic transport pencil.
#[derive(Debug, Clone)]
pub struct DiscretizedExample {
    n: usize,
    h: f64,
    midpoints: Vec<f64>,
    pencil: Pencil,
    d: DMatrix<f64>,
}

/// Builds the `n`-cell discretization; `n` must be even and at least 8.
pub fn build_example(n: usize) -> Result<DiscretizedExample> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::InvalidInput {
            reason: "discretization size must be even and at least 8",
        });
    }
    let h = 4.0 / n as f64;
    let midpoints: Vec<f64> = (0..n).map(|i| -2.0 + (i as f64 + 0.5) * h).collect();

    let mut e = DMatrix::<f64>::zeros(n, n);
    for (i, &t) in midpoints.iter().enumerate() {
        if (-1.0..=1.0).contains(&t) {
            e[(i, i)] = 1.0;
        }
    }

    let c = 1.0 / (2.0 * h);
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        d[(i, (i + 1) % n)] = c;
        d[(i, (i + n - 1) % n)] = -c;
    }

    // A = (I - E) + D, so E + (A - D) = I holds exactly.
    let mut a = d.clone();
    for i in 0..n {
        a[(i, i)] += 1.0 - e[(i, i)];
    }

    let pencil = Pencil::new(e, a)?;
    Ok(DiscretizedExample {
        n,
        h,
        midpoints,
        pencil,
        d,
    })
}

impl DiscretizedExample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_width(&self) -> f64 {
        self.h
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    /// The central-difference part of `A`; exactly skew.
    pub fn difference_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Samples of the decaying exponential supported outside `[-1, 1]`
    /// that wraps continuously through the periodic boundary. `E` kills
    /// it exactly, yet it approximates a member of the first chain space.
    pub fn witness_vector(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.n,
            self.midpoints.iter().map(|&t| {
                if t < -1.0 {
                    linalg::exp(-t)
                } else if t > 1.0 {
                    linalg::exp(4.0 - t)
                } else {
                    0.0
                }
            }),
        )
    }

    /// First chain space `IV_1`: preimage under `A` of the range of `E`.
    pub fn first_chain_space(&self) -> Result<Subspace> {
        let range_e = Subspace::from_columns(self.pencil.e(), 0.0)?;
        range_e.preimage(self.pencil.a(), 0.0)
    }
}

/// One resolvent-bound check at a right half-plane point.
#[derive(Debug, Clone)]
pub struct BoundSample {
    pub z_re: f64,
    pub z_im: f64,
    pub resolvent_norm: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Report of resolvent-norm checks against `1/min(Re z, 1)`.
#[derive(Debug, Clone)]
pub struct BoundCheckReport {
    pub samples: Vec<BoundSample>,
    pub all_pass: bool,
}

/// Checks `|(zE+A)^{-1}| <= 1/min(Re z, 1) + 1e-10` at the given right
/// half-plane points. The bound follows from the energy estimate
/// `Re <(zE+A)u, u> >= min(Re z, 1) |u|^2`, which the skew difference
/// part cannot spoil.
pub fn verify_resolvent_bound(
    ex: &DiscretizedExample,
    z_samples: &[(f64, f64)],
) -> Result<BoundCheckReport> {
    if z_samples.is_empty() {
        return Err(Error::InvalidInput {
            reason: "bound check needs at least one sample point",
        });
    }
    let mut samples = Vec::with_capacity(z_samples.len());
    let mut all_pass = true;
    for &(re, im) in z_samples {
        if !(re.is_finite() && im.is_finite() && re > 0.0) {
            return Err(Error::InvalidInput {
                reason: "bound check points must have positive real part",
            });
        }
        let norm = ex
            .pencil
            .resolvent_norm(num_complex::Complex::new(re, im))?;
        let bound = 1.0 / re.min(1.0) + 1e-10;
        let pass = norm <= bound;
        all_pass &= pass;
        samples.push(BoundSample {
            z_re: re,
            z_im: im,
            resolvent_norm: norm,
            bound,
            pass,
        });
    }
    Ok(BoundCheckReport { samples, all_pass })
}

/// Witness trend at one mesh size.
#[derive(Debug, Clone)]
pub struct WitnessEntry {
    pub n: usize,
    /// `|E v|` for the witness; exactly zero by construction.
    pub e_v_norm: f64,
    /// Distance of the normalized witness to the first chain space.
    pub rel_dist: f64,
    /// Smallest singular value of `E` restricted to the first chain
    /// space.
    pub injectivity_gap: f64,
}

/// Witness trends across mesh sizes: the witness stays exactly in the
/// kernel of `E` while its distance to the chain space and the
/// injectivity gap of `E` there both shrink.
#[derive(Debug, Clone)]
pub struct WitnessTrendReport {
    pub entries: Vec<WitnessEntry>,
    pub dist_strictly_decreasing: bool,
    pub gap_strictly_decreasing: bool,
}

/// Computes the witness trend over strictly increasing mesh sizes.
pub fn noninjectivity_witness(n_list: &[usize]) -> Result<WitnessTrendReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput {
            reason: "witness trend needs at least one mesh size",
        });
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput {
            reason: "mesh sizes must be strictly increasing",
        });
    }
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ex = build_example(n)?;
        let v = ex.witness_vector();
        let e_v_norm = (ex.pencil.e() * &v).norm();
        let chain = ex.first_chain_space()?;
        let rel_dist = chain.distance(&(&v / v.norm()));
        let k = ex.pencil.e() * chain.basis();
        let (_, vals, _) = linalg::svd_real(&k, false)?;
        let injectivity_gap = vals[vals.len() - 1];
        entries.push(WitnessEntry {
            n,
            e_v_norm,
            rel_dist,
            injectivity_gap,
        });
    }
    let dist_strictly_decreasing = entries.windows(2).all(|w| w[1].rel_dist < w[0].rel_dist);
    let gap_strictly_decreasing = entries
        .windows(2)
        .all(|w| w[1].injectivity_gap < w[0].injectivity_gap);
    Ok(WitnessTrendReport {
        entries,
        dist_strictly_decreasing,
        gap_strictly_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    #[test]
    fn rejects_small_or_odd_sizes() {
        assert!(build_example(6).is_err());
        assert!(build_example(9).is_err());
        assert!(build_example(8).is_ok());
    }

    #[test]
    fn smallest_mesh_has_four_interior_cells() {
        let ex = build_example(8).unwrap();
        let ones: Vec<usize> = (0..8).filter(|&i| ex.pencil().e()[(i, i)] == 1.0).collect();
        assert_eq!(ones, vec![2, 3, 4, 5]);
        let open: f64 = (0..8).map(|i| ex.pencil().e()[(i, i)]).sum();
        assert_relative_eq!(open, 4.0);
    }

    #[test]
    fn difference_matrix_is_exactly_skew_with_zero_row_sums() {
        let ex = build_example(16).unwrap();
        let d = ex.difference_matrix();
        let s = d.transpose() + d;
        assert!(s.iter().all(|&x| x == 0.0));
        for i in 0..16 {
            assert_eq!(d.row(i).sum(), 0.0);
        }
    }

    #[test]
    fn identity_decomposition_is_exact() {
        let ex = build_example(12).unwrap();
        let e = ex.pencil().e();
        let a = ex.pencil().a();
        let d = ex.difference_matrix();
        for i in 0..12 {
            for j in 0..12 {
                let lhs = e[(i, j)] + (a[(i, j)] - d[(i, j)]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(lhs, expect);
            }
        }
    }

    #[test]
    fn witness_is_killed_exactly_and_nonzero() {
        let ex = build_example(24).unwrap();
        let v = ex.witness_vector();
        assert!(v.norm() > 1.0);
        assert_eq!((ex.pencil().e() * &v).norm(), 0.0);
    }

    #[test]
    fn resolvent_bound_holds_at_reference_points() {
        let ex = build_example(16).unwrap();
        let rep =
            verify_resolvent_bound(&ex, &[(1.0, 0.0), (0.5, 10.0), (3.0, -2.0)]).unwrap();
        assert!(rep.all_pass);
        // At z = 1 the constant vector saturates the bound.
        assert_relative_eq!(rep.samples[0].resolvent_norm, 1.0, max_relative = 1e-10);
        assert_relative_eq!(rep.samples[1].bound, 2.0 + 1e-10);
        assert!(verify_resolvent_bound(&ex, &[(-1.0, 0.0)]).is_err());
        assert!(verify_resolvent_bound(&ex, &[]).is_err());
    }

    #[test]
    fn energy_lower_bound_holds_for_random_vectors() {
        let ex = build_example(16).unwrap();
        let e = ex.pencil().e();
        let a = ex.pencil().a();
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // xorshift is plenty for test vectors
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for &z in &[Complex::new(1.0, 0.0), Complex::new(0.3, 5.0), Complex::new(2.0, -1.0)] {
            for _ in 0..20 {
                let u = DVector::from_fn(16, |_, _| Complex::new(next(), next()));
                let m = linalg::to_complex(e) * z + linalg::to_complex(a);
                let mu = &m * &u;
                let form: Complex<f64> = u.iter().zip(mu.iter()).map(|(ui, mi)| ui.conj() * mi).sum();
                let floor = z.re.min(1.0) * u.norm_squared();
                assert!(form.re >= floor - 1e-12, "form {} floor {}", form.re, floor);
            }
        }
    }

    #[test]
    fn first_chain_space_has_half_dimension() {
        let ex = build_example(16).unwrap();
        let chain = ex.first_chain_space().unwrap();
        assert_eq!(chain.dim(), 8);
        // A maps the chain space into the range of E.
        let range_e = Subspace::from_columns(ex.pencil().e(), 0.0).unwrap();
        let mapped = Subspace::from_columns(&(ex.pencil().a() * chain.basis()), 0.0).unwrap();
        assert!(mapped.containment_defect(&range_e).unwrap() < 1e-10);
    }

    #[test]
    fn witness_entries_have_exact_kernel_hits() {
        let rep = noninjectivity_witness(&[8, 16]).unwrap();
        assert_eq!(rep.entries.len(), 2);
        for entry in &rep.entries {
            assert_eq!(entry.e_v_norm, 0.0);
            assert!(entry.injectivity_gap > 0.0);
            assert!(entry.rel_dist > 0.0);
        }
        assert!(noninjectivity_witness(&[16, 8]).is_err());
        assert!(noninjectivity_witness(&[]).is_err());
    }

    #[test]
    fn mesh_index_stays_zero() {
        let ex = build_example(32).unwrap();
        let est = crate::pencil::estimate_index(
            ex.pencil(),
            0.0,
            &crate::pencil::GridSpec::default(),
        )
        .unwrap();
        assert_eq!(est.index, 0);
    }
}
