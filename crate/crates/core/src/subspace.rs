// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Tolerance-aware linear subspaces of `R^n`.
//!
//! A [`Subspace`] is stored as an orthonormal basis matrix together with
//! the absolute rank cutoff that produced it and an estimate of how
//! accurately the basis is known. All rank decisions go through the SVD;
//! the cutoff defaults to `max(rows, cols) * eps * sigma_max` of the
//! operator being factored, scaled by an optional user factor.
//!
//! Comparisons are by principal angles: a space is contained in another
//! when the largest sine of a principal angle between it and its
//! projection is below tolerance. Containment both ways is equality.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Outcome of comparing two subspaces at a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceRelation {
    Equal,
    FirstInSecond,
    SecondInFirst,
    Incomparable,
}

/// A subspace of `R^n` with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    /// Orthonormal columns spanning the space; `n x d`.
    basis: DMatrix<f64>,
    /// Absolute singular-value cutoff used when this basis was computed.
    tol: f64,
    /// Estimated accuracy of the basis as a bound on principal-angle sines
    /// against the exact space, propagated through image and preimage.
    sensitivity: f64,
}

/// How far numerical rank decisions were from ambiguous: the kept and
/// dropped singular values around the cut, against the cutoff.
fn rank_by_cutoff(values: &DVector<f64>, cutoff: f64) -> usize {
    values.iter().take_while(|&&s| s > cutoff).count()
}

/// Accuracy estimate for a basis cut out of the SVD of `K`: perturbations
/// of size `noise` rotate the kept singular subspace by about
/// `noise / gap`, the gap being measured across the cut.
fn cut_sensitivity(values: &DVector<f64>, rank: usize, scale: f64, noise: f64) -> f64 {
    let dropped = if rank < values.len() { values[rank] } else { 0.0 };
    let kept = if rank > 0 { values[rank - 1] } else { scale.max(noise) };
    let gap = (kept - dropped).max(noise).max(1e-300);
    (noise / gap).clamp(0.0, 1.0)
}

impl Subspace {
    /// The zero subspace of `R^n`.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
            tol: 0.0,
            sensitivity: 0.0,
        }
    }

    /// All of `R^n`.
    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
            tol: 0.0,
            sensitivity: 0.0,
        }
    }

    /// Span of a list of vectors. `tol_factor` scales the default rank
    /// cutoff; pass 0 for the default. Fails on an empty list because the
    /// ambient dimension would be unknown; see [`Subspace::span_in`].
    pub fn span(vectors: &[DVector<f64>], tol_factor: f64) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptySpan)?;
        Self::span_in(first.len(), vectors, tol_factor)
    }

    /// Span of a list of vectors inside `R^ambient_dim`; an empty list
    /// gives the zero subspace.
    pub fn span_in(ambient_dim: usize, vectors: &[DVector<f64>], tol_factor: f64) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    context: "span",
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            linalg::check_finite_vector(v, "span")?;
        }
        let mut m = DMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        Self::from_columns(&m, tol_factor)
    }

    /// Span of the columns of a matrix.
    pub fn from_columns(m: &DMatrix<f64>, tol_factor: f64) -> Result<Self> {
        linalg::check_finite_matrix(m, "span")?;
        let (u, values, _) = linalg::svd_real(m, true)?;
        let sigma_max = if values.is_empty() { 0.0 } else { values[0] };
        let cutoff = effective_cutoff(m.nrows(), m.ncols(), sigma_max, tol_factor, 1.0);
        let rank = rank_by_cutoff(&values, cutoff);
        let noise = linalg::default_rank_tol(m.nrows(), m.ncols(), sigma_max);
        let sensitivity = cut_sensitivity(&values, rank, sigma_max, noise);
        let u = u.ok_or(Error::Numerical { context: "span svd" })?;
        Ok(Subspace {
            ambient_dim: m.nrows(),
            basis: u.columns(0, rank).into_owned(),
            tol: cutoff,
            sensitivity,
        })
    }

    /// Image `M[S]` of this space under a matrix.
    pub fn image(&self, m: &DMatrix<f64>, tol_factor: f64) -> Result<Self> {
        if m.ncols() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "image",
                expected: self.ambient_dim,
                found: m.ncols(),
            });
        }
        linalg::check_finite_matrix(m, "image")?;
        let sigma_m = linalg::sigma_max(m)?;
        let k = m * &self.basis;
        let (u, values, _) = linalg::svd_real(&k, true)?;
        // Rank cutoff and noise scale with the operator, not the product:
        // roundoff in K sits at eps * |M| no matter how small K is.
        let cutoff = effective_cutoff(k.nrows(), k.ncols().max(1), sigma_m, tol_factor, 4.0);
        let rank = rank_by_cutoff(&values, cutoff);
        let noise = 4.0 * linalg::default_rank_tol(k.nrows(), k.ncols().max(1), sigma_m)
            + self.sensitivity * sigma_m;
        let sensitivity = (self.sensitivity + cut_sensitivity(&values, rank, sigma_m, noise)).min(1.0);
        let u = u.ok_or(Error::Numerical { context: "image svd" })?;
        Ok(Subspace {
            ambient_dim: m.nrows(),
            basis: u.columns(0, rank).into_owned(),
            tol: cutoff,
            sensitivity,
        })
    }

    /// Preimage `M^{-1}[S] = { x : M x in S }`, the kernel of the part of
    /// `M` mapping outside `S`. Always contains the kernel of `M`.
    pub fn preimage(&self, m: &DMatrix<f64>, tol_factor: f64) -> Result<Self> {
        if m.nrows() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "preimage",
                expected: self.ambient_dim,
                found: m.nrows(),
            });
        }
        linalg::check_finite_matrix(m, "preimage")?;
        let sigma_m = linalg::sigma_max(m)?;
        // K = (I - P_S) M; x is in the preimage iff K x = 0.
        let k = m - &self.basis * (self.basis.transpose() * m);
        let (_, values, v_t) = linalg::svd_real(&k, true)?;
        let cutoff = effective_cutoff(k.nrows(), k.ncols(), sigma_m, tol_factor, 8.0);
        let rank = rank_by_cutoff(&values, cutoff);
        let noise = 8.0 * linalg::default_rank_tol(k.nrows(), k.ncols(), sigma_m)
            + self.sensitivity * sigma_m;
        let sensitivity = (self.sensitivity + cut_sensitivity(&values, rank, sigma_m, noise)).min(1.0);
        let v_t = v_t.ok_or(Error::Numerical {
            context: "preimage svd",
        })?;
        // Kernel basis: right singular vectors past the numerical rank.
        let kdim = m.ncols() - rank.min(m.ncols());
        let mut basis = DMatrix::zeros(m.ncols(), kdim);
        for (out_j, row) in (rank..rank + kdim).enumerate() {
            if row < v_t.nrows() {
                basis.set_column(out_j, &v_t.row(row).transpose());
            } else {
                // Wide defect: svd returned only min(r, c) right vectors,
                // complete the kernel from the orthogonal complement.
                return Self::preimage_via_complement(m, &k, rank, cutoff, sensitivity);
            }
        }
        Ok(Subspace {
            ambient_dim: m.ncols(),
            basis,
            tol: cutoff,
            sensitivity,
        })
    }

    /// Kernel completion when the thin SVD holds fewer right vectors than
    /// the kernel dimension (possible for wide `K`).
    fn preimage_via_complement(
        m: &DMatrix<f64>,
        k: &DMatrix<f64>,
        rank: usize,
        cutoff: f64,
        sensitivity: f64,
    ) -> Result<Self> {
        // Full kernel of K via the SVD of its transpose stacked against
        // nothing: use K^T K's null space through a square embedding.
        let gram = k.transpose() * k;
        let (u, values, _) = linalg::svd_real(&gram, true)?;
        let u = u.ok_or(Error::Numerical {
            context: "preimage completion svd",
        })?;
        let gram_cutoff = cutoff * cutoff;
        let grank = values.iter().take_while(|&&s| s > gram_cutoff).count().max(rank);
        let kdim = m.ncols() - grank.min(m.ncols());
        let basis = u.columns(grank, kdim).into_owned();
        Ok(Subspace {
            ambient_dim: m.ncols(),
            basis,
            tol: cutoff,
            sensitivity,
        })
    }

    /// Largest sine of a principal angle from `self` to `other`; zero when
    /// `self` is contained in `other`. The zero space is contained in
    /// everything.
    pub fn containment_defect(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "subspace comparison",
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        if other.dim() == 0 {
            return Ok(1.0);
        }
        let residual = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let (_, values, _) = linalg::svd_real(&residual, false)?;
        let s = if values.is_empty() { 0.0 } else { values[0] };
        Ok(s.clamp(0.0, 1.0))
    }

    /// Compare two subspaces at a sine tolerance; 0 picks an adaptive
    /// default from both spaces' sensitivities.
    pub fn compare(&self, other: &Subspace, tol: f64) -> Result<SubspaceRelation> {
        let eff = if tol > 0.0 {
            tol
        } else {
            let floor = self.ambient_dim as f64 * f64::EPSILON;
            10.0 * self.sensitivity.max(other.sensitivity).max(floor)
        };
        let fwd = self.containment_defect(other)?;
        let bwd = other.containment_defect(self)?;
        Ok(match (fwd <= eff, bwd <= eff) {
            (true, true) => SubspaceRelation::Equal,
            (true, false) => SubspaceRelation::FirstInSecond,
            (false, true) => SubspaceRelation::SecondInFirst,
            (false, false) => SubspaceRelation::Incomparable,
        })
    }

    /// Orthogonal projection of a vector onto the space.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Distance from a vector to the space.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Sine of the angle between a vector and the space; zero vector maps
    /// to zero.
    pub fn sine_angle(&self, v: &DVector<f64>) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            0.0
        } else {
            (self.distance(v) / n).clamp(0.0, 1.0)
        }
    }

    /// Sine of the angle for a complex vector against the (real) space.
    pub fn sine_angle_complex(&self, v: &DVector<C64>) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        let bc = linalg::to_complex(&self.basis);
        let proj = &bc * (bc.adjoint() * v);
        ((v - proj).norm() / n).clamp(0.0, 1.0)
    }

    /// Coordinates of a vector in the basis (its projection's weights).
    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }

    /// Vector with the given basis coordinates.
    pub fn lift(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    /// A uniformly random unit vector inside the space; `None` for the
    /// zero space.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<DVector<f64>> {
        if self.dim() == 0 {
            return None;
        }
        let c = linalg::random_unit_vector(rng, self.dim());
        Some(self.lift(&c))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// Basis columns as plain vectors, for serialization.
    pub fn basis_columns(&self) -> Vec<DVector<f64>> {
        (0..self.dim()).map(|j| self.basis.column(j).into_owned()).collect()
    }
}

/// Rank cutoff for the SVD of a matrix built from `compose` chained
/// products of operators at scale `sigma_max`. Each product layer adds
/// roundoff of order `n * eps * sigma_max`, so composite constructions
/// like `(I - P) M` need proportionally more headroom than a raw factor
/// before noise singular values start passing as rank. An explicit
/// `tol_factor` expresses the caller's own scale and is used as given.
fn effective_cutoff(
    rows: usize,
    cols: usize,
    sigma_max: f64,
    tol_factor: f64,
    compose: f64,
) -> f64 {
    if tol_factor > 0.0 {
        tol_factor * sigma_max
    } else {
        compose * linalg::default_rank_tol(rows, cols, sigma_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v2(a: f64, b: f64) -> DVector<f64> {
        DVector::from_vec(vec![a, b])
    }

    #[test]
    fn span_of_collinear_vectors_has_dim_one() {
        let s = Subspace::span(&[v2(1.0, 0.0), v2(2.0, 0.0)], 0.0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_relative_eq!(s.basis()[(0, 0)].abs(), 1.0, epsilon = 1e-14);
        assert!(s.basis()[(1, 0)].abs() < 1e-14);
    }

    #[test]
    fn empty_span_needs_ambient_dim() {
        assert!(matches!(Subspace::span(&[], 0.0), Err(Error::EmptySpan)));
        let z = Subspace::span_in(3, &[], 0.0).unwrap();
        assert_eq!((z.ambient_dim(), z.dim()), (3, 0));
        assert!(z.is_zero());
    }

    #[test]
    fn independent_pair_spans_the_plane() {
        let s = Subspace::span(&[v2(1.0, 1.0), v2(1.0, -1.0)], 0.0).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(
            s.compare(&Subspace::full(2), 0.0).unwrap(),
            SubspaceRelation::Equal
        );
    }

    #[test]
    fn image_of_full_space_under_rank_one_projector() {
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let img = Subspace::full(2).image(&e, 0.0).unwrap();
        assert_eq!(img.dim(), 1);
        let e1 = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        assert_eq!(img.compare(&e1, 0.0).unwrap(), SubspaceRelation::Equal);
    }

    #[test]
    fn preimage_under_identity_is_the_space_itself() {
        let line = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let pre = line.preimage(&DMatrix::identity(2, 2), 0.0).unwrap();
        assert_eq!(pre.compare(&line, 0.0).unwrap(), SubspaceRelation::Equal);
    }

    #[test]
    fn image_then_preimage_collapses_nilpotent_block() {
        // E = [[0,1],[0,0]] maps e2 to e1 and e1 to 0. Image of span{e1}
        // is the zero space, whose preimage under the identity stays zero.
        let e = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e1 = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let img = e1.image(&e, 0.0).unwrap();
        assert!(img.is_zero());
        let pre = img.preimage(&DMatrix::identity(2, 2), 0.0).unwrap();
        assert!(pre.is_zero());
    }

    #[test]
    fn preimage_contains_kernel() {
        // M has kernel span{e2}; the preimage of span{e1} must hold it.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let e1 = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let pre = e1.preimage(&m, 0.0).unwrap();
        assert!(pre.sine_angle(&v2(0.0, 1.0)) < 1e-12);
    }

    #[test]
    fn preimage_of_full_space_is_everything() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, -2.0, 0.5]);
        let pre = Subspace::full(2).preimage(&m, 0.0).unwrap();
        assert_eq!(pre.dim(), 2);
    }

    #[test]
    fn comparison_detects_strict_containment() {
        let line = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let plane = Subspace::full(2);
        assert_eq!(
            line.compare(&plane, 0.0).unwrap(),
            SubspaceRelation::FirstInSecond
        );
        assert_eq!(
            plane.compare(&line, 0.0).unwrap(),
            SubspaceRelation::SecondInFirst
        );
    }

    #[test]
    fn comparison_is_representation_independent() {
        let a = Subspace::span(&[v2(1.0, 1.0)], 0.0).unwrap();
        let b = Subspace::span(&[v2(-3.0, -3.0), v2(0.5, 0.5)], 0.0).unwrap();
        assert_eq!(a.compare(&b, 0.0).unwrap(), SubspaceRelation::Equal);
    }

    #[test]
    fn skew_lines_are_incomparable() {
        let a = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let b = Subspace::span(&[v2(1.0, 1.0)], 0.0).unwrap();
        assert_eq!(a.compare(&b, 0.0).unwrap(), SubspaceRelation::Incomparable);
    }

    #[test]
    fn projection_and_distance() {
        let line = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let v = v2(3.0, 4.0);
        assert_relative_eq!(line.project(&v), v2(3.0, 0.0), epsilon = 1e-14);
        assert_relative_eq!(line.distance(&v), 4.0, epsilon = 1e-14);
        assert_relative_eq!(line.sine_angle(&v), 0.8, epsilon = 1e-14);
    }

    #[test]
    fn zero_space_projects_to_zero() {
        let z = Subspace::zero(2);
        assert_eq!(z.project(&v2(1.0, 2.0)), v2(0.0, 0.0));
        assert_relative_eq!(z.distance(&v2(0.0, 3.0)), 3.0);
        assert_eq!(z.containment_defect(&Subspace::full(2)).unwrap(), 0.0);
    }

    #[test]
    fn span_rejects_nan() {
        assert!(matches!(
            Subspace::span(&[v2(f64::NAN, 0.0)], 0.0),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn near_dependent_vectors_collapse_under_loose_tolerance() {
        let s = Subspace::span(&[v2(1.0, 0.0), v2(1.0, 1e-12)], 0.0).unwrap();
        assert_eq!(s.dim(), 2); // default cutoff keeps the tiny direction
        let loose = Subspace::span(&[v2(1.0, 0.0), v2(1.0, 1e-12)], 1e-9).unwrap();
        assert_eq!(loose.dim(), 1);
    }

    #[test]
    fn complex_sine_angle_matches_real_on_real_input() {
        let line = Subspace::span(&[v2(1.0, 0.0)], 0.0).unwrap();
        let vc = DVector::from_vec(vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)]);
        assert_relative_eq!(line.sine_angle_complex(&vc), 0.8, epsilon = 1e-14);
    }
}
