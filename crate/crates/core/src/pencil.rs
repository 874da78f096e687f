// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix pencils `(E, A)`, their resolvents, and empirical index
//! estimation from resolvent-norm growth.
//!
//! The resolvent at `z` is `(zE + A)^{-1}`. Its norm along a right
//! half-plane controls well-posedness of the implicit evolution problem:
//! the index is the smallest `k` with `|(zE+A)^{-1}| <= C |z|^k` there.
//! [`estimate_index`] samples norms on a logarithmic grid, fits the growth
//! exponent, and rounds with a dead band so borderline fits are flagged
//! rather than silently truncated.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// A pair of square real matrices acting on the same space.
#[derive(Debug, Clone)]
pub struct Pencil {
    e: DMatrix<f64>,
    a: DMatrix<f64>,
    sigma_e: f64,
    sigma_a: f64,
}

impl Pencil {
    pub fn new(e: DMatrix<f64>, a: DMatrix<f64>) -> Result<Self> {
        if e.nrows() != e.ncols() {
            return Err(Error::DimensionMismatch {
                context: "pencil E",
                expected: e.nrows(),
                found: e.ncols(),
            });
        }
        if a.nrows() != a.ncols() || a.nrows() != e.nrows() {
            return Err(Error::DimensionMismatch {
                context: "pencil A",
                expected: e.nrows(),
                found: a.nrows(),
            });
        }
        linalg::check_finite_matrix(&e, "pencil E")?;
        linalg::check_finite_matrix(&a, "pencil A")?;
        let sigma_e = linalg::sigma_max(&e)?;
        let sigma_a = linalg::sigma_max(&a)?;
        Ok(Pencil {
            e,
            a,
            sigma_e,
            sigma_a,
        })
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    /// Largest singular value of `E`, cached at construction.
    pub fn sigma_e_max(&self) -> f64 {
        self.sigma_e
    }

    /// Largest singular value of `A`, cached at construction.
    pub fn sigma_a_max(&self) -> f64 {
        self.sigma_a
    }

    /// The matrix `zE + A`.
    pub fn resolvent_point(&self, z: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            z * self.e[(i, j)] + self.a[(i, j)]
        })
    }

    /// Factors `zE + A` once for repeated resolvent applications.
    pub fn resolvent_solver(&self, z: C64) -> Result<ResolventSolver> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "resolvent point",
            });
        }
        let m = self.resolvent_point(z);
        let scale = linalg::one_norm_c(&m);
        let lu = m.clone().lu();
        Ok(ResolventSolver { m, lu, z, scale })
    }

    /// Applies `(zE + A)^{-1}` to a complex vector.
    pub fn resolvent_apply(&self, z: C64, b: &DVector<C64>) -> Result<DVector<C64>> {
        self.resolvent_solver(z)?.solve(b)
    }

    /// Applies `(zE + A)^{-1}` to a real vector.
    pub fn resolvent_apply_real(&self, z: C64, b: &DVector<f64>) -> Result<DVector<C64>> {
        linalg::check_finite_vector(b, "resolvent right-hand side")?;
        self.resolvent_apply(z, &linalg::to_complex_vec(b))
    }

    /// Smallest singular value of `zE + A`. Small pencils go through a
    /// full decomposition; larger ones through inverse power iteration,
    /// which the resolvent scans need to stay cheap.
    pub fn sigma_min(&self, z: C64) -> Result<f64> {
        let m = self.resolvent_point(z);
        if self.dim() <= 32 {
            let vals = linalg::svd_complex_values(&m)?;
            Ok(if vals.is_empty() {
                0.0
            } else {
                vals[vals.len() - 1]
            })
        } else {
            linalg::sigma_min_complex_iter(&m)
        }
    }

    /// Spectral norm of the resolvent, `1 / sigma_min(zE + A)`. Fails when
    /// the point is singular at working precision, judged against the
    /// scale `|z| |E| + |A|` of the evaluated operator.
    pub fn resolvent_norm(&self, z: C64) -> Result<f64> {
        if self.dim() == 0 {
            return Err(Error::InvalidInput {
                reason: "resolvent norm of an empty pencil",
            });
        }
        let smin = self.sigma_min(z)?;
        let scale = z.norm() * self.sigma_e + self.sigma_a;
        let cutoff = linalg::default_rank_tol(self.dim(), self.dim(), scale);
        if smin <= cutoff {
            return Err(Error::SingularPoint {
                re: z.re,
                im: z.im,
                sigma_min: smin,
            });
        }
        Ok(1.0 / smin)
    }
}

/// A factored resolvent point `(zE + A)^{-1}` with a residual-checked
/// solve.
pub struct ResolventSolver {
    m: DMatrix<C64>,
    lu: LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    z: C64,
    scale: f64,
}

impl ResolventSolver {
    pub fn z(&self) -> C64 {
        self.z
    }

    /// Solves `(zE + A) x = b` with one refinement step, verifying the
    /// residual afterwards; a singular factorization surfaces here.
    pub fn solve(&self, b: &DVector<C64>) -> Result<DVector<C64>> {
        if !b.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "resolvent right-hand side",
            });
        }
        let fail = || Error::SingularPoint {
            re: self.z.re,
            im: self.z.im,
            sigma_min: 0.0,
        };
        let mut x = self.lu.solve(b).ok_or_else(fail)?;
        if !x.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(fail());
        }
        let r = b - &self.m * &x;
        if let Some(dx) = self.lu.solve(&r) {
            if dx.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                x += dx;
            }
        }
        // Residual certificate: far above eps * cond means the point is
        // effectively singular rather than merely ill-conditioned.
        let resid = (b - &self.m * &x).norm();
        let bnorm = b.norm();
        if resid > 1e-8 * (bnorm + self.scale * x.norm()) {
            return Err(Error::SingularPoint {
                re: self.z.re,
                im: self.z.im,
                sigma_min: resid / (x.norm() + 1e-300),
            });
        }
        Ok(x)
    }
}

/// Logarithmic sampling layout for [`estimate_index`]: `decades` of radii
/// from `max(1, rho0)` upward with `points_per_decade` samples each, and
/// up to `max_extra_decades` more when the fitted exponent is ambiguous.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub decades: u32,
    pub points_per_decade: u32,
    pub max_extra_decades: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            decades: 4,
            points_per_decade: 10,
            max_extra_decades: 2,
        }
    }
}

/// One resolvent-norm probe.
#[derive(Debug, Clone, Copy)]
pub struct ResolventSample {
    pub z: C64,
    pub resolvent_norm: f64,
}

/// Result of empirical index estimation.
#[derive(Debug, Clone)]
pub struct IndexEstimate {
    /// Abscissa bounding the sampled half-plane from the left.
    pub rho0: f64,
    /// All successful probes, in deterministic grid order.
    pub samples: Vec<ResolventSample>,
    /// Least-squares growth exponent of the norm over the top decade.
    pub fitted_exponent: f64,
    /// `max(0, round(fitted_exponent))`.
    pub index: usize,
    /// `max` over samples of `norm / |z|^index`.
    pub constant_c: f64,
    /// The fit stayed in the dead band around a half-integer even after
    /// extending the grid.
    pub ambiguous: bool,
    /// Grid points skipped because `zE + A` was singular there.
    pub singular_points: usize,
}

/// Fit the resolvent growth exponent on a logarithmic grid right of
/// `rho0`: radii along the real axis and matching points on the vertical
/// line `Re z = rho0`. The index is the rounded exponent clamped at zero;
/// a fit within 0.25 of a half-integer extends the grid decade by decade
/// before being flagged ambiguous.
pub fn estimate_index(p: &Pencil, rho0: f64, grid: &GridSpec) -> Result<IndexEstimate> {
    if !rho0.is_finite() {
        return Err(Error::NonFinite { context: "rho0" });
    }
    if grid.decades < 2 {
        return Err(Error::InvalidGrid {
            reason: "index fit needs at least two decades of samples",
        });
    }
    if grid.points_per_decade < 2 {
        return Err(Error::InvalidGrid {
            reason: "index fit needs at least two points per decade",
        });
    }

    let lo = 1.0_f64.max(rho0);
    let ppd = grid.points_per_decade;
    let mut samples: Vec<ResolventSample> = Vec::new();
    let mut singular = 0usize;
    let mut sampled_upto = 0u32; // highest radius exponent index so far

    let probe = |samples: &mut Vec<ResolventSample>, singular: &mut usize, z: C64| {
        match p.resolvent_norm(z) {
            Ok(norm) => samples.push(ResolventSample {
                z,
                resolvent_norm: norm,
            }),
            Err(_) => *singular += 1,
        }
    };

    let mut decades_now = grid.decades;
    loop {
        // Extend radii up to lo * 10^decades_now.
        for k in (sampled_upto + 1)..=(decades_now * ppd) {
            let r = lo * linalg::powf(10.0, f64::from(k) / f64::from(ppd));
            probe(&mut samples, &mut singular, C64::new(r, 0.0));
            if r >= rho0.abs() {
                let im = linalg::sqrt((r * r - rho0 * rho0).max(0.0));
                if im > 0.0 {
                    probe(&mut samples, &mut singular, C64::new(rho0, im));
                }
            }
        }
        if sampled_upto == 0 {
            // The base radius itself, sampled once.
            probe(&mut samples, &mut singular, C64::new(lo, 0.0));
        }
        sampled_upto = decades_now * ppd;

        if samples.is_empty() {
            return Err(Error::SingularPoint {
                re: lo,
                im: 0.0,
                sigma_min: 0.0,
            });
        }

        // Fit over the top decade of |z|.
        let r_max = lo * linalg::powf(10.0, f64::from(decades_now));
        let floor = r_max / 10.0 * (1.0 - 1e-12);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for s in &samples {
            if s.z.norm() >= floor {
                xs.push(s.z.norm());
                ys.push(s.resolvent_norm);
            }
        }
        if xs.len() < 3 {
            return Err(Error::InvalidGrid {
                reason: "too few resolvent samples survive in the top decade",
            });
        }
        let (slope, _) = linalg::fit_loglog(&xs, &ys)?;
        let nearest = linalg::round(slope);
        let ambiguous_now = (slope - nearest).abs() > 0.25;

        if ambiguous_now && decades_now < grid.decades + grid.max_extra_decades {
            decades_now += 1;
            continue;
        }

        let index = if nearest < 0.0 { 0 } else { nearest as usize };
        let constant_c = samples
            .iter()
            .map(|s| s.resolvent_norm / linalg::powi(s.z.norm(), index as i32))
            .fold(0.0, f64::max);
        return Ok(IndexEstimate {
            rho0,
            samples,
            fitted_exponent: slope,
            index,
            constant_c,
            ambiguous: ambiguous_now,
            singular_points: singular,
        });
    }
}
