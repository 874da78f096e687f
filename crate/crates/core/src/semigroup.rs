// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Reduction of a pencil to a matrix generator on its consistent
//! subspace, and evolution of initial values through the matrix
//! exponential.
//!
//! On the stabilized chain space `U`, `A` maps into `E[U]` and `E` is
//! injective (certified by the injectivity gap), so `C = E^{-1} A`
//! restricted to `U` is a well-defined matrix in basis coordinates. Mild
//! solutions of the implicit problem evolve as `u(t) = exp(-tC) u(0)`
//! inside `U`; [`verify_mild`] checks the integrated formulation
//! `E u(t) + A \int_0^t u = E u(0)` a posteriori.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::pencil::Pencil;
use crate::subspace::{Subspace, SubspaceRelation};
use crate::trace::{check_time_grid, Provenance, SolutionTrace};
use crate::wong::WongResult;

/// Tuning for [`build_generator`]; zeros select defaults.
#[derive(Debug, Clone, Default)]
pub struct GeneratorOptions {
    /// Refuse certification at or below this injectivity gap. Default:
    /// `1e3 * n * eps * sigma_max(E)`.
    pub gap_threshold: f64,
    /// Rank-cutoff scale for the subspace arithmetic, as in
    /// [`Subspace::span`]. Default adaptive.
    pub tol_factor: f64,
}

/// The reduced generator on a certified subspace.
#[derive(Debug, Clone)]
pub struct Generator {
    /// The subspace carrying the dynamics.
    pub u: Subspace,
    /// The recomputed preimage space; certified equal to `u`.
    pub v: Subspace,
    /// `C = E^{-1} A` on `u`, in basis coordinates (`d x d`). Solutions
    /// evolve by `exp(-tC)`.
    pub c_matrix: DMatrix<f64>,
    /// Smallest singular value of `E` restricted to `u`; infinite for the
    /// zero space.
    pub injectivity_gap: f64,
}

/// Smallest singular value of `E` restricted to a subspace; infinite on
/// the zero space by convention (injectivity holds vacuously).
pub fn injectivity_gap(p: &Pencil, u: &Subspace) -> Result<f64> {
    if u.ambient_dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "injectivity gap",
            expected: p.dim(),
            found: u.ambient_dim(),
        });
    }
    if u.dim() == 0 {
        return Ok(f64::INFINITY);
    }
    let k = p.e() * u.basis();
    let (_, values, _) = linalg::svd_real(&k, false)?;
    Ok(values[values.len() - 1])
}

/// Builds the generator `C = E^{-1} A` on `u`, refusing when `E` is not
/// injective enough on `u` or when `A` does not map `u` into `E[u]`
/// (detected as the preimage space differing from `u`). The chain result
/// supplies the comparison tolerance context.
pub fn build_generator(
    p: &Pencil,
    u: &Subspace,
    w: &WongResult,
    opts: &GeneratorOptions,
) -> Result<Generator> {
    let n = p.dim();
    if u.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            context: "generator subspace",
            expected: n,
            found: u.ambient_dim(),
        });
    }
    if u.dim() == 0 {
        return Ok(Generator {
            u: u.clone(),
            v: Subspace::zero(n),
            c_matrix: DMatrix::zeros(0, 0),
            injectivity_gap: f64::INFINITY,
        });
    }

    let k = p.e() * u.basis();
    let (ku, values, kvt) = linalg::svd_real(&k, true)?;
    let gap = values[values.len() - 1];
    let threshold = if opts.gap_threshold > 0.0 {
        opts.gap_threshold
    } else {
        1e3 * linalg::default_rank_tol(n, n, p.sigma_e_max())
    };
    if gap <= threshold {
        return Err(Error::InjectivityGapTooSmall { gap, threshold });
    }

    let v = u.image(p.e(), opts.tol_factor)?.preimage(p.a(), opts.tol_factor)?;
    let cmp_tol = if opts.tol_factor > 0.0 {
        10.0 * opts.tol_factor
    } else {
        // Adaptive default informed by the whole chain's accuracy.
        10.0 * w.chain_sensitivity().max(n as f64 * f64::EPSILON)
    };
    if v.compare(u, cmp_tol)? != SubspaceRelation::Equal {
        return Err(Error::DomainDefect {
            v_dim: v.dim(),
            u_dim: u.dim(),
        });
    }

    // C solves (E B) C = A B in the least-squares sense; the gap
    // certificate makes the pseudoinverse a true inverse on the range.
    let ku = ku.ok_or(Error::Numerical {
        context: "generator svd",
    })?;
    let kvt = kvt.ok_or(Error::Numerical {
        context: "generator svd",
    })?;
    let rhs = p.a() * u.basis();
    let mut projected = ku.transpose() * &rhs;
    for (i, s) in values.iter().enumerate() {
        for j in 0..projected.ncols() {
            projected[(i, j)] /= s;
        }
    }
    let c = kvt.transpose() * projected;

    // Certification: the defining relation must actually hold on u.
    let resid = (&k * &c - &rhs).norm() / (rhs.norm() + 1e-300);
    if resid > 1e-6 {
        return Err(Error::Numerical {
            context: "generator relation residual too large to certify",
        });
    }

    Ok(Generator {
        u: u.clone(),
        v,
        c_matrix: c,
        injectivity_gap: gap,
    })
}

/// Evolves `x0` through the generator: `u(t) = B exp(-tC) B^T x0`. The
/// initial value must lie in the generator's subspace to within
/// `consistency_tol` (relative; 0 selects 1e-8); times must be
/// nonnegative and strictly increasing. A uniform grid is propagated by
/// one exponential per step instead of one per time.
pub fn evolve(
    g: &Generator,
    x0: &DVector<f64>,
    times: &[f64],
    consistency_tol: f64,
) -> Result<SolutionTrace> {
    let n = g.u.ambient_dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            context: "initial value",
            expected: n,
            found: x0.len(),
        });
    }
    linalg::check_finite_vector(x0, "initial value")?;
    check_time_grid(times, true)?;

    let tol = if consistency_tol > 0.0 {
        consistency_tol
    } else {
        1e-8
    };
    let xnorm = x0.norm();
    let rel_dist = if xnorm == 0.0 {
        0.0
    } else {
        g.u.distance(x0) / xnorm
    };
    if rel_dist > tol {
        return Err(Error::InconsistentInitialValue {
            distance: rel_dist,
            tol,
        });
    }

    let y0 = g.u.coords(x0);
    let neg_c = -&g.c_matrix;
    let m = times.len();
    let mut states = Vec::with_capacity(m);

    let uniform = m >= 2 && {
        let dt = times[1] - times[0];
        times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.abs().max(1.0))
    };

    if uniform {
        let dt = times[1] - times[0];
        let step = linalg::matrix_exp(&(&neg_c * dt))?;
        let mut y = linalg::matrix_exp(&(&neg_c * times[0]))? * &y0;
        for i in 0..m {
            states.push(g.u.lift(&y));
            if i + 1 < m {
                y = &step * y;
            }
        }
    } else {
        for &t in times {
            let y = linalg::matrix_exp(&(&neg_c * t))? * &y0;
            states.push(g.u.lift(&y));
        }
    }

    Ok(SolutionTrace {
        times: times.to_vec(),
        states,
        x0: x0.clone(),
        provenance: Provenance::Semigroup,
        residual_profile: None,
        contour: None,
    })
}

/// Result of checking the integrated (mild) formulation along a trace.
#[derive(Debug, Clone)]
pub struct MildCheck {
    /// `|E u(t_i) + A Q(t_i) - E x0| / max(1, |E x0|)` per time, `Q` the
    /// running quadrature of the states.
    pub profile: Vec<f64>,
    pub max_residual: f64,
}

/// Verifies `E u(t) + A \int_0^t u = E x0` along the trace by cumulative
/// quadrature, writing the residual profile back into the trace. The
/// integral starts at the trace's first time, so grids should start at 0
/// for the residual to mean what the formula says.
pub fn verify_mild(p: &Pencil, tr: &mut SolutionTrace) -> Result<MildCheck> {
    if tr.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "mild check",
            expected: p.dim(),
            found: tr.dim(),
        });
    }
    check_time_grid(&tr.times, false)?;
    if tr.states.len() != tr.times.len() {
        return Err(Error::DimensionMismatch {
            context: "mild check states",
            expected: tr.times.len(),
            found: tr.states.len(),
        });
    }
    let q = linalg::cumulative_integral(&tr.times, &tr.states)?;
    let ex0 = p.e() * &tr.x0;
    let scale = 1.0f64.max(ex0.norm());
    let profile: Vec<f64> = tr
        .states
        .iter()
        .zip(&q)
        .map(|(u, qi)| (p.e() * u + p.a() * qi - &ex0).norm() / scale)
        .collect();
    let max_residual = profile.iter().copied().fold(0.0, f64::max);
    tr.residual_profile = Some(profile.clone());
    Ok(MildCheck {
        profile,
        max_residual,
    })
}

/// Max over random unit `x` in the generator's domain of
/// `|E(-Cx) + Ax|`; zero when the relation `-E C = A` holds on the
/// subspace.
pub fn verify_generator_relation<R: Rng + ?Sized>(
    p: &Pencil,
    g: &Generator,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if g.u.dim() == 0 {
        return Ok(0.0);
    }
    let mut max = 0.0f64;
    for _ in 0..samples {
        let c = linalg::random_unit_vector(rng, g.u.dim());
        let x = g.u.lift(&c);
        let cx = g.u.lift(&(&g.c_matrix * &c));
        let defect = (p.a() * &x - p.e() * &cx).norm();
        max = max.max(defect);
    }
    Ok(max)
}

/// Spectral-norm difference between `(zI + C)^{-1}` and the compressed
/// resolvent `B^T (zE+A)^{-1} E B`, both in subspace coordinates; the two
/// agree when the generator faithfully reduces the pencil.
pub fn resolvent_consistency_defect(p: &Pencil, g: &Generator, z: C64) -> Result<f64> {
    let d = g.u.dim();
    if d == 0 {
        return Ok(0.0);
    }
    let mut shifted = linalg::to_complex(&g.c_matrix);
    for i in 0..d {
        shifted[(i, i)] += z;
    }
    let inv = shifted
        .lu()
        .solve(&DMatrix::<C64>::identity(d, d))
        .ok_or(Error::SingularPoint {
            re: z.re,
            im: z.im,
            sigma_min: 0.0,
        })?;

    let solver = p.resolvent_solver(z)?;
    let bc = linalg::to_complex(g.u.basis());
    let mut compressed = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        let eb = linalg::to_complex_vec(&(p.e() * g.u.basis().column(j).into_owned()));
        let col = bc.adjoint() * solver.solve(&eb)?;
        compressed.set_column(j, &col);
    }
    let diff = inv - compressed;
    let values = linalg::svd_complex_values(&diff)?;
    Ok(if values.is_empty() { 0.0 } else { values[0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wong::wong_sequence;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_pencil() -> Pencil {
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        Pencil::new(e, a).unwrap()
    }

    fn diag_generator() -> (Pencil, Generator) {
        let p = diag_pencil();
        let w = wong_sequence(&p, 0.0, 0).unwrap();
        let u = w.stabilized_space().clone();
        let g = build_generator(&p, &u, &w, &GeneratorOptions::default()).unwrap();
        (p, g)
    }

    #[test]
    fn generator_of_diagonal_pencil() {
        let (_, g) = diag_generator();
        assert_eq!(g.c_matrix.shape(), (1, 1));
        assert_relative_eq!(g.c_matrix[(0, 0)], 2.0, epsilon = 1e-12);
        assert_relative_eq!(g.injectivity_gap, 1.0, epsilon = 1e-12);
        assert_eq!(g.v.dim(), 1);
    }

    #[test]
    fn generator_refuses_space_that_a_maps_outside() {
        // E = I keeps every space injective, but the rotation A carries
        // span{e1} onto span{e2}, so the domain relation fails.
        let e = DMatrix::identity(2, 2);
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let p = Pencil::new(e, a).unwrap();
        let w = wong_sequence(&p, 0.0, 0).unwrap();
        let u = Subspace::span(&[DVector::from_vec(vec![1.0, 0.0])], 0.0).unwrap();
        let err = build_generator(&p, &u, &w, &GeneratorOptions::default());
        assert!(matches!(
            err,
            Err(Error::DomainDefect {
                v_dim: 1,
                u_dim: 1
            })
        ));
    }

    #[test]
    fn generator_refuses_tiny_injectivity_gap() {
        let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-14]);
        let a = DMatrix::identity(2, 2);
        let p = Pencil::new(e, a).unwrap();
        let w = wong_sequence(&p, 0.0, 0).unwrap();
        let u = w.stabilized_space().clone();
        assert_eq!(u.dim(), 2); // rank cutoff keeps the weak direction
        assert!(matches!(
            build_generator(&p, &u, &w, &GeneratorOptions::default()),
            Err(Error::InjectivityGapTooSmall { .. })
        ));
    }

    #[test]
    fn zero_space_gets_trivial_generator() {
        let e = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let a = DMatrix::identity(2, 2);
        let p = Pencil::new(e, a).unwrap();
        let w = wong_sequence(&p, 0.0, 0).unwrap();
        let u = w.stabilized_space().clone();
        let g = build_generator(&p, &u, &w, &GeneratorOptions::default()).unwrap();
        assert_eq!(g.c_matrix.shape(), (0, 0));
        assert_eq!(g.injectivity_gap, f64::INFINITY);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            verify_generator_relation(&p, &g, 5, &mut rng).unwrap(),
            0.0
        );
    }

    #[test]
    fn evolution_matches_scalar_decay() {
        let (_, g) = diag_generator();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let tr = evolve(&g, &x0, &[0.0, 0.5, 1.0], 0.0).unwrap();
        for (i, &t) in tr.times.iter().enumerate() {
            assert_relative_eq!(tr.states[i][0], (-2.0 * t).exp(), epsilon = 1e-13);
            assert!(tr.states[i][1].abs() < 1e-15);
        }
        assert_eq!(tr.provenance, Provenance::Semigroup);
    }

    #[test]
    fn nonuniform_grid_matches_uniform_values() {
        let (_, g) = diag_generator();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let tr = evolve(&g, &x0, &[0.0, 0.1, 0.4, 1.0], 0.0).unwrap();
        for (i, &t) in tr.times.iter().enumerate() {
            assert_relative_eq!(tr.states[i][0], (-2.0 * t).exp(), epsilon = 1e-13);
        }
    }

    #[test]
    fn inconsistent_initial_value_is_refused() {
        let (_, g) = diag_generator();
        let x0 = DVector::from_vec(vec![0.0, 1.0]);
        assert!(matches!(
            evolve(&g, &x0, &[0.0, 1.0], 0.0),
            Err(Error::InconsistentInitialValue { .. })
        ));
    }

    #[test]
    fn mild_residual_is_small_along_semigroup_trace() {
        let (p, g) = diag_generator();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let times: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let mut tr = evolve(&g, &x0, &times, 0.0).unwrap();
        let check = verify_mild(&p, &mut tr).unwrap();
        assert!(check.max_residual < 1e-7, "max {}", check.max_residual);
        assert_relative_eq!(check.profile[0], 0.0, epsilon = 1e-14);
        assert!(tr.residual_profile.is_some());
    }

    #[test]
    fn generator_relation_holds() {
        let (p, g) = diag_generator();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let max = verify_generator_relation(&p, &g, 20, &mut rng).unwrap();
        assert!(max < 1e-12, "relation defect {}", max);
    }

    #[test]
    fn compressed_resolvent_matches_generator_resolvent() {
        let (p, g) = diag_generator();
        for z in [C64::new(1.0, 0.0), C64::new(2.0, 3.0)] {
            let d = resolvent_consistency_defect(&p, &g, z).unwrap();
            assert!(d < 1e-12, "defect {} at {}", d, z);
        }
    }

    #[test]
    fn semigroup_law_on_sampled_pairs() {
        let (_, g) = diag_generator();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let tr = evolve(&g, &x0, &[0.0, 0.25, 0.75], 0.0).unwrap();
        // Evolve from u(0.25) for another 0.5 and compare against u(0.75).
        let mid = tr.states[1].clone();
        let hop = evolve(&g, &mid, &[0.5], 0.0).unwrap();
        assert_relative_eq!(hop.states[0][0], tr.states[2][0], epsilon = 1e-12);
    }
}
