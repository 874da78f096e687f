// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the integration suites: reference pencils with
//! closed-form behavior, seeded random pencil families, and an
//! elimination-based rank oracle independent of the library's SVD path.

#![allow(dead_code)]

use daepl_core::linalg::standard_normal;
use daepl_core::Pencil;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Diagonal reference pencil: E = diag(1, 0), A = diag(2, 1). The
/// resolvent is diag(1/(z+2), 1), the chain stabilizes at span{e1}, and
/// the trajectory from e1 is e^{-2t} e1.
pub fn diag_pencil() -> Pencil {
    let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    Pencil::new(e, a).unwrap()
}

/// Nilpotent reference pencil: E = [[0,1],[0,0]], A = I. The resolvent
/// is [[1,-z],[0,1]], growing linearly, and the chain collapses to the
/// zero space.
pub fn nilpotent_pencil() -> Pencil {
    let e = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let a = DMatrix::identity(2, 2);
    Pencil::new(e, a).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| standard_normal(rng))
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian draw.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    random_matrix(rng, n, n).qr().q()
}

fn factor_with_spectrum(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.gen_range(lo..hi));
    q1 * DMatrix::from_diagonal(&d) * q2.transpose()
}

/// Both coefficients invertible with singular values in fixed bands, so
/// `|E^{-1}A| <= 2/0.6` bounds the generator and places every pole of the
/// resolvent in `|z| <= 10/3`. With `rho0 = 3.5` these pencils have a
/// bounded resolvent on the right of the abscissa: index zero.
pub fn random_invertible_pencil(rng: &mut ChaCha8Rng, n: usize) -> Pencil {
    let e = factor_with_spectrum(rng, n, 0.6, 1.8);
    let a = factor_with_spectrum(rng, n, 0.5, 2.0);
    Pencil::new(e, a).unwrap()
}

/// Abscissa to the right of every pole the invertible family can have.
pub const RANDOM_RHO0: f64 = 3.5;

/// Semi-explicit pencil: E = diag(I_k, 0) in a random orthogonal frame,
/// A invertible. The chain stabilizes at dimension k after one step and
/// E restricted to it stays injective, so a generator exists; the
/// resolvent is bounded on the right half-plane.
pub fn random_semi_explicit_pencil(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Pencil {
    assert!(k < n);
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |i, _| if i < k { rng.gen_range(0.6..1.8) } else { 0.0 });
    let e = &q1 * DMatrix::from_diagonal(&d) * q2.transpose();
    let a = factor_with_spectrum(rng, n, 0.5, 2.0);
    Pencil::new(e, a).unwrap()
}

/// Semi-explicit draw conditioned for evolution work: redraws until the
/// restriction of E to the stabilized space keeps a healthy gap and
/// every finite pencil pole stays left of Re z = 3, inside the margin
/// that RANDOM_RHO0 gives the invertible family. Deterministic for a
/// fixed rng state.
pub fn random_bounded_semi_explicit_pencil(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Pencil {
    use daepl_core::semigroup::{build_generator, GeneratorOptions};
    use daepl_core::wong::wong_sequence;

    for _ in 0..200 {
        let p = random_semi_explicit_pencil(rng, n, k);
        let Ok(w) = wong_sequence(&p, 0.0, 0) else {
            continue;
        };
        if w.stabilized_space().dim() != k {
            continue;
        }
        let Ok(g) = build_generator(&p, w.stabilized_space(), &w, &GeneratorOptions::default())
        else {
            continue;
        };
        if g.injectivity_gap < 0.45 {
            continue;
        }
        // Poles sit at minus the generator spectrum.
        if g.c_matrix.complex_eigenvalues().iter().all(|l| l.re >= -3.0) {
            return p;
        }
    }
    panic!("no bounded semi-explicit draw in 200 attempts");
}

/// The nilpotent reference pencil conjugated by random well-conditioned
/// frames; keeps the linear resolvent growth and the collapsing chain.
pub fn random_nilpotent_like(rng: &mut ChaCha8Rng) -> Pencil {
    let s = factor_with_spectrum(rng, 2, 0.6, 1.8);
    let t = factor_with_spectrum(rng, 2, 0.6, 1.8);
    let p2 = nilpotent_pencil();
    Pencil::new(&s * p2.e() * &t, &s * p2.a() * &t).unwrap()
}

/// Rank of a matrix by Gauss-Jordan elimination with partial pivoting,
/// independent of the SVD used inside the library.
pub fn rref_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (pivot, mag) = (rank..rows)
            .map(|r| (r, a[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag <= tol {
            continue;
        }
        a.swap_rows(rank, pivot);
        let p = a[(rank, col)];
        for c in col..cols {
            a[(rank, c)] /= p;
        }
        for r in 0..rows {
            if r != rank {
                let f = a[(r, col)];
                if f != 0.0 {
                    for c in col..cols {
                        a[(r, c)] -= f * a[(rank, c)];
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Uniform time grid including both endpoints.
pub fn uniform_grid(t0: f64, t1: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| t0 + (t1 - t0) * i as f64 / (m - 1) as f64)
        .collect()
}
