// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared numerical kernels: SVD wrappers with finiteness guards, the
//! matrix exponential, quadrature weights, and small statistics helpers.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

// Transcendental functions routed through `num_traits::Float` so the crate
// builds against `core`. Inherent f64 methods would shadow these under std
// and vanish without it; explicit calls keep both profiles identical.
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}
pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}
pub(crate) fn log2(x: f64) -> f64 {
    Float::log2(x)
}
pub(crate) fn cos(x: f64) -> f64 {
    Float::cos(x)
}
pub(crate) fn ceil(x: f64) -> f64 {
    Float::ceil(x)
}
pub(crate) fn round(x: f64) -> f64 {
    Float::round(x)
}
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    Float::powf(x, y)
}
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    Float::powi(x, n)
}

pub(crate) fn check_finite_matrix(m: &DMatrix<f64>, context: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

pub(crate) fn check_finite_vector(v: &DVector<f64>, context: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

pub(crate) fn check_finite_cmatrix(m: &DMatrix<C64>, context: &'static str) -> Result<()> {
    if m.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Absolute rank cutoff `max(rows, cols) * eps * sigma_max`, the scaling
/// under which a singular value is indistinguishable from zero.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Singular values of a real matrix, descending. `vectors` also returns
/// `(U, V^T)`. The fast bidiagonalization path is not trusted blindly:
/// on some inputs with clustered singular values it converges to an
/// orthogonal but wrong factorization, so whenever vectors are requested
/// the product `U S V^T` is checked against the input and a one-sided
/// Jacobi pass replaces the result if it disagrees beyond roundoff.
pub(crate) fn svd_real(
    m: &DMatrix<f64>,
    vectors: bool,
) -> Result<(Option<DMatrix<f64>>, DVector<f64>, Option<DMatrix<f64>>)> {
    check_finite_matrix(m, "svd input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        let k = m.nrows().min(m.ncols());
        let shape = |r, c| DMatrix::<f64>::zeros(r, c);
        return Ok((
            vectors.then(|| shape(m.nrows(), k)),
            DVector::zeros(k),
            vectors.then(|| shape(k, m.ncols())),
        ));
    }
    let cap = 100 * m.nrows().max(m.ncols());
    if let Some(svd) = m.clone().try_svd(vectors, vectors, f64::EPSILON, cap) {
        if !vectors {
            return Ok((None, svd.singular_values, None));
        }
        let u = svd.u.expect("u requested");
        let vt = svd.v_t.expect("v_t requested");
        let vals = svd.singular_values;
        let recon = &u * DMatrix::from_diagonal(&vals) * &vt;
        let tol = 1e3 * m.nrows().max(m.ncols()) as f64 * f64::EPSILON * vals[0];
        if (m - recon).norm() <= tol {
            return Ok((Some(u), vals, Some(vt)));
        }
    }
    let (u, vals, vt) = jacobi_svd_real(m)?;
    Ok((vectors.then_some(u), vals, vectors.then_some(vt)))
}

/// One-sided Jacobi SVD: cyclic sweeps rotate column pairs of a working
/// copy until all pairs are orthogonal, the rotations accumulate into
/// `V`, and the column norms become the singular values. Much slower
/// than bidiagonalization but accurate to roundoff in every factor,
/// including clustered-spectrum inputs that defeat the fast path.
fn jacobi_svd_real(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    if m.nrows() >= m.ncols() {
        return jacobi_svd_tall(m);
    }
    // Wide input: factor the transpose and swap the roles of U and V.
    let (u, vals, vt) = jacobi_svd_tall(&m.transpose())?;
    Ok((vt.transpose(), vals, u.transpose()))
}

fn jacobi_svd_tall(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let (rows, cols) = m.shape();
    let mut w = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);

    let mut sweeps = 0usize;
    loop {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in p + 1..cols {
                let a = w.column(p).norm_squared();
                let b = w.column(q).norm_squared();
                let c = w.column(p).dot(&w.column(q));
                if a == 0.0 || b == 0.0 || c.abs() <= f64::EPSILON * sqrt(a * b) {
                    continue;
                }
                rotated = true;
                // Rotation angle zeroing the off-diagonal Gram entry:
                // t^2 + 2 zeta t - 1 = 0, smaller root for stability.
                let zeta = (b - a) / (2.0 * c);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                };
                let cs = 1.0 / sqrt(1.0 + t * t);
                let sn = cs * t;
                for i in 0..rows {
                    let xp = w[(i, p)];
                    let xq = w[(i, q)];
                    w[(i, p)] = cs * xp - sn * xq;
                    w[(i, q)] = sn * xp + cs * xq;
                }
                for i in 0..cols {
                    let xp = v[(i, p)];
                    let xq = v[(i, q)];
                    v[(i, p)] = cs * xp - sn * xq;
                    v[(i, q)] = sn * xp + cs * xq;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps > 64 {
            return Err(Error::Numerical {
                context: "jacobi svd sweeps",
            });
        }
    }

    // Column norms are the singular values; order them descending.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let mut vals = DVector::zeros(cols);
    let mut u = DMatrix::<f64>::zeros(rows, cols);
    let mut vt = DMatrix::<f64>::zeros(cols, cols);
    for (slot, &j) in order.iter().enumerate() {
        vals[slot] = norms[j];
        vt.set_row(slot, &v.column(j).transpose());
        if norms[j] > 0.0 {
            u.set_column(slot, &(w.column(j) / norms[j]));
        }
    }
    // Exactly vanished columns leave holes in U; fill them with an
    // orthonormal completion so the factor stays usable as a frame.
    for slot in 0..cols {
        if vals[slot] > 0.0 {
            continue;
        }
        let mut best: Option<(f64, DVector<f64>)> = None;
        for i in 0..rows {
            let mut cand = DVector::zeros(rows);
            cand[i] = 1.0;
            for _ in 0..2 {
                let coeffs = u.transpose() * &cand;
                cand -= &u * coeffs;
            }
            let n = cand.norm();
            if best.as_ref().map(|(bn, _)| n > *bn).unwrap_or(true) {
                best = Some((n, cand));
            }
            if n > 0.5 {
                break;
            }
        }
        let (n, cand) = best.expect("rows >= cols leaves a completion direction");
        if n == 0.0 {
            return Err(Error::Numerical {
                context: "svd frame completion",
            });
        }
        u.set_column(slot, &(cand / n));
    }
    Ok((u, vals, vt))
}

/// Singular values of a complex matrix, descending, values only. When
/// the iterative path gives up, the Hermitian spectrum of `M^H M`
/// supplies the values; squaring costs accuracy on the smallest ones,
/// acceptable for the norm-level consumers of this function.
pub(crate) fn svd_complex_values(m: &DMatrix<C64>) -> Result<DVector<f64>> {
    check_finite_cmatrix(m, "svd input")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(DVector::zeros(m.nrows().min(m.ncols())));
    }
    let cap = 100 * m.nrows().max(m.ncols());
    if let Some(svd) = m.clone().try_svd(false, false, f64::EPSILON, cap) {
        return Ok(svd.singular_values);
    }
    let gram = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|&l| sqrt(l.max(0.0))).collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(DVector::from_vec(vals))
}

/// Largest singular value; zero for an empty matrix.
pub(crate) fn sigma_max(m: &DMatrix<f64>) -> Result<f64> {
    let (_, vals, _) = svd_real(m, false)?;
    Ok(if vals.is_empty() { 0.0 } else { vals[0] })
}

/// Smallest singular value of a square complex matrix by inverse power
/// iteration on `(M^H M)^{-1}`. Much cheaper than a full decomposition
/// for the larger resolvent scans; the Rayleigh estimate of the dominant
/// inverse eigenvalue converges linearly with the squared gap ratio.
/// Exactly singular input surfaces as a huge iterate, reported as a
/// vanishing singular value rather than an error.
pub(crate) fn sigma_min_complex_iter(m: &DMatrix<C64>) -> Result<f64> {
    check_finite_cmatrix(m, "inverse iteration input")?;
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: "inverse iteration input",
            expected: n,
            found: m.ncols(),
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let lu = m.clone().lu();
    let lu_h = m.adjoint().lu();

    // Deterministic full-support start vector.
    let mut state = 0x2545f4914f6cdd1du64;
    let mut unit = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut x = DVector::from_fn(n, |_, _| C64::new(unit(), unit()));
    let xn = x.norm();
    x /= C64::new(xn, 0.0);

    let mut lambda_prev = 0.0f64;
    for iter in 0..500 {
        // A refused solve means the factorization found exact rank loss.
        let Some(y) = lu.solve(&x) else {
            return Ok(0.0);
        };
        let Some(w) = lu_h.solve(&y) else {
            return Ok(0.0);
        };
        // Rayleigh quotient of the Hermitian operator (M^H M)^{-1}.
        let lambda: f64 = x.iter().zip(w.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        if !lambda.is_finite() || lambda > 1e280 {
            return Ok(0.0); // numerically singular
        }
        let wn = w.norm();
        if wn == 0.0 {
            return Err(Error::Numerical {
                context: "inverse iteration collapse",
            });
        }
        x = w / C64::new(wn, 0.0);
        if iter > 0 && (lambda - lambda_prev).abs() <= 1e-13 * lambda.abs() {
            lambda_prev = lambda;
            break;
        }
        lambda_prev = lambda;
    }
    if lambda_prev <= 0.0 {
        return Err(Error::Numerical {
            context: "inverse iteration nonpositive estimate",
        });
    }
    Ok(1.0 / sqrt(lambda_prev))
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

pub(crate) fn to_complex_vec(v: &DVector<f64>) -> DVector<C64> {
    v.map(|x| C64::new(x, 0.0))
}

pub(crate) fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn one_norm_c(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by degree-13 Pade approximation with scaling and
/// squaring, the standard double-precision configuration.
pub fn matrix_exp(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            context: "matrix exponential",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    check_finite_matrix(a, "matrix exponential input")?;

    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        ceil(log2(norm / THETA_13)) as i32
    } else {
        0
    };
    let scaled = a * powi(2.0, -s);

    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let eye = DMatrix::<f64>::identity(n, n);

    let w = &a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
        + B[7] * &a6
        + B[5] * &a4
        + B[3] * &a2
        + B[1] * &eye;
    let u = &scaled * w;
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &eye;

    let rhs = &v + &u;
    let lhs = &v - &u;
    let mut r = lhs.lu().solve(&rhs).ok_or(Error::Numerical {
        context: "matrix exponential solve",
    })?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Weights integrating the quadratic through `(t0, t1, t2)` over `[ta, tb]`.
fn parabola_weights(t0: f64, t1: f64, t2: f64, ta: f64, tb: f64) -> (f64, f64, f64) {
    // Antiderivative of (t - p)(t - q) evaluated on [ta, tb].
    let seg = |p: f64, q: f64| {
        let f = |t: f64| t * t * t / 3.0 - (p + q) * t * t / 2.0 + p * q * t;
        f(tb) - f(ta)
    };
    (
        seg(t1, t2) / ((t0 - t1) * (t0 - t2)),
        seg(t0, t2) / ((t1 - t0) * (t1 - t2)),
        seg(t0, t1) / ((t2 - t0) * (t2 - t1)),
    )
}

/// Running integral `Q_i = \int_{t_0}^{t_i} v` of a sampled vector path,
/// each interval integrated by the quadratic through three neighboring
/// samples (degenerating to the trapezoid on two points).
pub fn cumulative_integral(times: &[f64], values: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            context: "cumulative integral",
            expected: times.len(),
            found: values.len(),
        });
    }
    let m = times.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let dim = values[0].len();
    let mut out = Vec::with_capacity(m);
    out.push(DVector::zeros(dim));
    if m == 1 {
        return Ok(out);
    }
    if m == 2 {
        let q = (&values[0] + &values[1]) * (0.5 * (times[1] - times[0]));
        out.push(q);
        return Ok(out);
    }
    for i in 1..m {
        // Interval [t_{i-1}, t_i]; stencil snaps inward at the ends.
        let c = if i == 1 { 1 } else { (i - 1).min(m - 2) };
        let (w0, w1, w2) = parabola_weights(
            times[c - 1],
            times[c],
            times[c + 1],
            times[i - 1],
            times[i],
        );
        let dq = &values[c - 1] * w0 + &values[c] * w1 + &values[c + 1] * w2;
        let q = &out[i - 1] + dq;
        out.push(q);
    }
    Ok(out)
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput {
            reason: "log-log fit needs two or more matched samples",
        });
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput {
            reason: "log-log fit needs positive finite samples",
        });
    }
    let n = xs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (lx, ly) = (ln(x), ln(y));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Numerical {
            context: "log-log fit with degenerate abscissae",
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    Ok((slope, (sy - slope * sx) / n))
}

/// Trapezoid L2 norm of a sampled vector path over its time grid.
pub fn path_l2_norm(times: &[f64], values: &[DVector<f64>]) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            context: "path norm",
            expected: times.len(),
            found: values.len(),
        });
    }
    let m = times.len();
    if m < 2 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for i in 0..m {
        let w = match i {
            0 => (times[1] - times[0]) / 2.0,
            _ if i == m - 1 => (times[m - 1] - times[m - 2]) / 2.0,
            _ => (times[i + 1] - times[i - 1]) / 2.0,
        };
        acc += w * values[i].norm_squared();
    }
    Ok(sqrt(acc))
}

/// Standard normal draw by the Box-Muller transform; `rand` without std
/// does not ship a normal distribution.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    sqrt(-2.0 * ln(u1)) * cos(core::f64::consts::TAU * u2)
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| standard_normal(rng));
        let norm = v.norm();
        if norm > 1e-150 {
            return v / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_tol_scales_with_shape_and_magnitude() {
        let t = default_rank_tol(4, 2, 10.0);
        assert_relative_eq!(t, 4.0 * f64::EPSILON * 10.0);
        assert_eq!(default_rank_tol(3, 3, 0.0), 0.0);
    }

    #[test]
    fn svd_rejects_nan() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(matches!(svd_real(&m, false), Err(Error::NonFinite { .. })));
    }

    /// A concrete rank-3 matrix with two clustered singular values on
    /// which the bidiagonalization path returns an orthogonal but wrong
    /// factorization (product residual near 4e-4). The wrapper must
    /// catch it and hand back an accurate decomposition.
    fn clustered_spectrum_matrix() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            4,
            4,
            &[
                -3.38060289567273797307e-1,
                -6.01865378730976008370e-1,
                -9.94229514787789758756e-1,
                3.32937780863716004109e-1,
                -1.90218746345560407729e-1,
                1.05917621320054200496e0,
                -5.80356262501538822107e-1,
                3.96999992603534357372e-1,
                -1.68005211408904370218e-1,
                -9.73252165497005827799e-2,
                -1.34931603633677676957e-1,
                6.98329734893864184642e-1,
                5.59737134993038010222e-3,
                -7.33864716898487701169e-2,
                -6.89810351995827186755e-1,
                -9.99828190597751298441e-1,
            ],
        )
    }

    fn reconstruction_error(
        m: &DMatrix<f64>,
        u: &DMatrix<f64>,
        vals: &DVector<f64>,
        vt: &DMatrix<f64>,
    ) -> f64 {
        (m - u * DMatrix::from_diagonal(vals) * vt).norm()
    }

    #[test]
    fn svd_wrapper_survives_clustered_spectra() {
        let m = clustered_spectrum_matrix();
        let (u, vals, vt) = svd_real(&m, true).unwrap();
        let err = reconstruction_error(&m, &u.unwrap(), &vals, &vt.unwrap());
        assert!(err <= 1e-13, "verified svd still inaccurate: {err:e}");
        assert!(vals[3] < 1e-15, "matrix has rank 3");
    }

    #[test]
    fn jacobi_svd_reconstructs_to_roundoff() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let m = clustered_spectrum_matrix();
        let (u, vals, vt) = jacobi_svd_real(&m).unwrap();
        assert!(reconstruction_error(&m, &u, &vals, &vt) <= 1e-14);
        assert!((u.transpose() * &u - DMatrix::<f64>::identity(4, 4)).norm() <= 1e-14);
        assert!((&vt * vt.transpose() - DMatrix::<f64>::identity(4, 4)).norm() <= 1e-14);

        for (rows, cols) in [(5usize, 3usize), (3, 5), (4, 4), (6, 1)] {
            let m = DMatrix::from_fn(rows, cols, |_, _| standard_normal(&mut rng));
            let (u, vals, vt) = jacobi_svd_real(&m).unwrap();
            let k = rows.min(cols);
            assert_eq!(u.shape(), (rows, k));
            assert_eq!(vt.shape(), (k, cols));
            assert!(vals.iter().zip(vals.iter().skip(1)).all(|(a, b)| a >= b));
            assert!(reconstruction_error(&m, &u, &vals, &vt) <= 1e-13);
            // Cross-check values against the fast path on benign input.
            let (_, fast, _) = svd_real(&m, false).unwrap();
            for j in 0..k {
                assert_relative_eq!(vals[j], fast[j], epsilon = 1e-10, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn jacobi_svd_completes_frames_on_exact_rank_loss() {
        let m = DMatrix::from_row_slice(3, 2, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let (u, vals, _) = jacobi_svd_real(&m).unwrap();
        assert_relative_eq!(vals[0], 2.0, epsilon = 1e-15);
        assert_eq!(vals[1], 0.0);
        // The zero-value column still carries a unit vector orthogonal
        // to the rest of the frame.
        assert!((u.transpose() * &u - DMatrix::<f64>::identity(2, 2)).norm() <= 1e-14);
    }

    #[test]
    fn inverse_iteration_matches_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in [3usize, 8, 40] {
            let m = DMatrix::<C64>::from_fn(n, n, |_, _| {
                C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
            });
            let vals = svd_complex_values(&m).unwrap();
            let want = vals[vals.len() - 1];
            let got = sigma_min_complex_iter(&m).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-7);
        }
    }

    #[test]
    fn inverse_iteration_on_structured_matrices() {
        let id = to_complex(&DMatrix::identity(5, 5));
        assert_relative_eq!(sigma_min_complex_iter(&id).unwrap(), 1.0, max_relative = 1e-10);
        let d = to_complex(&DMatrix::from_diagonal(&DVector::from_vec(vec![
            3.0, 1e-3, 2.0,
        ])));
        assert_relative_eq!(
            sigma_min_complex_iter(&d).unwrap(),
            1e-3,
            max_relative = 1e-9
        );
        // Exactly singular input reports a vanishing value.
        let s = to_complex(&DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0, 0.0, 2.0,
        ])));
        assert_eq!(sigma_min_complex_iter(&s).unwrap(), 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&DMatrix::zeros(3, 3)).unwrap();
        assert_relative_eq!(e, DMatrix::identity(3, 3), epsilon = 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0, 0.5]));
        let e = matrix_exp(&a).unwrap();
        for (k, lam) in [1.0, -2.0, 0.5].iter().enumerate() {
            assert_relative_eq!(e[(k, k)], lam.exp(), max_relative = 1e-14);
        }
        assert!(e[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn exp_of_nilpotent_block() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]], the series terminates.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = matrix_exp(&a).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert_relative_eq!(e, want, epsilon = 1e-14);
    }

    #[test]
    fn exp_of_large_rotation_uses_scaling() {
        // One-norm 20 forces several squaring steps.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 20.0, -20.0, 0.0]);
        let e = matrix_exp(&a).unwrap();
        let (c, s) = (20.0f64.cos(), 20.0f64.sin());
        let want = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        assert_relative_eq!(e, want, epsilon = 1e-12);
    }

    #[test]
    fn exp_inverse_property() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, -1.2, 0.4, 0.9, 0.1, -0.7, -0.2, 0.5, 0.6]);
        let e = matrix_exp(&a).unwrap();
        let einv = matrix_exp(&(-&a)).unwrap();
        assert_relative_eq!(e * einv, DMatrix::identity(3, 3), epsilon = 1e-13);
    }

    #[test]
    fn cumulative_integral_exact_on_quadratics() {
        let times: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let values: Vec<DVector<f64>> = times
            .iter()
            .map(|&t| DVector::from_vec(vec![t * t, 1.0]))
            .collect();
        let q = cumulative_integral(&times, &values).unwrap();
        // Exact up to accumulated roundoff across the running sum.
        for (i, &t) in times.iter().enumerate() {
            assert_relative_eq!(q[i][0], t * t * t / 3.0, epsilon = 1e-13);
            assert_relative_eq!(q[i][1], t, epsilon = 1e-13);
        }
    }

    #[test]
    fn cumulative_integral_tracks_sine() {
        let m = 201;
        let times: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let values: Vec<DVector<f64>> = times
            .iter()
            .map(|&t| DVector::from_vec(vec![t.sin()]))
            .collect();
        let q = cumulative_integral(&times, &values).unwrap();
        // Far below the 2e-6 a trapezoid rule would leave at this step.
        for (i, &t) in times.iter().enumerate() {
            assert_relative_eq!(q[i][0], 1.0 - t.cos(), epsilon = 1e-8);
        }
    }

    #[test]
    fn cumulative_integral_two_points_is_trapezoid() {
        let q = cumulative_integral(
            &[0.0, 2.0],
            &[
                DVector::from_vec(vec![1.0]),
                DVector::from_vec(vec![3.0]),
            ],
        )
        .unwrap();
        assert_relative_eq!(q[1][0], 4.0);
    }

    #[test]
    fn loglog_fit_recovers_power_law() {
        let xs = [1.0, 10.0, 100.0, 1000.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let (slope, intercept) = fit_loglog(&xs, &ys).unwrap();
        assert_relative_eq!(slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(intercept, 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn loglog_fit_rejects_nonpositive() {
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn path_norm_of_constant_one() {
        let times: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let ones: Vec<DVector<f64>> = times
            .iter()
            .map(|_| DVector::from_vec(vec![1.0]))
            .collect();
        assert_relative_eq!(path_l2_norm(&times, &ones).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 3, 9] {
            let v = random_unit_vector(&mut rng, n);
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
    }
}
