//! Eigensolvers: cyclic Jacobi for Hermitian input, Hessenberg reduction plus
//! shifted QR for general input. Dimensions stay in the low hundreds, so
//! self-contained O(n^3) routines are plenty.

use super::{ComplexMatrix, MatError};
use num_complex::Complex64;

/// Hermiticity gate used by [`herm_eig`], relative to the largest entry.
const HERMITIAN_TOL: f64 = 1e-12;

/// Result of an eigensolve.
///
/// `values` are sorted ascending by (real part, imaginary part). `vectors`,
/// when present, holds the corresponding column eigenvectors. `residual` is
/// `max_j ||M v_j - lambda_j v_j||_2` when vectors are available, otherwise
/// the Frobenius residual of the underlying Schur factorization.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub values: Vec<Complex64>,
    pub vectors: Option<ComplexMatrix>,
    pub residual: f64,
}

fn sort_pairs(values: &mut [Complex64], vectors: Option<&mut ComplexMatrix>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (values[a].re, values[a].im)
            .partial_cmp(&(values[b].re, values[b].im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted: Vec<Complex64> = order.iter().map(|&k| values[k]).collect();
    values.copy_from_slice(&sorted);
    if let Some(v) = vectors {
        let permuted = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, order[j])]);
        *v = permuted;
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a Hermitian matrix. Returns (diagonal, accumulated V)
/// with V unitary and A = V diag V†.
fn jacobi(
    h: &ComplexMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<ComplexMatrix>), MatError> {
    let n = h.rows();
    let mut a = h.clone();
    // Clean the numerically-Hermitian input to exact Hermitian form so the
    // rotations below can assume real diagonals.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = 1.0 + a.frobenius_norm();
    let target = 1e-14 * scale;
    let max_sweeps = 100;

    for sweep in 0..max_sweeps {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        if sweep == max_sweeps - 1 {
            return Err(MatError::NoConvergence {
                off: off_diagonal_norm(&a),
                iterations: max_sweeps * n * n,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let beta = apq.norm();
                if beta <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / beta; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * beta);
                // Smaller root of t^2 - 2 tau t - 1 = 0.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- J† A J with J e_p = c e_p + s conj(phase) e_q,
                //                 J e_q = -s phase e_p + c e_q.
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c + arq * s * phase.conj();
                    a[(r, q)] = arp * (-s) * phase + arq * c;
                }
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = apc * c + aqc * s * phase;
                    a[(q, col)] = apc * (-s) * phase.conj() + aqc * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                if let Some(vm) = v.as_mut() {
                    for r in 0..n {
                        let vrp = vm[(r, p)];
                        let vrq = vm[(r, q)];
                        vm[(r, p)] = vrp * c + vrq * s * phase.conj();
                        vm[(r, q)] = vrp * (-s) * phase + vrq * c;
                    }
                }
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((diag, v))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Values come back real (zero imaginary part), ascending; vectors are
/// orthonormal columns of the returned matrix.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigResult, MatError> {
    herm_eig_inner(h, true)
}

/// Eigenvalues only; skips eigenvector accumulation.
pub fn herm_eig_values(h: &ComplexMatrix) -> Result<Vec<f64>, MatError> {
    let r = herm_eig_inner(h, false)?;
    Ok(r.values.into_iter().map(|z| z.re).collect())
}

fn herm_eig_inner(h: &ComplexMatrix, want_vectors: bool) -> Result<EigResult, MatError> {
    if !h.is_square() {
        return Err(MatError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let tol = HERMITIAN_TOL;
    let dev = h.hermitian_deviation();
    if dev > tol * (1.0 + h.max_abs()) {
        return Err(MatError::NonHermitianInput {
            deviation: dev,
            tolerance: tol * (1.0 + h.max_abs()),
        });
    }
    let (diag, vectors) = jacobi(h, want_vectors)?;
    let mut values: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut vectors = vectors;
    sort_pairs(&mut values, vectors.as_mut());
    let residual = match &vectors {
        Some(v) => max_pair_residual(h, &values, v),
        None => 0.0,
    };
    Ok(EigResult {
        values,
        vectors,
        residual,
    })
}

fn max_pair_residual(m: &ComplexMatrix, values: &[Complex64], v: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (j, &lambda) in values.iter().enumerate() {
        let col = v.column(j);
        let mv = m.matvec(&col);
        let r: f64 = mv
            .iter()
            .zip(&col)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// PSD test for a Hermitian matrix: verdict is `min_eig >= -tol*(1+||H||_F)`.
/// Returns the least eigenvalue alongside.
pub fn psd_check(h: &ComplexMatrix, tol: f64) -> Result<(bool, f64), MatError> {
    let values = herm_eig_values(h)?;
    let min_eig = values.first().copied().unwrap_or(0.0);
    let verdict = min_eig >= -tol * (1.0 + h.frobenius_norm());
    Ok((verdict, min_eig))
}

// ---------------------------------------------------------------------------
// General (non-Hermitian) path: Householder Hessenberg + shifted QR.
// ---------------------------------------------------------------------------

/// Threshold above which eigenvectors of a general matrix are withheld.
const VECTOR_CONDITION_LIMIT: f64 = 1e8;

/// Eigendecomposition of a general square matrix via complex Schur form.
///
/// Eigenvectors are omitted when the eigenvector matrix is estimated to be
/// ill conditioned (condition estimate above 1e8), which covers defective
/// input; values are always returned.
pub fn eig_general(m: &ComplexMatrix) -> Result<EigResult, MatError> {
    if !m.is_square() {
        return Err(MatError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(EigResult {
            values: vec![],
            vectors: Some(ComplexMatrix::zeros(0, 0)),
            residual: 0.0,
        });
    }
    let (mut t, mut z) = hessenberg(m);
    schur(&mut t, &mut z)?;

    let mut values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    // Eigenvectors of the triangular factor by back-substitution, then
    // rotated back through Z.
    let tnorm = t.frobenius_norm().max(1.0);
    let mut y = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in (j + 1)..=k {
                s += t[(j, i)] * y[(i, k)];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < 1e-14 * tnorm {
                // Repeated eigenvalue: perturb the pivot to keep the solve
                // finite; conditioning is screened below.
                den = Complex64::new(1e-14 * tnorm, 0.0);
            }
            y[(j, k)] = -s / den;
        }
        // Normalize the column.
        let norm: f64 = (0..n).map(|i| y[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            y[(i, k)] /= norm;
        }
    }
    let mut vectors = z.matmul(&y);
    for k in 0..n {
        let norm: f64 = (0..n)
            .map(|i| vectors[(i, k)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for i in 0..n {
            vectors[(i, k)] /= norm;
        }
    }

    let cond = super::lu::condition_estimate(&vectors).unwrap_or(f64::INFINITY);
    let vectors = (cond <= VECTOR_CONDITION_LIMIT).then_some(vectors);

    let mut vectors = vectors;
    sort_pairs(&mut values, vectors.as_mut());

    let residual = match &vectors {
        Some(v) => max_pair_residual(m, &values, v),
        None => {
            // Schur residual ||Z T Z† - M||_F.
            let recon = z.matmul(&t).matmul(&z.adjoint());
            (&recon - m).frobenius_norm()
        }
    };
    Ok(EigResult {
        values,
        vectors,
        residual,
    })
}

/// Householder reduction to upper Hessenberg form; returns (H, Q) with
/// Q† M Q = H.
fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        // Householder vector zeroing h[(k+2.., k)].
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm <= 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        x[0] -= alpha;
        let unorm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if unorm <= 1e-300 {
            continue;
        }
        let w: Vec<Complex64> = x.iter().map(|z| z / unorm).collect();

        // H <- P H P with P = I - 2 w w† acting on rows/cols k+1..n.
        for col in 0..n {
            let dot: Complex64 = (0..w.len())
                .map(|i| w[i].conj() * h[(k + 1 + i, col)])
                .sum();
            for i in 0..w.len() {
                let delta = w[i] * dot * 2.0;
                h[(k + 1 + i, col)] -= delta;
            }
        }
        for row in 0..n {
            let dot: Complex64 = (0..w.len()).map(|i| h[(row, k + 1 + i)] * w[i]).sum();
            for i in 0..w.len() {
                let delta = dot * w[i].conj() * 2.0;
                h[(row, k + 1 + i)] -= delta;
            }
        }
        for row in 0..n {
            let dot: Complex64 = (0..w.len()).map(|i| q[(row, k + 1 + i)] * w[i]).sum();
            for i in 0..w.len() {
                let delta = dot * w[i].conj() * 2.0;
                q[(row, k + 1 + i)] -= delta;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
        h[(k + 1, k)] = alpha;
    }
    (h, q)
}

/// Complex Givens pair (c real, s) with [c s; -conj(s) c] [a; b] = [r; 0].
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Shifted QR iteration driving a Hessenberg matrix to upper triangular
/// (complex Schur) form in place, accumulating the similarity into `z`.
fn schur(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<(), MatError> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let hnorm = h.frobenius_norm().max(1e-300);
    let mut hi = n; // active block is [0, hi)
    let mut stall = 0usize;
    let mut total = 0usize;
    let budget = 60 * n.max(1);

    while hi > 1 {
        // Deflate converged subdiagonals at the bottom of the active block.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { hnorm } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            hi -= 1;
            stall = 0;
            continue;
        }

        total += 1;
        if total > budget {
            return Err(MatError::NoConvergence {
                off: h[(hi - 1, hi - 2)].norm(),
                iterations: total,
            });
        }

        // Wilkinson shift from the trailing 2x2; exceptional shift on stalls.
        stall += 1;
        let shift = if stall.is_multiple_of(12) {
            h[(hi - 1, hi - 1)] + Complex64::new(h[(hi - 1, hi - 2)].norm() * 1.5, 0.0)
        } else {
            let a = h[(hi - 2, hi - 2)];
            let b = h[(hi - 2, hi - 1)];
            let c = h[(hi - 1, hi - 2)];
            let d = h[(hi - 1, hi - 1)];
            let tr = a + d;
            let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt();
            let l1 = (tr + disc) * 0.5;
            let l2 = (tr - disc) * 0.5;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // Implicit single-shift sweep over the active block.
        let mut gx = h[(lo, lo)] - shift;
        let mut gy = h[(lo + 1, lo)];
        for k in lo..hi - 1 {
            let (c, s) = givens(gx, gy);
            let sc = s.conj();
            // Rows k, k+1 (columns k.. only: earlier columns are zero).
            for col in k.saturating_sub(1)..n {
                let a = h[(k, col)];
                let b = h[(k + 1, col)];
                h[(k, col)] = a * c + b * s;
                h[(k + 1, col)] = -sc * a + b * c;
            }
            // Columns k, k+1.
            let row_end = (k + 2).min(hi - 1) + 1;
            for row in 0..row_end.min(n) {
                let a = h[(row, k)];
                let b = h[(row, k + 1)];
                h[(row, k)] = a * c + b * sc;
                h[(row, k + 1)] = -s * a + b * c;
            }
            for row in 0..n {
                let a = z[(row, k)];
                let b = z[(row, k + 1)];
                z[(row, k)] = a * c + b * sc;
                z[(row, k + 1)] = -s * a + b * c;
            }
            if k + 2 < hi {
                gx = h[(k + 1, k)];
                gy = h[(k + 2, k)];
            }
        }
    }
    // Zero out the strictly lower part left behind by roundoff bookkeeping.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}
