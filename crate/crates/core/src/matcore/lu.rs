//! LU factorization with partial pivoting: linear solves, inverses, and the
//! crude condition estimate used to screen eigenvector bases.

use super::{ComplexMatrix, MatError};
use num_complex::Complex64;

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

fn factor(a: &ComplexMatrix) -> Result<Lu, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if best <= 1e-300 {
            return Err(MatError::Singular);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            perm.swap(k, pivot);
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / d;
            lu[(i, k)] = m;
            for j in k + 1..n {
                let delta = m * lu[(k, j)];
                lu[(i, j)] -= delta;
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve_one(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.perm.len();
        let mut y: Vec<Complex64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            for j in 0..i {
                let delta = self.lu[(i, j)] * y[j];
                y[i] -= delta;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let delta = self.lu[(i, j)] * y[j];
                y[i] -= delta;
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Solve A X = B for X.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, MatError> {
    if a.rows() != b.rows() {
        return Err(MatError::DimensionMismatch {
            context: format!(
                "solve: A is {}x{}, B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            ),
        });
    }
    let f = factor(a)?;
    let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
    for j in 0..b.cols() {
        let col = f.solve_one(&b.column(j));
        for i in 0..b.rows() {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, MatError> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Frobenius condition estimate ||A||_F * ||A^-1||_F; infinite when singular.
pub fn condition_estimate(a: &ComplexMatrix) -> Result<f64, MatError> {
    match inverse(a) {
        Ok(inv) => Ok(a.frobenius_norm() * inv.frobenius_norm()),
        Err(MatError::Singular) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}
