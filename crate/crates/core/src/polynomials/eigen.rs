use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 50;

/// Spectral decomposition `M = O diag(d) Oᵀ` of a symmetric matrix.
///
/// Eigenvalues are sorted descending; column `i` of `o` is the eigenvector for `d[i]`,
/// normalized so that its first entry of non-negligible magnitude is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EigenPair<T> {
    pub o: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> EigenPair<T> {
    /// `O diag(values) Oᵀ`
    pub fn reassemble_with(&self, values: &[T]) -> Matrix<T> {
        let n = self.d.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.o[(i, k)] * values[k] * self.o[(j, k)])
                .sum()
        })
    }

    pub fn reassemble(&self) -> Matrix<T> {
        self.reassemble_with(&self.d)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.d.last().copied().unwrap_or_else(T::zero)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.d.first().copied().unwrap_or_else(T::zero)
    }

    /// `‖OᵀO − I‖_max`
    pub fn orthogonality_defect(&self) -> T {
        let n = self.d.len();
        self.o
            .transpose()
            .matmul(&self.o)
            .sub(&Matrix::identity(n))
            .max_abs()
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below `1e-14 · ‖M‖_F`
/// (or after 50 sweeps). Only the lower triangle of a slightly asymmetric input is read.
pub fn symm_eig<T: Scalar>(m: &Matrix<T>) -> Result<EigenPair<T>> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = Matrix::from_fn(n, n, |i, j| if i >= j { m[(i, j)] } else { m[(j, i)] });
    let mut v = Matrix::identity(n);

    let frob = |a: &Matrix<T>, off_only: bool| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if !off_only || i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let threshold = T::lit(1e-14) * frob(&a, false);

    for _ in 0..MAX_SWEEPS {
        if frob(&a, true) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = {
                    let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp;
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq;
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let d: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let sign_tol = T::epsilon() * T::lit(1e3);
    let mut o = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let lead = (0..n).map(|k| v[(k, src)]).find(|x| x.abs() > sign_tol);
        let flip = matches!(lead, Some(x) if x < T::zero());
        for k in 0..n {
            o[(k, col)] = if flip { -v[(k, src)] } else { v[(k, src)] };
        }
    }
    Ok(EigenPair { o, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_its_own_decomposition() {
        let e = symm_eig(&Matrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.d, vec![1.0, 1.0]);
        assert_eq!(e.o, Matrix::identity(2));
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = symm_eig(&m).unwrap();
        assert!((e.d[0] - 1.0_f64).abs() < 1e-15 && (e.d[1] + 1.0).abs() < 1e-15);
        assert!(e.reassemble().sub(&m).max_abs() < 1e-15);
        // first nonzero entry of each eigenvector is positive
        assert!(e.o[(0, 0)] > 0.0 && e.o[(0, 1)] > 0.0);
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let m = Matrix::from_diagonal(&[-1.0_f64, 1.0]);
        let e = symm_eig(&m).unwrap();
        assert_eq!(e.d, vec![1.0, -1.0]);
        assert_eq!(e.o.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(symm_eig(&Matrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn f32_decomposition() {
        let m = Matrix::from_rows(&[vec![2.0_f32, 1.0], vec![1.0, 2.0]]);
        let e = symm_eig(&m).unwrap();
        assert!((e.d[0] - 3.0).abs() < 1e-5 && (e.d[1] - 1.0).abs() < 1e-5);
    }
}
