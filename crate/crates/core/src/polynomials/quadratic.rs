use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Split `p(x) = xᵀ M x + linear(x)` of a polynomial of degree at most two.
#[derive(Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QuadraticParts<T> {
    pub m: Matrix<T>,
    pub linear: Polynomial<T>,
}

impl<T: Scalar> std::fmt::Debug for QuadraticParts<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticParts")
            .field("m", &self.m)
            .field("linear", &self.linear)
            .finish()
    }
}

impl<T: Scalar> PartialEq for QuadraticParts<T> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.linear == other.linear
    }
}

impl<T: Scalar> QuadraticParts<T> {
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mx = self.m.mul_vec(x);
        crate::scalar::dot(x, &mx) + self.linear.value_at(x)
    }

    /// Rebuilds the degree-2 polynomial `xᵀ M x + linear(x)`.
    pub fn to_polynomial(&self) -> Polynomial<T> {
        quadratic_form(&self.m)
            .add(&self.linear)
            .expect("same dimension")
    }
}

/// Exact split of a polynomial of effective degree `<= 2`. The off-diagonal monomial
/// `c·x_i x_j` contributes `c/2` to both `M_ij` and `M_ji`.
pub fn quadratic_parts<T: Scalar>(p: &Polynomial<T>) -> Result<QuadraticParts<T>> {
    let deg = p.effective_degree();
    if deg > 2 {
        return Err(Error::DegreeTooHigh { max: 2, found: deg });
    }
    let n = p.dim();
    let half = T::lit(0.5);
    let mut m = Matrix::zeros(n, n);
    let mut linear = Polynomial::zero(n, 1);
    for (alpha, c) in p.terms() {
        let e = alpha.exponents();
        match alpha.total_degree() {
            0 | 1 => linear.set_coeff(e, c)?,
            2 => {
                let vars: Vec<usize> = e
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize))
                    .collect();
                let (i, j) = (vars[0], vars[1]);
                if i == j {
                    m[(i, i)] = c;
                } else {
                    m[(i, j)] = c * half;
                    m[(j, i)] = c * half;
                }
            }
            _ => {}
        }
    }
    Ok(QuadraticParts { m, linear })
}

/// The polynomial `xᵀ M x` for a (symmetrized) square matrix `M`.
pub fn quadratic_form<T: Scalar>(m: &Matrix<T>) -> Polynomial<T> {
    let n = m.rows();
    let mut p = Polynomial::zero(n, 2);
    for i in 0..n {
        for j in i..n {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            let c = if i == j {
                m[(i, i)]
            } else {
                m[(i, j)] + m[(j, i)]
            };
            p.set_coeff(&e, c).expect("dimension matches");
        }
    }
    p
}
