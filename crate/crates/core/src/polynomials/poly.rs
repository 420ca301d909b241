use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::basis::{MonomialBasis, MultiIndex};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Polynomial of total degree `<= degree()` in `dim()` variables, stored as dense
/// coefficients over the graded-lexicographic monomial basis.
#[derive(Clone)]
pub struct Polynomial<T> {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        let basis = MonomialBasis::shared(dim, degree);
        let coeffs = vec![T::zero(); basis.len()];
        Self { basis, coeffs }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut p = Self::zero(dim, 0);
        p.coeffs[0] = c;
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim, 1);
        p.coeffs[1 + i] = T::one();
        p
    }

    pub fn from_coefficients(dim: usize, degree: usize, coeffs: Vec<T>) -> Result<Self> {
        let basis = MonomialBasis::shared(dim, degree);
        if coeffs.len() != basis.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for dim {dim} degree {degree}, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        Ok(Self { basis, coeffs })
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms; repeated monomials add up.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, T)>,
    {
        let terms: Vec<(Vec<u32>, T)> = terms.into_iter().collect();
        for (e, _) in &terms {
            check_dim(dim, e.len())?;
        }
        let degree = terms
            .iter()
            .map(|(e, _)| e.iter().map(|&v| v as usize).sum::<usize>())
            .max()
            .unwrap_or(0);
        let mut p = Self::zero(dim, degree);
        for (e, c) in terms {
            let idx = p
                .basis
                .position(&MultiIndex(e))
                .expect("exponent within degree bound");
            p.coeffs[idx] += c;
        }
        Ok(p)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Degree bound of the coefficient space (not necessarily attained).
    #[inline]
    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, exponents: &[u32]) -> T {
        self.basis
            .position(&MultiIndex(exponents.to_vec()))
            .map_or(T::zero(), |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, exponents: &[u32], value: T) -> Result<()> {
        check_dim(self.dim(), exponents.len())?;
        let alpha = MultiIndex(exponents.to_vec());
        if alpha.total_degree() > self.degree() {
            *self = self.with_degree(alpha.total_degree());
        }
        let i = self.basis.position(&alpha).expect("degree raised above");
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, T)> + '_ {
        self.basis.indices().iter().zip(self.coeffs.iter().copied())
    }

    /// Highest total degree carrying a nonzero coefficient; 0 for the zero polynomial.
    pub fn effective_degree(&self) -> usize {
        self.terms()
            .filter(|(_, c)| *c != T::zero())
            .map(|(a, _)| a.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Re-embeds into the space of degree bound `degree`; truncates if lower.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zero(self.dim(), degree);
        for (alpha, c) in self.terms() {
            if let Some(i) = out.basis.position(alpha) {
                out.coeffs[i] = c;
            }
        }
        out
    }

    /// Values of every basis monomial at `x`, in basis order.
    pub fn basis_values(basis: &MonomialBasis, x: &[T]) -> Vec<T> {
        let m = basis.degree();
        let powers: Vec<Vec<T>> = x
            .iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(m + 1);
                let mut acc = T::one();
                row.push(acc);
                for _ in 0..m {
                    acc *= xi;
                    row.push(acc);
                }
                row
            })
            .collect();
        basis
            .indices()
            .iter()
            .map(|alpha| {
                alpha
                    .exponents()
                    .iter()
                    .zip(&powers)
                    .fold(
                        T::one(),
                        |acc, (&e, pw)| if e == 0 { acc } else { acc * pw[e as usize] },
                    )
            })
            .collect()
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_at(x))
    }

    /// Evaluation without the dimension check. Sums coefficient times monomial in basis
    /// order from a table of coordinate powers.
    pub fn value_at(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim());
        Self::basis_values(&self.basis, x)
            .into_iter()
            .zip(&self.coeffs)
            .map(|(phi, &c)| phi * c)
            .sum()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, c: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let degree = self.degree().max(other.degree());
        let mut out = self.with_degree(degree);
        for (alpha, c) in other.terms() {
            let i = out.basis.position(alpha).expect("degree is the max");
            out.coeffs[i] += c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let mut out = Self::zero(self.dim(), self.degree() + other.degree());
        for (a, ca) in self.terms().filter(|(_, c)| *c != T::zero()) {
            for (b, cb) in other.terms().filter(|(_, c)| *c != T::zero()) {
                let i = out.basis.position(&a.add(b)).expect("sum of degrees");
                out.coeffs[i] += ca * cb;
            }
        }
        Ok(out)
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let dim = self.dim();
        let mut out = Self::zero(dim, self.degree().saturating_sub(1));
        for (alpha, c) in self.terms() {
            let e = alpha.exponents()[var];
            if e == 0 || c == T::zero() {
                continue;
            }
            let mut beta = alpha.clone();
            beta.0[var] -= 1;
            let i = out.basis.position(&beta).expect("lower degree");
            out.coeffs[i] += c * T::from_u32(e).expect("small exponent");
        }
        out
    }

    pub fn gradient_at(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|i| self.partial_derivative(i).value_at(x))
            .collect()
    }

    /// Hessian polynomials `∂²p/∂x_i∂x_j`, row-major, computed once and evaluated many times.
    pub fn hessian_polynomials(&self) -> Vec<Vec<Self>> {
        let first: Vec<Self> = (0..self.dim())
            .map(|i| self.partial_derivative(i))
            .collect();
        first
            .iter()
            .map(|d| (0..self.dim()).map(|j| d.partial_derivative(j)).collect())
            .collect()
    }

    pub fn hessian_at(&self, x: &[T]) -> Matrix<T> {
        let h = self.hessian_polynomials();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| h[i][j].value_at(x))
    }

    /// `x ↦ p(A x + b)`.
    pub fn compose_affine(&self, a: &Matrix<T>, b: &[T]) -> Result<Self> {
        let n = self.dim();
        check_dim(n, a.rows())?;
        check_dim(n, b.len())?;
        let src = a.cols();
        let images: Vec<Self> = (0..n)
            .map(|i| {
                let mut p = Self::zero(src, 1);
                p.coeffs[0] = b[i];
                for j in 0..src {
                    p.coeffs[1 + j] = a[(i, j)];
                }
                p
            })
            .collect();
        let mut out = Self::zero(src, self.degree());
        for (alpha, c) in self.terms().filter(|(_, c)| *c != T::zero()) {
            let mut term = Self::constant(src, c);
            for (i, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out.with_degree(self.degree()))
    }

    /// `Σ x_i²` in `dim` variables.
    pub fn squared_norm(dim: usize) -> Self {
        let mut p = Self::zero(dim, 2);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            let k = p.basis.position(&MultiIndex(e)).expect("degree 2");
            p.coeffs[k] = T::one();
        }
        p
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> T {
        crate::scalar::max_abs(&self.coeffs)
    }
}

impl<T: fmt::Debug> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polynomial")
            .field("dim", &self.basis.dim())
            .field("degree", &self.basis.degree())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (alpha, c) in self.terms().filter(|(_, c)| *c != T::zero()) {
            if any {
                write!(f, " + ")?;
            }
            any = true;
            if alpha.total_degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{alpha}")?;
            }
        }
        if !any {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<T: PartialEq> PartialEq for Polynomial<T> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.dim() == other.basis.dim()
            && self.basis.degree() == other.basis.degree()
            && self.coeffs == other.coeffs
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Term<T> {
    exponents: Vec<u32>,
    coefficient: T,
}

impl<T: Scalar> Serialize for Polynomial<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<Term<T>> = self
            .terms()
            .map(|(a, c)| Term {
                exponents: a.0.clone(),
                coefficient: c,
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Polynomial<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms: Vec<Term<T>> = Vec::deserialize(d)?;
        let dim = terms
            .first()
            .map(|t| t.exponents.len())
            .ok_or_else(|| D::Error::custom("polynomial needs at least one term"))?;
        Polynomial::from_terms(dim, terms.into_iter().map(|t| (t.exponents, t.coefficient)))
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(dim: usize, terms: &[(&[u32], f64)]) -> Polynomial<f64> {
        Polynomial::from_terms(dim, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn eval_constant_and_saddle() {
        let one = Polynomial::constant(3, 1.0);
        assert_eq!(one.eval(&[0.3, -2.0, 5.0]).unwrap(), 1.0);
        let saddle = p(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]);
        assert_eq!(saddle.eval(&[1.0, 1.0]).unwrap(), 0.0);
        let prop = p(2, &[(&[0, 0], 1.5), (&[2, 0], 1.0), (&[0, 2], -1.0)]);
        assert_eq!(prop.eval(&[0.0, 0.0]).unwrap(), 1.5);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let q = Polynomial::<f64>::squared_norm(2);
        assert_eq!(
            q.eval(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn derivatives_of_cubic() {
        // x^3 + x*y
        let c = p(2, &[(&[3, 0], 1.0), (&[1, 1], 1.0)]);
        assert_eq!(c.gradient_at(&[2.0, 1.0]), vec![13.0, 2.0]);
        let h = c.hessian_at(&[2.0, 1.0]);
        assert_eq!(h.to_rows(), vec![vec![12.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn compose_with_affine_map() {
        // (x + y)^2 at x -> 2u + 1, y -> -v
        let q = p(2, &[(&[2, 0], 1.0), (&[1, 1], 2.0), (&[0, 2], 1.0)]);
        let a = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, -1.0]]);
        let r = q.compose_affine(&a, &[1.0, 0.0]).unwrap();
        for &(u, v) in &[(0.0f64, 0.0f64), (0.5, -1.0), (-2.0, 3.0)] {
            let direct = (2.0 * u + 1.0 - v).powi(2);
            assert!((r.eval(&[u, v]).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let q = p(2, &[(&[0, 0], 1.5), (&[1, 1], -0.25)]);
        let s = serde_json::to_string(&q).unwrap();
        let back: Polynomial<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn f32_instantiation() {
        let q = Polynomial::<f32>::squared_norm(2);
        assert_eq!(q.eval(&[3.0, 4.0]).unwrap(), 25.0);
    }
}
