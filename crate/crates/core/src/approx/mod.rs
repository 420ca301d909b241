//! Best uniform polynomial approximation on a grid, its dual certificates, the convex
//! `E₁` formula and the symmetric-body linear approximant.
//!
//! `E_m(f;K)` is discretized as the Chebyshev problem `min t` subject to
//! `|f(xᵢ) - Σ_j c_j φ_j(xᵢ)| <= t` over grid points. The dual of that problem,
//! `max Σ wᵢ f(xᵢ)` over signed weights with `Σ|wᵢ| = 1` annihilating every basis
//! monomial, is what gets solved: it has one row per monomial (plus one) no matter how
//! fine the grid is. The primal coefficients are read off the simplex multipliers and
//! the optimal `wᵢ` are the dual certificate.

mod convex;
mod lp;
mod symmetric;

pub use convex::{e1_convex, e1_dual_certificate, E1Certificate, E1Estimate};
pub use symmetric::{symmetric_linear_approx, SymmetricReport};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice};
use crate::polynomials::{MonomialBasis, Polynomial};
use crate::scalar::Scalar;
use crate::smoothness::ScalarField;

/// Residuals within this distance of the grid maximum count as active.
pub const ACTIVE_TOL: f64 = 1e-7;
const WEIGHT_FLOOR: f64 = 1e-14;

/// A point carrying a signed dual weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DualWeight<T> {
    pub point: Vec<T>,
    pub weight: T,
}

/// Grid-optimal polynomial of degree `<= m` with its minimax error and dual certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ApproxSolution<T> {
    pub m: usize,
    /// `max_grid |f - p|`
    pub error: T,
    #[serde(rename = "coefficients")]
    pub polynomial: Polynomial<T>,
    /// Grid points with `|f - p| >= error - 1e-7`.
    pub active_points: Vec<Vec<T>>,
    /// Nonzero dual weights; signs follow the residual and `Σ|w| = 1`.
    pub dual_weights: Vec<DualWeight<T>>,
}

impl<T: Scalar> ApproxSolution<T> {
    /// `max_j |Σᵢ wᵢ φ_j(xᵢ)|` over the monomial basis of degree `m`.
    pub fn orthogonality_residual(&self) -> T {
        let basis = MonomialBasis::shared(self.polynomial.dim(), self.m);
        let mut acc = vec![T::zero(); basis.len()];
        for dw in &self.dual_weights {
            let phi = Polynomial::basis_values(&basis, &dw.point);
            for (a, p) in acc.iter_mut().zip(phi) {
                *a += dw.weight * p;
            }
        }
        crate::scalar::max_abs(&acc)
    }
}

/// [`best_uniform`] over an explicit point set with precomputed values.
pub fn best_uniform_on<T: Scalar>(
    dim: usize,
    points: &[Vec<T>],
    values: &[T],
    m: usize,
) -> Result<ApproxSolution<T>> {
    check_dim(points.len(), values.len())?;
    let basis = MonomialBasis::shared(dim, m);
    let k = basis.len();
    if points.len() < k + 1 {
        return Err(Error::DegenerateGrid(format!(
            "{} grid points cannot determine {k} coefficients",
            points.len()
        )));
    }
    let phis: Vec<Vec<T>> = points
        .iter()
        .map(|x| {
            check_dim(dim, x.len())?;
            Ok(Polynomial::basis_values(&basis, x))
        })
        .collect::<Result<_>>()?;

    // columns u_i then v_i, each `(±φ(xᵢ), 1)`
    let mut cols = Vec::with_capacity(2 * points.len());
    let mut cost = Vec::with_capacity(2 * points.len());
    for sign in [T::one(), -T::one()] {
        for (phi, &f) in phis.iter().zip(values) {
            let mut col: Vec<T> = phi.iter().map(|&p| sign * p).collect();
            col.push(T::one());
            cols.push(col);
            cost.push(-sign * f);
        }
    }
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let sol = lp::solve(&cols, &rhs, &cost).map_err(|e| match e {
        Error::Infeasible | Error::Unbounded => {
            Error::Internal(format!("Chebyshev dual reported {e}"))
        }
        other => other,
    })?;
    if sol.redundant_rows.iter().any(|&r| r < k) {
        return Err(Error::DegenerateGrid(
            "monomial basis is rank deficient on the grid".into(),
        ));
    }
    let coeffs: Vec<T> = sol.y[..k].iter().map(|&v| -v).collect();
    let polynomial = Polynomial::from_coefficients(dim, m, coeffs)?;
    let residuals: Vec<T> = phis
        .iter()
        .zip(values)
        .map(|(phi, &f)| f - crate::scalar::dot(polynomial.coefficients(), phi))
        .collect();
    let error = crate::scalar::max_abs(&residuals);
    let threshold = error - T::lit(ACTIVE_TOL);
    let active_points = points
        .iter()
        .zip(&residuals)
        .filter(|(_, r)| r.abs() >= threshold)
        .map(|(x, _)| x.clone())
        .collect();
    let npts = points.len();
    let dual_weights = (0..npts)
        .filter_map(|i| {
            let w = sol.x[i] - sol.x[npts + i];
            (w.abs() > T::lit(WEIGHT_FLOOR)).then(|| DualWeight {
                point: points[i].clone(),
                weight: w,
            })
        })
        .collect();
    Ok(ApproxSolution {
        m,
        error,
        polynomial,
        active_points,
        dual_weights,
    })
}

/// Best uniform approximation of degree `<= m` to `f` on the grid points of `body`.
/// The error is a lower bound for `E_m(f;K)` and increases toward it as the grid refines.
pub fn best_uniform<T: Scalar>(
    f: &ScalarField<T>,
    body: &ConvexBody<T>,
    m: usize,
    grid: &GridSpec,
) -> Result<ApproxSolution<T>> {
    check_dim(body.dim(), f.dim())?;
    let lattice = Lattice::build(body, grid)?;
    let values = f.values(lattice.points());
    best_uniform_on(body.dim(), lattice.points(), &values, m)
}

/// Positive multipliers certifying that `R` is a best approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Certificate<T> {
    pub points: Vec<Vec<T>>,
    /// `cᵢ > 0`, `Σcᵢ = 1`
    pub multipliers: Vec<T>,
    pub residual_signs: Vec<i8>,
    /// `max_j |Σᵢ cᵢ (f - R)(xᵢ) φ_j(xᵢ)|`
    pub orthogonality_residual: T,
}

/// Searches for `cᵢ > 0`, `Σcᵢ = 1`, with `Σᵢ cᵢ (f(xᵢ) - R(xᵢ)) S(xᵢ) = 0` for every `S`
/// of degree `<= m`.
///
/// Every point must attain `‖f - R‖` (the sup over `grid` and the points themselves)
/// within `tol`. The multipliers maximize `min cᵢ`; success requires that minimum to
/// exceed `tol`.
pub fn verify_certificate<T: Scalar>(
    f: &ScalarField<T>,
    r: &Polynomial<T>,
    points: &[Vec<T>],
    m: usize,
    body: &ConvexBody<T>,
    grid: &GridSpec,
    tol: T,
) -> Result<Certificate<T>> {
    let dim = f.dim();
    check_dim(dim, r.dim())?;
    check_dim(dim, body.dim())?;
    if points.is_empty() {
        return Err(Error::VerificationFailed("no points given".into()));
    }
    for x in points {
        check_dim(dim, x.len())?;
    }
    let residuals: Vec<T> = points.iter().map(|x| f.at(x) - r.value_at(x)).collect();
    let lattice = Lattice::build(body, grid)?;
    let sup = lattice
        .points()
        .iter()
        .map(|x| (f.at(x) - r.value_at(x)).abs())
        .chain(residuals.iter().map(|v| v.abs()))
        .fold(T::zero(), T::max);
    if let Some(i) = residuals.iter().position(|v| v.abs() < sup - tol) {
        return Err(Error::Precondition(format!(
            "point {:?} has residual {} below the sup norm {sup}",
            points[i], residuals[i]
        )));
    }

    let basis = MonomialBasis::shared(dim, m);
    let k = basis.len();
    let rows: Vec<Vec<T>> = points
        .iter()
        .zip(&residuals)
        .map(|(x, &res)| {
            Polynomial::basis_values(&basis, x)
                .into_iter()
                .map(|p| res * p)
                .collect()
        })
        .collect();
    // variables: τ, then e_i with c_i = τ + e_i
    let mut cols = Vec::with_capacity(points.len() + 1);
    let mut tau_col: Vec<T> = (0..k).map(|j| rows.iter().map(|row| row[j]).sum()).collect();
    tau_col.push(T::from_usize_lossy(points.len()));
    cols.push(tau_col);
    for row in &rows {
        let mut col = row.clone();
        col.push(T::one());
        cols.push(col);
    }
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let mut cost = vec![T::zero(); cols.len()];
    cost[0] = -T::one();
    let sol = match lp::solve(&cols, &rhs, &cost) {
        Ok(sol) => sol,
        Err(Error::Infeasible) => {
            return Err(Error::VerificationFailed(
                "no nonnegative multipliers annihilate the polynomial space".into(),
            ))
        }
        Err(e) => return Err(e),
    };
    let tau = sol.x[0];
    if !(tau > tol) {
        return Err(Error::VerificationFailed(format!(
            "best smallest multiplier is {tau}, not positive"
        )));
    }
    let multipliers: Vec<T> = sol.x[1..].iter().map(|&e| tau + e).collect();
    let mut orth = vec![T::zero(); k];
    for (row, &c) in rows.iter().zip(&multipliers) {
        for (o, &v) in orth.iter_mut().zip(row) {
            *o += c * v;
        }
    }
    Ok(Certificate {
        points: points.to_vec(),
        multipliers,
        residual_signs: residuals
            .iter()
            .map(|&v| if v < T::zero() { -1 } else { 1 })
            .collect(),
        orthogonality_residual: crate::scalar::max_abs(&orth),
    })
}

/// `max_S |Σᵢ cᵢ (f(xᵢ) - R(xᵢ)) S(xᵢ)|` over the monomials `S` of degree `<= m`, for
/// given multipliers.
pub fn orthogonality_residual<T: Scalar>(
    f: &ScalarField<T>,
    r: &Polynomial<T>,
    points: &[Vec<T>],
    multipliers: &[T],
    m: usize,
) -> Result<T> {
    check_dim(points.len(), multipliers.len())?;
    let basis = MonomialBasis::shared(f.dim(), m);
    let mut orth = vec![T::zero(); basis.len()];
    for (x, &c) in points.iter().zip(multipliers) {
        check_dim(f.dim(), x.len())?;
        let res = f.at(x) - r.value_at(x);
        for (o, s) in orth.iter_mut().zip(Polynomial::basis_values(&basis, x)) {
            *o += c * res * s;
        }
    }
    Ok(crate::scalar::max_abs(&orth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> ConvexBody<f64> {
        ConvexBody::interval(-1.0, 1.0).unwrap()
    }

    #[test]
    fn square_by_a_line() {
        let f = ScalarField::new(1, |x: &[f64]| x[0] * x[0]);
        let sol = best_uniform(&f, &interval(), 1, &GridSpec::uniform(201)).unwrap();
        assert!((sol.error - 0.5).abs() < 1e-12);
        assert!((sol.polynomial.coeff(&[0]) - 0.5).abs() < 1e-12);
        assert!(sol.polynomial.coeff(&[1]).abs() < 1e-12);
        assert!(sol.orthogonality_residual() < 1e-12);
        let total: f64 = sol.dual_weights.iter().map(|w| w.weight.abs()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // oracle: the three-point alternant -1, 0, 1
        let mut pts: Vec<f64> = sol.active_points.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert_eq!(pts, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn constants_give_half_the_range() {
        let f = ScalarField::new(2, |x: &[f64]| (3.0 * x[0]).sin() + x[1]);
        let k = ConvexBody::hypercube(2);
        let grid = GridSpec::uniform(15);
        let sol = best_uniform(&f, &k, 0, &grid).unwrap();
        let vals: Vec<f64> = crate::geometry::sample_grid(&k, &grid)
            .unwrap()
            .iter()
            .map(|x| f.at(x))
            .collect();
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!((sol.error - 0.5 * (hi - lo)).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let f = ScalarField::new(1, |x: &[f64]| x[0]);
        let err = best_uniform(&f, &interval(), 3, &GridSpec::uniform(4)).unwrap_err();
        assert!(matches!(err, Error::DegenerateGrid(_)));
    }

    #[test]
    fn single_point_certifies_nothing() {
        let f = ScalarField::new(1, |x: &[f64]| x[0] * x[0]);
        let r = Polynomial::zero(1, 1);
        let err = verify_certificate(
            &f,
            &r,
            &[vec![1.0]],
            1,
            &interval(),
            &GridSpec::uniform(21),
            1e-9,
        )
        .unwrap_err();
        assert!(matches!(err, Error::VerificationFailed(_)));
    }

    #[test]
    fn alternant_certifies_the_constant() {
        let f = ScalarField::new(1, |x: &[f64]| x[0] * x[0]);
        let r = Polynomial::constant(1, 0.5).with_degree(1);
        let pts = vec![vec![-1.0], vec![0.0], vec![1.0]];
        let cert = verify_certificate(&f, &r, &pts, 1, &interval(), &GridSpec::uniform(21), 1e-9)
            .unwrap();
        // c = (1/4, 1/2, 1/4) is the unique annihilating choice
        assert!((cert.multipliers[0] - 0.25).abs() < 1e-12);
        assert!((cert.multipliers[1] - 0.5).abs() < 1e-12);
        assert_eq!(cert.residual_signs, vec![1, -1, 1]);
        assert!(cert.orthogonality_residual < 1e-12);
    }
}
