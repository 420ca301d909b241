//! Total-degree polynomials, quadratic parts, Hessians and symmetric eigendecomposition.

mod basis;
mod eigen;
mod poly;
mod quadratic;

pub use basis::{binomial, MonomialBasis, MultiIndex};
pub use eigen::{symm_eig, EigenPair};
pub use poly::Polynomial;
pub use quadratic::{quadratic_form, quadratic_parts, QuadraticParts};

use crate::error::{check_dim, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice};
use crate::scalar::Scalar;

/// Smallest Hessian eigenvalue of `p` over the grid points of `body`.
///
/// For effective degree `<= 2` the Hessian is constant and the grid is not sampled.
pub fn hessian_min_eig_on<T: Scalar>(
    p: &Polynomial<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
) -> Result<T> {
    check_dim(body.dim(), p.dim())?;
    let n = p.dim();
    if p.effective_degree() <= 2 {
        let h = p.hessian_at(&vec![T::zero(); n]);
        return Ok(symm_eig(&h)?.min_eigenvalue());
    }
    let lattice = Lattice::build(body, grid)?;
    let hess = p.hessian_polynomials();
    let mut min = T::infinity();
    for x in lattice.points() {
        let h = crate::linalg::Matrix::from_fn(n, n, |i, j| hess[i][j].value_at(x));
        min = min.min(symm_eig(&h)?.min_eigenvalue());
    }
    Ok(min)
}

/// `hessian_min_eig_on(p, body, grid) >= -tol`.
pub fn is_convex_on<T: Scalar>(
    p: &Polynomial<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
    tol: T,
) -> Result<bool> {
    Ok(hessian_min_eig_on(p, body, grid)? >= -tol)
}
