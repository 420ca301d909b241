//! Linear approximation of a convex function on a centrally symmetric body by its
//! support at the origin lifted by half the gap.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice};
use crate::polynomials::Polynomial;
use crate::scalar::Scalar;
use crate::smoothness::{midpoint_violation, modulus, ScalarField};

const GRADIENT_STEP: f64 = 1e-5;
const BOUND_TOL: f64 = 1e-6;

/// Audit trail for [`symmetric_linear_approx`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SymmetricReport<T> {
    /// `max_grid |f - p|`
    pub error: T,
    /// `½ max_grid (f - l)`
    pub half_gap: T,
    /// Estimate of `ω₂(f;K)` on the same grid.
    pub omega2: T,
    /// Amount subtracted from `l(0) = f(0)` so that `l <= f` on the grid.
    pub correction: T,
    pub gradient: Vec<T>,
    /// `error == half_gap`
    pub identity_ok: bool,
    /// `error <= ½ ω₂ + 1e-6`
    pub bound_ok: bool,
}

/// Central-difference gradient at the origin; the step shrinks with the inradius.
fn central_gradient<T: Scalar>(f: &ScalarField<T>, body: &ConvexBody<T>) -> Vec<T> {
    let n = f.dim();
    let step = T::lit(GRADIENT_STEP) * body.inner_radius_about_origin().min(T::one());
    (0..n)
        .map(|k| {
            let mut plus = vec![T::zero(); n];
            let mut minus = vec![T::zero(); n];
            plus[k] = step;
            minus[k] = -step;
            (f.at(&plus) - f.at(&minus)) / (T::lit(2.0) * step)
        })
        .collect()
}

/// `p = l + ½‖f - l‖` where `l` supports the convex `f` at the origin of the symmetric
/// body `K`. Returns `p` with a report comparing its error against `½ ω₂(f;K)`.
pub fn symmetric_linear_approx<T: Scalar>(
    f: &ScalarField<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
) -> Result<(Polynomial<T>, SymmetricReport<T>)> {
    check_dim(body.dim(), f.dim())?;
    let n = body.dim();
    if !body.is_symmetric() {
        return Err(Error::Precondition("body is not centrally symmetric".into()));
    }
    if !f.is_declared_convex() {
        return Err(Error::Precondition("field is not declared convex".into()));
    }
    let lattice = Lattice::build(body, grid)?;
    let pts = lattice.points();
    if let Some((x, y)) = midpoint_violation(f, pts, T::lit(1e-9)) {
        return Err(Error::Precondition(format!(
            "no support at the origin: midpoint convexity fails between {x:?} and {y:?}"
        )));
    }
    let gradient = f
        .subgradient(&vec![T::zero(); n])
        .unwrap_or_else(|| central_gradient(f, body));
    let f0 = f.at(&vec![T::zero(); n]);
    let values = f.values(pts);
    let linear = |x: &[T]| f0 + crate::scalar::dot(&gradient, x);
    let correction = pts
        .iter()
        .zip(&values)
        .map(|(x, &v)| linear(x) - v)
        .fold(T::zero(), T::max);
    let gaps: Vec<T> = pts
        .iter()
        .zip(&values)
        .map(|(x, &v)| v - (linear(x) - correction))
        .collect();
    let half_gap = gaps.iter().fold(T::zero(), |m, &g| m.max(g.abs())) * T::lit(0.5);

    let mut p = Polynomial::zero(n, 1);
    p.set_coeff(&vec![0; n], f0 - correction + half_gap)?;
    for (k, &g) in gradient.iter().enumerate() {
        let mut e = vec![0u32; n];
        e[k] = 1;
        p.set_coeff(&e, g)?;
    }
    let error = pts
        .iter()
        .zip(&values)
        .map(|(x, &v)| (v - p.value_at(x)).abs())
        .fold(T::zero(), T::max);
    let omega2 = modulus(f, body, 2, grid)?.value;
    let scale = T::one() + half_gap.abs();
    Ok((
        p,
        SymmetricReport {
            error,
            half_gap,
            omega2,
            correction,
            gradient,
            identity_ok: (error - half_gap).abs() <= T::lit(1e-9) * scale,
            bound_ok: error <= T::lit(0.5) * omega2 + T::lit(BOUND_TOL),
        },
    ))
}
