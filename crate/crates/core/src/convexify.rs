//! Convexity-restoring modifications of polynomial approximants.
//!
//! [`convexify_quadratic`] repairs a quadratic approximant `P` of a convex `f` on a body
//! in ball-sandwich position `B₂ⁿ ⊂ K ⊂ λB₂ⁿ`: the negative eigenvalues of the quadratic
//! form are clipped and the constant lowered by `‖f - P‖` on the unit ball, which costs at
//! most a factor `2λ²` in the uniform error on `K`. [`convexify_smooth`] adds `L‖x‖²` with
//! `L` half the largest Hessian spectral radius, which leaves every difference of order
//! three and higher unchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice};
use crate::linalg::Matrix;
use crate::polynomials::{
    hessian_min_eig_on, quadratic_form, quadratic_parts, symm_eig, Polynomial,
};
use crate::scalar::Scalar;
use crate::smoothness::{midpoint_violation, ScalarField};

/// Relative inflation applied to grid estimates of `‖f - P‖_{B₂ⁿ}`.
pub const SHIFT_INFLATION: f64 = 1e-3;
const CLIP_TOL: f64 = 1e-12;
const REFINE_STARTS: usize = 4;

/// Outcome of [`convexify_quadratic`] with every operand of the error chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RepairResult<T> {
    pub q: Polynomial<T>,
    /// `‖f - P‖` on the unit ball (grid maximum, locally refined)
    pub e_ball: T,
    /// `‖f - P‖` on `K`, at least `e_ball`
    pub e_k: T,
    /// `2λ² e_K (1 + 1e-3)`
    pub bound: T,
    /// `‖f - Q‖` on the grid of `K`
    pub achieved: T,
    /// `‖P - Q‖` on the unit-ball grid
    pub ball_gap: T,
    /// `ball_gap <= e_ball (1 + 1e-3)`
    pub intermediate_ok: bool,
    pub lambda: T,
    /// Constant subtracted from the clipped form, `e_ball (1 + 1e-3)`.
    pub shift: T,
    /// Eigenvalues of the quadratic part of `P`, descending.
    pub eigenvalues: Vec<T>,
    pub clipped: Vec<T>,
    pub eigenvectors: Matrix<T>,
    /// Smallest eigenvalue of the quadratic form of `Q`.
    pub q_min_eigenvalue: T,
    /// `achieved / e_K`
    pub ratio: T,
}

/// `max |f - p|` over the grid of `body`, then raised by compass search from the best few
/// grid points.
pub fn residual_sup<T: Scalar>(
    f: &ScalarField<T>,
    p: &Polynomial<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
) -> Result<T> {
    let lattice = Lattice::build(body, grid)?;
    let pts = lattice.points();
    let resid = |x: &[T]| (f.at(x) - p.value_at(x)).abs();
    let vals: Vec<T> = pts.par_iter().map(|x| resid(x)).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let n = body.dim();
    let (lo, hi) = body.bounding_box();
    let spacing: Vec<T> = (0..n)
        .map(|k| (hi[k] - lo[k]) / T::from_usize_lossy(lattice.counts()[k] - 1))
        .collect();
    let best = order
        .iter()
        .take(REFINE_STARTS)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let mut x = pts[i].clone();
            let mut v = vals[i];
            let mut step: Vec<T> = spacing.iter().map(|&d| d * T::lit(0.5)).collect();
            for _ in 0..300 {
                if step.iter().all(|&s| s < T::lit(1e-7)) {
                    break;
                }
                let mut moved = false;
                'dirs: for k in 0..n {
                    for s in [step[k], -step[k]] {
                        let mut c = x.clone();
                        c[k] += s;
                        if !body.contains_unchecked(&c, T::zero()) {
                            continue;
                        }
                        let cv = resid(&c);
                        if cv > v {
                            x = c;
                            v = cv;
                            moved = true;
                            break 'dirs;
                        }
                    }
                }
                if !moved {
                    step.iter_mut().for_each(|s| *s *= T::lit(0.5));
                }
            }
            v
        })
        .reduce(T::zero, T::max);
    Ok(best)
}

fn grid_sup<T: Scalar>(
    pts: &[Vec<T>],
    g: impl Fn(&[T]) -> T + Sync,
) -> T {
    pts.par_iter().map(|x| g(x).abs()).reduce(T::zero, T::max)
}

/// Convex quadratic `Q` with `‖f - Q‖_K <= 2λ² ‖f - P‖_K` for convex `f` and a body in
/// ball-sandwich position (`B₂ⁿ ⊂ K ⊂ λB₂ⁿ`, `λ = max_{x∈K} ‖x‖`).
pub fn convexify_quadratic<T: Scalar>(
    f: &ScalarField<T>,
    p: &Polynomial<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
) -> Result<RepairResult<T>> {
    let n = body.dim();
    check_dim(n, f.dim())?;
    check_dim(n, p.dim())?;
    let r_in = body.inner_radius_about_origin();
    if r_in < T::one() - T::lit(1e-9) {
        return Err(Error::Precondition(format!(
            "body is not in canonical position: inner radius about the origin is {r_in}"
        )));
    }
    let lattice = Lattice::build(body, grid)?;
    let pts = lattice.points();
    if !f.is_declared_convex() {
        return Err(Error::Precondition("field is not declared convex".into()));
    }
    if let Some((x, y)) = midpoint_violation(f, pts, T::lit(1e-9)) {
        return Err(Error::Precondition(format!(
            "midpoint convexity fails between {x:?} and {y:?}"
        )));
    }
    let lambda = body.max_norm();

    let parts = quadratic_parts(p)?;
    let eig = symm_eig(&parts.m)?;
    let clipped: Vec<T> = eig
        .d
        .iter()
        .map(|&d| if d > -T::lit(CLIP_TOL) && d < T::zero() { T::zero() } else { d.max(T::zero()) })
        .collect();
    let m_plus = eig.reassemble_with(&clipped).symmetrized();

    let ball = ConvexBody::unit_ball(n);
    let e_ball = residual_sup(f, p, &ball, grid)?;
    let e_k = residual_sup(f, p, body, grid)?.max(e_ball);
    let inflate = T::one() + T::lit(SHIFT_INFLATION);
    let shift = e_ball * inflate;
    let q = quadratic_form(&m_plus)
        .add(&parts.linear.with_degree(2))?
        .add_constant(-shift);

    let ball_pts = Lattice::build(&ball, grid)?.into_points();
    let ball_gap = grid_sup(&ball_pts, |x| p.value_at(x) - q.value_at(x));
    let achieved = grid_sup(pts, |x| f.at(x) - q.value_at(x));
    let bound = T::lit(2.0) * lambda * lambda * e_k * inflate;
    let q_min_eigenvalue = symm_eig(&m_plus)?.min_eigenvalue();
    let ratio = if e_k > T::zero() { achieved / e_k } else { T::zero() };
    Ok(RepairResult {
        q,
        e_ball,
        e_k,
        bound,
        achieved,
        ball_gap,
        intermediate_ok: ball_gap <= shift + T::lit(1e-12),
        lambda,
        shift,
        eigenvalues: eig.d.clone(),
        clipped,
        eigenvectors: eig.o,
        q_min_eigenvalue,
        ratio,
    })
}

/// `h = g + L‖x‖²` with its curvature constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SmoothConvexification<T> {
    pub h: Polynomial<T>,
    /// `½ max_grid ρ(∇²g)`
    pub l: T,
    /// Smallest Hessian eigenvalue of `h` over the grid.
    pub min_hessian_eig: T,
}

/// Adds `L‖x‖²` to `g` with `L` half the largest Hessian spectral radius over the grid,
/// making `h` convex on the grid while keeping `Δ_h^m` for `m >= 3` unchanged.
pub fn convexify_smooth<T: Scalar>(
    g: &Polynomial<T>,
    body: &ConvexBody<T>,
    grid: &GridSpec,
) -> Result<SmoothConvexification<T>> {
    let n = g.dim();
    check_dim(body.dim(), n)?;
    let radius = |h: Matrix<T>| -> Result<T> {
        let e = symm_eig(&h)?;
        Ok(e.max_eigenvalue().abs().max(e.min_eigenvalue().abs()))
    };
    let rho = if g.effective_degree() <= 2 {
        radius(g.hessian_at(&vec![T::zero(); n]))?
    } else {
        let hess = g.hessian_polynomials();
        let lattice = Lattice::build(body, grid)?;
        lattice
            .points()
            .par_iter()
            .map(|x| radius(Matrix::from_fn(n, n, |i, j| hess[i][j].value_at(x))))
            .try_reduce(T::zero, |a, b| Ok(a.max(b)))?
    };
    let l = rho * T::lit(0.5);
    let h = g.add(&Polynomial::squared_norm(n).scale(l))?;
    let min_hessian_eig = hessian_min_eig_on(&h, body, grid)?;
    Ok(SmoothConvexification { h, l, min_hessian_eig })
}
