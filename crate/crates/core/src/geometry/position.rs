//! Affine positioning `B₂ⁿ ⊂ T(K) ⊂ λ B₂ⁿ`.
//!
//! Balls, ellipsoids, boxes and simplices have closed-form John positions (λ = 1, 1,
//! √n and n). General polytopes go through a maximum-volume inscribed ellipsoid
//! computed by a log-barrier Newton ascent on `log det F` subject to
//! `‖Fᵀaᵢ‖ + aᵢ·c <= bᵢ`, re-whitened at every step.

use super::hull::HalfSpace;
use super::{sphere_directions, AffineMap, ConvexBody, Shape};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, norm, Scalar};

const SANDWICH_TOL: f64 = 1e-9;
const MAX_LAMBDA: f64 = 1e8;

/// A body in ball-sandwich position together with the map that put it there.
#[derive(Debug, Clone)]
pub struct Positioned<T> {
    /// `T` with `B₂ⁿ ⊂ T(K) ⊂ λB₂ⁿ`.
    pub map: AffineMap<T>,
    pub lambda: T,
    /// `T(K)`
    pub body: ConvexBody<T>,
}

/// Vertices of the regular simplex centered at 0 with inradius 1 (circumradius n).
fn regular_simplex<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    let nf = n as f64;
    let scale = nf / (nf / (nf + 1.0)).sqrt();
    (0..=n)
        .map(|i| {
            (1..=n)
                .map(|k| {
                    let kf = k as f64;
                    let norm_k = (kf * (kf + 1.0)).sqrt();
                    let v = if i < k {
                        1.0 / norm_k
                    } else if i == k {
                        -kf / norm_k
                    } else {
                        0.0
                    };
                    T::lit(v * scale)
                })
                .collect()
        })
        .collect()
}

/// Affine map sending simplex vertices `from[i]` to `to[i]`.
fn simplex_map<T: Scalar>(from: &[Vec<T>], to: &[Vec<T>]) -> Result<AffineMap<T>> {
    let n = from.len() - 1;
    let v = Matrix::from_fn(n, n, |i, j| from[j + 1][i] - from[0][i]);
    let w = Matrix::from_fn(n, n, |i, j| to[j + 1][i] - to[0][i]);
    let v_inv = v
        .inverse()
        .ok_or_else(|| Error::Degenerate("simplex vertices are affinely dependent".into()))?;
    let matrix = w.matmul(&v_inv);
    let image0 = matrix.mul_vec(&from[0]);
    let offset = to[0].iter().zip(&image0).map(|(&a, &b)| a - b).collect();
    Ok(AffineMap { matrix, offset })
}

fn scaled_map<T: Scalar>(map: &AffineMap<T>, s: T) -> AffineMap<T> {
    AffineMap {
        matrix: map.matrix.scale(s),
        offset: map.offset.iter().map(|&v| v * s).collect(),
    }
}

/// Upper-triangular parametrization of symmetric perturbations `S`.
fn sym_basis(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for k in 0..n {
        for l in k..n {
            out.push((k, l));
        }
    }
    out
}

/// `E_q v` for the symmetric basis matrix of pair `(k, l)`.
fn sym_apply<T: Scalar>((k, l): (usize, usize), v: &[T], out: &mut [T]) {
    out.iter_mut().for_each(|o| *o = T::zero());
    if k == l {
        out[k] = v[k];
    } else {
        out[k] = v[l];
        out[l] = v[k];
    }
}

/// Maximum-volume ellipsoid `{c + F u : ‖u‖ <= 1}` inside `{x : aᵢ·x <= bᵢ}`.
fn max_volume_inscribed<T: Scalar>(
    facets: &[HalfSpace<T>],
    start: Vec<T>,
) -> Result<(Vec<T>, Matrix<T>)> {
    let n = start.len();
    let r0 = facets
        .iter()
        .map(|h| h.offset - dot(&h.normal, &start))
        .fold(T::infinity(), T::min);
    if !(r0 > T::zero()) {
        return Err(Error::Degenerate("start point is not interior".into()));
    }
    let mut center = start;
    let mut shape = Matrix::identity(n).scale(r0 * T::lit(0.5));
    let pairs = sym_basis(n);
    let np = pairs.len() + n;
    let mut mu = T::one();

    let barrier = |s: &Matrix<T>, d: &[T], at: &[Vec<T>], bt: &[T], mu: T| -> Option<T> {
        let m = Matrix::identity(n).add(s);
        let det = m.determinant();
        if !(det > T::zero()) {
            return None;
        }
        let mut val = det.ln();
        for (a, &b) in at.iter().zip(bt) {
            let slack = b - dot(a, d) - norm(&m.mul_vec(a));
            if !(slack > T::zero()) {
                return None;
            }
            val += mu * slack.ln();
        }
        Some(val)
    };

    while mu > T::lit(1e-11) {
        for _ in 0..100 {
            // whitened frame: current ellipsoid is the unit ball at the origin
            let at: Vec<Vec<T>> = facets.iter().map(|h| shape.tr_mul_vec(&h.normal)).collect();
            let bt: Vec<T> = facets
                .iter()
                .map(|h| h.offset - dot(&h.normal, &center))
                .collect();
            let mut grad = vec![T::zero(); np];
            let mut hess = Matrix::zeros(np, np);
            for (q, &(k, l)) in pairs.iter().enumerate() {
                if k == l {
                    grad[q] = T::one();
                    hess[(q, q)] = -T::one();
                } else {
                    hess[(q, q)] = -T::lit(2.0);
                }
            }
            let mut w = vec![vec![T::zero(); n]; pairs.len()];
            let mut jac = vec![T::zero(); np];
            for (a, &b) in at.iter().zip(&bt) {
                let r = norm(a);
                let s = b - r;
                if !(s > T::zero()) {
                    return Err(Error::Internal(
                        "inscribed ellipsoid left the polytope".into(),
                    ));
                }
                let ahat: Vec<T> = a.iter().map(|&v| v / r).collect();
                for (q, &pair) in pairs.iter().enumerate() {
                    sym_apply(pair, a, &mut w[q]);
                    jac[q] = -dot(&ahat, &w[q]);
                }
                for k in 0..n {
                    jac[pairs.len() + k] = -a[k];
                }
                for q in 0..np {
                    grad[q] += mu * jac[q] / s;
                    for q2 in 0..np {
                        let mut h = -mu * jac[q] * jac[q2] / (s * s);
                        if q < pairs.len() && q2 < pairs.len() {
                            let curv = dot(&w[q], &w[q2]) - dot(&ahat, &w[q]) * dot(&ahat, &w[q2]);
                            h -= mu * curv / (r * s);
                        }
                        hess[(q, q2)] += h;
                    }
                }
            }
            let neg = hess.scale(-T::one());
            let step = match neg.solve(&grad) {
                Some(s) => s,
                None => break,
            };
            let decrement = dot(&grad, &step);
            if !(decrement > T::lit(1e-13)) {
                break;
            }
            let base = barrier(&Matrix::zeros(n, n), &vec![T::zero(); n], &at, &bt, mu)
                .ok_or_else(|| Error::Internal("barrier undefined at current iterate".into()))?;
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..60 {
                let mut s = Matrix::zeros(n, n);
                for (q, &(k, l)) in pairs.iter().enumerate() {
                    s[(k, l)] = t * step[q];
                    s[(l, k)] = t * step[q];
                }
                let d: Vec<T> = (0..n).map(|k| t * step[pairs.len() + k]).collect();
                if let Some(v) = barrier(&s, &d, &at, &bt, mu) {
                    if v >= base + T::lit(0.25) * t * decrement {
                        accepted = Some((s, d));
                        break;
                    }
                }
                t *= T::lit(0.5);
            }
            let Some((s, d)) = accepted else { break };
            let shift = shape.mul_vec(&d);
            center = center.iter().zip(&shift).map(|(&c, &v)| c + v).collect();
            shape = shape.matmul(&Matrix::identity(n).add(&s));
        }
        mu *= T::lit(0.1);
    }

    // scale up until the ellipsoid touches the nearest facet
    let fit = facets
        .iter()
        .map(|h| (h.offset - dot(&h.normal, &center)) / norm(&shape.tr_mul_vec(&h.normal)))
        .fold(T::infinity(), T::min);
    Ok((center, shape.scale(fit)))
}

/// Ball-sandwich position of `body`.
pub fn position<T: Scalar>(body: &ConvexBody<T>) -> Result<Positioned<T>> {
    let n = body.dim();
    let map = match body.shape() {
        Shape::Ball { center, radius } => {
            let s = T::one() / *radius;
            AffineMap {
                matrix: Matrix::identity(n).scale(s),
                offset: center.iter().map(|&c| -c * s).collect(),
            }
        }
        Shape::Ellipsoid { center, axes } => {
            let inv = axes
                .inverse()
                .ok_or_else(|| Error::Degenerate("ellipsoid axes are singular".into()))?;
            let offset = inv.mul_vec(center).into_iter().map(|v| -v).collect();
            AffineMap {
                matrix: inv,
                offset,
            }
        }
        Shape::Box { lower, upper } => {
            let d: Vec<T> = lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| T::lit(2.0) / (u - l))
                .collect();
            let offset = (0..n)
                .map(|i| -d[i] * (lower[i] + upper[i]) * T::lit(0.5))
                .collect();
            AffineMap {
                matrix: Matrix::from_diagonal(&d),
                offset,
            }
        }
        Shape::Simplex { vertices } => simplex_map(vertices, &regular_simplex(n))?,
        Shape::Polytope { vertices } => {
            let mut start = vec![T::zero(); n];
            for v in vertices {
                for k in 0..n {
                    start[k] += v[k];
                }
            }
            let count = T::from_usize_lossy(vertices.len());
            start.iter_mut().for_each(|c| *c /= count);
            let (center, shape) = max_volume_inscribed(body.facets(), start)?;
            let inv = shape
                .inverse()
                .ok_or_else(|| Error::Degenerate("inscribed ellipsoid is flat".into()))?;
            let offset = inv.mul_vec(&center).into_iter().map(|v| -v).collect();
            AffineMap {
                matrix: inv,
                offset,
            }
        }
    };

    let (map, image) = match body.shape() {
        Shape::Ball { .. } | Shape::Ellipsoid { .. } => (map, ConvexBody::unit_ball(n)),
        Shape::Box { .. } => (map, ConvexBody::hypercube(n)),
        _ => {
            let image = body.affine_image(&map)?;
            // absorb rounding so that the unit ball is inside, not merely close
            let r_in = image.inner_radius_about_origin();
            if !(r_in > T::zero()) {
                return Err(Error::Degenerate(
                    "positioned body misses the origin".into(),
                ));
            }
            let map = scaled_map(&map, T::one() / r_in);
            let image = body.affine_image(&map)?;
            (map, image)
        }
    };
    // positioning a needle-thin body would need a map this ill-conditioned
    let cond = map.operator_norm() * map.inverse()?.operator_norm();
    if !(cond <= T::lit(MAX_LAMBDA)) {
        return Err(Error::Degenerate(format!(
            "positioning map has condition number {cond}"
        )));
    }
    let lambda = image.max_norm().max(T::one());
    if lambda > T::lit(MAX_LAMBDA) {
        return Err(Error::Degenerate(format!(
            "inradius below 1e-8 relative to the outer radius (lambda = {lambda})"
        )));
    }
    if !verify_sandwich(&image, lambda, T::lit(SANDWICH_TOL)) {
        return Err(Error::Internal(
            "positioned body failed the sandwich check".into(),
        ));
    }
    Ok(Positioned {
        map,
        lambda,
        body: image,
    })
}

/// `(T, λ)` with `B₂ⁿ ⊂ T(K) ⊂ λB₂ⁿ`; `λ >= d(K)`.
pub fn canonical_position<T: Scalar>(body: &ConvexBody<T>) -> Result<(AffineMap<T>, T)> {
    position(body).map(|p| (p.map, p.lambda))
}

/// Upper bound on the Banach–Mazur distance to the ball: the achieved λ, capped by
/// John's bounds `n` (any body) and `√n` (centrally symmetric body).
pub fn banach_mazur_upper<T: Scalar>(body: &ConvexBody<T>) -> Result<T> {
    let (_, lambda) = canonical_position(body)?;
    let n = T::from_usize_lossy(body.dim());
    let cap = if body.is_symmetric() { n.sqrt() } else { n };
    Ok(lambda.min(cap))
}

/// Checks `B₂ⁿ ⊂ K ⊂ λB₂ⁿ` within `tol`: inner inclusion by support-function values in
/// sampled directions (and exact facet distances for polytopes), outer by extreme-point
/// norms.
pub fn verify_sandwich<T: Scalar>(body: &ConvexBody<T>, lambda: T, tol: T) -> bool {
    let n = body.dim();
    let res = match n {
        1 => 2,
        2 => 65,
        3 => 17,
        4 => 9,
        _ => 5,
    };
    let one = T::one();
    let inner = sphere_directions::<T>(n, res)
        .iter()
        .all(|u| body.support(u).map_or(false, |h| h >= one - tol));
    let facets_ok = body.facets().iter().all(|h| h.offset >= one - tol);
    inner && facets_ok && body.max_norm() <= lambda + tol
}
