//! Convex bodies, lattice grids and the ball-sandwich position.

mod grid;
mod hull;
mod position;

use serde::{Deserialize, Serialize};

pub use grid::{sample_grid, GridSpec, Lattice, Resolution};
pub use hull::{facets, HalfSpace};
pub use position::{banach_mazur_upper, canonical_position, position, verify_sandwich, Positioned};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, norm, Scalar};

const SYMMETRY_TOL: f64 = 1e-12;

/// Geometric description of a convex body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", bound = "T: Scalar")]
pub enum Shape<T> {
    Ball {
        center: Vec<T>,
        radius: T,
    },
    Box {
        lower: Vec<T>,
        upper: Vec<T>,
    },
    Simplex {
        vertices: Vec<Vec<T>>,
    },
    Polytope {
        vertices: Vec<Vec<T>>,
    },
    /// `{center + axes · u : ‖u‖ <= 1}`; arises as the affine image of a ball.
    Ellipsoid {
        center: Vec<T>,
        axes: Matrix<T>,
    },
}

/// A compact convex set with nonempty interior.
///
/// Simplices and polytopes carry their facet list (computed once at construction) so
/// that membership is a half-space test. `symmetric` is detected, not declared.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody<T> {
    dim: usize,
    shape: Shape<T>,
    symmetric: bool,
    facets: Vec<HalfSpace<T>>,
    /// `(axes⁻¹, σ_min(axes))` for ellipsoids.
    inverse_axes: Option<(Matrix<T>, T)>,
}

/// `x ↦ matrix · x + offset`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AffineMap<T> {
    pub matrix: Matrix<T>,
    pub offset: Vec<T>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n),
            offset: vec![T::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix
            .mul_vec(x)
            .into_iter()
            .zip(&self.offset)
            .map(|(a, &b)| a + b)
            .collect()
    }

    pub fn determinant(&self) -> T {
        self.matrix.determinant()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.determinant().abs() <= T::lit(1e-12) {
            return Err(Error::Degenerate("affine map is not invertible".into()));
        }
        let inv = self
            .matrix
            .inverse()
            .ok_or_else(|| Error::Degenerate("affine map is not invertible".into()))?;
        let offset = inv.mul_vec(&self.offset).into_iter().map(|v| -v).collect();
        Ok(Self {
            matrix: inv,
            offset,
        })
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            matrix: self.matrix.matmul(&inner.matrix),
            offset: self.apply(&inner.offset),
        }
    }

    /// Largest singular value, via the top eigenvalue of `AᵀA`.
    pub fn operator_norm(&self) -> T {
        let ata = self.matrix.transpose().matmul(&self.matrix);
        crate::polynomials::symm_eig(&ata)
            .map(|e| e.max_eigenvalue().max(T::zero()).sqrt())
            .unwrap_or_else(|_| T::zero())
    }
}

impl<T: Scalar> ConvexBody<T> {
    pub fn new(shape: Shape<T>) -> Result<Self> {
        let (dim, facets, inverse_axes) = match &shape {
            Shape::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidInput(
                        "ball needs a center of positive dimension".into(),
                    ));
                }
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err(Error::Degenerate("ball radius must be positive".into()));
                }
                (center.len(), Vec::new(), None)
            }
            Shape::Box { lower, upper } => {
                check_dim(lower.len(), upper.len())?;
                if lower.is_empty() {
                    return Err(Error::InvalidInput("box needs positive dimension".into()));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return Err(Error::Degenerate(
                        "box needs lower < upper componentwise".into(),
                    ));
                }
                (lower.len(), Vec::new(), None)
            }
            Shape::Simplex { vertices } => {
                let n = vertices.first().map_or(0, Vec::len);
                if n == 0 || vertices.len() != n + 1 {
                    return Err(Error::InvalidInput(format!(
                        "simplex in dimension {n} needs exactly {} vertices, got {}",
                        n + 1,
                        vertices.len()
                    )));
                }
                for v in vertices {
                    check_dim(n, v.len())?;
                }
                let edges = Matrix::from_fn(n, n, |i, j| vertices[j + 1][i] - vertices[0][i]);
                let lengths: T = (0..n)
                    .map(|j| norm(&edges.column(j)))
                    .fold(T::one(), |acc, l| acc * l);
                if edges.determinant().abs() <= T::lit(1e-10) * lengths {
                    return Err(Error::Degenerate(
                        "simplex vertices are affinely dependent".into(),
                    ));
                }
                (n, hull::facets(vertices)?, None)
            }
            Shape::Polytope { vertices } => {
                let n = vertices.first().map_or(0, Vec::len);
                for v in vertices {
                    check_dim(n, v.len())?;
                }
                (n, hull::facets(vertices)?, None)
            }
            Shape::Ellipsoid { center, axes } => {
                let n = center.len();
                if n == 0 || axes.rows() != n || axes.cols() != n {
                    return Err(Error::InvalidInput("ellipsoid axes must be n x n".into()));
                }
                if axes.determinant().abs() <= T::lit(1e-12) {
                    return Err(Error::Degenerate("ellipsoid axes are singular".into()));
                }
                let inv = axes
                    .inverse()
                    .ok_or_else(|| Error::Degenerate("ellipsoid axes are singular".into()))?;
                let sigma_min = T::one()
                    / AffineMap {
                        matrix: inv.clone(),
                        offset: vec![T::zero(); n],
                    }
                    .operator_norm();
                (n, Vec::new(), Some((inv, sigma_min)))
            }
        };
        let mut body = Self {
            dim,
            shape,
            symmetric: false,
            facets,
            inverse_axes,
        };
        body.symmetric = body.detect_symmetry();
        Ok(body)
    }

    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::ball(vec![T::zero(); n], T::one()).expect("valid unit ball")
    }

    pub fn cuboid(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        Self::new(Shape::Box { lower, upper })
    }

    /// `[a, b]`
    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::cuboid(vec![a], vec![b])
    }

    /// `[-1, 1]ⁿ`
    pub fn hypercube(n: usize) -> Self {
        Self::cuboid(vec![-T::one(); n], vec![T::one(); n]).expect("valid cube")
    }

    pub fn simplex(vertices: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Shape::Simplex { vertices })
    }

    /// `conv{0, e₁, …, eₙ}`
    pub fn standard_simplex(n: usize) -> Self {
        let mut v = vec![vec![T::zero(); n]];
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            v.push(e);
        }
        Self::simplex(v).expect("valid standard simplex")
    }

    pub fn polytope(vertices: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Shape::Polytope { vertices })
    }

    pub fn ellipsoid(center: Vec<T>, axes: Matrix<T>) -> Result<Self> {
        Self::new(Shape::Ellipsoid { center, axes })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    /// True iff `K = −K`.
    #[inline]
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn facets(&self) -> &[HalfSpace<T>] {
        &self.facets
    }

    fn detect_symmetry(&self) -> bool {
        let tol = T::lit(SYMMETRY_TOL);
        let small = |v: &[T]| v.iter().all(|c| c.abs() <= tol);
        match &self.shape {
            Shape::Ball { center, .. } | Shape::Ellipsoid { center, .. } => small(center),
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .all(|(&l, &u)| (l + u).abs() <= tol * (T::one() + u.abs())),
            Shape::Simplex { vertices } | Shape::Polytope { vertices } => {
                let ext = self.extreme_vertices(vertices);
                ext.iter().all(|v| {
                    ext.iter().any(|w| {
                        v.iter()
                            .zip(w.iter())
                            .all(|(&a, &b)| (a + b).abs() <= tol * (T::one() + a.abs()))
                    })
                })
            }
        }
    }

    /// Vertices lying on at least `n` facets; interior or redundant points are dropped.
    fn extreme_vertices<'a>(&self, vertices: &'a [Vec<T>]) -> Vec<&'a Vec<T>> {
        let tol = T::lit(1e-9);
        vertices
            .iter()
            .filter(|v| {
                self.facets
                    .iter()
                    .filter(|h| h.excess(v).abs() <= tol * (T::one() + h.offset.abs()))
                    .count()
                    >= self.dim
            })
            .collect()
    }

    /// True iff `x` lies within Euclidean distance `tol` of `K`.
    ///
    /// Exact for balls and boxes; simplices and polytopes use half-space tests (a point
    /// near a vertex may pass with distance slightly above `tol`); ellipsoids test the
    /// whitened norm against `1 + tol / σ_min`.
    pub fn contains(&self, x: &[T], tol: T) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(self.contains_unchecked(x, tol))
    }

    pub(crate) fn contains_unchecked(&self, x: &[T], tol: T) -> bool {
        match &self.shape {
            Shape::Ball { center, radius } => {
                let d2: T = x.iter().zip(center).map(|(&a, &c)| (a - c) * (a - c)).sum();
                let r = *radius + tol;
                d2 <= r * r
            }
            Shape::Box { lower, upper } => {
                let d2: T = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&v, (&l, &u))| {
                        let e = if v < l {
                            l - v
                        } else if v > u {
                            v - u
                        } else {
                            T::zero()
                        };
                        e * e
                    })
                    .sum();
                d2 <= tol * tol
            }
            Shape::Simplex { .. } | Shape::Polytope { .. } => {
                self.facets.iter().all(|h| h.excess(x) <= tol)
            }
            Shape::Ellipsoid { center, .. } => {
                let (inv, sigma_min) = self
                    .inverse_axes
                    .as_ref()
                    .expect("ellipsoid inverse cached");
                let d: Vec<T> = x.iter().zip(center).map(|(&a, &c)| a - c).collect();
                norm(&inv.mul_vec(&d)) <= T::one() + tol / *sigma_min
            }
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().map(|&c| c - *radius).collect(),
                center.iter().map(|&c| c + *radius).collect(),
            ),
            Shape::Box { lower, upper } => (lower.clone(), upper.clone()),
            Shape::Simplex { vertices } | Shape::Polytope { vertices } => {
                let mut lo = vertices[0].clone();
                let mut hi = vertices[0].clone();
                for v in vertices {
                    for i in 0..self.dim {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Shape::Ellipsoid { center, axes } => {
                let half: Vec<T> = (0..self.dim).map(|i| norm(axes.row(i))).collect();
                (
                    center.iter().zip(&half).map(|(&c, &h)| c - h).collect(),
                    center.iter().zip(&half).map(|(&c, &h)| c + h).collect(),
                )
            }
        }
    }

    /// Support function `h_K(u) = max_{x ∈ K} u · x`.
    pub fn support(&self, u: &[T]) -> Result<T> {
        check_dim(self.dim, u.len())?;
        Ok(match &self.shape {
            Shape::Ball { center, radius } => dot(u, center) + *radius * norm(u),
            Shape::Box { lower, upper } => u
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&ui, (&l, &h))| (ui * l).max(ui * h))
                .sum(),
            Shape::Simplex { vertices } | Shape::Polytope { vertices } => vertices
                .iter()
                .map(|v| dot(u, v))
                .fold(T::neg_infinity(), T::max),
            Shape::Ellipsoid { center, axes } => dot(u, center) + norm(&axes.tr_mul_vec(u)),
        })
    }

    /// Points whose convex hull is `K` (for polytopes) used in outer-radius checks.
    pub fn vertices(&self) -> Option<Vec<Vec<T>>> {
        match &self.shape {
            Shape::Simplex { vertices } | Shape::Polytope { vertices } => Some(vertices.clone()),
            Shape::Box { lower, upper } => {
                let n = self.dim;
                Some(
                    (0..1usize << n)
                        .map(|mask| {
                            (0..n)
                                .map(|i| {
                                    if mask >> i & 1 == 1 {
                                        upper[i]
                                    } else {
                                        lower[i]
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// `max_{x ∈ K} ‖x‖`: exact for balls, boxes and polytopes; for an off-center
    /// ellipsoid, the bound `‖c‖ + σ_max(axes)`.
    pub fn max_norm(&self) -> T {
        match &self.shape {
            Shape::Ball { center, radius } => norm(center) + *radius,
            Shape::Ellipsoid { center, axes } => {
                norm(center)
                    + AffineMap {
                        matrix: axes.clone(),
                        offset: center.clone(),
                    }
                    .operator_norm()
            }
            _ => self
                .vertices()
                .expect("polyhedral body")
                .iter()
                .map(|v| norm(v))
                .fold(T::zero(), T::max),
        }
    }

    /// Radius of the largest ball centered at the origin inside `K`; negative when the
    /// origin is outside. Exact except for off-center ellipsoids (direction sampling).
    pub fn inner_radius_about_origin(&self) -> T {
        match &self.shape {
            Shape::Ball { center, radius } => *radius - norm(center),
            Shape::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| (-l).min(u))
                .fold(T::infinity(), T::min),
            Shape::Simplex { .. } | Shape::Polytope { .. } => self
                .facets
                .iter()
                .map(|h| h.offset)
                .fold(T::infinity(), T::min),
            Shape::Ellipsoid { .. } => sphere_directions::<T>(self.dim, 33)
                .iter()
                .map(|u| self.support(u).expect("dimension"))
                .fold(T::infinity(), T::min),
        }
    }

    /// Image of `K` under an invertible affine map.
    pub fn affine_image(&self, map: &AffineMap<T>) -> Result<Self> {
        check_dim(self.dim, map.dim())?;
        if map.determinant().abs() <= T::lit(1e-12) {
            return Err(Error::Degenerate("affine map is not invertible".into()));
        }
        let shape = match &self.shape {
            Shape::Ball { center, radius } => Shape::Ellipsoid {
                center: map.apply(center),
                axes: map.matrix.scale(*radius),
            },
            Shape::Ellipsoid { center, axes } => Shape::Ellipsoid {
                center: map.apply(center),
                axes: map.matrix.matmul(axes),
            },
            Shape::Simplex { vertices } => Shape::Simplex {
                vertices: vertices.iter().map(|v| map.apply(v)).collect(),
            },
            Shape::Polytope { vertices } => Shape::Polytope {
                vertices: vertices.iter().map(|v| map.apply(v)).collect(),
            },
            Shape::Box { .. } => Shape::Polytope {
                vertices: self
                    .vertices()
                    .expect("box corners")
                    .iter()
                    .map(|v| map.apply(v))
                    .collect(),
            },
        };
        Self::new(shape)
    }
}

impl<T: Scalar> Serialize for ConvexBody<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.shape.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ConvexBody<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let shape = Shape::deserialize(d)?;
        ConvexBody::new(shape).map_err(serde::de::Error::custom)
    }
}

/// Deterministic unit directions covering `𝕊ⁿ⁻¹`: the normalized boundary points of a
/// `res`-lattice on `[-1, 1]ⁿ`.
pub fn sphere_directions<T: Scalar>(n: usize, res: usize) -> Vec<Vec<T>> {
    let res = res.max(2);
    let total = res.pow(n as u32);
    let coord = |i: usize| T::lit(2.0 * i as f64 / (res - 1) as f64 - 1.0);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0usize; n];
        for k in (0..n).rev() {
            idx[k] = rem % res;
            rem /= res;
        }
        if !idx.iter().any(|&i| i == 0 || i == res - 1) {
            continue;
        }
        let v: Vec<T> = idx.iter().map(|&i| coord(i)).collect();
        let l = norm(&v);
        out.push(v.into_iter().map(|c| c / l).collect());
    }
    out
}
