//! Facet enumeration for vertex-described polytopes.
//!
//! Brute force over all `n`-subsets of the vertex list: each affinely independent subset
//! spans a hyperplane, which is a facet iff every vertex lies on one side of it. This is
//! `O(C(V, n) · V)` and intended for the small polytopes used here (V ≲ 30, n ≲ 5).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, norm, Scalar};

const MAX_SUBSETS: usize = 5_000_000;

/// Closed half-space `{x : normal · x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HalfSpace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> HalfSpace<T> {
    /// Signed Euclidean distance of `x` outside the half-space (negative inside).
    #[inline]
    pub fn excess(&self, x: &[T]) -> T {
        dot(&self.normal, x) - self.offset
    }
}

/// Normal of the hyperplane through `pts` (exactly `n` points in ℝⁿ) via cofactor
/// expansion of the difference matrix. Not normalized.
fn hyperplane_normal<T: Scalar>(pts: &[&[T]]) -> Vec<T> {
    let n = pts[0].len();
    if n == 1 {
        return vec![T::one()];
    }
    let diffs: Vec<Vec<T>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(&a, &b)| a - b).collect())
        .collect();
    (0..n)
        .map(|k| {
            let minor =
                Matrix::from_fn(n - 1, n - 1, |i, j| diffs[i][if j < k { j } else { j + 1 }]);
            let det = minor.determinant();
            if k % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn for_each_combination(n_items: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n_items {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n_items - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of `conv(vertices)`. Fails if the hull is not full-dimensional.
pub fn facets<T: Scalar>(vertices: &[Vec<T>]) -> Result<Vec<HalfSpace<T>>> {
    let n = vertices.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::InvalidInput(
            "polytope needs at least one vertex of positive dimension".into(),
        ));
    }
    if vertices.len() < n + 1 {
        return Err(Error::Degenerate(format!(
            "{} vertices cannot span a full-dimensional body in dimension {n}",
            vertices.len()
        )));
    }
    let subsets = crate::polynomials::binomial(vertices.len(), n);
    if subsets > MAX_SUBSETS {
        return Err(Error::InvalidInput(format!(
            "facet enumeration over {subsets} vertex subsets is too large"
        )));
    }
    let scale = vertices
        .iter()
        .flat_map(|v| v.iter())
        .fold(T::zero(), |m, &x| m.max(x.abs()))
        .max(T::min_positive_value());
    let side_tol = T::lit(1e-9) * scale;
    let normal_tol = T::lit(1e-10) * scale.powi(n as i32 - 1);

    let mut out: Vec<HalfSpace<T>> = Vec::new();
    let mut flat = false;
    for_each_combination(vertices.len(), n, |idx| {
        let pts: Vec<&[T]> = idx.iter().map(|&i| vertices[i].as_slice()).collect();
        let raw = hyperplane_normal(&pts);
        let len = norm(&raw);
        if len <= normal_tol {
            return;
        }
        let normal: Vec<T> = raw.iter().map(|&c| c / len).collect();
        let offset = dot(&normal, pts[0]);
        let (mut above, mut below) = (false, false);
        for v in vertices {
            let s = dot(&normal, v) - offset;
            if s > side_tol {
                above = true;
            } else if s < -side_tol {
                below = true;
            }
        }
        let candidate = match (above, below) {
            (true, true) => return,
            (false, false) => {
                flat = true;
                return;
            }
            (false, true) => HalfSpace { normal, offset },
            (true, false) => HalfSpace {
                normal: normal.iter().map(|&c| -c).collect(),
                offset: -offset,
            },
        };
        let dup = out.iter().any(|h| {
            (h.offset - candidate.offset).abs() <= side_tol
                && h.normal
                    .iter()
                    .zip(&candidate.normal)
                    .all(|(&a, &b)| (a - b).abs() <= T::lit(1e-9))
        });
        if !dup {
            out.push(candidate);
        }
    });
    if flat || out.len() < n + 1 {
        return Err(Error::Degenerate(
            "vertices do not span a full-dimensional polytope".into(),
        ));
    }
    Ok(out)
}
