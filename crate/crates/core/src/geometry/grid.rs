use serde::{Deserialize, Serialize};

use super::ConvexBody;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

const MAX_LATTICE_NODES: usize = 50_000_000;
const EMPTY: usize = usize::MAX;

/// Points per axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

/// Axis-aligned lattice over a body's bounding box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: Resolution,
    /// When false the lattice is cell-centered and avoids the bounding-box faces.
    #[serde(default = "default_true")]
    pub includes_boundary: bool,
}

fn default_true() -> bool {
    true
}

impl GridSpec {
    pub fn uniform(resolution: usize) -> Self {
        Self {
            resolution: Resolution::Uniform(resolution),
            includes_boundary: true,
        }
    }

    pub fn per_axis(resolution: &[usize]) -> Self {
        Self {
            resolution: Resolution::PerAxis(resolution.to_vec()),
            includes_boundary: true,
        }
    }

    pub fn counts(&self, dim: usize) -> Result<Vec<usize>> {
        let counts = match &self.resolution {
            Resolution::Uniform(r) => vec![*r; dim],
            Resolution::PerAxis(v) => {
                check_dim(dim, v.len())?;
                v.clone()
            }
        };
        if counts.iter().any(|&r| r < 2) {
            return Err(Error::InvalidInput(
                "grid resolution must be at least 2".into(),
            ));
        }
        Ok(counts)
    }
}

/// The lattice points of a [`GridSpec`] that fall inside a body, in lexicographic
/// order (first axis slowest), plus an index for stepping along lattice vectors.
#[derive(Debug, Clone)]
pub struct Lattice<T> {
    dim: usize,
    counts: Vec<usize>,
    strides: Vec<usize>,
    axes: Vec<Vec<T>>,
    slot: Vec<usize>,
    points: Vec<Vec<T>>,
    multi: Vec<Vec<usize>>,
}

/// Relative slack for boundary lattice points that land a rounding error outside `K`.
pub(crate) fn grid_membership_tol<T: Scalar>(body: &ConvexBody<T>) -> T {
    let (lo, hi) = body.bounding_box();
    let scale = lo
        .iter()
        .chain(hi.iter())
        .fold(T::one(), |m, &v| m.max(v.abs()));
    T::lit(1e-12) * scale
}

fn axis_coordinates<T: Scalar>(lo: T, hi: T, count: usize, boundary: bool) -> Vec<T> {
    let center = (lo + hi) * T::lit(0.5);
    let half = (hi - lo) * T::lit(0.5);
    (0..count)
        .map(|i| {
            if boundary {
                if i == 0 {
                    return lo;
                }
                if i == count - 1 {
                    return hi;
                }
                // symmetric integer numerator keeps a symmetric axis exactly symmetric
                let k = 2 * i as i64 - (count as i64 - 1);
                center + half * T::lit(k as f64) / T::from_usize_lossy(count - 1)
            } else {
                let k = 2 * i as i64 + 1 - count as i64;
                center + half * T::lit(k as f64) / T::from_usize_lossy(count)
            }
        })
        .collect()
}

impl<T: Scalar> Lattice<T> {
    pub fn build(body: &ConvexBody<T>, spec: &GridSpec) -> Result<Self> {
        let dim = body.dim();
        let counts = spec.counts(dim)?;
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&t| t <= MAX_LATTICE_NODES)
            .ok_or_else(|| Error::InvalidInput("grid has too many lattice nodes".into()))?;
        let (lo, hi) = body.bounding_box();
        let axes: Vec<Vec<T>> = (0..dim)
            .map(|k| axis_coordinates(lo[k], hi[k], counts[k], spec.includes_boundary))
            .collect();
        let mut strides = vec![1usize; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * counts[k + 1];
        }
        let tol = grid_membership_tol(body);
        let mut slot = vec![EMPTY; total];
        let mut points = Vec::new();
        let mut multi = Vec::new();
        let mut idx = vec![0usize; dim];
        let mut x: Vec<T> = axes.iter().map(|a| a[0]).collect();
        for (flat, s) in slot.iter_mut().enumerate() {
            let mut rem = flat;
            for k in 0..dim {
                idx[k] = rem / strides[k];
                rem %= strides[k];
                x[k] = axes[k][idx[k]];
            }
            if body.contains_unchecked(&x, tol) {
                *s = points.len();
                points.push(x.clone());
                multi.push(idx.clone());
            }
        }
        if points.is_empty() {
            return Err(Error::DegenerateGrid(
                "no lattice point falls inside the body".into(),
            ));
        }
        Ok(Self {
            dim,
            counts,
            strides,
            axes,
            slot,
            points,
            multi,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<T>> {
        self.points
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Lattice multi-index of point `i`.
    pub fn multi_index(&self, i: usize) -> &[usize] {
        &self.multi[i]
    }

    /// Coordinate of lattice node `idx` along `axis` (inside the body or not).
    pub fn coordinate(&self, axis: usize, idx: usize) -> T {
        self.axes[axis][idx]
    }

    /// Point index of the node `multi_index(i) + step · j`, if it lies in the body.
    #[inline]
    pub fn offset_point(&self, i: usize, step: &[i64], j: i64) -> Option<usize> {
        let base = &self.multi[i];
        let mut flat = 0usize;
        for k in 0..self.dim {
            let c = base[k] as i64 + step[k] * j;
            if c < 0 || c >= self.counts[k] as i64 {
                return None;
            }
            flat += c as usize * self.strides[k];
        }
        match self.slot[flat] {
            EMPTY => None,
            p => Some(p),
        }
    }
}

/// All lattice points of `spec` inside `body`, lexicographically ordered.
pub fn sample_grid<T: Scalar>(body: &ConvexBody<T>, spec: &GridSpec) -> Result<Vec<Vec<T>>> {
    Lattice::build(body, spec).map(Lattice::into_points)
}
