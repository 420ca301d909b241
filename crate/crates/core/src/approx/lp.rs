//! Dense two-phase revised simplex for `min cᵀx  s.t.  Ax = b, x >= 0`.
//!
//! Problems here have few rows (a basis dimension plus one) and many columns (two per grid
//! point), so the basis inverse is kept explicitly and refreshed every few dozen pivots.
//! Pricing is Dantzig's rule with index tie-breaks; after a run of degenerate pivots it
//! switches to Bland's rule for the rest of the phase, which rules out cycling.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

const OPT_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const REINVERT_EVERY: usize = 50;
const DEGENERATE_RUN: usize = 50;
const MAX_ITER: usize = 200_000;

#[derive(Debug, Clone)]
pub(crate) struct LpSolution<T> {
    pub x: Vec<T>,
    /// Simplex multipliers `y = c_Bᵀ B⁻¹`, an optimal solution of `max bᵀy, Aᵀy <= c`.
    pub y: Vec<T>,
    /// Rows found linearly dependent on the others during phase one.
    pub redundant_rows: Vec<usize>,
}

struct Tableau<T> {
    /// Sign-normalized structural columns.
    cols: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Matrix<T>,
    xb: Vec<T>,
}

impl<T: Scalar> Tableau<T> {
    fn rows(&self) -> usize {
        self.rhs.len()
    }

    /// Column `j` of the sign-normalized system; artificials follow the structurals.
    fn column(&self, j: usize) -> Vec<T> {
        let m = self.rows();
        if j < self.cols.len() {
            self.cols[j].clone()
        } else {
            let mut e = vec![T::zero(); m];
            e[j - self.cols.len()] = T::one();
            e
        }
    }

    /// `yᵀ column(j)` without materializing the column.
    #[inline]
    fn price(&self, y: &[T], j: usize) -> T {
        if j < self.cols.len() {
            dot(y, &self.cols[j])
        } else {
            y[j - self.cols.len()]
        }
    }

    fn reinvert(&mut self) -> Result<()> {
        let m = self.rows();
        let cols: Vec<Vec<T>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let b = Matrix::from_fn(m, m, |i, k| cols[k][i]);
        self.binv = b
            .inverse()
            .ok_or_else(|| Error::Internal("simplex basis became singular".into()))?;
        self.xb = self.binv.mul_vec(&self.rhs);
        for v in &mut self.xb {
            if *v < T::zero() && *v > -T::lit(FEAS_TOL) {
                *v = T::zero();
            }
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize, col: &[T]) {
        let m = self.rows();
        let p = col[r];
        for k in 0..m {
            self.binv[(r, k)] /= p;
        }
        self.xb[r] /= p;
        for i in 0..m {
            if i == r || col[i] == T::zero() {
                continue;
            }
            let f = col[i];
            for k in 0..m {
                let v = self.binv[(r, k)];
                self.binv[(i, k)] -= f * v;
            }
            let v = self.xb[r];
            self.xb[i] -= f * v;
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn multipliers(&self, cost: &dyn Fn(usize) -> T) -> Vec<T> {
        let m = self.rows();
        let cb: Vec<T> = self.basis.iter().map(|&j| cost(j)).collect();
        (0..m)
            .map(|k| (0..m).map(|i| cb[i] * self.binv[(i, k)]).sum())
            .collect()
    }

    /// Runs simplex iterations over the structural columns until optimal.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> T) -> Result<()> {
        let n = self.cols.len();
        let mut bland = false;
        let mut degenerate = 0usize;
        for iter in 0..MAX_ITER {
            if iter > 0 && iter % REINVERT_EVERY == 0 {
                self.reinvert()?;
            }
            let y = self.multipliers(cost);
            let mut entering: Option<(usize, T)> = None;
            for j in 0..n {
                if self.is_basic[j] {
                    continue;
                }
                let d = cost(j) - self.price(&y, j);
                if d < -T::lit(OPT_TOL) {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.map_or(true, |(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };
            let col = self.binv.mul_vec(&self.column(q));
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows() {
                if col[r] > T::lit(PIVOT_TOL) {
                    let theta = self.xb[r].max(T::zero()) / col[r];
                    let better = match leave {
                        None => true,
                        Some((lr, lt)) => {
                            theta < lt || (theta == lt && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, theta));
                    }
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Unbounded);
            };
            if theta <= T::lit(1e-14) {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, q, &col);
            self.xb[r] = theta;
        }
        Err(Error::Internal("simplex iteration limit reached".into()))
    }
}

/// Solves `min cᵀx  s.t.  Σ_j x_j cols[j] = b, x >= 0`.
pub(crate) fn solve<T: Scalar>(cols: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpSolution<T>> {
    let m = b.len();
    let n = cols.len();
    debug_assert_eq!(c.len(), n);
    let sign: Vec<T> = b
        .iter()
        .map(|&v| if v < T::zero() { -T::one() } else { T::one() })
        .collect();
    let rhs: Vec<T> = b.iter().zip(&sign).map(|(&v, &s)| v * s).collect();
    let mut is_basic = vec![false; n + m];
    is_basic[n..].iter_mut().for_each(|v| *v = true);
    let normalized: Vec<Vec<T>> = cols
        .iter()
        .map(|col| col.iter().zip(&sign).map(|(&a, &s)| a * s).collect())
        .collect();
    let mut t = Tableau {
        cols: normalized,
        xb: rhs.clone(),
        rhs,
        basis: (n..n + m).collect(),
        is_basic,
        binv: Matrix::identity(m),
    };

    let phase1 = |j: usize| if j >= n { T::one() } else { T::zero() };
    t.optimize(&phase1)?;
    t.reinvert()?;
    let scale = T::one() + b.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let infeasibility: T = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v)
        .sum();
    if infeasibility > T::lit(FEAS_TOL) * scale {
        return Err(Error::Infeasible);
    }

    // pivot remaining artificials out; rows where that is impossible are redundant
    let mut redundant_rows = Vec::new();
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        t.xb[r] = T::zero();
        let mut replaced = false;
        for j in 0..n {
            if t.is_basic[j] {
                continue;
            }
            let colj = &t.cols[j];
            let alpha: T = (0..m).map(|k| t.binv[(r, k)] * colj[k]).sum();
            let size = colj.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
            if alpha.abs() > T::lit(1e-9) * (T::one() + size) {
                let col = t.binv.mul_vec(colj);
                t.pivot(r, j, &col);
                t.xb[r] = T::zero();
                replaced = true;
                break;
            }
        }
        if !replaced {
            redundant_rows.push(t.basis[r] - n);
        }
    }

    let phase2 = |j: usize| if j < n { c[j] } else { T::zero() };
    t.optimize(&phase2)?;
    t.reinvert()?;
    let y_scaled = t.multipliers(&phase2);
    let y = y_scaled.iter().zip(&sign).map(|(&v, &s)| v * s).collect();
    let mut x = vec![T::zero(); n];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.xb[r].max(T::zero());
        }
    }
    redundant_rows.sort_unstable();
    Ok(LpSolution {
        x,
        y,
        redundant_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x1 - 2x2  s.t. x1 + x2 + s1 = 4, x2 + s2 = 3
        let cols: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let sol = solve(&cols, &[4.0, 3.0], &[-1.0, -2.0, 0.0, 0.0]).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 3.0).abs() < 1e-12);
        // dual optimum: y = (-1, -1), bᵀy = -7 = primal optimum
        assert!((sol.y[0] + 1.0).abs() < 1e-12);
        assert!((sol.y[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x1 = -1 with x1 >= 0
        assert_eq!(solve(&[vec![1.0]], &[-1.0], &[0.0]).unwrap_err(), Error::Infeasible);
        // min -x1 s.t. x1 - x2 = 0
        let cols: Vec<Vec<f64>> = vec![vec![1.0], vec![-1.0]];
        assert_eq!(solve(&cols, &[0.0], &[-1.0, 0.0]).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn redundant_row_is_reported() {
        // second row duplicates the first
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let sol = solve(&cols, &[1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(sol.redundant_rows.len(), 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // many identical columns and a zero right-hand side row
        let mut cols = Vec::new();
        for k in 0..40 {
            let s = (k % 5) as f64 - 2.0;
            cols.push(vec![s, 1.0]);
            cols.push(vec![-s, 1.0]);
        }
        let c: Vec<f64> = (0..80).map(|k| -((k * 7 % 11) as f64)).collect();
        let sol = solve(&cols, &[0.0, 1.0], &c).unwrap();
        let lhs0: f64 = cols.iter().zip(&sol.x).map(|(a, x)| a[0] * x).sum();
        let lhs1: f64 = cols.iter().zip(&sol.x).map(|(a, x)| a[1] * x).sum();
        assert!(lhs0.abs() < 1e-12 && (lhs1 - 1.0).abs() < 1e-12);
    }
}
