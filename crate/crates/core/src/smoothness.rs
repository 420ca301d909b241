//! Scalar fields, finite differences `Δ_h^m` and the modulus of smoothness `ω_m(f;K)`.
//!
//! The modulus is estimated in two stages. The lattice stage sweeps every grid point `x`
//! and every lattice step `h` (one of each `±h` pair) whose node chain `x, x+h, …, x+mh`
//! stays on the grid inside `K`. The optional refinement stage runs a compass pattern
//! search in `(x, h)` from the best lattice witness. Both stages only ever report a value
//! attained by a feasible chain, so the result is a lower bound for `ω_m`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice};
use crate::polynomials::{binomial, Polynomial};
use crate::scalar::Scalar;

/// Feasibility slack for `x + jh ∈ K`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

pub type Evaluator<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
pub type Gradient<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// A function oracle `x ↦ f(x)` on `ℝⁿ`.
#[derive(Clone)]
pub struct ScalarField<T> {
    dim: usize,
    eval: Evaluator<T>,
    declared_convex: bool,
    subgradient: Option<Gradient<T>>,
}

impl<T: Scalar> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("declared_convex", &self.declared_convex)
            .field("subgradient", &self.subgradient.is_some())
            .finish()
    }
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(dim: usize, f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Self {
            dim,
            eval: Arc::new(f),
            declared_convex: false,
            subgradient: None,
        }
    }

    /// A field declared convex. The declaration is spot-checked by the operations
    /// that rely on it, not here.
    pub fn convex(dim: usize, f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Self::new(dim, f).declare_convex(true)
    }

    pub fn from_polynomial(p: Polynomial<T>) -> Self {
        let dim = p.dim();
        let grad = p.clone();
        Self::new(dim, move |x| p.value_at(x)).with_subgradient(move |x| grad.gradient_at(x))
    }

    pub fn declare_convex(mut self, convex: bool) -> Self {
        self.declared_convex = convex;
        self
    }

    pub fn with_subgradient(mut self, g: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.subgradient = Some(Arc::new(g));
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn is_declared_convex(&self) -> bool {
        self.declared_convex
    }

    /// Unchecked evaluation.
    #[inline]
    pub fn at(&self, x: &[T]) -> T {
        (self.eval)(x)
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim, x.len())?;
        Ok(self.at(x))
    }

    pub fn subgradient(&self, x: &[T]) -> Option<Vec<T>> {
        self.subgradient.as_ref().map(|g| g(x))
    }

    /// `f + p`. Stays declared convex only if `p` is affine; the subgradient oracle is
    /// carried over (plus `∇p`) when present.
    pub fn add_polynomial(&self, p: &Polynomial<T>) -> Result<Self> {
        check_dim(self.dim, p.dim())?;
        let f = self.eval.clone();
        let q = p.clone();
        let mut out = Self::new(self.dim, move |x| f(x) + q.value_at(x))
            .declare_convex(self.declared_convex && p.effective_degree() <= 1);
        if let Some(g) = self.subgradient.clone() {
            let q = p.clone();
            out = out.with_subgradient(move |x| {
                g(x).iter().zip(q.gradient_at(x)).map(|(&a, b)| a + b).collect()
            });
        }
        Ok(out)
    }

    /// `f + g` with convexity declared when both are.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(self.dim, move |x| f(x) + g(x))
            .declare_convex(self.declared_convex && other.declared_convex))
    }

    /// `x ↦ f(a·x + b)`; convexity is preserved.
    pub fn compose_affine(&self, a: &crate::linalg::Matrix<T>, b: &[T]) -> Result<Self> {
        check_dim(self.dim, a.rows())?;
        check_dim(self.dim, b.len())?;
        let f = self.eval.clone();
        let (a, b) = (a.clone(), b.to_vec());
        let inner = a.cols();
        Ok(Self::new(inner, move |x| {
            let y: Vec<T> = a.mul_vec(x).iter().zip(&b).map(|(&u, &v)| u + v).collect();
            f(&y)
        })
        .declare_convex(self.declared_convex))
    }

    /// Values at every point, evaluated in parallel.
    pub fn values(&self, points: &[Vec<T>]) -> Vec<T> {
        points.par_iter().map(|x| self.at(x)).collect()
    }
}

/// Midpoint convexity spot-check `f(x) + f(y) >= 2 f((x+y)/2) - tol` over pairs of
/// `points`: all pairs when there are few, else a fixed pseudo-random sample.
/// Returns the first violating pair.
pub fn midpoint_violation<T: Scalar>(
    f: &ScalarField<T>,
    points: &[Vec<T>],
    tol: T,
) -> Option<(Vec<T>, Vec<T>)> {
    const ALL_PAIRS_BELOW: usize = 200;
    const SAMPLED_PAIRS: usize = 20_000;
    let check = |a: &[T], b: &[T]| {
        let mid: Vec<T> = a.iter().zip(b).map(|(&u, &v)| (u + v) * T::lit(0.5)).collect();
        f.at(a) + f.at(b) >= T::lit(2.0) * f.at(&mid) - tol
    };
    let n = points.len();
    if n < ALL_PAIRS_BELOW {
        for i in 0..n {
            for j in i + 1..n {
                if !check(&points[i], &points[j]) {
                    return Some((points[i].clone(), points[j].clone()));
                }
            }
        }
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pairs: Vec<(usize, usize)> = (0..SAMPLED_PAIRS)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    pairs
        .par_iter()
        .find_first(|&&(i, j)| !check(&points[i], &points[j]))
        .map(|&(i, j)| (points[i].clone(), points[j].clone()))
}

/// Signed binomial weights `(-1)^j C(m, j)`.
fn difference_weights<T: Scalar>(m: usize) -> Vec<T> {
    (0..=m)
        .map(|j| {
            let c = T::from_usize_lossy(binomial(m, j));
            if j % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// `Δ_h^m(f;x) = Σ_{j=0}^m (-1)^j C(m,j) f(x + jh)`, accumulated in order of `j`.
pub fn finite_difference<T: Scalar>(f: &ScalarField<T>, x: &[T], h: &[T], m: usize) -> Result<T> {
    check_dim(f.dim(), x.len())?;
    check_dim(f.dim(), h.len())?;
    let w = difference_weights::<T>(m);
    let mut node = x.to_vec();
    let mut acc = T::zero();
    for (j, &wj) in w.iter().enumerate() {
        for k in 0..x.len() {
            node[k] = x[k] + T::from_usize_lossy(j) * h[k];
        }
        acc += wj * f.at(&node);
    }
    Ok(acc)
}

/// Best `(x, h)` found for `ω_m(f;K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModulusWitness<T> {
    pub value: T,
    pub x: Vec<T>,
    pub h: Vec<T>,
    pub m: usize,
}

/// Whether to follow the lattice sweep by pattern-search refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulusOptions {
    pub refine: bool,
}

impl ModulusOptions {
    /// Lattice sweep only. Values computed this way on a shared grid are exactly
    /// comparable across functions.
    pub fn lattice() -> Self {
        Self { refine: false }
    }
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self { refine: true }
    }
}

/// Lattice steps `s` with `|s_k| <= (counts_k - 1)/m`, lexicographically positive,
/// in lexicographic order.
fn lattice_steps(counts: &[usize], m: usize) -> Vec<Vec<i64>> {
    let bounds: Vec<i64> = counts.iter().map(|&c| ((c - 1) / m) as i64).collect();
    let mut out = Vec::new();
    let mut s: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    loop {
        if s.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            out.push(s.clone());
        }
        let mut k = s.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if s[k] < bounds[k] {
                s[k] += 1;
                break;
            }
            s[k] = -bounds[k];
        }
    }
}

/// `(value, point index, step index)`; larger value wins, ties go to smaller indices.
type Candidate<T> = (T, usize, usize);

fn better<T: Scalar>(a: Candidate<T>, b: Candidate<T>) -> Candidate<T> {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

fn lattice_sweep<T: Scalar>(
    lattice: &Lattice<T>,
    values: &[T],
    m: usize,
) -> Option<(T, usize, Vec<i64>)> {
    let steps = lattice_steps(lattice.counts(), m);
    let w = difference_weights::<T>(m);
    let none: Candidate<T> = (T::neg_infinity(), usize::MAX, usize::MAX);
    let best = (0..lattice.len())
        .into_par_iter()
        .map(|i| {
            let mut best = none;
            'step: for (si, s) in steps.iter().enumerate() {
                let mut acc = w[0] * values[i];
                for j in 1..=m {
                    match lattice.offset_point(i, s, j as i64) {
                        Some(p) => acc += w[j] * values[p],
                        None => continue 'step,
                    }
                }
                best = better(best, (acc.abs(), i, si));
            }
            best
        })
        .reduce(|| none, better);
    (best.1 != usize::MAX).then(|| (best.0, best.1, steps[best.2].clone()))
}

struct Refiner<'a, T: Scalar> {
    f: &'a ScalarField<T>,
    body: &'a ConvexBody<T>,
    w: Vec<T>,
    tol: T,
}

impl<T: Scalar> Refiner<'_, T> {
    fn objective(&self, x: &[T], h: &[T]) -> Option<T> {
        self.objective_within(x, h, self.tol)
    }

    fn objective_within(&self, x: &[T], h: &[T], tol: T) -> Option<T> {
        let mut node = x.to_vec();
        let mut acc = T::zero();
        for (j, &wj) in self.w.iter().enumerate() {
            let jt = T::from_usize_lossy(j);
            for k in 0..x.len() {
                node[k] = x[k] + jt * h[k];
            }
            if !self.body.contains_unchecked(&node, tol) {
                return None;
            }
            acc += wj * self.f.at(&node);
        }
        Some(acc.abs())
    }

    /// Compass search over `(x, h)`; each axis offers moves of `x`, of `h`, and of `x`
    /// with `h` compensating so the far end `x + mh` stays put. Moves must keep every
    /// node inside the body without tolerance, so the value stays a lower bound.
    fn run(&self, mut x: Vec<T>, mut h: Vec<T>, mut value: T, mut step: Vec<T>) -> (T, Vec<T>, Vec<T>) {
        const MAX_ITER: usize = 200;
        let min_step = T::lit(1e-6);
        let m = T::from_usize_lossy(self.w.len() - 1);
        let n = x.len();
        for _ in 0..MAX_ITER {
            if step.iter().all(|&s| s < min_step) {
                break;
            }
            let mut moved = false;
            'dirs: for k in 0..n {
                let d = step[k];
                if d < min_step {
                    continue;
                }
                for (dx, dh) in [
                    (d, T::zero()),
                    (-d, T::zero()),
                    (T::zero(), d),
                    (T::zero(), -d),
                    (d, -d / m),
                    (-d, d / m),
                ] {
                    let mut cx = x.clone();
                    let mut ch = h.clone();
                    cx[k] += dx;
                    ch[k] += dh;
                    if let Some(v) = self.objective_within(&cx, &ch, T::zero()) {
                        if v > value + T::lit(1e-12) * (T::one() + value.abs()) {
                            x = cx;
                            h = ch;
                            value = v;
                            moved = true;
                            break 'dirs;
                        }
                    }
                }
            }
            if !moved {
                step.iter_mut().for_each(|s| *s *= T::lit(0.5));
            }
        }
        (value, x, h)
    }
}

/// Lower-bound estimate of `ω_m(f;K)` with the witnessing `(x, h)`.
pub fn modulus_with<T: Scalar>(
    f: &ScalarField<T>,
    body: &ConvexBody<T>,
    m: usize,
    grid: &GridSpec,
    options: ModulusOptions,
) -> Result<ModulusWitness<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus order must be at least 1".into()));
    }
    check_dim(body.dim(), f.dim())?;
    let lattice = Lattice::build(body, grid)?;
    let values = f.values(lattice.points());
    let (value, i, s) = lattice_sweep(&lattice, &values, m).ok_or_else(|| {
        Error::DegenerateGrid(format!("no lattice chain of {} nodes fits in the body", m + 1))
    })?;
    let x = lattice.points()[i].clone();
    let end = lattice.offset_point(i, &s, 1).expect("swept chain is feasible");
    let h: Vec<T> = lattice.points()[end].iter().zip(&x).map(|(&a, &b)| a - b).collect();
    if !options.refine {
        return Ok(ModulusWitness { value, x, h, m });
    }
    let refiner = Refiner {
        f,
        body,
        w: difference_weights(m),
        tol: T::lit(FEASIBILITY_TOL),
    };
    // restart from the recomputed chain so the reported value matches its witness
    let Some(start) = refiner.objective(&x, &h) else {
        return Ok(ModulusWitness { value, x, h, m });
    };
    let spacing: Vec<T> = (0..body.dim())
        .map(|k| {
            let c = lattice.counts()[k];
            (lattice.coordinate(k, c - 1) - lattice.coordinate(k, 0)) / T::from_usize_lossy(c - 1)
        })
        .collect();
    let step = spacing.iter().map(|&d| d * T::lit(0.5)).collect();
    let (refined, rx, rh) = refiner.run(x.clone(), h.clone(), start, step);
    if refined > value {
        Ok(ModulusWitness { value: refined, x: rx, h: rh, m })
    } else {
        Ok(ModulusWitness { value, x, h, m })
    }
}

/// [`modulus_with`] with lattice sweep and refinement.
pub fn modulus<T: Scalar>(
    f: &ScalarField<T>,
    body: &ConvexBody<T>,
    m: usize,
    grid: &GridSpec,
) -> Result<ModulusWitness<T>> {
    modulus_with(f, body, m, grid, ModulusOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ScalarField<f64> {
        ScalarField::convex(1, |x| x[0] * x[0])
    }

    #[test]
    fn second_difference_of_square() {
        assert_eq!(finite_difference(&square(), &[0.0], &[1.0], 2).unwrap(), 2.0);
        assert_eq!(finite_difference(&square(), &[0.3], &[0.0], 3).unwrap(), 0.0);
    }

    #[test]
    fn steps_are_half_of_the_box() {
        let s = lattice_steps(&[3, 3], 2);
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], vec![0, 1]);
        assert_eq!(s[1], vec![1, -1]);
    }

    #[test]
    fn modulus_of_square_on_interval() {
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let w = modulus(&square(), &k, 2, &GridSpec::uniform(21)).unwrap();
        // Δ²_h = 2h², largest chain spans the interval: h = 1
        assert!((w.value - 2.0).abs() < 1e-12);
        assert_eq!(w.x, vec![-1.0]);
        assert_eq!(w.h, vec![1.0]);
    }

    #[test]
    fn linear_fields_have_zero_second_modulus() {
        let k = ConvexBody::<f64>::hypercube(2);
        let f = ScalarField::new(2, |x| 3.0 * x[0] - x[1] + 0.5);
        let w = modulus(&f, &k, 2, &GridSpec::uniform(9)).unwrap();
        assert!(w.value < 1e-12);
    }

    #[test]
    fn refinement_finds_off_grid_maximum() {
        // ω₁ of -(x - 0.3)² on [0,1] is 0.49; the 6-point grid misses the peak at 0.3
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        let f = ScalarField::new(1, |x: &[f64]| -(x[0] - 0.3) * (x[0] - 0.3));
        let lat = modulus_with(&f, &k, 1, &GridSpec::uniform(6), ModulusOptions::lattice()).unwrap();
        assert!((lat.value - 0.48).abs() < 1e-12);
        let fine = modulus(&f, &k, 1, &GridSpec::uniform(6)).unwrap();
        assert!((fine.value - 0.49).abs() < 1e-9, "{}", fine.value);
        let again = finite_difference(&f, &fine.x, &fine.h, 1).unwrap().abs();
        assert!((again - fine.value).abs() < 1e-12);
    }

    #[test]
    fn modulus_zero_order_rejected() {
        let k = ConvexBody::interval(0.0, 1.0).unwrap();
        assert!(modulus(&square(), &k, 0, &GridSpec::uniform(5)).is_err());
    }

    #[test]
    fn midpoint_check_flags_concave() {
        let pts: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64 / 10.0]).collect();
        assert!(midpoint_violation(&square(), &pts, 1e-12).is_none());
        let concave = ScalarField::new(1, |x: &[f64]| -x[0] * x[0]);
        assert!(midpoint_violation(&concave, &pts, 1e-12).is_some());
    }
}
