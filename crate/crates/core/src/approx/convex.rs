//! `E₁` of convex functions through Jensen gaps.
//!
//! For convex `f`, `E₁(f;K) = ½ max {Σ aᵢ f(xᵢ) - f(Σ aᵢ xᵢ)}` over `n+1` points of `K`
//! and weights on the simplex. [`e1_convex`] searches that maximum directly;
//! [`e1_dual_certificate`] extracts such points and weights from the LP dual of a
//! degree-one best approximation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ApproxSolution;
use crate::error::{Error, RawDuals, Result};
use crate::geometry::{ConvexBody, GridSpec, Lattice, Resolution};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::smoothness::{midpoint_violation, ScalarField};

const MIDPOINT_TOL: f64 = 1e-9;
const REFINE_STARTS: usize = 8;
const REFINE_ITER: usize = 500;

/// Best Jensen gap found: `value = ½ Σ aᵢ f(xᵢ) - ½ f(Σ aᵢ xᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct E1Estimate<T> {
    pub value: T,
    pub points: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

fn jensen_gap<T: Scalar>(f: &ScalarField<T>, points: &[Vec<T>], weights: &[T]) -> T {
    let n = points[0].len();
    let mut bary = vec![T::zero(); n];
    let mut mean = T::zero();
    for (x, &a) in points.iter().zip(weights) {
        for k in 0..n {
            bary[k] += a * x[k];
        }
        mean += a * f.at(x);
    }
    mean - f.at(&bary)
}

/// Compositions of `denominator` into `parts` nonnegative integers with at least two
/// nonzero parts, as weight vectors.
fn weight_lattice<T: Scalar>(parts: usize, denominator: usize) -> Vec<Vec<T>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(left - v, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(denominator, parts, &mut Vec::new(), &mut raw);
    let d = T::from_usize_lossy(denominator);
    raw.into_iter()
        .filter(|w| w.iter().filter(|&&v| v > 0).count() >= 2)
        .map(|w| w.into_iter().map(|v| T::from_usize_lossy(v) / d).collect())
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Candidate lattice: the search grid itself in 1-D, a coarsened grid of at most a few
/// dozen points in higher dimension (the tuple count grows like `points^(n+1)`).
fn candidate_lattice<T: Scalar>(body: &ConvexBody<T>, search: &GridSpec) -> Result<Lattice<T>> {
    let n = body.dim();
    let full = Lattice::build(body, search)?;
    let target = match n {
        1 => return Ok(full),
        2 => 60,
        3 => 30,
        _ => 16,
    };
    if full.len() <= target {
        return Ok(full);
    }
    let mut r = search.counts(n)?.into_iter().max().unwrap_or(2);
    let mut best = full;
    while r > 2 {
        r -= 1;
        let spec = GridSpec {
            resolution: Resolution::Uniform(r),
            includes_boundary: search.includes_boundary,
        };
        match Lattice::build(body, &spec) {
            Ok(l) if l.len() <= target => return Ok(if l.len() > n { l } else { best }),
            Ok(l) => best = l,
            Err(_) => break,
        }
    }
    Ok(best)
}

/// Last point of the segment from the interior point `c` towards `x` that stays in `body`.
fn pull_inside<T: Scalar>(body: &ConvexBody<T>, c: &[T], x: &[T]) -> Vec<T> {
    if body.contains_unchecked(x, T::zero()) {
        return x.to_vec();
    }
    let at = |t: T| -> Vec<T> { c.iter().zip(x).map(|(&a, &b)| a + t * (b - a)).collect() };
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if body.contains_unchecked(&at(mid), T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// Vertices of polyhedral bodies, otherwise boundary points in a fixed set of directions.
fn boundary_candidates<T: Scalar>(body: &ConvexBody<T>, c: &[T]) -> Vec<Vec<T>> {
    if let Some(v) = body.vertices() {
        return v;
    }
    let n = body.dim();
    let (lo, hi) = body.bounding_box();
    let reach = (0..n).map(|k| hi[k] - lo[k]).fold(T::zero(), T::max) * T::lit(2.0);
    let res = if n == 2 { 7 } else { 3 };
    crate::geometry::sphere_directions::<T>(n, res)
        .into_iter()
        .map(|u| {
            let far: Vec<T> = c.iter().zip(&u).map(|(&a, &d)| a + reach * d).collect();
            pull_inside(body, c, &far)
        })
        .collect()
}

struct GapSearch<'a, T: Scalar> {
    f: &'a ScalarField<T>,
    body: &'a ConvexBody<T>,
    center: Vec<T>,
}

impl<T: Scalar> GapSearch<'_, T> {
    /// Pattern search over point coordinates and pairwise weight transfers.
    fn refine(&self, mut pts: Vec<Vec<T>>, mut w: Vec<T>, mut step_x: T, mut step_w: T) -> (T, Vec<Vec<T>>, Vec<T>) {
        let mut gap = jensen_gap(self.f, &pts, &w);
        let floor = T::lit(1e-8);
        for _ in 0..REFINE_ITER {
            if step_x < floor && step_w < floor {
                break;
            }
            let improves = |g: T, gap: T| g > gap + T::lit(1e-13) * (T::one() + gap.abs());
            let mut moved = false;
            'search: {
                for i in 0..pts.len() {
                    for k in 0..pts[i].len() {
                        for s in [step_x, -step_x] {
                            let mut cand = pts.clone();
                            cand[i][k] += s;
                            cand[i] = pull_inside(self.body, &self.center, &cand[i]);
                            let g = jensen_gap(self.f, &cand, &w);
                            if improves(g, gap) {
                                pts = cand;
                                gap = g;
                                moved = true;
                                break 'search;
                            }
                        }
                    }
                }
                for i in 0..w.len() {
                    for j in 0..w.len() {
                        if i == j || w[j] < step_w {
                            continue;
                        }
                        let mut cand = w.clone();
                        cand[i] += step_w;
                        cand[j] -= step_w;
                        let g = jensen_gap(self.f, &pts, &cand);
                        if improves(g, gap) {
                            w = cand;
                            gap = g;
                            moved = true;
                            break 'search;
                        }
                    }
                }
            }
            if !moved {
                step_x *= T::lit(0.5);
                step_w *= T::lit(0.5);
            }
        }
        (gap, pts, w)
    }
}

/// Lower bound for `E₁(f;K)` of a convex `f` from the largest Jensen gap over
/// `(n+1)`-tuples of grid points with lattice weights, refined by pattern search.
pub fn e1_convex<T: Scalar>(f: &ScalarField<T>, body: &ConvexBody<T>, search: &GridSpec) -> Result<E1Estimate<T>> {
    crate::error::check_dim(body.dim(), f.dim())?;
    if !f.is_declared_convex() {
        return Err(Error::Precondition("e1_convex needs a field declared convex".into()));
    }
    let n = body.dim();
    let full = Lattice::build(body, search)?;
    if let Some((x, y)) = midpoint_violation(f, full.points(), T::lit(MIDPOINT_TOL)) {
        return Err(Error::Precondition(format!(
            "midpoint convexity fails between {x:?} and {y:?}"
        )));
    }
    let cand = candidate_lattice(body, search)?;
    let mut center = vec![T::zero(); n];
    for x in full.points() {
        for k in 0..n {
            center[k] += x[k];
        }
    }
    center.iter_mut().for_each(|c| *c /= T::from_usize_lossy(full.len()));
    let mut owned = cand.points().to_vec();
    if n > 1 {
        for b in boundary_candidates(body, &center) {
            if !owned.iter().any(|p| crate::scalar::max_abs(&crate::scalar::sub(p, &b)) < T::lit(1e-12)) {
                owned.push(b);
            }
        }
    }
    let pts = &owned[..];
    let values = f.values(pts);
    let tuple = (n + 1).min(pts.len());
    if tuple < 2 {
        return Ok(E1Estimate {
            value: T::zero(),
            points: pts.to_vec(),
            weights: vec![T::one(); pts.len()],
        });
    }
    let denominator = if n == 1 { 64 } else { 12 };
    let weights = weight_lattice::<T>(tuple, denominator);
    let subsets = combinations(pts.len(), tuple);
    let mut scored: Vec<(T, usize, usize)> = subsets
        .par_iter()
        .enumerate()
        .map(|(si, idx)| {
            let mut best = (T::neg_infinity(), si, 0usize);
            let mut bary = vec![T::zero(); n];
            for (wi, w) in weights.iter().enumerate() {
                bary.iter_mut().for_each(|b| *b = T::zero());
                let mut mean = T::zero();
                for (&p, &a) in idx.iter().zip(w) {
                    for k in 0..n {
                        bary[k] += a * pts[p][k];
                    }
                    mean += a * values[p];
                }
                let gap = mean - f.at(&bary);
                if gap > best.0 {
                    best = (gap, si, wi);
                }
            }
            best
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));

    let (lo, hi) = body.bounding_box();
    let res = cand.counts().iter().copied().max().unwrap_or(2);
    let spacing = (0..n)
        .map(|k| (hi[k] - lo[k]) / T::from_usize_lossy(res - 1))
        .fold(T::zero(), T::max);
    let search_state = GapSearch { f, body, center };
    let refined: Vec<(T, Vec<Vec<T>>, Vec<T>)> = scored
        .iter()
        .take(REFINE_STARTS)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(_, si, wi)| {
            let p: Vec<Vec<T>> = subsets[si].iter().map(|&i| pts[i].clone()).collect();
            search_state.refine(
                p,
                weights[wi].clone(),
                spacing * T::lit(0.5),
                T::one() / T::from_usize_lossy(2 * denominator),
            )
        })
        .collect();
    let (gap, points, weights) = refined
        .into_iter()
        .fold(None::<(T, Vec<Vec<T>>, Vec<T>)>, |acc, c| match acc {
            Some(a) if a.0 >= c.0 => Some(a),
            _ => Some(c),
        })
        .expect("at least one candidate");
    Ok(E1Estimate {
        value: gap.max(T::zero()) * T::lit(0.5),
        points,
        weights,
    })
}

/// Two weighted point sets with common barycenter whose gap is `2 E₁`:
/// `½(Σ aᵢ f(xᵢ) - Σ b_j f(y_j)) = error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct E1Certificate<T> {
    pub a: Vec<T>,
    pub x: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub y: Vec<Vec<T>>,
    /// `½(Σ aᵢ f(xᵢ) - Σ b_j f(y_j))`
    pub value: T,
}

fn raw_duals<T: Scalar>(sol: &ApproxSolution<T>) -> RawDuals {
    sol.dual_weights
        .iter()
        .map(|d| (d.point.iter().map(|v| v.as_f64()).collect(), d.weight.as_f64()))
        .collect()
}

/// Constraint rows on the combined weights: one sum per sign group, then the
/// barycenter difference coordinates.
fn caratheodory_rows<T: Scalar>(points: &[Vec<T>], positive: &[bool]) -> Matrix<T> {
    let n = points[0].len();
    Matrix::from_fn(n + 2, points.len(), |r, c| {
        let s = if positive[c] { T::one() } else { -T::one() };
        match r {
            0 => if positive[c] { T::one() } else { T::zero() },
            1 => if positive[c] { T::zero() } else { T::one() },
            _ => s * points[c][r - 2],
        }
    })
}

/// Splits the dual weights of a degree-one solution by sign into `(a, x)` and `(b, y)`,
/// prunes to at most `n + 2` points and checks the resulting identity.
pub fn e1_dual_certificate<T: Scalar>(sol: &ApproxSolution<T>, f: &ScalarField<T>) -> Result<E1Certificate<T>> {
    if sol.m != 1 {
        return Err(Error::InvalidInput(format!("expected a degree-one solution, got m = {}", sol.m)));
    }
    let unavailable = |reason: String| Error::CertificateUnavailable {
        reason,
        raw: raw_duals(sol),
    };
    let n = sol.polynomial.dim();
    let mut points: Vec<Vec<T>> = sol.dual_weights.iter().map(|d| d.point.clone()).collect();
    let mut positive: Vec<bool> = sol.dual_weights.iter().map(|d| d.weight > T::zero()).collect();
    let sum_pos: T = sol.dual_weights.iter().filter(|d| d.weight > T::zero()).map(|d| d.weight).sum();
    let sum_neg: T = sol.dual_weights.iter().filter(|d| d.weight < T::zero()).map(|d| -d.weight).sum();
    if !(sum_pos > T::zero() && sum_neg > T::zero()) {
        return Err(unavailable("dual weights do not take both signs".into()));
    }
    let mut lambda: Vec<T> = sol
        .dual_weights
        .iter()
        .map(|d| if d.weight > T::zero() { d.weight / sum_pos } else { -d.weight / sum_neg })
        .collect();

    while points.len() > n + 2 {
        let a = caratheodory_rows(&points, &positive);
        let null = a.null_space(T::lit(1e-10));
        let Some(mut z) = null.into_iter().next() else { break };
        if !z.iter().any(|&v| v > T::zero()) {
            z.iter_mut().for_each(|v| *v = -*v);
        }
        let (drop, theta) = z
            .iter()
            .zip(&lambda)
            .enumerate()
            .filter(|(_, (&zk, _))| zk > T::zero())
            .map(|(k, (&zk, &l))| (k, l / zk))
            .fold((usize::MAX, T::infinity()), |acc, c| if c.1 < acc.1 { c } else { acc });
        if drop == usize::MAX {
            break;
        }
        for (l, &zk) in lambda.iter_mut().zip(&z) {
            *l -= theta * zk;
        }
        lambda[drop] = T::zero();
        let keep: Vec<usize> = (0..points.len()).filter(|&k| lambda[k] > T::zero()).collect();
        points = keep.iter().map(|&k| points[k].clone()).collect();
        positive = keep.iter().map(|&k| positive[k]).collect();
        lambda = keep.iter().map(|&k| lambda[k]).collect();
    }
    if points.len() > n + 2 {
        return Err(unavailable(format!("{} points remain after pruning", points.len())));
    }

    let mut cert = E1Certificate {
        a: Vec::new(),
        x: Vec::new(),
        b: Vec::new(),
        y: Vec::new(),
        value: T::zero(),
    };
    for ((p, l), pos) in points.into_iter().zip(lambda).zip(positive) {
        if pos {
            cert.a.push(l);
            cert.x.push(p);
        } else {
            cert.b.push(l);
            cert.y.push(p);
        }
    }
    let sa: T = cert.a.iter().copied().sum();
    let sb: T = cert.b.iter().copied().sum();
    if (sa - T::one()).abs() > T::lit(1e-8) || (sb - T::one()).abs() > T::lit(1e-8) {
        return Err(unavailable(format!("weight sums {sa} and {sb} are not 1")));
    }
    for k in 0..n {
        let bx: T = cert.a.iter().zip(&cert.x).map(|(&a, x)| a * x[k]).sum();
        let by: T = cert.b.iter().zip(&cert.y).map(|(&b, y)| b * y[k]).sum();
        if (bx - by).abs() > T::lit(1e-6) {
            return Err(unavailable(format!("barycenters differ by {} in coordinate {k}", bx - by)));
        }
    }
    let fa: T = cert.a.iter().zip(&cert.x).map(|(&a, x)| a * f.at(x)).sum();
    let fb: T = cert.b.iter().zip(&cert.y).map(|(&b, y)| b * f.at(y)).sum();
    cert.value = (fa - fb) * T::lit(0.5);
    if (cert.value - sol.error).abs() > T::lit(1e-6) {
        return Err(unavailable(format!(
            "half gap {} differs from the minimax error {}",
            cert.value, sol.error
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::best_uniform;

    #[test]
    fn weight_lattice_counts() {
        // compositions of 4 into 3 parts: C(6,2) = 15, minus the 3 with a single nonzero part
        assert_eq!(weight_lattice::<f64>(3, 4).len(), 12);
        for w in weight_lattice::<f64>(3, 4) {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn square_on_interval() {
        let f = ScalarField::convex(1, |x: &[f64]| x[0] * x[0]);
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let est = e1_convex(&f, &k, &GridSpec::uniform(41)).unwrap();
        assert!((est.value - 0.5).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn affine_has_no_gap() {
        let f = ScalarField::convex(2, |x: &[f64]| 2.0 * x[0] - x[1] + 1.0);
        let est = e1_convex(&f, &ConvexBody::hypercube(2), &GridSpec::uniform(11)).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn undeclared_or_concave_rejected() {
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let plain = ScalarField::new(1, |x: &[f64]| x[0] * x[0]);
        assert!(matches!(e1_convex(&plain, &k, &GridSpec::uniform(11)), Err(Error::Precondition(_))));
        let liar = ScalarField::convex(1, |x: &[f64]| -x[0] * x[0]);
        assert!(matches!(e1_convex(&liar, &k, &GridSpec::uniform(11)), Err(Error::Precondition(_))));
    }

    #[test]
    fn certificate_for_square() {
        let f = ScalarField::convex(1, |x: &[f64]| x[0] * x[0]);
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let sol = best_uniform(&f, &k, 1, &GridSpec::uniform(101)).unwrap();
        let cert = e1_dual_certificate(&sol, &f).unwrap();
        let mut xs: Vec<f64> = cert.x.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-1.0, 1.0]);
        assert_eq!(cert.y, vec![vec![0.0]]);
        assert!((cert.a[0] - 0.5).abs() < 1e-12 && (cert.b[0] - 1.0).abs() < 1e-12);
        assert!((cert.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wrong_degree_rejected() {
        let f = ScalarField::convex(1, |x: &[f64]| x[0] * x[0]);
        let k = ConvexBody::interval(-1.0, 1.0).unwrap();
        let sol = best_uniform(&f, &k, 2, &GridSpec::uniform(11)).unwrap();
        assert!(matches!(e1_dual_certificate(&sol, &f), Err(Error::InvalidInput(_))));
    }
}
