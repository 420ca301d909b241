//! Acceptance criteria. Each test prints one PASS/FAIL line for its criterion, followed by
//! the individual checks, and fails if any check fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitney_core::approx::{best_uniform, e1_convex, symmetric_linear_approx, verify_certificate};
use whitney_core::convexify::{convexify_quadratic, convexify_smooth};
use whitney_core::geometry::{position, sample_grid};
use whitney_core::polynomials::hessian_min_eig_on;
use whitney_core::smoothness::{modulus, modulus_with, ModulusOptions};
use whitney_core::whitney::random::{
    random_body, random_convex_field, random_field, random_polynomial, random_quadratic_perturbation,
    random_symmetric_body,
};
use whitney_core::whitney::{entropy_fn, prop18_approximants, prop18_f, ramp, segment_functions, whitney_ratio};
use whitney_core::{ConvexBody, GridSpec, Polynomial, ScalarField};

const SEED: u64 = 0;

struct Criterion {
    name: &'static str,
    started: Instant,
    limit: Option<Duration>,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(name: &'static str, limit: Option<Duration>) -> Self {
        Self {
            name,
            started: Instant::now(),
            limit,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    /// Records only failures of a repeated check, plus one summary line.
    fn check_all(&mut self, label: &str, results: &[(String, bool)]) {
        let bad: Vec<&String> = results.iter().filter(|r| !r.1).map(|r| &r.0).collect();
        for b in bad.iter().take(10) {
            self.checks.push((format!("{label}: {b}"), false));
        }
        self.checks
            .push((format!("{label}: {}/{} ok", results.len() - bad.len(), results.len()), bad.is_empty()));
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        if let Some(limit) = self.limit {
            self.check(
                format!("runtime {:.2}s < {}s", elapsed.as_secs_f64(), limit.as_secs()),
                elapsed < limit,
            );
        }
        let ok = self.checks.iter().all(|c| c.1);
        println!("{}: {}", self.name, if ok { "PASS" } else { "FAIL" });
        for (label, pass) in &self.checks {
            println!("    [{}] {label}", if *pass { "pass" } else { "FAIL" });
        }
        assert!(ok, "{} failed", self.name);
    }
}

fn rng(tag: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED.wrapping_add(tag << 32).wrapping_add(case as u64))
}

fn sup_on(points: &[Vec<f64>], g: impl Fn(&[f64]) -> f64) -> f64 {
    points.iter().map(|x| g(x).abs()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
fn min_eig_jacobi(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    for _ in 0..50 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

/// Matrix of the quadratic form of `p` read off its coefficients.
fn quadratic_matrix(p: &Polynomial<f64>) -> Vec<Vec<f64>> {
    let n = p.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = vec![0u32; n];
                    e[i] += 1;
                    e[j] += 1;
                    if i == j {
                        p.coeff(&e)
                    } else {
                        0.5 * p.coeff(&e)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn criterion_1_roof() {
    let mut c = Criterion::new("criterion 1 (roof on [-1,1]x[0,1])", Some(Duration::from_secs(10)));
    let w = prop18_f();
    let body = &w.natural_body;
    let grid = GridSpec::per_axis(&[101, 51]);
    let (p, q) = prop18_approximants();

    let e2 = best_uniform(&w.field, body, 2, &grid).unwrap().error;
    c.check(format!("grid E2 = {e2:.12} in [0.49, 0.50]"), (0.49..=0.5 + 1e-12).contains(&e2));

    // independent 101 x 51 grid
    let mut pts = Vec::new();
    for i in 0..101 {
        for j in 0..51 {
            pts.push(vec![-1.0 + 2.0 * i as f64 / 100.0, j as f64 / 50.0]);
        }
    }
    let roof = |x: &[f64]| 2.0 * (1.0 - x[1]).max(x[0].abs());
    for (name, r) in [("P", &p), ("Q", &q)] {
        let err = sup_on(&pts, |x| roof(x) - r.value_at(x));
        c.check(format!("|f-{name}|_grid = {err:.12} = 0.5 +- 1e-9"), (err - 0.5).abs() <= 1e-9);
    }

    let set: Vec<Vec<f64>> = [(-1.0, 0.0), (-1.0, 1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        .iter()
        .map(|&(x, y)| vec![x, y])
        .collect();
    for (name, r) in [("P", &p), ("Q", &q)] {
        let exact = set.iter().all(|x| {
            let sign = if (x[0] as i64 + x[1] as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            roof(x) - r.value_at(x) == 0.5 * sign
        });
        c.check(format!("residuals of {name} on R equal (-1)^(x+y)/2 exactly"), exact);
    }

    // orthogonality of the uniform multipliers against every monomial of degree <= 2
    let monomials: [fn(&[f64]) -> f64; 6] = [
        |_| 1.0,
        |x| x[0],
        |x| x[1],
        |x| x[0] * x[0],
        |x| x[0] * x[1],
        |x| x[1] * x[1],
    ];
    for (name, r) in [("P", &p), ("Q", &q)] {
        match verify_certificate(&w.field, r, &set, 2, body, &grid, 1e-9) {
            Ok(cert) => c.check(
                format!(
                    "certificate for {name} feasible: multipliers {:?}, residual {:e}",
                    cert.multipliers, cert.orthogonality_residual
                ),
                cert.orthogonality_residual <= 1e-9,
            ),
            Err(e) => c.check(format!("certificate for {name} feasible: {e}"), false),
        }
        let uniform = monomials
            .iter()
            .map(|s| set.iter().map(|x| (roof(x) - r.value_at(x)) * s(x) / 6.0).sum::<f64>().abs())
            .fold(0.0, f64::max);
        c.check(
            format!("uniform multipliers certify {name}: orthogonality residual {uniform:e} <= 1e-9"),
            uniform <= 1e-9,
        );
    }

    let hp = hessian_min_eig_on(&p, body, &grid).unwrap();
    let hq = hessian_min_eig_on(&q, body, &grid).unwrap();
    c.check(format!("min Hessian eigenvalue of P = {hp} = -2"), hp == -2.0);
    c.check(format!("min Hessian eigenvalue of Q = {hq} = 2"), hq == 2.0);
    c.finish();
}

#[test]
fn criterion_2_symmetric_halving() {
    let mut c = Criterion::new("criterion 2 (symmetric bodies, E1 <= half omega2)", Some(Duration::from_secs(60)));
    for dim in [1, 2] {
        let grid = GridSpec::uniform(if dim == 1 { 201 } else { 41 });
        for delta in [0.5, 0.25, 0.1] {
            let w = ramp(delta, dim).unwrap();
            let target = 0.5 - delta / 4.0;
            let e1 = best_uniform(&w.field, &w.natural_body, 1, &grid).unwrap().error;
            let om = modulus(&w.field, &w.natural_body, 2, &grid).unwrap().value;
            let ratio = whitney_ratio(&w, &w.natural_body, 2, &grid).unwrap().ratio;
            c.check(
                format!("ramp n={dim} delta={delta}: E1 {e1:.9} = {target} +- 1e-3"),
                (e1 - target).abs() <= 1e-3,
            );
            c.check(format!("ramp n={dim} delta={delta}: omega2 {om:.9} = 1 +- 1e-6"), (om - 1.0).abs() <= 1e-6);
            c.check(
                format!("ramp n={dim} delta={delta}: ratio {ratio:.9} = {target} +- 1e-3"),
                (ratio - target).abs() <= 1e-3,
            );
        }
    }

    let results: Vec<(String, bool)> = (0..100)
        .map(|i| {
            let mut r = rng(2, i);
            let n = 2 + i % 2;
            let body = random_symmetric_body(&mut r, n);
            let f = random_convex_field(&mut r, n);
            let grid = GridSpec::uniform(if n == 2 { 21 } else { 11 });
            let (p, rep) = symmetric_linear_approx(&f, &body, &grid).unwrap();
            let pts = sample_grid(&body, &grid).unwrap();
            let err = sup_on(&pts, |x| f.at(x) - p.value_at(x));
            (
                format!("case {i} n={n}: error {err:.9} vs half omega2 {:.9}", 0.5 * rep.omega2),
                err <= 0.5 * rep.omega2 + 1e-6,
            )
        })
        .collect();
    c.check_all("100 random convex fields on symmetric bodies", &results);
    c.finish();
}

#[test]
fn criterion_3_entropy() {
    let mut c = Criterion::new("criterion 3 (entropy witness on the simplex)", Some(Duration::from_secs(120)));
    for n in 1..=3 {
        let w = entropy_fn(n).unwrap();
        let grid = GridSpec::uniform(match n {
            1 => 201,
            2 => 101,
            _ => 41,
        });
        let lower = 0.25 * ((n + 1) as f64).log2();
        let e1 = e1_convex(&w.field, &w.natural_body, &grid).unwrap().value;
        let om = modulus(&w.field, &w.natural_body, 2, &grid).unwrap().value;
        c.check(format!("n={n}: e1_convex {e1:.9} >= {lower:.9} - 1e-2"), e1 >= lower - 1e-2);
        c.check(format!("n={n}: omega2 {om:.12} <= 1 + 1e-6"), om <= 1.0 + 1e-6);
        if n == 1 {
            let lp = best_uniform(&w.field, &w.natural_body, 1, &grid).unwrap().error;
            // chord-minus-function gaps over all grid triples on [0,1]
            let xs: Vec<f64> = (0..201).map(|i| i as f64 / 200.0).collect();
            let fx: Vec<f64> = xs.iter().map(|&x| w.field.at(&[x])).collect();
            let mut gap: f64 = 0.0;
            for a in 0..xs.len() {
                for b in a + 2..xs.len() {
                    for m in a + 1..b {
                        let t = (xs[m] - xs[a]) / (xs[b] - xs[a]);
                        gap = gap.max((1.0 - t) * fx[a] + t * fx[b] - fx[m]);
                    }
                }
            }
            let oracle = 0.5 * gap;
            c.check(format!("n=1: LP E1 {lp:.12} = 0.25 +- 1e-3"), (lp - 0.25).abs() <= 1e-3);
            c.check(format!("n=1: brute-force Jensen gap {oracle:.12} = 0.25 +- 1e-3"), (oracle - 0.25).abs() <= 1e-3);
            c.check(format!("n=1: e1_convex {e1:.12} = 0.25 +- 1e-3"), (e1 - 0.25).abs() <= 1e-3);
        }
    }
    c.finish();
}

#[test]
fn criterion_4_quadratic_repair() {
    use rayon::prelude::*;
    let mut c = Criterion::new("criterion 4 (convex quadratic repair, 500 cases)", Some(Duration::from_secs(300)));
    let outcomes: Vec<[(String, bool); 3]> = (0..500)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(4, i);
            let n = 2 + i % 2;
            let body = position(&random_body(&mut r, n)).unwrap().body;
            let f = random_convex_field(&mut r, n);
            let grid = GridSpec::uniform(if n == 2 { 31 } else { 13 });
            let best = best_uniform(&f, &body, 2, &grid).unwrap().polynomial;
            let p = best.add(&random_quadratic_perturbation(&mut r, n)).unwrap();
            let rep = convexify_quadratic(&f, &p, &body, &grid).unwrap();
            let q = &rep.q;

            let psd = min_eig_jacobi(&quadratic_matrix(q));

            let dense = GridSpec::uniform(if n == 2 { 101 } else { 31 });
            let ball_pts = sample_grid(&ConvexBody::unit_ball(n), &dense).unwrap();
            let gap = sup_on(&ball_pts, |x| p.value_at(x) - q.value_at(x)).max(rep.ball_gap);
            let e_ball = sup_on(&ball_pts, |x| f.at(x) - p.value_at(x)).max(rep.e_ball);

            let k_pts = sample_grid(&body, &dense).unwrap();
            let achieved = sup_on(&k_pts, |x| f.at(x) - q.value_at(x)).max(rep.achieved);
            let e_k = sup_on(&k_pts, |x| f.at(x) - p.value_at(x)).max(rep.e_k).max(e_ball);
            let lambda = k_pts
                .iter()
                .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
                .fold(rep.lambda, f64::max);
            let bound = 2.0 * lambda * lambda * e_k * (1.0 + 1e-3) + 1e-8;
            [
                (format!("case {i}: min eig {psd:e}"), psd >= -1e-10),
                (
                    format!("case {i}: |P-Q|_ball {gap:.9} vs |f-P|_ball {e_ball:.9}"),
                    gap <= e_ball * (1.0 + 1e-3) + 1e-8,
                ),
                (format!("case {i}: |f-Q|_K {achieved:.9} vs bound {bound:.9}"), achieved <= bound),
            ]
        })
        .collect();
    for (k, label) in ["(i) Q positive semidefinite", "(ii) ball estimate", "(iii) final bound"]
        .iter()
        .enumerate()
    {
        let col: Vec<(String, bool)> = outcomes.iter().map(|o| o[k].clone()).collect();
        c.check_all(label, &col);
    }
    c.finish();
}

#[test]
fn criterion_5_smooth_convexification() {
    let mut c = Criterion::new("criterion 5 (adding L|x|^2 to cubic and quartic polynomials)", None);
    let body = ConvexBody::hypercube(2);
    let grid = GridSpec::uniform(21);
    let pts = sample_grid(&body, &grid).unwrap();
    let lattice = ModulusOptions::lattice();
    let results: Vec<(String, bool)> = (0..50)
        .map(|i| {
            let mut r = rng(5, i);
            let degree = 3 + i % 2;
            let g = random_polynomial(&mut r, 2, degree, 1.0);
            let s = convexify_smooth(&g, &body, &grid).unwrap();
            let min_eig = pts
                .iter()
                .map(|x| {
                    let h = s.h.hessian_at(x);
                    min_eig_jacobi(&h.to_rows())
                })
                .fold(f64::INFINITY, f64::min);
            let added = pts
                .iter()
                .map(|x| (s.h.value_at(x) - g.value_at(x) - s.l * (x[0] * x[0] + x[1] * x[1])).abs())
                .fold(0.0, f64::max);
            let gf = ScalarField::from_polynomial(g);
            let hf = ScalarField::from_polynomial(s.h.clone());
            let de = (best_uniform(&gf, &body, 2, &grid).unwrap().error
                - best_uniform(&hf, &body, 2, &grid).unwrap().error)
                .abs();
            let dw = (modulus_with(&gf, &body, 3, &grid, lattice).unwrap().value
                - modulus_with(&hf, &body, 3, &grid, lattice).unwrap().value)
                .abs();
            (
                format!("case {i} deg={degree}: min eig {min_eig:e}, |dE2| {de:e}, |d omega3| {dw:e}, h-g-L|x|^2 {added:e}"),
                min_eig >= -1e-9 && de <= 1e-8 && dw <= 1e-8 && added <= 1e-9,
            )
        })
        .collect();
    c.check_all("50 random polynomials", &results);
    c.finish();
}

fn identity_body(i: usize) -> ConvexBody<f64> {
    match i % 4 {
        0 => ConvexBody::interval(-1.0, 1.0).unwrap(),
        1 => ConvexBody::hypercube(2),
        2 => ConvexBody::unit_ball(2),
        _ => ConvexBody::standard_simplex(2),
    }
}

/// Exhaustive `max |Δ_h^m f(x)|` over pairs of grid points oriented so that `h` is
/// lexicographically positive, with chain nodes located by coordinates.
fn brute_force(f: &ScalarField<f64>, pts: &[Vec<f64>], m: usize) -> f64 {
    let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|v| (v * 1e9).round() as i64).collect() };
    let index: HashMap<Vec<i64>, usize> = pts.iter().enumerate().map(|(i, x)| (key(x), i)).collect();
    let values: Vec<f64> = pts.iter().map(|x| f.at(x)).collect();
    let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let mut best = f64::NEG_INFINITY;
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            let h: Vec<f64> = pts[b].iter().zip(&pts[a]).map(|(y, x)| (y - x) / m as f64).collect();
            match h.iter().find(|v| v.abs() > 1e-12) {
                Some(&v) if v > 0.0 => {}
                _ => continue,
            }
            let mut acc = 0.0;
            let mut ok = true;
            for j in 0..=m {
                let node: Vec<f64> = pts[a].iter().zip(&h).map(|(x, d)| x + j as f64 * d).collect();
                match index.get(&key(&node)) {
                    Some(&p) => {
                        let w = if j % 2 == 0 { 1.0 } else { -1.0 } * binom(m, j);
                        acc += w * values[p];
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                best = best.max(acc.abs());
            }
        }
    }
    best
}

#[test]
fn criterion_6_identities() {
    let mut c = Criterion::new("criterion 6 (identities and oracles)", None);
    let lattice = ModulusOptions::lattice();
    let mut e0 = Vec::new();
    let mut order = Vec::new();
    let mut quad = Vec::new();
    for i in 0..50 {
        let mut r = rng(6, i);
        let body = identity_body(i);
        let n = body.dim();
        let f = random_field(&mut r, n);
        let q = random_polynomial(&mut r, n, 2, 1.0);
        let grid = GridSpec::uniform(if n == 1 { 41 } else { 15 });
        let pts = sample_grid(&body, &grid).unwrap();
        let w: Vec<f64> = (1..=4)
            .map(|m| modulus_with(&f, &body, m, &grid, lattice).unwrap().value)
            .collect();
        let e = best_uniform(&f, &body, 0, &grid).unwrap().error;
        let vals: Vec<f64> = pts.iter().map(|x| f.at(x)).collect();
        let range = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        e0.push((
            format!("field {i}: E0 {e:.15}, half omega1 {:.15}, half range {:.15}", 0.5 * w[0], 0.5 * range),
            (e - 0.5 * w[0]).abs() <= 1e-10 && (e - 0.5 * range).abs() <= 1e-10,
        ));
        for m in 2..=4usize {
            for k in 1..m {
                let bound = 2f64.powi((m - k) as i32) * w[k - 1];
                order.push((format!("field {i}: omega{m} {} <= 2^{} omega{k}", w[m - 1], m - k), w[m - 1] <= bound + 1e-8));
            }
        }
        let fq = f.add_polynomial(&q).unwrap();
        for m in 3..=4 {
            let v = modulus_with(&fq, &body, m, &grid, lattice).unwrap().value;
            quad.push((format!("field {i}: omega{m}(f+q) {v} vs {}", w[m - 1]), (v - w[m - 1]).abs() <= 1e-8));
        }
    }
    c.check_all("E0 = half omega1 (1e-10)", &e0);

    let mut brute = Vec::new();
    for i in 0..24 {
        let mut r = rng(60, i);
        let body = identity_body(i);
        let n = body.dim();
        let f = random_field(&mut r, n);
        let res = if n == 1 { 7 } else { 5 + 2 * (i % 2) };
        let m = 1 + i % 3;
        let grid = GridSpec::uniform(res);
        let fast = modulus_with(&f, &body, m, &grid, lattice).unwrap().value;
        let slow = brute_force(&f, &sample_grid(&body, &grid).unwrap(), m);
        brute.push((format!("field {i} n={n} res={res} m={m}: {fast} vs {slow}"), fast == slow));
    }
    c.check_all("modulus equals exhaustive search exactly", &brute);

    let mut e1 = Vec::new();
    for i in 0..20 {
        let mut r = rng(61, i);
        let body = identity_body(i);
        let f = random_convex_field(&mut r, body.dim());
        let grid = GridSpec::uniform(41);
        let lp = best_uniform(&f, &body, 1, &grid).unwrap().error;
        let search = e1_convex(&f, &body, &grid).unwrap().value;
        e1.push((format!("field {i}: e1_convex {search:.6} vs LP {lp:.6}"), (search - lp).abs() <= 1e-2));
    }
    c.check_all("e1_convex agrees with LP E1 (1e-2)", &e1);
    c.check_all("order reduction", &order);
    c.check_all("quadratics leave omega3, omega4 unchanged", &quad);
    c.finish();
}

#[test]
fn criterion_7_segment() {
    let mut c = Criterion::new("criterion 7 (E2 <= omega3 on [0,1])", None);
    let body = ConvexBody::interval(0.0, 1.0).unwrap();
    let grid = GridSpec::uniform(201);
    let functions = segment_functions(SEED);
    c.check(format!("{} functions", functions.len()), functions.len() == 20);
    let mut bound = Vec::new();
    let mut leading = Vec::new();
    for (name, f) in &functions {
        let sol = best_uniform(f, &body, 2, &grid).unwrap();
        let om = modulus(f, &body, 3, &grid).unwrap().value;
        bound.push((format!("{name}: E2 {:.9} <= omega3 {om:.9}", sol.error), sol.error <= om + 1e-6));
        if f.is_declared_convex() {
            let a = sol.polynomial.coeff(&[2]);
            leading.push((format!("{name}: leading coefficient {a:e}"), a >= -1e-9));
        }
    }
    c.check_all("E2 <= omega3 + 1e-6", &bound);
    c.check_all("convex functions get a convex best quadratic", &leading);
    c.finish();
}
