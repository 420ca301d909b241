use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::catalog::{entropy_fn, prop18_alternation_set, prop18_approximants, prop18_f, ramp};
use super::random::{
    random_body, random_convex_field, random_field, random_polynomial, random_quadratic_perturbation,
    random_symmetric_body,
};
use super::report::{Case, Relation, Report};
use super::whitney_ratio;
use crate::approx::{
    best_uniform, e1_convex, orthogonality_residual, symmetric_linear_approx, verify_certificate,
};
use crate::convexify::{convexify_quadratic, convexify_smooth};
use crate::error::Result;
use crate::geometry::{position, ConvexBody, GridSpec, Lattice};
use crate::polynomials::{binomial, hessian_min_eig_on, is_convex_on, Polynomial};
use crate::smoothness::{modulus, modulus_with, ModulusOptions, ScalarField};

const REFERENCE: &str = "reference";
const ORACLE: &str = "oracle";
const IDENTITY: &str = "identity";

/// Default lattice density for a body of dimension `n`.
pub fn default_grid(n: usize) -> GridSpec {
    GridSpec::uniform(match n {
        1 => 201,
        2 => 101,
        _ => 41,
    })
}

fn rng_for(seed: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (case as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Turns an error into a failing case instead of aborting the suite.
fn or_failed(id: &str, expected: f64, prov: &str, r: Result<Vec<Case>>) -> Vec<Case> {
    r.unwrap_or_else(|_| vec![Case::failed(id, expected, prov)])
}

fn collect(suite: &str, cases: Vec<Vec<Case>>) -> Report {
    let mut report = Report::new(suite);
    cases.into_iter().flatten().for_each(|c| report.push(c));
    report
}

/// The roof on `[-1,1] × [0,1]`: its grid `E₂`, the two equally good approximants, their
/// alternation on `{-1,0,1} × {0,1}`, the certificates and the convexity split.
pub fn prop18_suite(grid: &GridSpec) -> Report {
    let w = prop18_f();
    let body = &w.natural_body;
    let f = &w.field;
    let (p, q) = prop18_approximants();
    let set = prop18_alternation_set();
    let mut report = Report::new("prop18");

    match best_uniform(f, body, 2, grid) {
        Ok(sol) => {
            report.push(Case::new("e2/lower", Relation::Ge, 0.49, sol.error, 0.0, REFERENCE));
            report.push(Case::new("e2/upper", Relation::Le, 0.5, sol.error, 1e-12, REFERENCE));
        }
        Err(_) => report.push(Case::failed("e2", 0.5, REFERENCE)),
    }
    let lattice = Lattice::build(body, grid);
    for (name, r) in [("P", &p), ("Q", &q)] {
        match &lattice {
            Ok(l) => {
                let err = l
                    .points()
                    .iter()
                    .map(|x| (f.at(x) - r.value_at(x)).abs())
                    .fold(0.0, f64::max);
                report.push(Case::new(format!("error/{name}"), Relation::Eq, 0.5, err, 1e-9, REFERENCE));
            }
            Err(_) => report.push(Case::failed(format!("error/{name}"), 0.5, REFERENCE)),
        }
        for x in &set {
            let sign = if (x[0].abs() + x[1]) as i64 % 2 == 0 { 1.0 } else { -1.0 };
            report.push(Case::new(
                format!("alternation/{name}/({},{})", x[0], x[1]),
                Relation::Eq,
                0.5 * sign,
                f.at(x) - r.value_at(x),
                0.0,
                REFERENCE,
            ));
        }
        match verify_certificate(f, r, &set, 2, body, grid, 1e-9) {
            Ok(cert) => {
                report.push(Case::new(
                    format!("certificate/{name}/orthogonality"),
                    Relation::Le,
                    0.0,
                    cert.orthogonality_residual,
                    1e-9,
                    REFERENCE,
                ));
                let smallest = cert.multipliers.iter().copied().fold(f64::INFINITY, f64::min);
                report.push(Case::new(
                    format!("certificate/{name}/min_multiplier"),
                    Relation::Ge,
                    1e-9,
                    smallest,
                    0.0,
                    REFERENCE,
                ));
            }
            Err(_) => report.push(Case::failed(format!("certificate/{name}"), 0.0, REFERENCE)),
        }
        let uniform = vec![1.0 / 6.0; set.len()];
        match orthogonality_residual(f, r, &set, &uniform, 2) {
            Ok(v) => report.push(Case::new(
                format!("certificate/{name}/uniform"),
                Relation::Le,
                0.0,
                v,
                1e-9,
                REFERENCE,
            )),
            Err(_) => report.push(Case::failed(format!("certificate/{name}/uniform"), 0.0, REFERENCE)),
        }
        let (eig, convex) = (
            hessian_min_eig_on(r, body, grid),
            is_convex_on(r, body, grid, 0.0),
        );
        let expected = if name == "P" { -2.0 } else { 2.0 };
        match eig {
            Ok(v) => report.push(Case::new(format!("hessian/{name}"), Relation::Eq, expected, v, 0.0, REFERENCE)),
            Err(_) => report.push(Case::failed(format!("hessian/{name}"), expected, REFERENCE)),
        }
        let want = if name == "P" { 0.0 } else { 1.0 };
        match convex {
            Ok(c) => report.push(Case::new(
                format!("convex/{name}"),
                Relation::Eq,
                want,
                if c { 1.0 } else { 0.0 },
                0.0,
                REFERENCE,
            )),
            Err(_) => report.push(Case::failed(format!("convex/{name}"), want, REFERENCE)),
        }
    }
    report
}

/// Lattice used for the ramp: hinge points `1 - δ` for `δ` in `{0.5, 0.25, 0.1}` lie on it.
pub fn ramp_grid(dim: usize) -> GridSpec {
    GridSpec::uniform(if dim == 1 { 201 } else { 41 })
}

/// Best linear error, second modulus and Whitney ratio of the ramp on `[-1,1]ⁿ`.
pub fn ramp_cases(delta: f64, dim: usize) -> Vec<Case> {
    let id = format!("ramp/n={dim}/delta={delta}");
    let expected = 0.5 - delta / 4.0;
    or_failed(&id, expected, REFERENCE, (|| {
        let w = ramp(delta, dim)?;
        let grid = ramp_grid(dim);
        let e1 = best_uniform(&w.field, &w.natural_body, 1, &grid)?.error;
        let omega = modulus(&w.field, &w.natural_body, 2, &grid)?.value;
        let est = whitney_ratio(&w, &w.natural_body, 2, &grid)?;
        Ok(vec![
            Case::new(format!("{id}/e1"), Relation::Eq, expected, e1, 1e-3, REFERENCE),
            Case::new(format!("{id}/omega2"), Relation::Eq, 1.0, omega, 1e-6, REFERENCE),
            Case::new(format!("{id}/ratio"), Relation::Ge, expected, est.ratio, 1e-3, REFERENCE),
        ])
    })())
}

fn halving_cases(id: &str, f: &ScalarField<f64>, body: &ConvexBody<f64>, grid: &GridSpec) -> Vec<Case> {
    or_failed(id, 0.0, ORACLE, (|| {
        let (_, rep) = symmetric_linear_approx(f, body, grid)?;
        Ok(vec![
            Case::new(format!("{id}/bound"), Relation::Le, 0.5 * rep.omega2, rep.error, 1e-6, ORACLE),
            Case::new(format!("{id}/half_gap"), Relation::Eq, rep.half_gap, rep.error, 1e-9, IDENTITY),
        ])
    })())
}

/// For every body and field of matching dimension, the symmetric linear approximant is
/// within half the second modulus; the ramp family shows the constant ½ is approached.
pub fn symmetric_halving_suite(
    bodies: &[ConvexBody<f64>],
    fields: &[ScalarField<f64>],
    grid: &GridSpec,
) -> Report {
    let mut pairs = Vec::new();
    for (i, k) in bodies.iter().enumerate() {
        for (j, f) in fields.iter().enumerate() {
            if k.dim() == f.dim() {
                pairs.push((i, j));
            }
        }
    }
    let mut cases: Vec<Vec<Case>> = pairs
        .par_iter()
        .map(|&(i, j)| halving_cases(&format!("pair/{i}/{j}"), &fields[j], &bodies[i], grid))
        .collect();
    for dim in [1, 2] {
        for delta in [0.5, 0.25, 0.1] {
            cases.push(ramp_cases(delta, dim));
        }
    }
    collect("symmetric", cases)
}

/// `count` seeded convex fields on random symmetric bodies in dimensions 2 and 3.
pub fn symmetric_random_suite(seed: u64, count: usize) -> Report {
    let cases = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let n = 2 + i % 2;
            let body = random_symmetric_body(&mut rng, n);
            let f = random_convex_field(&mut rng, n);
            let grid = GridSpec::uniform(if n == 2 { 21 } else { 11 });
            halving_cases(&format!("random/{i}/n={n}"), &f, &body, &grid)
        })
        .collect();
    collect("symmetric_random", cases)
}

/// Entropy witness on the simplex: `E₁` against `¼ log₂(n+1)` and `ω₂` against 1.
pub fn entropy_suite(ns: &[usize]) -> Report {
    let cases = ns
        .iter()
        .map(|&n| {
            let id = format!("entropy/n={n}");
            let lower = 0.25 * ((n + 1) as f64).log2();
            or_failed(&id, lower, REFERENCE, (|| {
                let w = entropy_fn(n)?;
                let grid = default_grid(n);
                let body = &w.natural_body;
                let e1 = e1_convex(&w.field, body, &grid)?.value;
                let omega = modulus(&w.field, body, 2, &grid)?.value;
                let mut out = vec![
                    Case::new(format!("{id}/e1_convex"), Relation::Ge, lower, e1, 1e-2, REFERENCE),
                    Case::new(format!("{id}/omega2"), Relation::Le, 1.0, omega, 1e-6, REFERENCE),
                ];
                if n == 1 {
                    let lp = best_uniform(&w.field, body, 1, &grid)?.error;
                    let est = whitney_ratio(&w, body, 2, &grid)?;
                    out.push(Case::new(format!("{id}/e1_lp"), Relation::Eq, 0.25, lp, 1e-3, ORACLE));
                    out.push(Case::new(format!("{id}/e1_convex_exact"), Relation::Eq, 0.25, e1, 1e-3, ORACLE));
                    out.push(Case::new(format!("{id}/ratio"), Relation::Ge, 0.25, est.ratio, 1e-3, REFERENCE));
                }
                Ok(out)
            })())
        })
        .collect();
    collect("entropy", cases)
}

/// Grid used by the repair suite in dimension `n`.
pub fn repair_grid(n: usize) -> GridSpec {
    GridSpec::uniform(if n == 2 { 31 } else { 13 })
}

/// Seeded repair cases: a convex field on a positioned ball, box or simplex, its best
/// quadratic perturbed by a random quadratic of norm at most 1, then repaired.
pub fn repair_suite(seed: u64, count: usize) -> Report {
    let cases = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let n = 2 + i % 2;
            let id = format!("repair/{i}/n={n}");
            or_failed(&id, 0.0, ORACLE, (|| {
                let body = position(&random_body(&mut rng, n))?.body;
                let f = random_convex_field(&mut rng, n);
                let grid = repair_grid(n);
                let best = best_uniform(&f, &body, 2, &grid)?.polynomial;
                let p = best.add(&random_quadratic_perturbation(&mut rng, n))?;
                let r = convexify_quadratic(&f, &p, &body, &grid)?;
                let inflate = 1.0 + 1e-3;
                Ok(vec![
                    Case::new(format!("{id}/psd"), Relation::Ge, 0.0, r.q_min_eigenvalue, 1e-10, ORACLE),
                    Case::new(format!("{id}/ball"), Relation::Le, r.e_ball * inflate, r.ball_gap, 1e-8, ORACLE),
                    Case::new(
                        format!("{id}/bound"),
                        Relation::Le,
                        2.0 * r.lambda * r.lambda * r.e_k * inflate,
                        r.achieved,
                        1e-8,
                        ORACLE,
                    ),
                ])
            })())
        })
        .collect();
    collect("repair", cases)
}

/// Seeded cubic and quartic polynomials on the square: adding `L‖x‖²` makes them convex
/// on the grid and leaves `E₂` and `ω₃` unchanged.
pub fn smooth_suite(seed: u64, count: usize) -> Report {
    let body = ConvexBody::hypercube(2);
    let grid = GridSpec::uniform(21);
    let cases = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let degree = 3 + i % 2;
            let id = format!("smooth/{i}/deg={degree}");
            or_failed(&id, 0.0, IDENTITY, (|| {
                let g = random_polynomial(&mut rng, 2, degree, 1.0);
                let s = convexify_smooth(&g, &body, &grid)?;
                let gf = ScalarField::from_polynomial(g);
                let hf = ScalarField::from_polynomial(s.h.clone());
                let e_g = best_uniform(&gf, &body, 2, &grid)?.error;
                let e_h = best_uniform(&hf, &body, 2, &grid)?.error;
                let w_g = modulus_with(&gf, &body, 3, &grid, ModulusOptions::lattice())?.value;
                let w_h = modulus_with(&hf, &body, 3, &grid, ModulusOptions::lattice())?.value;
                Ok(vec![
                    Case::new(format!("{id}/convex"), Relation::Ge, 0.0, s.min_hessian_eig, 1e-9, IDENTITY),
                    Case::new(format!("{id}/e2"), Relation::Eq, e_g, e_h, 1e-8, IDENTITY),
                    Case::new(format!("{id}/omega3"), Relation::Eq, w_g, w_h, 1e-8, IDENTITY),
                ])
            })())
        })
        .collect();
    collect("smooth", cases)
}

/// Exhaustive `max |Δ_h^m f(x)|` over pairs of lattice points whose whole chain lies on
/// the lattice, summed in the same order as the sweep.
pub fn brute_force_modulus(f: &ScalarField<f64>, body: &ConvexBody<f64>, m: usize, grid: &GridSpec) -> Result<f64> {
    let lattice = Lattice::build(body, grid)?;
    let index: HashMap<&[usize], usize> = (0..lattice.len()).map(|i| (lattice.multi_index(i), i)).collect();
    let values: Vec<f64> = lattice.points().iter().map(|x| f.at(x)).collect();
    let weights: Vec<f64> = (0..=m)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(m, j) as f64)
        .collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..lattice.len() {
        let a = lattice.multi_index(i);
        'pair: for k in i + 1..lattice.len() {
            let b = lattice.multi_index(k);
            let mut step = Vec::with_capacity(a.len());
            for (&s, &e) in a.iter().zip(b) {
                let d = e as i64 - s as i64;
                if d % m as i64 != 0 {
                    continue 'pair;
                }
                step.push(d / m as i64);
            }
            let mut acc = 0.0;
            for (j, w) in weights.iter().enumerate() {
                let node: Vec<usize> = a.iter().zip(&step).map(|(&s, &d)| (s as i64 + j as i64 * d) as usize).collect();
                match index.get(node.as_slice()) {
                    Some(&p) => acc += w * values[p],
                    None => continue 'pair,
                }
            }
            best = best.max(acc.abs());
        }
    }
    Ok(best)
}

fn identity_body(i: usize) -> ConvexBody<f64> {
    match i % 4 {
        0 => ConvexBody::interval(-1.0, 1.0).expect("valid interval"),
        1 => ConvexBody::hypercube(2),
        2 => ConvexBody::unit_ball(2),
        _ => ConvexBody::standard_simplex(2),
    }
}

/// Same-grid identities between moduli and best approximation errors on seeded fields.
pub fn identity_suite(seed: u64) -> Report {
    let mut cases: Vec<Vec<Case>> = (0..50)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let body = identity_body(i);
            let n = body.dim();
            let f = random_field(&mut rng, n);
            let q = random_polynomial(&mut rng, n, 2, 1.0);
            let id = format!("identity/{i}/n={n}");
            or_failed(&id, 0.0, IDENTITY, (|| {
                let grid = GridSpec::uniform(if n == 1 { 41 } else { 15 });
                let lat = |f: &ScalarField<f64>, m| -> Result<f64> {
                    Ok(modulus_with(f, &body, m, &grid, ModulusOptions::lattice())?.value)
                };
                let w: Vec<f64> = (1..=4).map(|m| lat(&f, m)).collect::<Result<_>>()?;
                let e0 = best_uniform(&f, &body, 0, &grid)?.error;
                let mut out = vec![Case::new(format!("{id}/e0"), Relation::Eq, 0.5 * w[0], e0, 1e-10, IDENTITY)];
                for m in 2..=3 {
                    for k in 1..m {
                        let factor = (1u32 << (m - k)) as f64;
                        out.push(Case::new(
                            format!("{id}/order/{m}/{k}"),
                            Relation::Le,
                            factor * w[k - 1],
                            w[m - 1],
                            1e-8,
                            IDENTITY,
                        ));
                    }
                }
                let fq = f.add_polynomial(&q)?;
                for m in 3..=4 {
                    out.push(Case::new(format!("{id}/quadratic/{m}"), Relation::Eq, w[m - 1], lat(&fq, m)?, 1e-8, IDENTITY));
                }
                Ok(out)
            })())
        })
        .collect();

    cases.extend((0..12).into_par_iter().map(|i| {
        let mut rng = rng_for(seed ^ 0xB0, i);
        let body = identity_body(i);
        let n = body.dim();
        let f = random_field(&mut rng, n);
        let res = if n == 1 { 7 } else { 5 + 2 * (i % 2) };
        let m = 1 + i % 3;
        let id = format!("brute/{i}/n={n}/m={m}");
        or_failed(&id, 0.0, ORACLE, (|| {
            let grid = GridSpec::uniform(res);
            let fast = modulus_with(&f, &body, m, &grid, ModulusOptions::lattice())?.value;
            let slow = brute_force_modulus(&f, &body, m, &grid)?;
            Ok(vec![Case::new(id.clone(), Relation::Eq, slow, fast, 0.0, ORACLE)])
        })())
    }).collect::<Vec<_>>());

    cases.extend((0..20).into_par_iter().map(|i| {
        let mut rng = rng_for(seed ^ 0xE1, i);
        let body = identity_body(i);
        let n = body.dim();
        let f = random_convex_field(&mut rng, n);
        let id = format!("e1/{i}/n={n}");
        or_failed(&id, 0.0, ORACLE, (|| {
            let grid = GridSpec::uniform(41);
            let lp = best_uniform(&f, &body, 1, &grid)?.error;
            let search = e1_convex(&f, &body, &grid)?.value;
            Ok(vec![Case::new(id.clone(), Relation::Eq, lp, search, 1e-2, ORACLE)])
        })())
    }).collect::<Vec<_>>());

    let witnesses = [
        ramp(0.5, 1).ok(),
        ramp(0.25, 2).ok(),
        entropy_fn(1).ok(),
        entropy_fn(2).ok(),
        Some(prop18_f()),
    ];
    for w in witnesses.into_iter().flatten() {
        let id = format!("first_order/{}", w.id);
        let grid = GridSpec::uniform(if w.field.dim() == 1 { 101 } else { 21 });
        cases.push(or_failed(&id, 0.5, REFERENCE, whitney_ratio(&w, &w.natural_body, 1, &grid)
            .map(|est| vec![Case::new(id.clone(), Relation::Eq, 0.5, est.ratio, 1e-12, REFERENCE)])));
    }
    collect("identities", cases)
}

/// The 1-D functions used for the third-order check on `[0,1]`, with convexity flags.
pub fn segment_functions(seed: u64) -> Vec<(String, ScalarField<f64>)> {
    let mut out: Vec<(String, ScalarField<f64>)> = vec![
        ("abs".into(), ScalarField::convex(1, |x: &[f64]| (x[0] - 0.5).abs())),
        ("cube".into(), ScalarField::new(1, |x: &[f64]| x[0].powi(3))),
        ("exp".into(), ScalarField::convex(1, |x: &[f64]| x[0].exp())),
        ("sqrt".into(), ScalarField::new(1, |x: &[f64]| x[0].max(0.0).sqrt())),
        ("sin".into(), ScalarField::new(1, |x: &[f64]| (5.0 * x[0]).sin())),
        ("cos".into(), ScalarField::new(1, |x: &[f64]| (12.0 * x[0]).cos())),
        ("xlogx".into(), ScalarField::convex(1, |x: &[f64]| if x[0] > 0.0 { x[0] * x[0].ln() } else { 0.0 })),
        ("hinge".into(), ScalarField::convex(1, |x: &[f64]| (x[0] - 0.3).max(0.0))),
        ("step_ramp".into(), ScalarField::new(1, |x: &[f64]| x[0].clamp(0.4, 0.6))),
        ("quartic".into(), ScalarField::convex(1, |x: &[f64]| (x[0] - 0.2).powi(4))),
        ("runge".into(), ScalarField::new(1, |x: &[f64]| 1.0 / (1.0 + 25.0 * (2.0 * x[0] - 1.0).powi(2)))),
        ("reciprocal".into(), ScalarField::convex(1, |x: &[f64]| 1.0 / (1.0 + x[0]))),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5E);
    for k in 0..4 {
        out.push((format!("random_convex/{k}"), random_convex_field(&mut rng, 1)));
    }
    for k in 0..4 {
        out.push((format!("random/{k}"), random_field(&mut rng, 1)));
    }
    out
}

/// On `[0,1]`: `E₂ <= ω₃` for every function, and convex functions get a best quadratic
/// with nonnegative leading coefficient.
pub fn segment_suite(seed: u64) -> Report {
    let body = ConvexBody::interval(0.0, 1.0).expect("valid interval");
    let grid = GridSpec::uniform(201);
    let cases = segment_functions(seed)
        .into_par_iter()
        .map(|(name, f)| {
            let id = format!("segment/{name}");
            or_failed(&id, 0.0, REFERENCE, (|| {
                let sol = best_uniform(&f, &body, 2, &grid)?;
                let omega = modulus(&f, &body, 3, &grid)?.value;
                let mut out = vec![Case::new(format!("{id}/e2"), Relation::Le, omega, sol.error, 1e-6, REFERENCE)];
                if f.is_declared_convex() {
                    out.push(Case::new(
                        format!("{id}/leading"),
                        Relation::Ge,
                        0.0,
                        sol.polynomial.coeff(&[2]),
                        1e-9,
                        REFERENCE,
                    ));
                }
                Ok(out)
            })())
        })
        .collect();
    collect("segment", cases)
}

/// Sizes of the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub symmetric: usize,
    pub repair: usize,
    pub smooth: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            symmetric: 100,
            repair: 500,
            smooth: 50,
        }
    }
}

/// The fixed symmetric bodies and fields of the halving suite.
pub fn halving_catalog() -> (Vec<ConvexBody<f64>>, Vec<ScalarField<f64>>) {
    let bodies = vec![
        ConvexBody::hypercube(2),
        ConvexBody::unit_ball(2),
        ConvexBody::interval(-1.0, 1.0).expect("valid interval"),
    ];
    let fields = vec![
        ScalarField::from_polynomial(Polynomial::squared_norm(2)).declare_convex(true),
        ScalarField::convex(2, |x: &[f64]| x[0].abs() + 0.5 * x[1].abs()),
        ScalarField::convex(2, |x: &[f64]| (x[0] + x[1]).exp()),
        ScalarField::convex(2, |x: &[f64]| 1.0 + 2.0 * x[0] - x[1]),
        ScalarField::convex(1, |x: &[f64]| x[0].powi(4)),
    ];
    (bodies, fields)
}

/// Every suite, in a fixed order.
pub fn all_suites(seed: u64, sizes: SuiteSizes) -> Vec<Report> {
    let (bodies, fields) = halving_catalog();
    vec![
        prop18_suite(&GridSpec::per_axis(&[101, 51])),
        symmetric_halving_suite(&bodies, &fields, &GridSpec::uniform(41)),
        symmetric_random_suite(seed, sizes.symmetric),
        entropy_suite(&[1, 2, 3]),
        repair_suite(seed, sizes.repair),
        smooth_suite(seed, sizes.smooth),
        identity_suite(seed),
        segment_suite(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_on_tiny_grid() {
        let f = ScalarField::new(1, |x: &[f64]| x[0].powi(3));
        let body = ConvexBody::interval(-1.0, 1.0).unwrap();
        let grid = GridSpec::uniform(5);
        // chain -1, 0, 1: |(-1) - 0 + 1| = 0; chain -1, -0.5, 0: |-1 + 0.25 + 0| = 0.75
        assert_eq!(brute_force_modulus(&f, &body, 2, &grid).unwrap(), 0.75);
    }

    #[test]
    fn prop18_failures_are_only_uniform_multipliers() {
        let r = prop18_suite(&GridSpec::per_axis(&[41, 21]));
        let bad: Vec<_> = r.failures().map(|c| c.id.clone()).collect();
        assert_eq!(bad, ["certificate/P/uniform", "certificate/Q/uniform"]);
        let uniform = r.cases.iter().find(|c| c.id == "certificate/P/uniform").unwrap();
        // S = y picks up ½ - ½ + ½ on the top row
        assert!((uniform.actual - 1.0 / 12.0).abs() < 1e-12);
    }
}
