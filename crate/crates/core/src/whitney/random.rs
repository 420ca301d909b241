//! Seeded generators for the randomized suites.

use rand::Rng;

use crate::geometry::ConvexBody;
use crate::polynomials::{MonomialBasis, Polynomial};
use crate::smoothness::ScalarField;

fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = crate::scalar::norm(&v);
        if len > 1e-3 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

/// Convex quadratic `xᵀAx + b·x + c` with `A = BᵀB / n` plus up to three weighted hinges
/// `w max{0, a·x - t}`. Declared convex.
pub fn random_convex_field<R: Rng>(rng: &mut R, n: usize) -> ScalarField<f64> {
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let lin: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = rng.gen_range(-1.0..1.0);
    let hinges: Vec<(f64, Vec<f64>, f64)> = (0..rng.gen_range(0..=3))
        .map(|_| (rng.gen_range(0.0..1.0), unit_vector(rng, n), rng.gen_range(-0.5..0.5)))
        .collect();
    ScalarField::convex(n, move |x: &[f64]| {
        let mut v = c + crate::scalar::dot(&lin, x);
        for i in 0..n {
            v += x[i] * crate::scalar::dot(&a[i], x);
        }
        for (w, dir, t) in &hinges {
            v += w * (crate::scalar::dot(dir, x) - t).max(0.0);
        }
        v
    })
}

/// A continuous, generally nonconvex field: a random cubic plus an oscillation and a kink.
pub fn random_field<R: Rng>(rng: &mut R, n: usize) -> ScalarField<f64> {
    let p = random_polynomial(rng, n, 3, 1.0);
    let freq: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let amp = rng.gen_range(0.0..1.0);
    let kink: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let kw = rng.gen_range(-1.0..1.0);
    ScalarField::new(n, move |x: &[f64]| {
        let osc = amp * (crate::scalar::dot(&freq, x) + phase).sin();
        let dist: f64 = x.iter().zip(&kink).map(|(a, b)| (a - b).abs()).sum();
        p.value_at(x) + osc + kw * dist
    })
}

/// Polynomial of degree `degree` with coefficients uniform in `[-scale, scale]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, degree: usize, scale: f64) -> Polynomial<f64> {
    let k = MonomialBasis::shared(n, degree).len();
    let coeffs = (0..k).map(|_| rng.gen_range(-scale..scale)).collect();
    Polynomial::from_coefficients(n, degree, coeffs).expect("length matches basis")
}

/// Random quadratic whose coefficient vector has Euclidean norm at most 1.
pub fn random_quadratic_perturbation<R: Rng>(rng: &mut R, n: usize) -> Polynomial<f64> {
    let p = random_polynomial(rng, n, 2, 1.0);
    let len = crate::scalar::norm(p.coefficients());
    let target = rng.gen_range(0.0..1.0);
    if len == 0.0 {
        p
    } else {
        p.scale(target / len)
    }
}

/// Centrally symmetric body: a ball, a centered box or a symmetric polytope.
pub fn random_symmetric_body<R: Rng>(rng: &mut R, n: usize) -> ConvexBody<f64> {
    match rng.gen_range(0..3) {
        0 => ConvexBody::ball(vec![0.0; n], rng.gen_range(0.5..2.0)).expect("valid ball"),
        1 => {
            let half: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            ConvexBody::cuboid(half.iter().map(|h| -h).collect(), half).expect("valid box")
        }
        _ => loop {
            let mut vertices = Vec::new();
            for _ in 0..n + 1 {
                let v: Vec<f64> = unit_vector(rng, n)
                    .into_iter()
                    .map(|c| c * rng.gen_range(0.7..1.5))
                    .collect();
                vertices.push(v.iter().map(|c| -c).collect());
                vertices.push(v);
            }
            if let Ok(body) = ConvexBody::polytope(vertices) {
                if body.inner_radius_about_origin() > 0.2 {
                    return body;
                }
            }
        },
    }
}

/// A ball, box or simplex in general position.
pub fn random_body<R: Rng>(rng: &mut R, n: usize) -> ConvexBody<f64> {
    match rng.gen_range(0..3) {
        0 => ConvexBody::ball(
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            rng.gen_range(0.5..2.0),
        )
        .expect("valid ball"),
        1 => {
            let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..0.0)).collect();
            let hi = lo.iter().map(|l| l + rng.gen_range(0.5..2.0)).collect();
            ConvexBody::cuboid(lo, hi).expect("valid box")
        }
        _ => loop {
            let v: Vec<Vec<f64>> = (0..=n)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            if let Ok(body) = ConvexBody::simplex(v) {
                if crate::geometry::position(&body).is_ok_and(|p| p.lambda < 1.5 * n as f64) {
                    return body;
                }
            }
        },
    }
}
