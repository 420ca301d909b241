use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::smoothness::ScalarField;

/// A reference value attached to a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

/// A named test function with the body it is studied on.
#[derive(Debug, Clone)]
pub struct WitnessFunction {
    pub id: String,
    pub field: ScalarField<f64>,
    pub natural_body: ConvexBody<f64>,
    pub expected: Vec<Expected>,
}

/// `max{0, (x₁ - 1 + δ)/δ}` on `[-1,1]ⁿ`; `E₁ = ½ - δ/4` and `ω₂ = 1` on that cube.
pub fn ramp(delta: f64, dim: usize) -> Result<WitnessFunction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("ramp needs 0 < delta < 1, got {delta}")));
    }
    if dim == 0 {
        return Err(Error::InvalidInput("ramp needs a positive dimension".into()));
    }
    let field = ScalarField::convex(dim, move |x: &[f64]| ((x[0] - 1.0 + delta) / delta).max(0.0))
        .with_subgradient(move |x: &[f64]| {
            let mut g = vec![0.0; x.len()];
            if x[0] > 1.0 - delta {
                g[0] = 1.0 / delta;
            }
            g
        });
    Ok(WitnessFunction {
        id: format!("ramp(delta={delta})"),
        field,
        natural_body: ConvexBody::hypercube(dim),
        expected: vec![
            Expected {
                name: "e1".into(),
                value: 0.5 - delta / 4.0,
                provenance: "reference".into(),
            },
            Expected {
                name: "omega2".into(),
                value: 1.0,
                provenance: "reference".into(),
            },
        ],
    })
}

/// `t log₂ t` with `0 log 0 = 0`; tiny negative inputs from rounding count as 0.
fn xlog2x(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.log2()
    }
}

/// `½ Σ_{k=1}^{n+1} x_k log₂ x_k` in barycentric coordinates of the standard simplex,
/// charted on `conv{0, e₁, …, eₙ}` with `x_{n+1} = 1 - Σ x_k`.
pub fn entropy_fn(n: usize) -> Result<WitnessFunction> {
    if n == 0 {
        return Err(Error::InvalidInput("entropy witness needs n >= 1".into()));
    }
    let field = ScalarField::convex(n, |x: &[f64]| {
        let last = 1.0 - x.iter().sum::<f64>();
        0.5 * (x.iter().map(|&t| xlog2x(t)).sum::<f64>() + xlog2x(last))
    });
    Ok(WitnessFunction {
        id: format!("entropy(n={n})"),
        field,
        natural_body: ConvexBody::standard_simplex(n),
        expected: vec![
            Expected {
                name: "e1_lower".into(),
                value: 0.25 * ((n + 1) as f64).log2(),
                provenance: "reference".into(),
            },
            Expected {
                name: "omega2_upper".into(),
                value: 1.0,
                provenance: "reference".into(),
            },
        ],
    })
}

/// The roof `2 max{1 - y, |x|}` on `[-1,1] × [0,1]`, whose best quadratic
/// approximations include both a saddle and a convex paraboloid.
pub fn prop18_f() -> WitnessFunction {
    let field = ScalarField::convex(2, |p: &[f64]| 2.0 * (1.0 - p[1]).max(p[0].abs()));
    WitnessFunction {
        id: "roof".into(),
        field,
        natural_body: ConvexBody::cuboid(vec![-1.0, 0.0], vec![1.0, 1.0]).expect("valid box"),
        expected: vec![Expected {
            name: "e2".into(),
            value: 0.5,
            provenance: "reference".into(),
        }],
    }
}

/// Degree-≤2 approximants of the roof with error exactly ½: the saddle
/// `3/2 + x² - y²` and the convex `3/2 + x² + y² - 2y`.
pub fn prop18_approximants() -> (crate::Polynomial<f64>, crate::Polynomial<f64>) {
    let p = crate::Polynomial::from_terms(
        2,
        [(vec![0, 0], 1.5), (vec![2, 0], 1.0), (vec![0, 2], -1.0)],
    )
    .expect("valid terms");
    let q = crate::Polynomial::from_terms(
        2,
        [(vec![0, 0], 1.5), (vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 1], -2.0)],
    )
    .expect("valid terms");
    (p, q)
}

/// The six points `{-1, 0, 1} × {0, 1}` where the roof residuals alternate.
pub fn prop18_alternation_set() -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(6);
    for x in [-1.0, 0.0, 1.0] {
        for y in [0.0, 1.0] {
            out.push(vec![x, y]);
        }
    }
    out
}
