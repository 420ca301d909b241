use proptest::prelude::*;
use whitney_core::geometry::sample_grid;
use whitney_core::smoothness::{finite_difference, modulus, modulus_with, ModulusOptions};
use whitney_core::{ConvexBody, GridSpec, Polynomial, ScalarField};

fn field(a: f64, b: f64, c: f64) -> ScalarField<f64> {
    ScalarField::new(2, move |x: &[f64]| (a * x[0] + b * x[1]).sin() + c * (x[0] - 0.2).abs() + x[1].powi(3))
}

fn lattice(f: &ScalarField<f64>, k: &ConvexBody<f64>, m: usize, g: &GridSpec) -> f64 {
    modulus_with(f, k, m, g, ModulusOptions::lattice()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn order_reduction_and_boundedness(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0) {
        let f = field(a, b, c);
        let k = ConvexBody::unit_ball(2);
        let g = GridSpec::uniform(13);
        let w: Vec<f64> = (1..=3).map(|m| lattice(&f, &k, m, &g)).collect();
        let sup = sample_grid(&k, &g).unwrap().iter().map(|x| f.at(x).abs()).fold(0.0, f64::max);
        for m in 1..=3usize {
            prop_assert!(w[m - 1] <= 2f64.powi(m as i32) * sup + 1e-12);
            for j in 1..m {
                prop_assert!(w[m - 1] <= 2f64.powi((m - j) as i32) * w[j - 1] + 1e-8);
            }
        }
    }

    #[test]
    fn subadditive(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0) {
        let f = field(a, b, c);
        let g2 = field(b, -a, -c);
        let k = ConvexBody::hypercube(2);
        let g = GridSpec::uniform(11);
        let sum = f.add(&g2).unwrap();
        for m in 1..=3 {
            prop_assert!(lattice(&sum, &k, m, &g) <= lattice(&f, &k, m, &g) + lattice(&g2, &k, m, &g) + 1e-12);
        }
    }

    #[test]
    fn quadratics_are_annihilated(a in -3.0f64..3.0, b in -3.0f64..3.0, q in prop::collection::vec(-2.0f64..2.0, 6)) {
        let f = field(a, b, 0.5);
        let p = Polynomial::from_coefficients(2, 2, q).unwrap();
        let k = ConvexBody::standard_simplex(2);
        let g = GridSpec::uniform(13);
        let fp = f.add_polynomial(&p).unwrap();
        for m in 3..=4 {
            prop_assert!((lattice(&fp, &k, m, &g) - lattice(&f, &k, m, &g)).abs() <= 1e-8);
        }
    }

    #[test]
    fn second_differences_of_convex_functions_are_nonnegative(
        x in prop::array::uniform2(-1.0f64..1.0),
        h in prop::array::uniform2(-0.5f64..0.5),
        w in 0.0f64..2.0,
    ) {
        let f = ScalarField::convex(2, move |p: &[f64]| (p[0] + p[1]).exp() + w * p[0].abs());
        prop_assert!(finite_difference(&f, &x, &h, 2).unwrap() >= -1e-12);
    }
}

#[test]
fn second_difference_of_square() {
    let f = ScalarField::new(1, |x: &[f64]| x[0] * x[0]);
    assert!((finite_difference(&f, &[0.3], &[0.2], 2).unwrap() - 0.08).abs() < 1e-15);
}

#[test]
fn modulus_of_square_norm_on_ball() {
    // Δ²_h ‖x‖² = 2‖h‖², largest for a diameter chain with ‖h‖ = 1
    let f = ScalarField::<f64>::from_polynomial(Polynomial::squared_norm(2));
    let w = modulus(&f, &ConvexBody::unit_ball(2), 2, &GridSpec::uniform(21)).unwrap();
    assert!((w.value - 2.0).abs() < 1e-9, "{w:?}");
}

#[test]
fn refinement_never_lowers_the_lattice_value() {
    let f = field(1.3, -0.7, 0.4);
    let k = ConvexBody::unit_ball(2);
    let g = GridSpec::uniform(9);
    for m in 1..=3 {
        assert!(modulus(&f, &k, m, &g).unwrap().value >= lattice(&f, &k, m, &g));
    }
}
