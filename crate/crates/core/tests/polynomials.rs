use proptest::prelude::*;
use whitney_core::polynomials::{binomial, quadratic_parts, symm_eig, MonomialBasis};
use whitney_core::{Matrix, Polynomial};

fn poly(n: usize, d: usize, coeffs: &[f64]) -> Polynomial<f64> {
    let k = MonomialBasis::shared(n, d).len();
    Polynomial::from_coefficients(n, d, coeffs[..k].to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigendecomposition_reassembles(n in 1usize..5, raw in prop::collection::vec(-10.0f64..10.0, 16)) {
        let m = Matrix::from_fn(n, n, |i, j| raw[i.min(j) * 4 + i.max(j)]);
        let e = symm_eig(&m).unwrap();
        let scale = 1.0 + m.max_abs();
        prop_assert!(e.reassemble().sub(&m).max_abs() <= 1e-10 * scale);
        prop_assert!(e.orthogonality_defect() <= 1e-12);
        let trace: f64 = e.d.iter().sum();
        prop_assert!((trace - m.trace()).abs() <= 1e-10 * scale);
        prop_assert!(e.d.windows(2).all(|w| w[0] >= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quadratic_split_is_exact(n in 1usize..4, coeffs in prop::collection::vec(-5.0f64..5.0, 10)) {
        let p = poly(n, 2, &coeffs);
        let parts = quadratic_parts(&p).unwrap();
        let back = parts.to_polynomial();
        for (a, b) in back.coefficients().iter().zip(p.coefficients()) {
            prop_assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn product_evaluates_pointwise(
        a in prop::collection::vec(-2.0f64..2.0, 10),
        b in prop::collection::vec(-2.0f64..2.0, 10),
        x in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let p = poly(2, 3, &a);
        let q = poly(2, 2, &b[..6]);
        let pq = p.mul(&q).unwrap();
        let lhs = pq.value_at(&x);
        let rhs = p.value_at(&x) * q.value_at(&x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn gradient_matches_central_difference(a in prop::collection::vec(-2.0f64..2.0, 10), x in prop::collection::vec(-1.0f64..1.0, 2)) {
        let p = poly(2, 3, &a);
        let g = p.gradient_at(&x);
        let h = 1e-6;
        for k in 0..2 {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[k] += h;
            dn[k] -= h;
            let fd = (p.value_at(&up) - p.value_at(&dn)) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6);
        }
    }
}

#[test]
fn basis_sizes_are_binomial() {
    for n in 1..=5 {
        for d in 0..=5 {
            assert_eq!(MonomialBasis::shared(n, d).len(), binomial(n + d, d));
        }
    }
}
