use linforms::forms::{
    euclidean_norm, form_value, in_delta_neighborhood, resonant_distance, ApproximatingFunction, MatrixPoint, Witness,
};
use proptest::prelude::*;

fn matrix(m: usize, n: usize) -> impl Strategy<Value = MatrixPoint> {
    prop::collection::vec(-0.5f64..=0.5, m * n).prop_map(move |e| MatrixPoint::new(m, n, e).unwrap())
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4, 1usize..=3)
}

fn nonzero_q(m: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..=50, m).prop_filter("q != 0", |q| q.iter().any(|&v| v != 0))
}

fn point_and_q() -> impl Strategy<Value = (MatrixPoint, Vec<i64>)> {
    shape().prop_flat_map(|(m, n)| (matrix(m, n), nonzero_q(m)))
}

proptest! {
    #[test]
    fn sign_symmetry((x, q) in point_and_q()) {
        let neg: Vec<i64> = q.iter().map(|v| -v).collect();
        prop_assert_eq!(form_value(&q, &x).unwrap(), form_value(&neg, &x).unwrap());
    }

    #[test]
    fn distance_and_form_are_comparable((x, q) in point_and_q()) {
        let d = resonant_distance(&x, &q).unwrap();
        let scaled = form_value(&q, &x).unwrap() / euclidean_norm(&q);
        let slack = 1e-12 * (1.0 + d);
        prop_assert!(d <= scaled + slack);
        prop_assert!(scaled <= (x.m() as f64).sqrt() * d + slack);
    }

    #[test]
    fn neighbourhood_monotone_in_psi(
        (x, q) in point_and_q(),
        c1 in 0.01f64..2.0,
        extra in 0.0f64..2.0,
        tau in 0.1f64..4.0,
    ) {
        let small = ApproximatingFunction::power(c1, tau).unwrap();
        let large = ApproximatingFunction::power(c1 + extra, tau).unwrap();
        if in_delta_neighborhood(&x, &q, &small).unwrap() {
            prop_assert!(in_delta_neighborhood(&x, &q, &large).unwrap());
        }
    }

    #[test]
    fn big_psi_times_r_is_psi(c in 0.01f64..10.0, tau in 0.1f64..5.0, kappa in 0.0f64..3.0, r in 1u32..100_000) {
        let r = r as f64;
        for psi in [ApproximatingFunction::power(c, tau).unwrap(), ApproximatingFunction::power_log(c, tau, kappa).unwrap()] {
            let lhs = psi.big_psi(r) * r;
            let rhs = psi.eval(r);
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn witness_recomputes_exactly((x, q) in point_and_q()) {
        let w = Witness::new(q.clone(), &x).unwrap();
        prop_assert!(w.verify(&x));
        prop_assert_eq!(w.height, q.iter().map(|v| v.unsigned_abs()).max().unwrap());
    }

    #[test]
    fn form_value_matches_column_dot_products((x, q) in point_and_q()) {
        let mut best = 0.0f64;
        for j in 0..x.n() {
            let dot: f64 = (0..x.m()).map(|i| q[i] as f64 * x.get(i, j)).sum();
            best = best.max(dot.abs());
        }
        let v = form_value(&q, &x).unwrap();
        prop_assert!((v - best).abs() <= 1e-12 * (1.0 + best));
    }
}

#[test]
fn point_on_resonant_set_is_in_every_neighbourhood() {
    let x = MatrixPoint::new(2, 1, vec![0.5, 0.25]).unwrap();
    let psi = ApproximatingFunction::power(1e-9, 5.0).unwrap();
    assert_eq!(resonant_distance(&x, &[1, -2]).unwrap(), 0.0);
    assert!(in_delta_neighborhood(&x, &[1, -2], &psi).unwrap());
}
