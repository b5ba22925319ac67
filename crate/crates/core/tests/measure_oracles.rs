use linforms::forms::{ApproximatingFunction, Omega, UbiquityConfig};
use linforms::manifold::gamma_dichotomy;
use linforms::measure::{
    estimate_delta_t, estimate_e_t, tail_dichotomy, ubiquity_density, Ball, Estimate, ExperimentReport,
};
use proptest::prelude::*;

mod common;
use common::{all_vectors, hgt_f as hgt, norm2, slab_union_quadrature};

fn assert_within_3_sigma(report: &ExperimentReport, oracle: f64) {
    let e = report.estimate();
    let sigma = (oracle * (1.0 - oracle) / e.samples as f64).sqrt().max(1.0 / e.samples as f64);
    assert!(
        (e.estimate - oracle).abs() <= 3.0 * sigma,
        "{}: estimate {} vs oracle {oracle} (sigma {sigma})",
        report.name,
        e.estimate
    );
}

#[test]
fn delta_t_agrees_with_quadrature() {
    let qs = all_vectors(2, 8, 16);
    let psi = ApproximatingFunction::power(1.0, 1.0).unwrap();
    let oracle = slab_union_quadrature(2, &qs, |q| psi.big_psi(hgt(q)) * norm2(q), -0.5, 0.5, 2048);
    let r = estimate_delta_t(2, 1, &psi, 4, 2.0, 100_000, 42).unwrap();
    assert_within_3_sigma(&r, oracle);
    // The configuration above is nearly saturated; a thinner ψ checked on
    // the pooled counts of several seeds.
    let thin = ApproximatingFunction::power(0.05, 1.0).unwrap();
    let oracle = slab_union_quadrature(2, &qs, |q| thin.big_psi(hgt(q)) * norm2(q), -0.5, 0.5, 2048);
    let mut pooled = estimate_delta_t(2, 1, &thin, 4, 2.0, 100_000, 0).unwrap();
    for seed in 1..8 {
        let r = estimate_delta_t(2, 1, &thin, 4, 2.0, 100_000, seed).unwrap();
        pooled.estimates[0].hits += r.estimate().hits;
        pooled.estimates[0].samples += r.estimate().samples;
    }
    let (hits, samples) = (pooled.estimates[0].hits, pooled.estimates[0].samples);
    pooled.estimates[0] = Estimate::new("t", 4.0, hits, samples);
    assert!(oracle > 0.2 && oracle < 0.4);
    assert_within_3_sigma(&pooled, oracle);
}

#[test]
fn e_t_agrees_with_quadrature() {
    let t = 4;
    let omega = Omega::identity();
    // Heights below 2^t/ω(t) = 4, forms below 3·(2^t)^{-2}.
    let bound = 3.0 / 256.0;
    let qs = all_vectors(3, 1, 3);
    let oracle = slab_union_quadrature(3, &qs, |_| bound, -0.5, 0.5, 512);
    let r = estimate_e_t(3, 1, &omega, t, 100_000, 9).unwrap();
    assert_within_3_sigma(&r, oracle);
}

#[test]
fn ubiquity_density_agrees_with_quadrature() {
    let cfg = UbiquityConfig::new(3, 1, Omega::identity()).unwrap();
    let t = 2;
    let rho = cfg.rho(t as f64);
    let qs = all_vectors(3, 3, 4);
    let oracle = slab_union_quadrature(3, &qs, |q| rho * norm2(q), 0.125, 0.375, 512);
    let ball = Ball { center: vec![0.25; 3], radius: 0.125 };
    let r = ubiquity_density(&cfg, &ball, t, 50_000, 11).unwrap();
    assert_within_3_sigma(&r, oracle);
}

#[test]
fn tail_and_gamma_fractions_agree_with_quadrature() {
    let psi = ApproximatingFunction::power(1.0, 1.5).unwrap();
    let ns = [4u64, 8];
    let q_cap = 32;
    let tails = tail_dichotomy(2, 1, &psi, &ns, q_cap, 50_000, 5).unwrap();
    // On Γ with m = n = 2 the second column is a·x₁ with |a| < 1/2 and
    // c = 1, so the witness condition reduces to the first column.
    let gammas = gamma_dichotomy(2, 2, &psi, &ns, q_cap, 50_000, 6).unwrap();
    for (i, &nn) in ns.iter().enumerate() {
        let qs = all_vectors(2, nn, q_cap);
        let oracle = slab_union_quadrature(2, &qs, |q| psi.eval(hgt(q)), -0.5, 0.5, 2048);
        assert_within_3_sigma(&tails[i], oracle);
        assert_within_3_sigma(&gammas[i], oracle);
    }
}

#[test]
fn quadrature_helper_sanity() {
    // One slab |y₂| < 0.1 covers a fifth of the square.
    let v = slab_union_quadrature(2, &[vec![0, 1]], |_| 0.1, -0.5, 0.5, 64);
    assert!((v - 0.2).abs() < 1e-12);
    // |y₁ − y₂| < 0.5 covers 3/4.
    let v = slab_union_quadrature(2, &[vec![1, -1]], |_| 0.5, -0.5, 0.5, 1024);
    assert!((v - 0.75).abs() < 1e-6);
}

#[test]
fn reports_are_deterministic() {
    let psi = ApproximatingFunction::power(1.0, 1.0).unwrap();
    let a = estimate_delta_t(3, 1, &psi, 3, 2.0, 3000, 1).unwrap();
    let b = estimate_delta_t(3, 1, &psi, 3, 2.0, 3000, 1).unwrap();
    assert_eq!(a.estimates, b.estimates);
    let t1 = tail_dichotomy(3, 1, &psi, &[2, 4], 16, 2000, 3).unwrap();
    let t2 = tail_dichotomy(3, 1, &psi, &[2, 4], 16, 2000, 3).unwrap();
    for (x, y) in t1.iter().zip(&t2) {
        assert_eq!(x.estimates, y.estimates);
    }
}

#[test]
fn trivial_extremes() {
    let tiny = ApproximatingFunction::power(1.0, 50.0).unwrap();
    let r = estimate_delta_t(2, 1, &tiny, 3, 2.0, 5000, 2).unwrap();
    assert_eq!(r.estimate().estimate, 0.0);
    let huge = ApproximatingFunction::power(1e6, 0.01).unwrap();
    let r = tail_dichotomy(3, 1, &huge, &[2, 8], 16, 2000, 2).unwrap();
    assert!(r.iter().all(|x| x.estimate().estimate == 1.0));
    let wide = Omega::Power { scale: 1e6, exponent: 1.0 };
    let r = estimate_e_t(3, 1, &wide, 4, 1000, 2).unwrap();
    assert_eq!(r.estimate().estimate, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn delta_t_monotone_in_psi(c in 0.05f64..2.0, factor in 1.0f64..4.0, tau in 0.5f64..2.5, seed in 0u64..1000) {
        let small = ApproximatingFunction::power(c, tau).unwrap();
        let large = ApproximatingFunction::power(c * factor, tau).unwrap();
        let a = estimate_delta_t(2, 1, &small, 3, 2.0, 2000, seed).unwrap();
        let b = estimate_delta_t(2, 1, &large, 3, 2.0, 2000, seed).unwrap();
        prop_assert!(a.estimate().hits <= b.estimate().hits);
    }

    #[test]
    fn tail_non_increasing_in_n(tau in 1.0f64..3.0, seed in 0u64..1000) {
        let psi = ApproximatingFunction::power(1.0, tau).unwrap();
        let r = tail_dichotomy(3, 1, &psi, &[1, 2, 4, 8, 16], 16, 1000, seed).unwrap();
        for w in r.windows(2) {
            prop_assert!(w[1].estimate().hits <= w[0].estimate().hits);
        }
    }

    #[test]
    fn ubiquity_monotone_in_omega_scale(scale in 0.5f64..2.0, seed in 0u64..1000) {
        let a = UbiquityConfig::new(3, 1, Omega::Power { scale, exponent: 1.0 }).unwrap();
        let b = UbiquityConfig::new(3, 1, Omega::Power { scale: 2.0 * scale, exponent: 1.0 }).unwrap();
        let ball = Ball { center: vec![0.25; 3], radius: 0.125 };
        let x = ubiquity_density(&a, &ball, 3, 1000, seed).unwrap();
        let y = ubiquity_density(&b, &ball, 3, 1000, seed).unwrap();
        prop_assert!(x.estimate().hits <= y.estimate().hits);
    }
}
