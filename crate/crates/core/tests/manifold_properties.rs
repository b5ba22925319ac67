use linforms::forms::{ApproximatingFunction, DimensionFunction, MatrixPoint};
use linforms::manifold::{
    absorption_constant, certify_a_membership, constant_absorption_check, eta_embed, minor_defect, EmbeddingInput,
    GammaPoint, ABSORPTION_HORIZON,
};
use linforms::search::{height_obstruction, witnesses, SearchBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest |det| over all m-column subsets, by cofactor expansion.
fn det(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    if k == 1 {
        return rows[0][0];
    }
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                rows[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * rows[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
}

fn brute_defect(x: &MatrixPoint) -> f64 {
    let (m, n) = (x.m(), x.n());
    subsets(n, m)
        .iter()
        .map(|cols| {
            let rows: Vec<Vec<f64>> = (0..m).map(|i| cols.iter().map(|&j| x.get(i, j)).collect()).collect();
            det(&rows).abs()
        })
        .fold(0.0, f64::max)
}

const SHAPES: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 3), (3, 4), (3, 5)];

#[test]
fn eta_outputs_lie_on_the_rank_variety() {
    for &(m, n) in &SHAPES {
        for seed in 0..100 {
            let p = eta_embed(&EmbeddingInput::seeded(m, n, seed).unwrap(), n).unwrap();
            assert!(p.rank_deficient);
            assert!(p.defect <= 1e-12);
            assert!(brute_defect(&p.matrix) <= 1e-12, "({m},{n}) seed {seed}");
            assert!((minor_defect(&p.matrix).unwrap() - brute_defect(&p.matrix)).abs() < 1e-12);
        }
    }
}

#[test]
fn eta_is_injective_on_seeded_inputs() {
    for &(m, n) in &SHAPES {
        let mut seen: Vec<(Vec<u64>, Vec<u64>)> = (0..100)
            .map(|seed| {
                let input = EmbeddingInput::seeded(m, n, seed).unwrap();
                let out = eta_embed(&input, n).unwrap();
                let key_in: Vec<u64> =
                    input.base.iter().chain(&input.coefficients).flatten().map(|v| v.to_bits()).collect();
                (key_in, out.matrix.entries().iter().map(|v| v.to_bits()).collect())
            })
            .collect();
        let inputs: std::collections::HashSet<_> = seen.iter().map(|p| p.0.clone()).collect();
        assert_eq!(inputs.len(), 100);
        seen.sort_by(|a, b| a.1.cmp(&b.1));
        seen.dedup_by(|a, b| a.1 == b.1);
        assert_eq!(seen.len(), 100, "({m},{n}) has colliding outputs");
    }
}

fn flat(input: &EmbeddingInput) -> Vec<f64> {
    input.base.iter().chain(&input.coefficients).flatten().copied().collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn eta_is_locally_bi_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &(m, n) in &SHAPES {
        for seed in 0..20 {
            let input = EmbeddingInput::seeded(m, n, 1000 + seed).unwrap();
            let out = eta_embed(&input, n).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for _ in 0..20 {
                let mut moved = input.clone();
                let d = 1e-3 * rng.gen::<f64>();
                for v in moved.base.iter_mut().chain(moved.coefficients.iter_mut()).flatten() {
                    *v += d * (2.0 * rng.gen::<f64>() - 1.0) / ((m * n) as f64).sqrt();
                }
                let Ok(moved_out) = eta_embed(&moved, n) else { continue };
                let ratio = dist(moved_out.matrix.entries(), out.matrix.entries()) / dist(&flat(&moved), &flat(&input));
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            // Base columns are copied, so the map never contracts below the
            // share of base coordinates; the upper band is the operator norm.
            assert!(lo > 0.05 && hi < 3.0, "({m},{n}) seed {seed}: ratios {lo}..{hi}");
        }
    }
}

#[test]
fn eta_example_and_degenerate_coefficients() {
    let input = EmbeddingInput { base: vec![vec![0.3, -0.2]], coefficients: vec![vec![0.4]] };
    let p = eta_embed(&input, 2).unwrap();
    assert_eq!(p.matrix.column(0), &[0.3, -0.2]);
    assert!((p.matrix.get(0, 1) - 0.12).abs() < 1e-15 && (p.matrix.get(1, 1) + 0.08).abs() < 1e-15);
    let zero = EmbeddingInput { base: vec![vec![0.3, 0.1, -0.2], vec![0.0, 0.4, 0.1]], coefficients: vec![vec![0.0, 0.0]; 2] };
    let p = eta_embed(&zero, 4).unwrap();
    assert_eq!(p.defect, 0.0);
    assert!(p.matrix.column(2).iter().chain(p.matrix.column(3)).all(|&v| v == 0.0));
    let psi = ApproximatingFunction::power(1.0, 3.0).unwrap();
    assert!(certify_a_membership(&p, &psi, 20).unwrap().member);
}

#[test]
fn certification_never_fails_on_constructions() {
    let psi = ApproximatingFunction::power(1.0, 3.0).unwrap();
    let mut nonvacuous = 0;
    for seed in 0..100 {
        let p = eta_embed(&EmbeddingInput::seeded(3, 3, seed).unwrap(), 3).unwrap();
        let cert = certify_a_membership(&p, &psi, 30).unwrap();
        assert!(cert.member, "seed {seed}: failures {:?}", cert.failures);
        assert_eq!(cert.c, 1.0);
        if !cert.checked.is_empty() {
            nonvacuous += 1;
        }
    }
    assert!(nonvacuous >= 90, "only {nonvacuous} instances had base witnesses");
    assert_eq!(absorption_constant(2), 1.0);
    assert_eq!(absorption_constant(5), 2.0);
}

#[test]
fn square_matrices_off_the_variety_have_finitely_many_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let psi = ApproximatingFunction::power(1.0, 1.0).unwrap();
    let mut checked = 0;
    while checked < 200 {
        let e: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() - 0.5).collect();
        let x = MatrixPoint::new(2, 2, e).unwrap();
        let p = GammaPoint::from_matrix(x.clone()).unwrap();
        if p.defect < 1e-3 {
            continue;
        }
        checked += 1;
        let ob = height_obstruction(&x, &psi).unwrap();
        let list = witnesses(&x, &psi, &SearchBudget::new(4 * ob.max_height + 8)).unwrap();
        assert!(list.witnesses.iter().all(|w| w.height <= ob.max_height));
    }
}

#[test]
fn absorption_ratio_matches_hand_sum() {
    // m = n = 2, f = r³: the term is Ψ(r)·r = ψ(r), so scaling ψ by 1/2
    // scales every partial sum by 1/2 and the ratio is exactly 2.
    let f = DimensionFunction::power(3.0).unwrap();
    let psi = ApproximatingFunction::power(1.0, 1.0).unwrap();
    let a = constant_absorption_check(2, 2, &f, &psi, 2.0, ABSORPTION_HORIZON).unwrap();
    assert!(a.holds);
    assert_eq!(a.band, 8.0);
    assert!((a.min_ratio - 2.0).abs() < 1e-9 && (a.max_ratio - 2.0).abs() < 1e-9);
    let (r, s, _) = *a.checkpoints.last().unwrap();
    assert_eq!(r, ABSORPTION_HORIZON);
    let harmonic: f64 = (1..=r).map(|k| 1.0 / k as f64).sum();
    assert!((s - harmonic).abs() < 1e-6 * harmonic);
    let one = constant_absorption_check(2, 2, &f, &psi, 1.0, 10_000).unwrap();
    assert!(one.holds && one.min_ratio == 1.0 && one.max_ratio == 1.0);
    assert!(constant_absorption_check(2, 2, &DimensionFunction::power(10.0).unwrap(), &psi, 2.0, 1000).is_err());
}

#[test]
fn defect_examples() {
    let x = MatrixPoint::new(2, 2, vec![0.3, -0.2, 0.12, -0.08]).unwrap();
    assert!(minor_defect(&x).unwrap() < 1e-17);
    let d = MatrixPoint::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    assert_eq!(minor_defect(&d).unwrap(), 0.25);
}
