//! Rank-deficient matrices for m ≤ n: the determinantal variety Γ of
//! matrices whose m×m minors all vanish, the embedding η that builds points
//! of Γ from an m×(m−1) base block, and experiments sampled on Γ.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forms::{form_value, ApproximatingFunction, DimensionFunction, MatrixPoint, Witness};
use crate::measure::{check_samples, sample_batches, tail_reports, ExperimentReport, check_schedule, check_prefix_budget};
use crate::search::{max_witness_height, witnesses, SearchBudget};
use crate::series::criterion_term;

/// Column subsets allowed in [`minor_defect`].
pub const MINOR_BUDGET: u64 = 10_000;

/// Vanishing tolerance for minors of constructed points.
pub const MINOR_TOL: f64 = 1e-12;

/// Floor on the smallest singular value of the base block.
pub const INDEPENDENCE_TOL: f64 = 1e-9;

/// Label of the sampling measure used on Γ.
pub const GAMMA_MEASURE: &str = "eta-pushforward measure";

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn det(x: &MatrixPoint, cols: &[usize]) -> f64 {
    if cols.len() == 2 {
        let (a, b) = (x.column(cols[0]), x.column(cols[1]));
        return a[0] * b[1] - a[1] * b[0];
    }
    x.select_columns(cols).to_nalgebra().determinant()
}

/// `max_S |det X_S|` over the m-column subsets S; zero iff rank X ≤ m−1.
pub fn minor_defect(x: &MatrixPoint) -> Result<f64> {
    let (m, n) = (x.m(), x.n());
    if m > n {
        return Err(invalid!("minor defect needs m <= n, got m={m}, n={n}"));
    }
    let subsets = binomial(n, m);
    if subsets > MINOR_BUDGET {
        return Err(Error::BudgetExceeded(format!("C({n},{m}) = {subsets} minors exceeds {MINOR_BUDGET}")));
    }
    let mut cols: Vec<usize> = (0..m).collect();
    let mut worst = 0.0f64;
    loop {
        worst = worst.max(det(x, &cols).abs());
        // Next m-subset of 0..n in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(worst);
            }
            i -= 1;
            if cols[i] < n - m + i {
                break;
            }
        }
        cols[i] += 1;
        for k in i + 1..m {
            cols[k] = cols[k - 1] + 1;
        }
    }
}

/// Data for η: base columns `X^{(1)},…,X^{(m−1)}` in `I^m` and coefficient
/// rows `a^{(i)} ∈ (−1/2,1/2)^{m−1}`, one row per extra column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingInput {
    pub base: Vec<Vec<f64>>,
    pub coefficients: Vec<Vec<f64>>,
}

impl EmbeddingInput {
    pub fn m(&self) -> usize {
        self.base.first().map_or(0, |c| c.len())
    }

    pub fn base_block(&self) -> Result<MatrixPoint> {
        MatrixPoint::from_columns(&self.base)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        if m < 2 {
            return Err(invalid!("the base block needs m >= 2 rows"));
        }
        if self.base.len() != m - 1 {
            return Err(invalid!("expected {} base columns, got {}", m - 1, self.base.len()));
        }
        if self.base.iter().any(|c| c.len() != m) {
            return Err(invalid!("base columns must all have length {m}"));
        }
        let block = self.base_block()?;
        let sv = block.to_nalgebra().singular_values();
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(smin > INDEPENDENCE_TOL) {
            return Err(invalid!("base columns are dependent (smallest singular value {smin:e})"));
        }
        if self.coefficients.is_empty() {
            return Err(invalid!("at least one coefficient row is needed"));
        }
        for (i, row) in self.coefficients.iter().enumerate() {
            if row.len() != m - 1 {
                return Err(invalid!("coefficient row {i} has length {}, expected {}", row.len(), m - 1));
            }
            if row.iter().any(|a| !(a.abs() < 0.5)) {
                return Err(invalid!("coefficient row {i} leaves the open interval (-1/2, 1/2)"));
            }
        }
        Ok(())
    }

    /// Draws a base block uniform on `I^{m(m−1)}` and coefficients uniform on
    /// the open cube, conditioned on independence and on the combination
    /// columns staying in the cube (automatic for m ≤ 3).
    pub fn random(m: usize, n: usize, rng: &mut impl Rng) -> Result<Self> {
        if m < 2 || m > n {
            return Err(invalid!("embedding needs 2 <= m <= n, got m={m}, n={n}"));
        }
        loop {
            let base: Vec<Vec<f64>> = (0..m - 1).map(|_| (0..m).map(|_| rng.gen::<f64>() - 0.5).collect()).collect();
            let coefficients = (0..n - m + 1)
                .map(|_| {
                    (0..m - 1)
                        .map(|_| loop {
                            let a = rng.gen::<f64>() - 0.5;
                            if a != -0.5 {
                                break a;
                            }
                        })
                        .collect()
                })
                .collect();
            let input = EmbeddingInput { base, coefficients };
            if eta_embed(&input, n).is_ok() {
                return Ok(input);
            }
        }
    }

    /// [`EmbeddingInput::random`] from a ChaCha8 stream seeded with `seed`.
    pub fn seeded(m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::random(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// A point of `I^{mn}` with m ≤ n, certified rank ≤ m−1 when its minor
/// defect is within [`MINOR_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub matrix: MatrixPoint,
    pub rank_deficient: bool,
    pub defect: f64,
    pub construction: Option<EmbeddingInput>,
}

impl GammaPoint {
    /// Wraps an arbitrary matrix, certifying it numerically.
    pub fn from_matrix(matrix: MatrixPoint) -> Result<Self> {
        let defect = minor_defect(&matrix)?;
        Ok(GammaPoint { matrix, rank_deficient: defect <= MINOR_TOL, defect, construction: None })
    }
}

/// `η(X^{(1)},…,X^{(m−1)}, a) = (X^{(1)},…,X^{(m−1)}, Σ_j a^{(1)}_j X^{(j)},…)`.
pub fn eta_embed(input: &EmbeddingInput, n: usize) -> Result<GammaPoint> {
    input.validate()?;
    let m = input.m();
    if n < m || input.coefficients.len() != n - m + 1 {
        return Err(invalid!(
            "n = {n} needs {} coefficient rows, got {}",
            (n + 1).saturating_sub(m),
            input.coefficients.len()
        ));
    }
    let mut columns = input.base.clone();
    for (i, row) in input.coefficients.iter().enumerate() {
        let col: Vec<f64> = (0..m).map(|k| row.iter().zip(&input.base).map(|(a, x)| a * x[k]).sum()).collect();
        if col.iter().any(|v| v.abs() > 0.5) {
            return Err(Error::OutOfCube(format!("combination column {i} has sup norm above 1/2")));
        }
        columns.push(col);
    }
    let matrix = MatrixPoint::from_columns(&columns)?;
    let defect = minor_defect(&matrix)?;
    Ok(GammaPoint { matrix, rank_deficient: defect <= MINOR_TOL, defect, construction: Some(input.clone()) })
}

/// Constant `c = max((m−1)/2, 1)` carried from base block to full matrix.
pub fn absorption_constant(m: usize) -> f64 {
    ((m as f64 - 1.0) / 2.0).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub member: bool,
    pub c: f64,
    /// Base-block witnesses up to Q, valued against the base block.
    pub checked: Vec<Witness>,
    /// Base witnesses whose full-matrix value is not below `c·ψ(|q|)`.
    pub failures: Vec<Witness>,
}

/// Checks that every base-block witness `|qX_base|∞ < ψ(|q|)` with
/// `|q| ≤ Q` satisfies `|qX|∞ < c·ψ(|q|)` on the full matrix. An empty
/// witness list certifies vacuously.
pub fn certify_a_membership(point: &GammaPoint, psi: &ApproximatingFunction, q_max: u64) -> Result<Certification> {
    let input = point
        .construction
        .as_ref()
        .ok_or_else(|| invalid!("point carries no construction data"))?;
    let base = input.base_block()?;
    let c = absorption_constant(point.matrix.m());
    let list = witnesses(&base, psi, &SearchBudget::new(q_max))?;
    let mut failures = Vec::new();
    for w in &list.witnesses {
        let full = form_value(&w.q, &point.matrix)?;
        if !(full < c * psi.eval(w.height as f64)) {
            failures.push(Witness { q: w.q.clone(), height: w.height, value: full });
        }
    }
    Ok(Certification { member: failures.is_empty(), c, checked: list.witnesses, failures })
}

/// Points sampled on Γ through η; fraction with a witness `|qX|∞ < cψ(|q|)`
/// at some height in `[N, Q]`, one report per N.
pub fn gamma_dichotomy(
    m: usize,
    n: usize,
    psi: &ApproximatingFunction,
    ns: &[u64],
    q_cap: u64,
    samples: usize,
    seed: u64,
) -> Result<Vec<ExperimentReport>> {
    check_samples(samples)?;
    if m < 2 || m > n {
        return Err(Error::PreconditionNotMet(format!("dichotomy on Γ needs 2 <= m <= n, got m={m}, n={n}")));
    }
    psi.check_positive()?;
    check_schedule(ns, q_cap)?;
    check_prefix_budget(m, q_cap)?;
    let start = Instant::now();
    let c = absorption_constant(m);
    let cpsi = psi.scaled(c);
    let lo = *ns.iter().min().unwrap();
    let heights = sample_batches(samples, seed, |rng| {
        let input = EmbeddingInput::random(m, n, rng).expect("valid shape");
        let point = eta_embed(&input, n).expect("sampled inputs stay in the cube");
        max_witness_height(&point.matrix, &cpsi, lo, q_cap).expect("validated")
    });
    let base = ExperimentReport::new("gamma_dichotomy", seed, samples as u64)
        .param("m", m)
        .param("n", n)
        .param("psi", psi.to_string())
        .param("c", c)
        .param("q_max", q_cap)
        .param("measure", GAMMA_MEASURE);
    let mut reports = tail_reports("gamma_dichotomy", &heights, ns, seed, &base);
    let secs = start.elapsed().as_secs_f64();
    reports.iter_mut().for_each(|r| r.duration_secs = secs);
    Ok(reports)
}

/// Partial sums of the criterion series for ψ and ψ/c.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Absorption {
    pub holds: bool,
    /// Upper end of the ratio band, `c^{(m−1)(n+1)}`.
    pub band: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `(R, Σ_{r≤R} term(ψ), Σ_{r≤R} term(ψ/c))` at each checkpoint.
    pub checkpoints: Vec<(u64, f64, f64)>,
}

/// Default horizon of [`constant_absorption_check`].
pub const ABSORPTION_HORIZON: u64 = 1_000_000;

/// With `r^{−(m−1)(n+1)} f(r)` non-increasing, each term for ψ/c is at
/// least `c^{−(m−1)}` times the term for ψ, so the partial-sum ratio
/// `Σ(ψ)/Σ(ψ/c)` lies in `[1, c^{(m−1)(n+1)}]` and both series diverge
/// together. Checks the band at decades up to `horizon`.
pub fn constant_absorption_check(
    m: usize,
    n: usize,
    f: &DimensionFunction,
    psi: &ApproximatingFunction,
    c: f64,
    horizon: u64,
) -> Result<Absorption> {
    if m < 1 || n < 1 {
        return Err(invalid!("m and n must be positive"));
    }
    if !(c >= 1.0) || !c.is_finite() {
        return Err(invalid!("c must be a finite number >= 1, got {c}"));
    }
    if horizon < 1 {
        return Err(invalid!("horizon must be positive"));
    }
    f.validate()?;
    psi.check_positive()?;
    let g = f.scaled(((m - 1) * (n + 1)) as f64);
    if !(g.decreasing() || g.constant()) {
        return Err(Error::PreconditionNotMet(format!(
            "r^-{} f(r) must be non-increasing",
            (m - 1) * (n + 1)
        )));
    }
    let band = c.powi(((m - 1) * (n + 1)) as i32);
    let psi_c = psi.scaled(1.0 / c);
    let (mut a, mut b) = (0.0f64, 0.0f64);
    let mut checkpoints = Vec::new();
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut next = 1u64;
    for r in 1..=horizon {
        a += criterion_term(m, n, f, psi, r as f64);
        b += criterion_term(m, n, f, &psi_c, r as f64);
        if r == next || r == horizon {
            let ratio = a / b;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            checkpoints.push((r, a, b));
            next = next.saturating_mul(10);
        }
    }
    // Relative slack for rounding in the partial sums.
    let eps = 1e-9;
    let holds = min_ratio >= 1.0 - eps && max_ratio <= band * (1.0 + eps);
    Ok(Absorption { holds, band, min_ratio, max_ratio, checkpoints })
}
