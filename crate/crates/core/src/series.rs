//! Convergence of the criterion series, measure verdicts, dimension
//! formulas, and the ω step-function construction.
//!
//! The criterion series is `Σ_r f(Ψ(r))·Ψ(r)^{−(m−1)n}·r^{m−1}` with
//! `Ψ(r) = ψ(r)/r`. For `f(r) = r^s (log 1/r)^{κ₁}` and
//! `ψ(r) = c·r^{−τ}(log(e+r))^{−κ₂}` the term behaves like `r^E (log r)^K`
//! with `E = m−1 − (τ+1)(s−(m−1)n)` and `K = κ₁ − κ₂(s−(m−1)n)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forms::{ApproximatingFunction, DimensionFunction, LimitAtZero, Omega, EXPONENT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesTag {
    Convergent,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesMethod {
    ClosedForm,
    /// Dyadic block sums up to a horizon. Not a proof.
    PartialSumHeuristic,
}

/// How the classification is to be obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MethodRequest {
    /// Closed form when available, otherwise the heuristic.
    Auto,
    ClosedForm,
    PartialSum { horizon: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesBehavior {
    pub tag: SeriesTag,
    pub method: SeriesMethod,
    /// Exponent of r in the term (closed form), or the fitted decay of the
    /// block sums (heuristic).
    pub r_exponent: f64,
    /// Exponent of log r in the term; zero for the heuristic.
    pub log_exponent: f64,
    /// Set for non-rigorous classifications.
    pub warning: Option<String>,
}

/// One term of the criterion series at integer r.
pub fn criterion_term(m: usize, n: usize, f: &DimensionFunction, psi: &ApproximatingFunction, r: f64) -> f64 {
    let big = psi.big_psi(r);
    let gamma = ((m - 1) * n) as f64;
    f.eval(big) * big.powf(-gamma) * r.powi(m as i32 - 1)
}

/// `(E, K)` for closed-form families.
pub fn term_exponents(m: usize, n: usize, f: &DimensionFunction, psi: &ApproximatingFunction) -> Option<(f64, f64)> {
    let (tau, k2) = psi.exponents()?;
    let (s, k1) = f.exponents();
    let excess = s - ((m - 1) * n) as f64;
    Some(((m - 1) as f64 - (tau + 1.0) * excess, k1 - k2 * excess))
}

/// `Σ r^E (log r)^K` converges iff `E < −1`, or `E = −1` and `K < −1`;
/// the boundary `E = K = −1` diverges.
pub fn power_log_series(e: f64, k: f64) -> SeriesTag {
    if e < -1.0 - EXPONENT_TOL || ((e + 1.0).abs() <= EXPONENT_TOL && k < -1.0 - EXPONENT_TOL) {
        SeriesTag::Convergent
    } else {
        SeriesTag::Divergent
    }
}

const DEFAULT_HEURISTIC_HORIZON: u64 = 1 << 20;

pub fn classify_series(m: usize, n: usize, f: &DimensionFunction, psi: &ApproximatingFunction) -> Result<SeriesBehavior> {
    classify_series_with(m, n, f, psi, MethodRequest::Auto)
}

pub fn classify_series_with(
    m: usize,
    n: usize,
    f: &DimensionFunction,
    psi: &ApproximatingFunction,
    request: MethodRequest,
) -> Result<SeriesBehavior> {
    check_dims(m, n)?;
    f.validate()?;
    psi.validate()?;
    match (request, term_exponents(m, n, f, psi)) {
        (MethodRequest::Auto | MethodRequest::ClosedForm, Some((e, k))) => Ok(SeriesBehavior {
            tag: power_log_series(e, k),
            method: SeriesMethod::ClosedForm,
            r_exponent: e,
            log_exponent: k,
            warning: None,
        }),
        (MethodRequest::ClosedForm, None) => {
            Err(Error::Unsupported("closed-form classification needs a power or power-log psi".into()))
        }
        (MethodRequest::Auto, None) => {
            let horizon = psi.table_horizon().map_or(DEFAULT_HEURISTIC_HORIZON, |h| (h as u64).max(64));
            heuristic(|r| criterion_term(m, n, f, psi, r), horizon)
        }
        (MethodRequest::PartialSum { horizon }, _) => heuristic(|r| criterion_term(m, n, f, psi, r), horizon),
    }
}

/// Cauchy condensation on dyadic blocks `[2^j, 2^{j+1})`: geometric decay
/// of the block sums, or decay faster than `1/j^{1.1}`, is read as
/// convergence.
fn heuristic(term: impl Fn(f64) -> f64, horizon: u64) -> Result<SeriesBehavior> {
    if horizon < 64 {
        return Err(Error::HorizonTooSmall(format!("partial-sum heuristic needs horizon >= 64, got {horizon}")));
    }
    let mut blocks = Vec::new();
    let mut j = 0u32;
    while (1u64 << (j + 1)) - 1 <= horizon {
        let s: f64 = ((1u64 << j)..(1u64 << (j + 1))).map(|r| term(r as f64)).sum();
        blocks.push(s);
        j += 1;
    }
    if blocks.iter().any(|b| !b.is_finite()) {
        return Err(invalid!("criterion terms are not finite on the horizon"));
    }
    let tail = &blocks[blocks.len() / 2..];
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    // Slope of log B_j against log j on the tail.
    let pts: Vec<(f64, f64)> = (blocks.len() / 2..blocks.len())
        .filter(|&i| blocks[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), blocks[i].ln()))
        .collect();
    let slope = least_squares_slope(&pts).unwrap_or(0.0);
    let tag = if mean_ratio < 0.9 || slope < -1.1 { SeriesTag::Convergent } else { SeriesTag::Divergent };
    Ok(SeriesBehavior {
        tag,
        method: SeriesMethod::PartialSumHeuristic,
        r_exponent: slope,
        log_exponent: 0.0,
        warning: Some(format!(
            "non-rigorous: dyadic block sums to r = {horizon}, mean tail ratio {mean_ratio:.4}, log-log slope {slope:.4}"
        )),
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(invalid!("m and n must be positive, got m={m}, n={n}"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureClass {
    Zero,
    FullLebesgue,
    InfiniteHf,
    HfOfGamma,
    Singleton,
}

impl MeasureClass {
    pub fn label(&self) -> &'static str {
        match self {
            MeasureClass::Zero => "Zero",
            MeasureClass::FullLebesgue => "Full-Lebesgue",
            MeasureClass::InfiniteHf => "Infinite-Hf",
            MeasureClass::HfOfGamma => "Hf-of-Gamma",
            MeasureClass::Singleton => "Singleton",
        }
    }
}

/// Which case of the measure theorems produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictCase {
    /// `m = 1`: the only approximable point is the origin.
    SingletonRemark,
    /// `m > n`, convergent sum: measure zero.
    AmbientConvergence,
    /// `m > n`, divergent sum: measure `H^f(I^{mn})`, split by the limit of
    /// `r^{−mn}f(r)`.
    AmbientDivergence,
    /// `m ≤ n`, convergent sum: measure zero.
    ManifoldConvergence,
    /// `m ≤ n`, divergent sum, `r^{−(m−1)(n+1)}f(r) → ∞`.
    ManifoldDivergenceInfinite,
    /// `m ≤ n`, divergent sum, `r^{−(m−1)(n+1)}f(r) → C > 0`.
    ManifoldDivergenceFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Justification {
    pub case: VerdictCase,
    pub series: Option<SeriesBehavior>,
    pub side_conditions: Vec<SideCondition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub class: MeasureClass,
    pub justification: Justification,
}

fn side(name: &str, holds: bool) -> SideCondition {
    SideCondition { name: name.to_string(), holds }
}

/// The f-measure class of the set of ψ-approximable points.
pub fn verdict(m: usize, n: usize, f: &DimensionFunction, psi: &ApproximatingFunction) -> Result<Verdict> {
    check_dims(m, n)?;
    f.validate()?;
    psi.validate()?;
    if m == 1 {
        return Ok(Verdict {
            class: MeasureClass::Singleton,
            justification: Justification { case: VerdictCase::SingletonRemark, series: None, side_conditions: vec![] },
        });
    }
    let gamma = ((m - 1) * n) as f64;
    let (outer, outer_name) = if m > n {
        ((m * n) as f64, format!("r^-{} f(r) monotonic", m * n))
    } else {
        (((m - 1) * (n + 1)) as f64, format!("r^-{} f(r) monotonic", (m - 1) * (n + 1)))
    };
    let conditions = vec![
        side(&outer_name, f.scaled(outer).monotonic()),
        side(&format!("r^-{} f(r) increasing", (m - 1) * n), f.scaled(gamma).increasing()),
    ];
    if let Some(bad) = conditions.iter().find(|c| !c.holds) {
        return Err(Error::PreconditionNotMet(format!("{} fails for f = {f}", bad.name)));
    }
    let series = classify_series(m, n, f, psi)?;
    let limit = f.scaled(outer).limit_at_zero();
    let (class, case) = match (m > n, series.tag) {
        (true, SeriesTag::Convergent) => (MeasureClass::Zero, VerdictCase::AmbientConvergence),
        (false, SeriesTag::Convergent) => (MeasureClass::Zero, VerdictCase::ManifoldConvergence),
        (true, SeriesTag::Divergent) => {
            let class = match limit {
                LimitAtZero::Infinite => MeasureClass::InfiniteHf,
                LimitAtZero::Constant => MeasureClass::FullLebesgue,
                // H^f of the cube vanishes when f(r) = o(r^{mn}).
                LimitAtZero::Zero => MeasureClass::Zero,
            };
            (class, VerdictCase::AmbientDivergence)
        }
        (false, SeriesTag::Divergent) => match limit {
            LimitAtZero::Infinite => (MeasureClass::InfiniteHf, VerdictCase::ManifoldDivergenceInfinite),
            LimitAtZero::Constant => (MeasureClass::HfOfGamma, VerdictCase::ManifoldDivergenceFinite),
            LimitAtZero::Zero => {
                return Err(Error::PreconditionNotMet(format!(
                    "divergent sum with r^-{} f(r) -> 0 is not covered by the m <= n dichotomy",
                    (m - 1) * (n + 1)
                )))
            }
        },
    };
    let mut conditions = conditions;
    conditions.push(side(
        &format!("limit of r^-{} f(r) at 0: {:?}", outer as usize, limit),
        true,
    ));
    Ok(Verdict { class, justification: Justification { case, series: Some(series), side_conditions: conditions } })
}

/// Hausdorff dimension of the set of `r^{−τ}`-approximable points.
///
/// `m > n`: `(m−1)n + m/(τ+1)` for `τ > m/n − 1`, else `mn`.
/// `m ≤ n`: `(m−1)n + m/(τ+1)` for `τ > 1/(m−1)`, else `(m−1)(n+1)`.
/// `m = 1`: 0.
pub fn dimension_formula(m: usize, n: usize, tau: f64) -> Result<f64> {
    check_dims(m, n)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid!("tau must be positive and finite, got {tau}"));
    }
    if m == 1 {
        return Ok(0.0);
    }
    let (mf, nf) = (m as f64, n as f64);
    let generic = (mf - 1.0) * nf + mf / (tau + 1.0);
    Ok(if m > n {
        if tau > mf / nf - 1.0 {
            generic
        } else {
            mf * nf
        }
    } else if tau > mf / (mf - 1.0) - 1.0 {
        generic
    } else {
        (mf - 1.0) * (nf + 1.0)
    })
}

/// Closest fraction `p/q` with `q ≤ max_den` when it matches `x` to 1e-9.
pub fn as_fraction(x: f64, max_den: u64) -> Option<(i64, u64)> {
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((p / q as f64 - x).abs() < 1e-9).then_some((p as i64, q))
    })
}

/// Breakpoints and step function produced by [`build_omega`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaConstruction {
    /// `r_0 = 1 < r_1 < …`; block i is `r_{i−1} ≤ r ≤ r_i`.
    pub breakpoints: Vec<u64>,
    /// Criterion sum over each closed block; each exceeds 1.
    pub block_sums: Vec<f64>,
    pub omega: Omega,
    /// `Σ term·ω^{−n}` over `1 ≤ r ≤ r_last`.
    pub modified_sum: f64,
    /// `½ Σ_{i ≤ blocks} 1/i`, a lower bound the modified sum must exceed.
    pub harmonic_bound: f64,
}

/// Step function `ω(r) = i^{1/n}` on blocks with `r_i > 2r_{i−1}` and
/// closed-block sums of the divergent criterion series exceeding 1.
pub fn build_omega(
    m: usize,
    n: usize,
    f: &DimensionFunction,
    psi: &ApproximatingFunction,
    horizon: u64,
) -> Result<OmegaConstruction> {
    let behavior = classify_series(m, n, f, psi)?;
    if behavior.tag == SeriesTag::Convergent {
        return Err(invalid!("build_omega needs a divergent criterion series"));
    }
    let term = |r: u64| criterion_term(m, n, f, psi, r as f64);
    let mut breakpoints = vec![1u64];
    let mut block_sums = Vec::new();
    let mut start = 1u64;
    let mut acc = 0.0;
    let mut r = 1u64;
    while r <= horizon {
        acc += term(r);
        if r > 2 * start && acc > 1.0 {
            breakpoints.push(r);
            block_sums.push(acc);
            start = r;
            // Blocks are closed, so the endpoint opens the next block too.
            acc = term(r);
        }
        r += 1;
    }
    if block_sums.len() < 2 {
        return Err(Error::HorizonTooSmall(format!(
            "only {} complete block(s) below horizon {horizon}",
            block_sums.len()
        )));
    }
    let omega = Omega::Step { breakpoints: breakpoints.iter().map(|&b| b as f64).collect(), n: n as u32 };
    let last = *breakpoints.last().unwrap();
    let modified_sum: f64 = (1..=last).map(|r| term(r) * omega.eval(r as f64).powi(-(n as i32))).sum();
    let harmonic_bound = 0.5 * (1..=block_sums.len()).map(|i| 1.0 / i as f64).sum::<f64>();
    if !(modified_sum > harmonic_bound) {
        return Err(Error::TheoremViolation(format!(
            "modified sum {modified_sum} does not exceed the harmonic bound {harmonic_bound}"
        )));
    }
    Ok(OmegaConstruction { breakpoints, block_sums, omega, modified_sum, harmonic_bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumEquivalence {
    pub equivalent: bool,
    /// `max(ρ, 1/ρ)` over the horizon, ρ the ratio of partial sums.
    pub observed_c: f64,
    /// Ratio at the last checkpoint over the ratio at the middle one.
    pub drift: f64,
    pub condensed_total: f64,
    pub direct_total: f64,
}

/// Largest tolerated drift of the partial-sum ratio between the middle and
/// the end of the horizon.
pub const EQUIVALENCE_DRIFT: f64 = 1.5;

/// Compares `A_T = Σ_{t ≤ T} k^{tα} f(ψ(k^t)) ψ(k^t)^β` with
/// `B_R = Σ_{r ≤ R} r^{α−1} f(ψ(r)) ψ(r)^β` along `R = ⌊k^T⌋ ≤ horizon`.
/// The two are equivalent when their ratio settles in a bounded band.
pub fn sum_equivalence_check(
    alpha: f64,
    beta: f64,
    psi: &ApproximatingFunction,
    f: &DimensionFunction,
    k: f64,
    horizon: u64,
) -> Result<SumEquivalence> {
    psi.validate()?;
    f.validate()?;
    if !(k > 1.0) {
        return Err(invalid!("k must exceed 1, got {k}"));
    }
    let g = |r: f64| {
        let p = psi.eval(r);
        f.eval(p) * p.powf(beta)
    };
    let t_max = ((horizon as f64).ln() / k.ln()).floor() as u32;
    if t_max < 4 {
        return Err(Error::HorizonTooSmall(format!("horizon {horizon} gives fewer than 4 powers of {k}")));
    }
    let mut a = 0.0;
    let mut b = 0.0;
    let mut r_done = 0u64;
    let mut ratios = Vec::with_capacity(t_max as usize);
    for t in 1..=t_max {
        let kt = k.powi(t as i32);
        a += kt.powf(alpha) * g(kt);
        let r_to = kt.floor() as u64;
        while r_done < r_to {
            r_done += 1;
            let r = r_done as f64;
            b += r.powf(alpha - 1.0) * g(r);
        }
        ratios.push(a / b);
    }
    let observed_c = ratios.iter().map(|&x| x.max(1.0 / x)).fold(1.0, f64::max);
    let drift = ratios[ratios.len() - 1] / ratios[ratios.len() / 2 - 1];
    let equivalent = observed_c.is_finite() && drift <= EQUIVALENCE_DRIFT && drift >= 1.0 / EQUIVALENCE_DRIFT;
    Ok(SumEquivalence { equivalent, observed_c, drift, condensed_total: a, direct_total: b })
}
